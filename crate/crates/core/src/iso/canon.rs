//! Canonical labeling of vertex-colored graphs by individualization and
//! refinement.
//!
//! Refinement is the usual equitable-partition procedure driven by a queue
//! of splitter cells; the search tree individualizes vertices of the first
//! smallest non-singleton cell. The canonical leaf is the one with the
//! lexicographically smallest permuted adjacency matrix. Automorphisms are
//! detected when two leaves produce the same matrix and are used for orbit
//! pruning and for jumping back to the first-path ancestor. The group order
//! is the product of first-path orbit lengths in the point-stabilizer chain.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::One;

/// An undirected simple graph with a vertex coloring.
#[derive(Clone, Debug)]
pub struct ColoredGraph {
    adj: Vec<Vec<u32>>,
    colors: Vec<u32>,
}

impl ColoredGraph {
    pub fn new(colors: Vec<u32>) -> ColoredGraph {
        ColoredGraph { adj: vec![Vec::new(); colors.len()], colors }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        self.adj[u].push(v as u32);
        self.adj[v].push(u as u32);
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&(v as u32))
    }
}

/// Output of [`canonical_labeling`].
#[derive(Clone, Debug)]
pub struct Labeling {
    /// `position[v]` is the canonical position of vertex `v`.
    pub position: Vec<u32>,
    /// Packed upper triangle of the adjacency matrix in canonical order.
    pub certificate: Vec<u8>,
    /// Generators of the automorphism group, as vertex permutations.
    pub generators: Vec<Vec<u32>>,
    pub group_order: BigUint,
    /// Smallest vertex of each vertex's orbit.
    pub orbit_rep: Vec<u32>,
}

#[derive(Clone)]
struct Partition {
    lab: Vec<u32>,
    pos: Vec<u32>,
    cell_of: Vec<u32>,
    /// `end[start]` is the exclusive end of the cell starting at `start`.
    end: Vec<u32>,
    cells: usize,
}

impl Partition {
    fn from_colors(colors: &[u32]) -> (Partition, Vec<u32>) {
        let n = colors.len();
        let mut lab: Vec<u32> = (0..n as u32).collect();
        lab.sort_by_key(|&v| (colors[v as usize], v));
        let mut pos = vec![0; n];
        let mut cell_of = vec![0; n];
        let mut end = vec![0; n];
        let mut starts = Vec::new();
        let mut start = 0;
        for i in 0..n {
            pos[lab[i] as usize] = i as u32;
            if i > 0 && colors[lab[i] as usize] != colors[lab[i - 1] as usize] {
                end[start] = i as u32;
                starts.push(start as u32);
                start = i;
            }
            cell_of[lab[i] as usize] = start as u32;
        }
        if n > 0 {
            end[start] = n as u32;
            starts.push(start as u32);
        }
        let cells = starts.len();
        (Partition { lab, pos, cell_of, end, cells }, starts)
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    fn target_cell(&self) -> usize {
        let mut best = usize::MAX;
        let mut best_size = usize::MAX;
        let mut i = 0;
        while i < self.lab.len() {
            let size = (self.end[i] as usize) - i;
            if size > 1 && size < best_size {
                best = i;
                best_size = size;
            }
            i = self.end[i] as usize;
        }
        best
    }

    fn individualize(&mut self, v: u32) -> u32 {
        let start = self.cell_of[v as usize] as usize;
        let end = self.end[start];
        let p = self.pos[v as usize] as usize;
        let w = self.lab[start];
        self.lab.swap(start, p);
        self.pos[w as usize] = p as u32;
        self.pos[v as usize] = start as u32;
        self.end[start] = start as u32 + 1;
        self.end[start + 1] = end;
        for i in start + 1..end as usize {
            self.cell_of[self.lab[i] as usize] = start as u32 + 1;
        }
        self.cells += 1;
        start as u32
    }

    fn refine(&mut self, g: &ColoredGraph, initial: &[u32], scratch: &mut Scratch) {
        let n = self.lab.len();
        let mut queue: VecDeque<u32> = VecDeque::with_capacity(n);
        for &s in initial {
            queue.push_back(s);
            scratch.in_queue[s as usize] = true;
        }
        while let Some(w) = queue.pop_front() {
            scratch.in_queue[w as usize] = false;
            if self.is_discrete() {
                break;
            }
            let (ws, we) = (w as usize, self.end[w as usize] as usize);
            scratch.touched.clear();
            for i in ws..we {
                let u = self.lab[i] as usize;
                for &x in &g.adj[u] {
                    if scratch.count[x as usize] == 0 {
                        scratch.touched.push(x);
                    }
                    scratch.count[x as usize] += 1;
                }
            }
            scratch.cells.clear();
            for &x in &scratch.touched {
                scratch.cells.push(self.cell_of[x as usize]);
            }
            scratch.cells.sort_unstable();
            scratch.cells.dedup();
            for ci in 0..scratch.cells.len() {
                let c = scratch.cells[ci] as usize;
                let e = self.end[c] as usize;
                if e - c == 1 {
                    continue;
                }
                let count = &scratch.count;
                let first = count[self.lab[c] as usize];
                if self.lab[c..e].iter().all(|&v| count[v as usize] == first) {
                    continue;
                }
                self.lab[c..e].sort_unstable_by_key(|&v| count[v as usize]);
                let was_queued = scratch.in_queue[c];
                // Fragment boundaries.
                scratch.frags.clear();
                let mut s = c;
                for i in c + 1..=e {
                    if i == e || count[self.lab[i] as usize] != count[self.lab[s] as usize] {
                        scratch.frags.push((s as u32, i as u32));
                        s = i;
                    }
                }
                let mut largest = 0;
                for (k, &(a, b)) in scratch.frags.iter().enumerate() {
                    let (la, lb) = scratch.frags[largest];
                    if b - a > lb - la {
                        largest = k;
                    }
                    self.end[a as usize] = b;
                    for i in a..b {
                        let v = self.lab[i as usize] as usize;
                        self.cell_of[v] = a;
                        self.pos[v] = i;
                    }
                }
                self.cells += scratch.frags.len() - 1;
                for (k, &(a, _)) in scratch.frags.iter().enumerate() {
                    if was_queued {
                        if !scratch.in_queue[a as usize] {
                            scratch.in_queue[a as usize] = true;
                            queue.push_back(a);
                        }
                    } else if k != largest {
                        scratch.in_queue[a as usize] = true;
                        queue.push_back(a);
                    }
                }
            }
            for &x in &scratch.touched {
                scratch.count[x as usize] = 0;
            }
        }
        for s in queue {
            scratch.in_queue[s as usize] = false;
        }
    }
}

struct Scratch {
    count: Vec<u32>,
    in_queue: Vec<bool>,
    touched: Vec<u32>,
    cells: Vec<u32>,
    frags: Vec<(u32, u32)>,
}

struct Leaf {
    lab: Vec<u32>,
    cert: Vec<u8>,
    path: Vec<u32>,
}

struct Search<'g> {
    g: &'g ColoredGraph,
    scratch: Scratch,
    first: Option<Leaf>,
    best_lab: Vec<u32>,
    best_cert: Vec<u8>,
    generators: Vec<Vec<u32>>,
}

fn certificate(g: &ColoredGraph, lab: &[u32], pos: &[u32]) -> Vec<u8> {
    let n = lab.len();
    let bits = n * n.saturating_sub(1) / 2;
    let mut out = vec![0u8; bits.div_ceil(8)];
    // Row-major upper triangle: pair (i, j), i < j, at offset i*n - i(i+1)/2 + (j - i - 1).
    for (i, &v) in lab.iter().enumerate() {
        let row = i * n - i * (i + 1) / 2;
        for &u in &g.adj[v as usize] {
            let j = pos[u as usize] as usize;
            if j > i {
                let k = row + j - i - 1;
                out[k / 8] |= 0x80 >> (k % 8);
            }
        }
    }
    out
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind((0..n as u32).collect())
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut r = x;
        while self.0[r as usize] != r {
            r = self.0[r as usize];
        }
        let mut y = x;
        while self.0[y as usize] != r {
            let next = self.0[y as usize];
            self.0[y as usize] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi as usize] = lo;
        }
    }
}

/// Orbits of the group generated by those generators fixing `fixed` pointwise.
fn stabilizer_orbits(n: usize, generators: &[Vec<u32>], fixed: &[u32]) -> UnionFind {
    let mut uf = UnionFind::new(n);
    for g in generators {
        if fixed.iter().all(|&v| g[v as usize] == v) {
            for (x, &y) in g.iter().enumerate() {
                uf.union(x as u32, y);
            }
        }
    }
    uf
}

impl Search<'_> {
    fn leaf(&mut self, p: &Partition, path: &[u32]) -> Option<usize> {
        let cert = certificate(self.g, &p.lab, &p.pos);
        let Some(first) = &self.first else {
            self.best_lab = p.lab.clone();
            self.best_cert = cert.clone();
            self.first = Some(Leaf { lab: p.lab.clone(), cert, path: path.to_vec() });
            return None;
        };
        if cert == first.cert {
            let perm = leaf_map(&first.lab, &p.lab);
            let diverge = first.path.iter().zip(path).position(|(a, b)| a != b).unwrap_or(path.len());
            self.add_generator(perm);
            return Some(diverge);
        }
        match cert.cmp(&self.best_cert) {
            std::cmp::Ordering::Equal => {
                let perm = leaf_map(&self.best_lab, &p.lab);
                self.add_generator(perm);
            }
            std::cmp::Ordering::Less => {
                self.best_cert = cert;
                self.best_lab = p.lab.clone();
            }
            std::cmp::Ordering::Greater => {}
        }
        None
    }

    fn add_generator(&mut self, perm: Vec<u32>) {
        if perm.iter().enumerate().any(|(i, &j)| i as u32 != j) && !self.generators.contains(&perm) {
            self.generators.push(perm);
        }
    }

    fn search(&mut self, p: &Partition, path: &mut Vec<u32>) -> Option<usize> {
        if p.is_discrete() {
            return self.leaf(p, path);
        }
        let level = path.len();
        let c = p.target_cell();
        let mut cell: Vec<u32> = p.lab[c..p.end[c] as usize].to_vec();
        cell.sort_unstable();
        let mut explored: Vec<u32> = Vec::new();
        for v in cell {
            if !explored.is_empty() {
                let mut uf = stabilizer_orbits(self.g.len(), &self.generators, path);
                let rv = uf.find(v);
                if explored.iter().any(|&e| uf.find(e) == rv) {
                    continue;
                }
            }
            explored.push(v);
            let mut child = p.clone();
            let s = child.individualize(v);
            child.refine(self.g, &[s], &mut self.scratch);
            path.push(v);
            let jump = self.search(&child, path);
            path.pop();
            if let Some(l) = jump {
                if l < level {
                    return Some(l);
                }
            }
        }
        None
    }
}

/// The permutation sending the vertex at each position of `from` to the
/// vertex at the same position of `to`.
fn leaf_map(from: &[u32], to: &[u32]) -> Vec<u32> {
    let mut perm = vec![0; from.len()];
    for (&a, &b) in from.iter().zip(to) {
        perm[a as usize] = b;
    }
    perm
}

/// Computes a canonical labeling together with the automorphism group.
pub fn canonical_labeling(g: &ColoredGraph) -> Labeling {
    let n = g.len();
    let mut scratch = Scratch {
        count: vec![0; n],
        in_queue: vec![false; n],
        touched: Vec::new(),
        cells: Vec::new(),
        frags: Vec::new(),
    };
    let (mut root, starts) = Partition::from_colors(&g.colors);
    root.refine(g, &starts, &mut scratch);
    let mut search = Search {
        g,
        scratch,
        first: None,
        best_lab: Vec::new(),
        best_cert: Vec::new(),
        generators: Vec::new(),
    };
    let mut path = Vec::new();
    search.search(&root, &mut path);

    let first_path = search.first.as_ref().map(|l| l.path.clone()).unwrap_or_default();
    let mut group_order = BigUint::one();
    for k in 0..first_path.len() {
        let mut uf = stabilizer_orbits(n, &search.generators, &first_path[..k]);
        let r = uf.find(first_path[k]);
        let size = (0..n as u32).filter(|&x| uf.find(x) == r).count();
        group_order *= BigUint::from(size);
    }
    let mut uf = stabilizer_orbits(n, &search.generators, &[]);
    let orbit_rep = (0..n as u32).map(|x| uf.find(x)).collect();
    let mut position = vec![0; n];
    for (i, &v) in search.best_lab.iter().enumerate() {
        position[v as usize] = i as u32;
    }
    Labeling {
        position,
        certificate: search.best_cert,
        generators: search.generators,
        group_order,
        orbit_rep,
    }
}

/// Adjacency certificate of the graph relabeled by `position`.
pub fn certificate_for(g: &ColoredGraph, position: &[u32]) -> Vec<u8> {
    let mut lab = vec![0; position.len()];
    for (v, &p) in position.iter().enumerate() {
        lab[p as usize] = v as u32;
    }
    certificate(g, &lab, position)
}
