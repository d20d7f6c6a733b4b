//! A compact conflict-driven clause-learning solver.
//!
//! Two watched literals with blockers, first-UIP learning with recursive
//! minimization, VSIDS on a binary heap, phase saving, Luby restarts and
//! LBD-based deletion of learnt clauses.

use std::time::Instant;

use super::{Cnf, Model, SolverStats, Status};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct L(u32);

impl L {
    fn from_dimacs(d: i32) -> L {
        L(2 * (d.unsigned_abs() - 1) + u32::from(d < 0))
    }
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    fn neg(self) -> L {
        L(self.0 ^ 1)
    }
    fn sign(self) -> bool {
        self.0 & 1 == 1
    }
    fn idx(self) -> usize {
        self.0 as usize
    }
}

const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;

struct ClauseData {
    lits: Vec<L>,
    learnt: bool,
    lbd: u32,
    activity: f32,
    deleted: bool,
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: L,
}

struct Heap {
    heap: Vec<u32>,
    index: Vec<i32>,
}

impl Heap {
    fn new(n: usize) -> Heap {
        let mut h = Heap { heap: Vec::with_capacity(n), index: vec![-1; n] };
        for v in 0..n {
            h.index[v] = v as i32;
            h.heap.push(v as u32);
        }
        h
    }

    fn contains(&self, v: usize) -> bool {
        self.index[v] >= 0
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p] as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.index[self.heap[i] as usize] = i as i32;
            i = p;
        }
        self.heap[i] = v;
        self.index[v as usize] = i as i32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r] as usize] > act[self.heap[l] as usize] { r } else { l };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.index[self.heap[i] as usize] = i as i32;
            i = c;
        }
        self.heap[i] = v;
        self.index[v as usize] = i as i32;
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.index[v] = self.heap.len() as i32;
        self.heap.push(v as u32);
        self.up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()? as usize;
        let last = self.heap.pop().expect("non-empty");
        self.index[top] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.index[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

pub struct Solver {
    nvars: usize,
    clauses: Vec<ClauseData>,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<L>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    heap: Heap,
    phase: Vec<bool>,
    seen: Vec<u8>,
    ok: bool,
    learnts: Vec<u32>,
    stats: SolverStats,
}

impl Solver {
    pub fn new(cnf: &Cnf) -> Solver {
        let n = cnf.num_vars as usize;
        let mut s = Solver {
            nvars: n,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: Heap::new(n),
            phase: vec![false; n],
            seen: vec![0; n],
            ok: true,
            learnts: Vec::new(),
            stats: SolverStats::default(),
        };
        for c in &cnf.clauses {
            if !s.add_clause(c) {
                break;
            }
        }
        s
    }

    fn value(&self, l: L) -> u8 {
        let a = self.assigns[l.var()];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ u8::from(l.sign())
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: L, reason: u32) {
        let v = l.var();
        self.assigns[v] = u8::from(!l.sign());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn add_clause(&mut self, dimacs: &[i32]) -> bool {
        if !self.ok {
            return false;
        }
        let mut lits: Vec<L> = dimacs.iter().map(|&d| L::from_dimacs(d)).collect();
        lits.sort_unstable_by_key(|l| l.0);
        lits.dedup();
        let mut out = Vec::with_capacity(lits.len());
        for (i, &l) in lits.iter().enumerate() {
            if i + 1 < lits.len() && lits[i + 1] == l.neg() {
                return true;
            }
            match self.value(l) {
                1 => return true,
                0 => {}
                _ => out.push(l),
            }
        }
        match out.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(out[0], NO_REASON);
                self.ok = self.propagate() == NO_REASON;
                self.ok
            }
            _ => {
                self.attach(out, false, 0);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<L>, learnt: bool, lbd: u32) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0].neg().idx()].push(Watch { cref, blocker: lits[1] });
        self.watches[lits[1].neg().idx()].push(Watch { cref, blocker: lits[0] });
        self.clauses.push(ClauseData { lits, learnt, lbd, activity: 0.0, deleted: false });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    /// Returns the conflicting clause or `NO_REASON`.
    fn propagate(&mut self) -> u32 {
        let mut conflict = NO_REASON;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p.neg();
            let mut ws = std::mem::take(&mut self.watches[p.idx()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                let nw = Watch { cref: w.cref, blocker: first };
                if first != w.blocker && self.value(first) == 1 {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut found = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != 0 {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l.neg().idx()].push(nw);
                        found = true;
                        break;
                    }
                }
                if found {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.value(first) == 0 {
                    conflict = w.cref;
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            let appended = std::mem::take(&mut self.watches[p.idx()]);
            ws.extend(appended);
            self.watches[p.idx()] = ws;
            if conflict != NO_REASON {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        if self.heap.contains(v) {
            self.heap.up(self.heap.index[v] as usize, &self.activity);
        }
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &r in &self.learnts {
                self.clauses[r as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn abstract_level(&self, v: usize) -> u32 {
        1 << (self.level[v] & 31)
    }

    fn analyze(&mut self, mut confl: u32) -> (Vec<L>, u32) {
        let mut learnt = vec![L(0)];
        let mut path = 0;
        let mut p: Option<L> = None;
        let mut index = self.trail.len();
        loop {
            let cref = confl as usize;
            if self.clauses[cref].learnt {
                self.bump_clause(cref);
            }
            let start = usize::from(p.is_some());
            for k in start..self.clauses[cref].lits.len() {
                let q = self.clauses[cref].lits[k];
                let v = q.var();
                if self.seen[v] == 0 && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = 1;
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] != 0 {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            confl = self.reason[lit.var()];
            self.seen[lit.var()] = 0;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = p.expect("conflict has a UIP").neg();

        let mut to_clear: Vec<L> = learnt.clone();
        let abstract_levels = learnt[1..].iter().fold(0u32, |acc, l| acc | self.abstract_level(l.var()));
        let mut kept = vec![learnt[0]];
        for &l in &learnt[1..] {
            if self.reason[l.var()] == NO_REASON || !self.redundant(l, abstract_levels, &mut to_clear) {
                kept.push(l);
            }
        }
        for l in to_clear {
            self.seen[l.var()] = 0;
        }
        let mut learnt = kept;
        let bt = if learnt.len() == 1 {
            0
        } else {
            let max_i = (1..learnt.len()).max_by_key(|&k| self.level[learnt[k].var()]).expect("len > 1");
            learnt.swap(1, max_i);
            self.level[learnt[1].var()]
        };
        (learnt, bt)
    }

    fn redundant(&mut self, p: L, abstract_levels: u32, to_clear: &mut Vec<L>) -> bool {
        let mut stack = vec![p];
        let top = to_clear.len();
        while let Some(q) = stack.pop() {
            let cref = self.reason[q.var()] as usize;
            for k in 1..self.clauses[cref].lits.len() {
                let l = self.clauses[cref].lits[k];
                let v = l.var();
                if self.seen[v] == 0 && self.level[v] > 0 {
                    if self.reason[v] != NO_REASON && self.abstract_level(v) & abstract_levels != 0 {
                        self.seen[v] = 1;
                        stack.push(l);
                        to_clear.push(l);
                    } else {
                        for l in to_clear.drain(top..) {
                            self.seen[l.var()] = 0;
                        }
                        return false;
                    }
                }
            }
        }
        true
    }

    fn lbd(&self, lits: &[L]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var()]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var();
            self.phase[v] = !l.sign();
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn locked(&self, cref: u32) -> bool {
        let c = &self.clauses[cref as usize];
        let v = c.lits[0].var();
        self.reason[v] == cref && self.value(c.lits[0]) == 1
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<u32> = self
            .learnts
            .iter()
            .copied()
            .filter(|&r| {
                let c = &self.clauses[r as usize];
                !c.deleted && c.lbd > 2 && c.lits.len() > 2
            })
            .collect();
        cands.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd.cmp(&ca.lbd).then(ca.activity.total_cmp(&cb.activity))
        });
        let remove = cands.len() / 2;
        for &r in &cands[..remove] {
            if !self.locked(r) {
                let c = &mut self.clauses[r as usize];
                c.deleted = true;
                c.lits = Vec::new();
                self.stats.deleted += 1;
            }
        }
        self.learnts.retain(|&r| !self.clauses[r as usize].deleted);
        for ws in &mut self.watches {
            ws.retain(|w| !self.clauses[w.cref as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<L> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(L(2 * v as u32 + u32::from(!self.phase[v])));
            }
        }
        None
    }

    pub fn solve(&mut self, deadline: Option<Instant>) -> (Status, Option<Model>, SolverStats) {
        let start = Instant::now();
        let status = self.search(deadline);
        self.stats.seconds = start.elapsed().as_secs_f64();
        let model = (status == Status::Sat).then(|| {
            Model((0..self.nvars).map(|v| self.assigns[v] == 1).collect())
        });
        (status, model, self.stats.clone())
    }

    fn search(&mut self, deadline: Option<Instant>) -> Status {
        if !self.ok || self.propagate() != NO_REASON {
            return Status::Unsat;
        }
        let mut restart_index = 0u32;
        let mut next_reduce = 2000u64;
        loop {
            let budget = luby(restart_index) * 100;
            restart_index += 1;
            let mut conflicts_here = 0u64;
            loop {
                let confl = self.propagate();
                if confl != NO_REASON {
                    self.stats.conflicts += 1;
                    conflicts_here += 1;
                    if self.decision_level() == 0 {
                        return Status::Unsat;
                    }
                    let (learnt, bt) = self.analyze(confl);
                    self.cancel_until(bt);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], NO_REASON);
                    } else {
                        let lbd = self.lbd(&learnt);
                        let first = learnt[0];
                        let cref = self.attach(learnt, true, lbd);
                        self.bump_clause(cref as usize);
                        self.enqueue(first, cref);
                    }
                    self.var_inc /= 0.95;
                    self.cla_inc /= 0.999;
                    if self.stats.conflicts % 256 == 0 {
                        if let Some(d) = deadline {
                            if Instant::now() >= d {
                                return Status::Unknown;
                            }
                        }
                    }
                } else {
                    if conflicts_here >= budget {
                        self.stats.restarts += 1;
                        self.cancel_until(0);
                        break;
                    }
                    if self.stats.conflicts >= next_reduce && self.decision_level() > 0 {
                        next_reduce = self.stats.conflicts + 2000 + 300 * self.stats.reductions;
                        self.stats.reductions += 1;
                        self.reduce_db();
                    }
                    match self.pick_branch() {
                        None => return Status::Sat,
                        Some(l) => {
                            self.stats.decisions += 1;
                            self.trail_lim.push(self.trail.len());
                            self.enqueue(l, NO_REASON);
                        }
                    }
                }
            }
        }
    }
}

/// The Luby restart sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(mut i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < u64::from(i) + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = 1u64;
    while size - 1 != u64::from(i) {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size as u32;
    }
    while seq > 0 {
        x *= 2;
        seq -= 1;
    }
    x
}
