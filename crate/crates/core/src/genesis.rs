//! Isomorph-free generation of unsatisfiable hitting formulas.
//!
//! Formulas grow one clause at a time in nondecreasing clause size, so the
//! newest clause is always a largest one. Isomorph rejection is by
//! canonical augmentation: children are formed from one candidate clause
//! per orbit of the parent's automorphism group, and a child is kept only
//! if its new clause lies in the same automorphism orbit as the clause
//! the child would delete canonically.
//!
//! Clauses are held as `(pos, neg)` bitmasks over variables `0..n`.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cnf::{Clause, Formula, Var};
use crate::error::{Error, Result};
use crate::factor;
use crate::hitting;
use crate::iso::{self, canon, CanonicalKey, ClauseLiteralGraph};

pub type Mask = (u64, u64);

/// Largest variable count the generator accepts.
pub const MAX_VARS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum FormulaClass {
    /// Unsatisfiable hitting.
    Uh,
    /// Regular unsatisfiable hitting.
    Ruh,
    /// Irreducible (and regular) unsatisfiable hitting.
    Iuh,
}

impl std::str::FromStr for FormulaClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<FormulaClass> {
        match s.to_ascii_lowercase().as_str() {
            "uh" => Ok(FormulaClass::Uh),
            "ruh" => Ok(FormulaClass::Ruh),
            "iuh" => Ok(FormulaClass::Iuh),
            other => Err(Error::Parse { line: 0, msg: format!("unknown class {other:?}") }),
        }
    }
}

impl std::fmt::Display for FormulaClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FormulaClass::Uh => "uh",
            FormulaClass::Ruh => "ruh",
            FormulaClass::Iuh => "iuh",
        })
    }
}

/// How duplicates are avoided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Canonical augmentation with automorphism-orbit reduction.
    CanonicalAugmentation,
    /// Level-by-level expansion of every candidate with deduplication by
    /// canonical key. Slower; used as a cross-check.
    KeyDedup,
}

/// Which prune rules are active. The hitting rule is always on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneConfig {
    /// Model-count bounds (too many models for the remaining clauses to
    /// cover, or fewer models than remaining clauses).
    pub counting: bool,
    /// Factor rule, only consulted for IUH tasks.
    pub factors: bool,
    /// Remaining clauses must be able to supply every variable with the
    /// occurrences it still lacks.
    pub capacity: bool,
}

impl Default for PruneConfig {
    fn default() -> PruneConfig {
        PruneConfig { counting: true, factors: true, capacity: false }
    }
}

impl PruneConfig {
    /// Hitting rule only; leaves are filtered exhaustively instead.
    pub fn minimal() -> PruneConfig {
        PruneConfig { counting: false, factors: false, capacity: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationTask {
    pub n: usize,
    pub m: usize,
    pub class: FormulaClass,
    pub limits: Limits,
    pub prune: PruneConfig,
    pub strategy: Strategy,
}

impl GenerationTask {
    pub fn new(n: usize, m: usize, class: FormulaClass) -> GenerationTask {
        GenerationTask {
            n,
            m,
            class,
            limits: Limits::default(),
            prune: PruneConfig::default(),
            strategy: Strategy::CanonicalAugmentation,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Precondition("at least one clause is required".into()));
        }
        if self.n > MAX_VARS {
            return Err(Error::LimitExceeded { vars: self.n, limit: MAX_VARS });
        }
        Ok(())
    }
}

/// A formula under construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFormula {
    pub n: usize,
    pub clauses: Vec<Mask>,
    /// Number of models over all `n` variables, valid while hitting.
    pub models: i128,
}

fn size(c: Mask) -> usize {
    (c.0 | c.1).count_ones() as usize
}

fn clashes(a: Mask, b: Mask) -> bool {
    (a.0 & b.1) | (a.1 & b.0) != 0
}

impl PartialFormula {
    pub fn empty(n: usize) -> PartialFormula {
        PartialFormula { n, clauses: Vec::new(), models: 1i128 << n }
    }

    pub fn with_clause(&self, c: Mask) -> PartialFormula {
        let mut clauses = self.clauses.clone();
        clauses.push(c);
        PartialFormula { n: self.n, clauses, models: self.models - (1i128 << (self.n - size(c))) }
    }

    /// Builds a node from clauses in the given order.
    pub fn from_clauses(n: usize, clauses: &[Clause]) -> Result<PartialFormula> {
        let vars: Vec<Var> = (1..=n as u32).map(Var::new).collect();
        let mut node = PartialFormula::empty(n);
        for c in clauses {
            if c.vars().any(|v| v.index() >= n) {
                return Err(Error::Precondition(format!("clause {c} uses a variable beyond {n}")));
            }
            node = node.with_clause(crate::cnf::clause_masks(c, &vars));
        }
        Ok(node)
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn last_size(&self) -> usize {
        self.clauses.last().map_or(0, |&c| size(c))
    }

    pub fn used_vars(&self) -> u64 {
        self.clauses.iter().fold(0, |acc, c| acc | c.0 | c.1)
    }

    pub fn to_formula(&self) -> Formula {
        masks_to_formula(self.n, &self.clauses)
    }
}

pub fn mask_to_clause(n: usize, c: Mask) -> Clause {
    Clause::new((0..n).filter_map(|v| {
        let var = Var::new(v as u32 + 1);
        if c.0 >> v & 1 == 1 {
            Some(var.lit(true))
        } else if c.1 >> v & 1 == 1 {
            Some(var.lit(false))
        } else {
            None
        }
    }))
    .expect("masks are disjoint")
}

pub fn masks_to_formula(n: usize, clauses: &[Mask]) -> Formula {
    Formula::new(clauses.iter().map(|&c| mask_to_clause(n, c)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruneReason {
    TooManyModels,
    TooFewModels,
    NotHitting,
    HasFactor,
    Capacity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PruneDecision {
    Keep,
    Prune(PruneReason),
}

/// Applies the prune rules to a node whose parent already passed them.
pub fn prune(node: &PartialFormula, task: &GenerationTask) -> PruneDecision {
    let m_cur = node.len();
    let remaining = task.m.saturating_sub(m_cur) as i128;
    if m_cur > task.m {
        return PruneDecision::Prune(PruneReason::TooFewModels);
    }
    if task.prune.counting {
        let cap = remaining << (node.n - node.last_size());
        if node.models > cap {
            return PruneDecision::Prune(PruneReason::TooManyModels);
        }
        if node.models < remaining {
            return PruneDecision::Prune(PruneReason::TooFewModels);
        }
    }
    if let Some((&last, rest)) = node.clauses.split_last() {
        if !rest.iter().all(|&d| clashes(d, last)) {
            return PruneDecision::Prune(PruneReason::NotHitting);
        }
    }
    if task.prune.factors && task.class == FormulaClass::Iuh && has_factor_with_last(node, task.m) {
        return PruneDecision::Prune(PruneReason::HasFactor);
    }
    if task.prune.capacity && !capacity_ok(node, task) {
        return PruneDecision::Prune(PruneReason::Capacity);
    }
    PruneDecision::Keep
}

/// Whether some subset containing the last clause is a non-trivial factor,
/// or the whole node is a factor while more clauses are still to come.
/// For hitting sets, `S` is a factor exactly when `Σ 2^-|D| = 2^-|∩S|`.
fn has_factor_with_last(node: &PartialFormula, m: usize) -> bool {
    let k = node.len();
    if k < 2 {
        return false;
    }
    let (&last, rest) = node.clauses.split_last().expect("non-empty");
    let n = node.n;
    let weight = |c: Mask| 1u128 << (n - size(c));
    // Depth-first over subsets of `rest`, carrying intersection and weight.
    fn walk(
        rest: &[Mask],
        i: usize,
        inter: Mask,
        sum: u128,
        count: usize,
        k: usize,
        whole_counts: bool,
        weight: &dyn Fn(Mask) -> u128,
    ) -> bool {
        if i == rest.len() {
            let full = count == k;
            return count >= 2 && (!full || whole_counts) && sum == weight(inter);
        }
        let c = rest[i];
        walk(rest, i + 1, (inter.0 & c.0, inter.1 & c.1), sum + weight(c), count + 1, k, whole_counts, weight)
            || walk(rest, i + 1, inter, sum, count, k, whole_counts, weight)
    }
    walk(rest, 0, last, weight(last), 1, k, k < m, &weight)
}

fn capacity_ok(node: &PartialFormula, task: &GenerationTask) -> bool {
    let need: usize = if task.class == FormulaClass::Uh { 1 } else { 2 };
    let remaining = task.m - node.len();
    (0..node.n).all(|v| {
        let pos = node.clauses.iter().filter(|c| c.0 >> v & 1 == 1).count();
        let neg = node.clauses.iter().filter(|c| c.1 >> v & 1 == 1).count();
        need.saturating_sub(pos) + need.saturating_sub(neg) <= remaining
    })
}

fn is_regular_masks(n: usize, clauses: &[Mask]) -> bool {
    (0..n).all(|v| {
        let pos = clauses.iter().filter(|c| c.0 >> v & 1 == 1).count();
        let neg = clauses.iter().filter(|c| c.1 >> v & 1 == 1).count();
        (pos == 0 && neg == 0) || (pos >= 2 && neg >= 2)
    })
}

/// Permutation of literal codes `2v + negated`.
type LitPerm = Vec<u8>;

fn apply_perm(p: &LitPerm, c: Mask) -> Mask {
    let mut out = (0u64, 0u64);
    for (bits, neg) in [(c.0, 0usize), (c.1, 1)] {
        let mut b = bits;
        while b != 0 {
            let v = b.trailing_zeros() as usize;
            b &= b - 1;
            let img = p[2 * v + neg] as usize;
            if img & 1 == 0 {
                out.0 |= 1 << (img / 2);
            } else {
                out.1 |= 1 << (img / 2);
            }
        }
    }
    out
}

/// Generators for all signed permutations of the variables in `free`.
fn hyperoctahedral_generators(n: usize, free: &[usize]) -> Vec<LitPerm> {
    let identity: LitPerm = (0..2 * n as u8).collect();
    let mut gens = Vec::new();
    if let Some(&first) = free.first() {
        let mut flip = identity.clone();
        flip.swap(2 * first, 2 * first + 1);
        gens.push(flip);
    }
    for w in free.windows(2) {
        let mut t = identity.clone();
        t.swap(2 * w[0], 2 * w[1]);
        t.swap(2 * w[0] + 1, 2 * w[1] + 1);
        gens.push(t);
    }
    gens
}

/// Canonical labeling of a node: the labeling of its clause-literal graph
/// and the automorphism group on all `n` variables.
struct NodeLabeling {
    labeling: canon::Labeling,
    used: Vec<usize>,
}

impl NodeLabeling {
    fn new(node: &PartialFormula) -> NodeLabeling {
        let (graph, used) = ClauseLiteralGraph::from_masks(node.n, &node.clauses);
        NodeLabeling { labeling: canon::canonical_labeling(&graph), used }
    }

    fn clause_vertex(&self, j: usize) -> usize {
        2 * self.used.len() + j
    }

    fn generators(&self, n: usize) -> Vec<LitPerm> {
        let k = self.used.len();
        let mut gens: Vec<LitPerm> = self
            .labeling
            .generators
            .iter()
            .map(|perm| {
                let mut p: LitPerm = (0..2 * n as u8).collect();
                for (i, &u) in self.used.iter().enumerate() {
                    let w = perm[2 * i] as usize;
                    debug_assert!(w < 2 * k && perm[2 * i + 1] as usize == w ^ 1);
                    let target = self.used[w / 2];
                    p[2 * u] = (2 * target + w % 2) as u8;
                    p[2 * u + 1] = (2 * target + 1 - w % 2) as u8;
                }
                p
            })
            .collect();
        let free: Vec<usize> = (0..n).filter(|v| !self.used.contains(v)).collect();
        gens.extend(hyperoctahedral_generators(n, &free));
        gens
    }
}

/// Every clause over `n` variables, ordered by size.
fn all_clauses(n: usize) -> Vec<Mask> {
    let mut out = Vec::with_capacity(3usize.pow(n as u32));
    for pos in 0u64..(1 << n) {
        let rest = !pos & ((1u64 << n) - 1);
        let mut neg = rest;
        loop {
            out.push((pos, neg));
            if neg == 0 {
                break;
            }
            neg = (neg - 1) & rest;
        }
    }
    out.sort_by_key(|&c| (size(c), c.0 | c.1, c.0));
    out
}

/// One representative per orbit of `candidates` under the group generated
/// by `gens`. The candidate set must be closed under the group.
fn orbit_representatives(candidates: &[Mask], gens: &[LitPerm]) -> Vec<Mask> {
    if gens.is_empty() {
        return candidates.to_vec();
    }
    let index: std::collections::HashMap<Mask, usize> =
        candidates.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut parent: Vec<usize> = (0..candidates.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for g in gens {
        for (i, &c) in candidates.iter().enumerate() {
            let j = index[&apply_perm(g, c)];
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..candidates.len()).filter(|&i| find(&mut parent, i) == i).map(|i| candidates[i]).collect()
}

/// Isomorphism-invariant signature of a clause inside a formula.
fn clause_signature(node: &PartialFormula, c: Mask) -> Vec<(u16, u16)> {
    let occ = |v: usize, negated: bool| -> u16 {
        node.clauses.iter().filter(|d| (if negated { d.1 } else { d.0 }) >> v & 1 == 1).count() as u16
    };
    let mut sig: Vec<(u16, u16)> = (0..node.n)
        .filter_map(|v| {
            if c.0 >> v & 1 == 1 {
                Some((occ(v, false), occ(v, true)))
            } else if c.1 >> v & 1 == 1 {
                Some((occ(v, true), occ(v, false)))
            } else {
                None
            }
        })
        .collect();
    sig.sort_unstable();
    sig
}

enum Acceptance {
    Rejected,
    Accepted(Option<NodeLabeling>),
}

/// Canonical-deletion test for the last clause of `child`.
fn accept(child: &PartialFormula) -> Acceptance {
    let k = child.len();
    let last = k - 1;
    let top = size(child.clauses[last]);
    let tied: Vec<usize> = (0..k).filter(|&j| size(child.clauses[j]) == top).collect();
    if tied.len() == 1 {
        return Acceptance::Accepted(None);
    }
    let sigs: Vec<Vec<(u16, u16)>> = tied.iter().map(|&j| clause_signature(child, child.clauses[j])).collect();
    let best = sigs.iter().max().expect("non-empty");
    if sigs.last() != Some(best) {
        return Acceptance::Rejected;
    }
    let finalists: Vec<usize> = tied.iter().zip(&sigs).filter(|(_, s)| *s == best).map(|(&j, _)| j).collect();
    if finalists.len() == 1 {
        return Acceptance::Accepted(None);
    }
    let nl = NodeLabeling::new(child);
    let l = &nl.labeling;
    let chosen = *finalists
        .iter()
        .min_by_key(|&&j| l.position[nl.clause_vertex(j)])
        .expect("non-empty");
    if l.orbit_rep[nl.clause_vertex(chosen)] == l.orbit_rep[nl.clause_vertex(last)] {
        Acceptance::Accepted(Some(nl))
    } else {
        Acceptance::Rejected
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeStats {
    pub nodes: u64,
    pub too_many_models: u64,
    pub too_few_models: u64,
    pub not_hitting: u64,
    pub has_factor: u64,
    pub capacity: u64,
    pub rejected_noncanonical: u64,
    pub leaves: u64,
    pub leaves_filtered: u64,
}

#[derive(Default)]
struct AtomicStats {
    nodes: AtomicU64,
    too_many_models: AtomicU64,
    too_few_models: AtomicU64,
    not_hitting: AtomicU64,
    has_factor: AtomicU64,
    capacity: AtomicU64,
    rejected_noncanonical: AtomicU64,
    leaves: AtomicU64,
    leaves_filtered: AtomicU64,
}

impl AtomicStats {
    fn record(&self, reason: PruneReason) {
        let c = match reason {
            PruneReason::TooManyModels => &self.too_many_models,
            PruneReason::TooFewModels => &self.too_few_models,
            PruneReason::NotHitting => &self.not_hitting,
            PruneReason::HasFactor => &self.has_factor,
            PruneReason::Capacity => &self.capacity,
        };
        c.fetch_add(1, Ordering::Relaxed);
    }

    fn snapshot(&self) -> NodeStats {
        let g = |a: &AtomicU64| a.load(Ordering::Relaxed);
        NodeStats {
            nodes: g(&self.nodes),
            too_many_models: g(&self.too_many_models),
            too_few_models: g(&self.too_few_models),
            not_hitting: g(&self.not_hitting),
            has_factor: g(&self.has_factor),
            capacity: g(&self.capacity),
            rejected_noncanonical: g(&self.rejected_noncanonical),
            leaves: g(&self.leaves),
            leaves_filtered: g(&self.leaves_filtered),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedFormula {
    pub key: CanonicalKey,
    /// Canonical representative over variables `1..=n`.
    pub formula: Formula,
}

#[derive(Clone, Debug)]
pub struct GenerationResult {
    pub task: GenerationTask,
    /// Sorted by key.
    pub formulas: Vec<GeneratedFormula>,
    pub stats: NodeStats,
    /// False when a budget stopped the search early.
    pub complete: bool,
    pub seconds: f64,
}

struct Search<'t> {
    task: &'t GenerationTask,
    clauses_by_size: Vec<Mask>,
    stats: AtomicStats,
    stop: AtomicBool,
    start: Instant,
    out: Mutex<Vec<GeneratedFormula>>,
}

impl Search<'_> {
    fn over_budget(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return true;
        }
        let limits = &self.task.limits;
        let nodes = self.stats.nodes.load(Ordering::Relaxed);
        let over = limits.max_nodes.is_some_and(|cap| nodes >= cap)
            || limits.max_seconds.is_some_and(|s| self.start.elapsed().as_secs_f64() > s);
        if over {
            self.stop.store(true, Ordering::Relaxed);
        }
        over
    }

    fn candidates(&self, node: &PartialFormula) -> Vec<Mask> {
        let last = node.last_size();
        self.clauses_by_size
            .iter()
            .copied()
            .filter(|&c| size(c) >= last && node.clauses.iter().all(|&d| clashes(c, d)))
            .collect()
    }

    fn leaf(&self, node: &PartialFormula) -> Result<()> {
        self.stats.leaves.fetch_add(1, Ordering::Relaxed);
        if !self.leaf_ok(node)? {
            self.stats.leaves_filtered.fetch_add(1, Ordering::Relaxed);
            return Ok(());
        }
        let form = iso::canonical_form(&node.to_formula());
        self.out.lock().expect("no poisoned writers").push(GeneratedFormula { key: form.key, formula: form.formula });
        Ok(())
    }

    fn leaf_ok(&self, node: &PartialFormula) -> Result<bool> {
        let n = node.n;
        if node.models != 0 || node.used_vars().count_ones() as usize != n {
            return Ok(false);
        }
        if self.task.class != FormulaClass::Uh && !is_regular_masks(n, &node.clauses) {
            return Ok(false);
        }
        if self.task.class == FormulaClass::Iuh && !self.task.prune.factors {
            return factor::is_irreducible(&node.to_formula());
        }
        Ok(true)
    }

    fn expand(&self, node: &PartialFormula, gens: &[LitPerm], depth: usize) -> Result<()> {
        if self.over_budget() {
            return Ok(());
        }
        self.stats.nodes.fetch_add(1, Ordering::Relaxed);
        if node.len() == self.task.m {
            return self.leaf(node);
        }
        let reps = orbit_representatives(&self.candidates(node), gens);
        let children: Vec<(PartialFormula, Option<NodeLabeling>)> = reps
            .into_iter()
            .filter_map(|c| {
                let child = node.with_clause(c);
                if let PruneDecision::Prune(r) = prune(&child, self.task) {
                    self.stats.record(r);
                    return None;
                }
                match accept(&child) {
                    Acceptance::Rejected => {
                        self.stats.rejected_noncanonical.fetch_add(1, Ordering::Relaxed);
                        None
                    }
                    Acceptance::Accepted(l) => Some((child, l)),
                }
            })
            .collect();
        let last_level = node.len() + 1 == self.task.m;
        let visit = |(child, l): (PartialFormula, Option<NodeLabeling>)| -> Result<()> {
            let child_gens = if last_level {
                Vec::new()
            } else {
                l.unwrap_or_else(|| NodeLabeling::new(&child)).generators(child.n)
            };
            self.expand(&child, &child_gens, depth + 1)
        };
        if depth < 3 {
            children.into_par_iter().try_for_each(visit)
        } else {
            children.into_iter().try_for_each(visit)
        }
    }

    fn run_key_dedup(&self) -> Result<()> {
        let mut level = vec![PartialFormula::empty(self.task.n)];
        for _ in 0..self.task.m {
            let mut next: std::collections::BTreeMap<CanonicalKey, PartialFormula> = Default::default();
            for node in &level {
                if self.over_budget() {
                    return Ok(());
                }
                self.stats.nodes.fetch_add(1, Ordering::Relaxed);
                for c in self.candidates(node) {
                    let child = node.with_clause(c);
                    if let PruneDecision::Prune(r) = prune(&child, self.task) {
                        self.stats.record(r);
                        continue;
                    }
                    let (graph, _) = ClauseLiteralGraph::from_masks(child.n, &child.clauses);
                    let l = canon::canonical_labeling(&graph);
                    let key = CanonicalKey::from_certificate(graph_vars(&child), child.len(), &l.certificate);
                    next.entry(key).or_insert(child);
                }
            }
            level = next.into_values().collect();
        }
        for node in &level {
            self.stats.nodes.fetch_add(1, Ordering::Relaxed);
            self.leaf(node)?;
        }
        Ok(())
    }
}

fn graph_vars(node: &PartialFormula) -> usize {
    node.used_vars().count_ones() as usize
}

/// Generates every formula of the task's class with exactly `n` variables
/// and `m` clauses, one per isomorphism class.
pub fn generate(task: &GenerationTask) -> Result<GenerationResult> {
    task.validate()?;
    let search = Search {
        task,
        clauses_by_size: all_clauses(task.n),
        stats: AtomicStats::default(),
        stop: AtomicBool::new(false),
        start: Instant::now(),
        out: Mutex::new(Vec::new()),
    };
    match task.strategy {
        Strategy::CanonicalAugmentation => {
            let free: Vec<usize> = (0..task.n).collect();
            let root_gens = hyperoctahedral_generators(task.n, &free);
            search.expand(&PartialFormula::empty(task.n), &root_gens, 0)?;
        }
        Strategy::KeyDedup => search.run_key_dedup()?,
    }
    let mut formulas = search.out.into_inner().expect("no poisoned writers");
    formulas.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(GenerationResult {
        task: task.clone(),
        formulas,
        stats: search.stats.snapshot(),
        complete: !search.stop.load(Ordering::Relaxed),
        seconds: search.start.elapsed().as_secs_f64(),
    })
}

/// Checks membership in a class directly, without generation.
pub fn classify(formula: &Formula) -> Result<Option<FormulaClass>> {
    if !hitting::is_hitting(formula) || !hitting::is_unsat_hitting(formula)? {
        return Ok(None);
    }
    if !hitting::is_regular(formula) {
        return Ok(Some(FormulaClass::Uh));
    }
    if factor::is_irreducible(formula)? {
        Ok(Some(FormulaClass::Iuh))
    } else {
        Ok(Some(FormulaClass::Ruh))
    }
}

/// Run summary written next to a catalog.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub task: GenerationTask,
    pub count: usize,
    pub complete: bool,
    pub stats: NodeStats,
    pub wall_seconds: f64,
}

impl From<&GenerationResult> for Manifest {
    fn from(r: &GenerationResult) -> Manifest {
        Manifest {
            task: r.task.clone(),
            count: r.formulas.len(),
            complete: r.complete,
            stats: r.stats.clone(),
            wall_seconds: r.seconds,
        }
    }
}
