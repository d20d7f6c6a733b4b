//! Factors, pseudo-factors and (strong) irreducibility.
//!
//! A factor of `G` is a set of clauses `F ⊆ G` equivalent to a single
//! clause. That clause is necessarily `C = ∩F`, and `F ≡ C` holds exactly
//! when the residual formula `{D \ C | D ∈ F}` is unsatisfiable. A
//! pseudo-factor only needs a clause interpolant: some `C` with `F ⊨ C`
//! and `{C} ∪ (G \ F)` unsatisfiable.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::cnf::{self, Clause, Formula, Var};
use crate::error::{Error, Result};
use crate::hitting::{self, DyadicCount};
use crate::refutation::{RefutationDag, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    Factor,
    PseudoFactor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorWitness {
    /// Indices into the host's normalized clause list, ascending.
    pub subset: Vec<usize>,
    /// Intersection of the subset.
    pub basis: Clause,
    pub kind: WitnessKind,
    /// For factors this is the basis.
    pub interpolant: Clause,
}

fn intersection_of<'a>(mut clauses: impl Iterator<Item = &'a Clause>) -> Option<Clause> {
    let first = clauses.next()?.clone();
    Some(clauses.fold(first, |acc, c| acc.intersection(c)))
}

/// Decides whether `clauses`, all of which contain `basis`, are jointly
/// equivalent to `basis`.
fn equivalent_to_basis(clauses: &[&Clause], basis: &Clause) -> Result<bool> {
    let sub = Formula::new(clauses.iter().map(|&c| c.clone()));
    if hitting::is_hitting(&sub) {
        let sum = hitting::clause_weight_sum(&sub);
        return Ok(sum == DyadicCount::inverse_power_of_two(basis.len() as u32));
    }
    let residual = cnf::restrict_by_negation(&sub, basis);
    Ok(!cnf::is_satisfiable(&residual)?)
}

/// Checks whether `sub` is a factor of `host`, returning the witness with
/// basis `∩sub` if so.
pub fn is_factor(sub: &Formula, host: &Formula) -> Result<Option<FactorWitness>> {
    let subset = sub
        .clauses()
        .iter()
        .map(|c| host.position(c).ok_or(Error::NotASubset))
        .collect::<Result<Vec<_>>>()?;
    let Some(basis) = intersection_of(sub.clauses().iter()) else {
        return Err(Error::Precondition("a factor needs at least one clause".into()));
    };
    let refs: Vec<&Clause> = sub.clauses().iter().collect();
    if !equivalent_to_basis(&refs, &basis)? {
        return Ok(None);
    }
    let mut subset = subset;
    subset.sort_unstable();
    Ok(Some(FactorWitness { subset, interpolant: basis.clone(), basis, kind: WitnessKind::Factor }))
}

/// All clause indices of `f` whose clause contains `basis`.
fn closure(f: &Formula, basis: &Clause) -> Vec<usize> {
    f.clauses().iter().enumerate().filter(|(_, d)| basis.is_subset_of(d)).map(|(i, _)| i).collect()
}

/// Every intersection-maximal subset of `f` with at least two clauses,
/// as `(basis, closure)` pairs. Found by growing intersections one clause
/// at a time and closing under "contains the current intersection".
pub fn intersection_maximal_subsets(f: &Formula) -> Vec<(Clause, Vec<usize>)> {
    let mut seen: HashSet<Clause> = HashSet::new();
    let mut queue: VecDeque<(Clause, Vec<usize>)> = VecDeque::new();
    let mut out = Vec::new();
    for c in f.clauses() {
        if seen.insert(c.clone()) {
            queue.push_back((c.clone(), closure(f, c)));
        }
    }
    while let Some((basis, members)) = queue.pop_front() {
        if members.len() >= 2 {
            out.push((basis.clone(), members.clone()));
        }
        for (j, d) in f.clauses().iter().enumerate() {
            if members.binary_search(&j).is_ok() {
                continue;
            }
            let next = basis.intersection(d);
            if seen.insert(next.clone()) {
                let cl = closure(f, &next);
                queue.push_back((next, cl));
            }
        }
    }
    out.sort_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| a.1.cmp(&b.1)));
    out
}

fn witness_for(f: &Formula, subset: Vec<usize>) -> Result<Option<FactorWitness>> {
    let refs: Vec<&Clause> = subset.iter().map(|&i| &f.clauses()[i]).collect();
    let basis = intersection_of(refs.iter().copied()).expect("non-empty subset");
    if equivalent_to_basis(&refs, &basis)? {
        Ok(Some(FactorWitness { subset, interpolant: basis.clone(), basis, kind: WitnessKind::Factor }))
    } else {
        Ok(None)
    }
}

/// A smallest non-trivial factor (`1 < |S| < |F|`) found by full subset
/// enumeration. Limited to 20 clauses.
pub fn find_factor_exhaustive(f: &Formula) -> Result<Option<FactorWitness>> {
    let m = f.len();
    cnf::check_limit(m, 20)?;
    let mut masks: Vec<u32> = (0..1u32 << m).filter(|s| s.count_ones() >= 2 && (s.count_ones() as usize) < m).collect();
    masks.sort_by_key(|s| (s.count_ones(), s.reverse_bits()));
    for s in masks {
        let subset: Vec<usize> = (0..m).filter(|&i| s >> i & 1 == 1).collect();
        if let Some(w) = witness_for(f, subset)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// A non-trivial factor of `f`, searching intersection-maximal subsets.
pub fn find_factor(f: &Formula) -> Result<Option<FactorWitness>> {
    let m = f.len();
    if m <= 2 {
        // Only a 2-clause formula's singletons and itself exist, all trivial.
        return Ok(None);
    }
    for (_, members) in intersection_maximal_subsets(f) {
        if members.len() < m {
            if let Some(w) = witness_for(f, members)? {
                return Ok(Some(w));
            }
        }
    }
    // A factor whose closure is all of `f` forces `f ≡ ∩f`; only then can
    // a proper subset with the same basis be a factor.
    let all: Vec<usize> = (0..m).collect();
    if witness_for(f, all)?.is_some() {
        return find_factor_exhaustive(f);
    }
    Ok(None)
}

pub fn is_irreducible(f: &Formula) -> Result<bool> {
    Ok(find_factor(f)?.is_none())
}

/// Bitsets of the models of each clause over the assignments to `vars`.
struct ModelSets {
    words: usize,
    clause_models: Vec<Vec<u64>>,
    nvars: usize,
}

impl ModelSets {
    fn new(f: &Formula, vars: &[Var]) -> Result<ModelSets> {
        let n = vars.len();
        cnf::check_limit(n, cnf::DEFAULT_BRUTE_FORCE_LIMIT)?;
        let points = 1usize << n;
        let words = points.div_ceil(64);
        let clause_models = f
            .clauses()
            .iter()
            .map(|c| {
                let (pos, neg) = cnf::clause_masks(c, vars);
                let mut bits = vec![0u64; words];
                for a in 0..points as u64 {
                    if a & pos != 0 || !a & neg != 0 {
                        bits[(a / 64) as usize] |= 1 << (a % 64);
                    }
                }
                bits
            })
            .collect();
        Ok(ModelSets { words, clause_models, nvars: n })
    }

    fn full(&self) -> Vec<u64> {
        let points = 1usize << self.nvars;
        let mut bits = vec![u64::MAX; self.words];
        if points % 64 != 0 {
            bits[self.words - 1] = (1u64 << (points % 64)) - 1;
        }
        bits
    }

    fn models_of(&self, mask: u64) -> Vec<u64> {
        let mut bits = self.full();
        for (i, cm) in self.clause_models.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (b, c) in bits.iter_mut().zip(cm) {
                    *b &= c;
                }
            }
        }
        bits
    }
}

fn points(bits: &[u64]) -> impl Iterator<Item = u64> + '_ {
    bits.iter().enumerate().flat_map(|(w, &word)| {
        (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| (w * 64 + b) as u64)
    })
}

/// Smallest clause interpolant for the split `(S, T)` given model sets, or
/// `None`. The falsifying cube of an interpolant must contain every model
/// of `T` and no model of `S`, so the only candidate worth checking is the
/// cube hull of `M(T)`.
fn hull_interpolant(ms: &ModelSets, vars: &[Var], s: &[u64], t: &[u64]) -> Option<Clause> {
    let n = ms.nvars;
    let mut it = points(t);
    let Some(first) = it.next() else {
        // T is unsatisfiable: any single falsifying point outside M(S) works.
        let outside = (0..1u64 << n).find(|&a| s[(a / 64) as usize] >> (a % 64) & 1 == 0)?;
        return Some(full_clause_falsified_by(vars, outside, (1u64 << n) - 1));
    };
    let mut same = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    for a in it {
        same &= !(a ^ first);
    }
    // Hull = assignments agreeing with `first` on `same`.
    let free = !same & ((1u64 << n) - 1);
    let mut sub = free;
    loop {
        let a = (first & same) | sub;
        if s[(a / 64) as usize] >> (a % 64) & 1 == 1 {
            return None;
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    Some(full_clause_falsified_by(vars, first, same))
}

fn full_clause_falsified_by(vars: &[Var], point: u64, on: u64) -> Clause {
    Clause::new(
        vars.iter()
            .enumerate()
            .filter(|(i, _)| on >> i & 1 == 1)
            .map(|(i, v)| v.lit(point >> i & 1 == 0)),
    )
    .expect("one literal per variable")
}

/// Interpolant for the split `subset` versus the rest, if any.
pub fn interpolant(f: &Formula, subset: &[usize]) -> Result<Option<Clause>> {
    let vars = f.vars();
    let ms = ModelSets::new(f, &vars)?;
    let mask = subset.iter().fold(0u64, |acc, &i| acc | 1 << i);
    let rest = ((1u64 << f.len()) - 1) & !mask;
    Ok(hull_interpolant(&ms, &vars, &ms.models_of(mask), &ms.models_of(rest)))
}

fn split_masks(m: usize) -> Vec<u64> {
    let mut masks: Vec<u64> =
        (1..(1u64 << m) - 1).filter(|s| s.count_ones() >= 2 && (s.count_ones() as usize) < m).collect();
    masks.sort_by_key(|s| (s.count_ones(), *s));
    masks
}

fn subset_of_mask(m: usize, mask: u64) -> Vec<usize> {
    (0..m).filter(|&i| mask >> i & 1 == 1).collect()
}

/// A non-trivial pseudo-factor of `f` (`1 < |S| < |F|`) with its
/// interpolant, by the cube-hull test on every split.
pub fn find_pseudo_factor(f: &Formula) -> Result<Option<FactorWitness>> {
    let m = f.len();
    if m <= 2 {
        return Ok(None);
    }
    cnf::check_limit(m, 30)?;
    let vars = f.vars();
    let ms = ModelSets::new(f, &vars)?;
    let all = (1u64 << m) - 1;
    for mask in split_masks(m) {
        let s = ms.models_of(mask);
        let t = ms.models_of(all & !mask);
        if let Some(c) = hull_interpolant(&ms, &vars, &s, &t) {
            let subset = subset_of_mask(m, mask);
            let basis = intersection_of(subset.iter().map(|&i| &f.clauses()[i])).expect("non-empty");
            return Ok(Some(FactorWitness { subset, basis, kind: WitnessKind::PseudoFactor, interpolant: c }));
        }
    }
    Ok(None)
}

/// Same question as [`find_pseudo_factor`], answered by trying every
/// clause over `var(F)` plus `fresh` new variables as interpolant.
/// Exponential in both `m` and `n`; intended as a cross-check.
pub fn find_pseudo_factor_enumerative(f: &Formula, fresh: usize) -> Result<Option<FactorWitness>> {
    let m = f.len();
    if m <= 2 {
        return Ok(None);
    }
    let mut vars = f.vars();
    let next = f.max_var() + 1;
    vars.extend((0..fresh as u32).map(|i| Var::new(next + i)));
    let n = vars.len();
    let ms = ModelSets::new(f, &vars)?;
    let all = (1u64 << m) - 1;
    let candidates: Vec<Clause> = (0..3usize.pow(n as u32))
        .map(|mut code| {
            let mut lits = Vec::new();
            for v in &vars {
                match code % 3 {
                    1 => lits.push(v.lit(true)),
                    2 => lits.push(v.lit(false)),
                    _ => {}
                }
                code /= 3;
            }
            Clause::new(lits).expect("one literal per variable")
        })
        .collect();
    let candidate_models = candidates
        .iter()
        .map(|c| Ok(ModelSets::new(&Formula::new([c.clone()]), &vars)?.clause_models.remove(0)))
        .collect::<Result<Vec<_>>>()?;
    for mask in split_masks(m) {
        let s = ms.models_of(mask);
        let t = ms.models_of(all & !mask);
        for (c, cm) in candidates.iter().zip(&candidate_models) {
            let entailed = s.iter().zip(cm).all(|(a, b)| a & !b == 0);
            let refutes = t.iter().zip(cm).all(|(a, b)| a & b == 0);
            if entailed && refutes {
                let subset = subset_of_mask(m, mask);
                let basis = intersection_of(subset.iter().map(|&i| &f.clauses()[i])).expect("non-empty");
                return Ok(Some(FactorWitness {
                    subset,
                    basis,
                    kind: WitnessKind::PseudoFactor,
                    interpolant: c.clone(),
                }));
            }
        }
    }
    Ok(None)
}

pub fn is_strongly_irreducible(f: &Formula) -> Result<bool> {
    Ok(find_pseudo_factor(f)?.is_none())
}

/// Refutes `g` by splitting off factors: for a factor `F` with basis `C`,
/// a refutation of `F[¬C]` lifted by `C` derives `C` from `F`, and is
/// spliced in front of a refutation of `{C} ∪ (G \ F)`. Both parts are
/// handled recursively; irreducible pieces go to `refute`.
pub fn build_decomposition_refutation(
    g: &Formula,
    refute: &mut dyn FnMut(&Formula) -> Result<RefutationDag>,
) -> Result<RefutationDag> {
    let Some(w) = find_factor(g)? else {
        return refute(g);
    };
    let c = w.basis.clone();
    let factor: Vec<Clause> = w.subset.iter().map(|&i| g.clauses()[i].clone()).collect();
    let residual = cnf::restrict_by_negation(&Formula::new(factor.iter().cloned()), &c);
    let inner = build_decomposition_refutation(&residual, refute)?;

    let mut steps: Vec<Step> = Vec::with_capacity(inner.len());
    for step in inner.steps() {
        steps.push(match step {
            Step::Axiom(e) => {
                let d = factor
                    .iter()
                    .find(|d| d.difference(&c) == *e)
                    .ok_or_else(|| Error::Precondition(format!("axiom {e} is not a residual clause")))?;
                Step::Axiom(d.clone())
            }
            Step::Resolvent { premises, pivot, clause } => Step::Resolvent {
                premises: *premises,
                pivot: *pivot,
                clause: clause.union(&c).map_err(|_| Error::Precondition("residual mentions basis".into()))?,
            },
        });
    }
    let derived = steps.len() - 1;

    let rest: BTreeSet<usize> = (0..g.len()).filter(|i| !w.subset.contains(i)).collect();
    let outer_formula = Formula::new(rest.iter().map(|&i| g.clauses()[i].clone()).chain([c.clone()]));
    let outer = build_decomposition_refutation(&outer_formula, refute)?;
    let mut index = Vec::with_capacity(outer.len());
    for step in outer.steps() {
        match step {
            Step::Axiom(a) if *a == c => index.push(derived),
            Step::Axiom(a) => {
                index.push(steps.len());
                steps.push(Step::Axiom(a.clone()));
            }
            Step::Resolvent { premises: (i, j), pivot, clause } => {
                index.push(steps.len());
                steps.push(Step::Resolvent { premises: (index[*i], index[*j]), pivot: *pivot, clause: clause.clone() });
            }
        }
    }
    Ok(RefutationDag::new(steps))
}
