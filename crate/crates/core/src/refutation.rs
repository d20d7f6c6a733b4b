//! Resolution refutations as indexed DAGs: validation, read-once detection,
//! the line-based proof format and an exhaustive shortest-refutation oracle.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::cnf::{self, Clause, Formula, Lit, Var};
use crate::error::{Error, Result};

/// One line of a derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Axiom(Clause),
    /// Resolvent of two earlier steps (0-based indices) on `pivot`.
    Resolvent { premises: (usize, usize), pivot: Var, clause: Clause },
}

impl Step {
    pub fn clause(&self) -> &Clause {
        match self {
            Step::Axiom(c) => c,
            Step::Resolvent { clause, .. } => clause,
        }
    }

    pub fn premises(&self) -> Option<(usize, usize)> {
        match self {
            Step::Axiom(_) => None,
            Step::Resolvent { premises, .. } => Some(*premises),
        }
    }
}

/// A resolution derivation with a single fixed history per step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RefutationDag {
    steps: Vec<Step>,
}

/// Why a derivation fails to be a refutation. `step` is 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofDiagnostic {
    pub step: usize,
    pub kind: ProofErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofErrorKind {
    Empty,
    AxiomNotInFormula,
    PremiseOutOfOrder,
    WrongResolvent,
    NotResolvable,
    DoesNotEndInEmptyClause,
}

impl fmt::Display for ProofDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ProofErrorKind::Empty => "derivation is empty",
            ProofErrorKind::AxiomNotInFormula => "axiom is not a clause of the formula",
            ProofErrorKind::PremiseOutOfOrder => "premise does not precede the step",
            ProofErrorKind::WrongResolvent => "clause differs from the resolvent of its premises",
            ProofErrorKind::NotResolvable => "premises do not clash exactly on the pivot",
            ProofErrorKind::DoesNotEndInEmptyClause => "last clause is not empty",
        };
        write!(f, "step {}: {what}", self.step + 1)
    }
}

impl RefutationDag {
    pub fn new(steps: Vec<Step>) -> RefutationDag {
        RefutationDag { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, step: Step) -> usize {
        self.steps.push(step);
        self.steps.len() - 1
    }

    pub fn num_axioms(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Axiom(_))).count()
    }

    pub fn axioms(&self) -> impl Iterator<Item = &Clause> {
        self.steps.iter().filter_map(|s| match s {
            Step::Axiom(c) => Some(c),
            _ => None,
        })
    }

    /// Checks that this is a resolution refutation of `formula`.
    pub fn validate(&self, formula: &Formula) -> Result<(), ProofDiagnostic> {
        self.validate_derivation(formula)?;
        let last = self.steps.len() - 1;
        if !self.steps[last].clause().is_empty() {
            return Err(ProofDiagnostic { step: last, kind: ProofErrorKind::DoesNotEndInEmptyClause });
        }
        Ok(())
    }

    /// Checks every step, without requiring the empty clause at the end.
    pub fn validate_derivation(&self, formula: &Formula) -> Result<(), ProofDiagnostic> {
        if self.steps.is_empty() {
            return Err(ProofDiagnostic { step: 0, kind: ProofErrorKind::Empty });
        }
        for (i, step) in self.steps.iter().enumerate() {
            let fail = |kind| Err(ProofDiagnostic { step: i, kind });
            match step {
                Step::Axiom(c) => {
                    if !formula.contains(c) {
                        return fail(ProofErrorKind::AxiomNotInFormula);
                    }
                }
                Step::Resolvent { premises: (a, b), pivot, clause } => {
                    if *a >= i || *b >= i || a == b {
                        return fail(ProofErrorKind::PremiseOutOfOrder);
                    }
                    let c1 = self.steps[*a].clause();
                    let c2 = self.steps[*b].clause();
                    match cnf::resolve_on(c1, c2, *pivot) {
                        Ok(r) if &r == clause => {}
                        Ok(_) => return fail(ProofErrorKind::WrongResolvent),
                        Err(_) => return fail(ProofErrorKind::NotResolvable),
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_valid_refutation(&self, formula: &Formula) -> bool {
        self.validate(formula).is_ok()
    }

    /// Number of later steps using each step as a premise.
    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.steps.len()];
        for s in &self.steps {
            if let Some((a, b)) = s.premises() {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        deg
    }

    /// Every clause is used at most once.
    pub fn is_read_once(&self) -> bool {
        self.out_degrees().iter().all(|&d| d <= 1)
    }

    /// Keeps only the ancestors of the last step, preserving order.
    pub fn trimmed(&self) -> RefutationDag {
        if self.steps.is_empty() {
            return self.clone();
        }
        let mut keep = vec![false; self.steps.len()];
        keep[self.steps.len() - 1] = true;
        for i in (0..self.steps.len()).rev() {
            if keep[i] {
                if let Some((a, b)) = self.steps[i].premises() {
                    keep[a] = true;
                    keep[b] = true;
                }
            }
        }
        let mut new_index = vec![usize::MAX; self.steps.len()];
        let mut steps = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            new_index[i] = steps.len();
            steps.push(match s {
                Step::Axiom(c) => Step::Axiom(c.clone()),
                Step::Resolvent { premises: (a, b), pivot, clause } => Step::Resolvent {
                    premises: (new_index[*a], new_index[*b]),
                    pivot: *pivot,
                    clause: clause.clone(),
                },
            });
        }
        RefutationDag { steps }
    }

    /// Parses the line format: `A <lits> 0` or `R <i> <j> <pivot> <lits> 0`
    /// with 1-based step indices.
    pub fn parse(text: &str) -> Result<RefutationDag> {
        let mut steps = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let mut toks = line.split_whitespace();
            let kind = toks.next().expect("non-empty line");
            let nums: Vec<i64> = toks
                .map(|t| t.parse::<i64>().map_err(|_| err(format!("bad number `{t}`"))))
                .collect::<Result<_>>()?;
            if nums.last() != Some(&0) {
                return Err(err("step must end with 0".into()));
            }
            let lits_of = |xs: &[i64]| -> Result<Clause> {
                if xs.iter().any(|&x| x == 0 || x.unsigned_abs() > i32::MAX as u64) {
                    return Err(err("bad literal".into()));
                }
                Clause::new(xs.iter().map(|&x| Lit::from_dimacs(x as i32)))
            };
            match kind {
                "A" => steps.push(Step::Axiom(lits_of(&nums[..nums.len() - 1])?)),
                "R" => {
                    if nums.len() < 4 {
                        return Err(err("resolvent needs two premises and a pivot".into()));
                    }
                    let (i, j, p) = (nums[0], nums[1], nums[2]);
                    if i < 1 || j < 1 || p < 1 {
                        return Err(err("indices and pivot are positive".into()));
                    }
                    steps.push(Step::Resolvent {
                        premises: (i as usize - 1, j as usize - 1),
                        pivot: Var::new(p as u32),
                        clause: lits_of(&nums[3..nums.len() - 1])?,
                    });
                }
                other => return Err(err(format!("unknown step kind `{other}`"))),
            }
        }
        Ok(RefutationDag { steps })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            match s {
                Step::Axiom(_) => out.push('A'),
                Step::Resolvent { premises: (a, b), pivot, .. } => {
                    out.push_str(&format!("R {} {} {}", a + 1, b + 1, pivot.id()))
                }
            }
            for l in s.clause().lits() {
                out.push_str(&format!(" {}", l.to_dimacs()));
            }
            out.push_str(" 0\n");
        }
        out
    }
}

impl fmt::Display for RefutationDag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            match s {
                Step::Axiom(c) => writeln!(f, "{:>3}. {c}  (axiom)", i + 1)?,
                Step::Resolvent { premises: (a, b), pivot, clause } => {
                    writeln!(f, "{:>3}. {clause}  ({}, {} on {pivot})", i + 1, a + 1, b + 1)?
                }
            }
        }
        Ok(())
    }
}

/// Exhaustive search for a shortest refutation.
///
/// Iterative deepening on the total length (used axioms plus resolvents);
/// within one depth bound the set of derived clauses together with the set
/// of used axioms determines the cost so far, so each such state is
/// expanded once. Returns `None` if no refutation of length `<= cap` exists.
pub fn shortest_refutation_bruteforce(
    formula: &Formula,
    cap: usize,
) -> Result<Option<(usize, RefutationDag)>> {
    shortest_refutation_with_budget(formula, cap, 5_000_000)
}

pub fn shortest_refutation_with_budget(
    formula: &Formula,
    cap: usize,
    node_budget: u64,
) -> Result<Option<(usize, RefutationDag)>> {
    let axioms = formula.clauses();
    if axioms.len() > 64 {
        return Err(Error::Precondition("oracle supports at most 64 axioms".into()));
    }
    if let Some(i) = axioms.iter().position(|c| c.is_empty()) {
        if cap >= 1 {
            return Ok(Some((1, RefutationDag::new(vec![Step::Axiom(axioms[i].clone())]))));
        }
        return Ok(None);
    }
    let mut search = OracleSearch { axioms, nodes: 0, budget: node_budget, visited: HashSet::new() };
    for bound in 3..=cap {
        search.visited.clear();
        let mut derived = Vec::new();
        if let Some(path) = search.dfs(&mut derived, 0, bound)? {
            let dag = search.build(&path);
            return Ok(Some((dag.len(), dag)));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Source {
    Axiom(usize),
    Derived(usize),
}

#[derive(Clone, Debug)]
struct Derivation {
    left: Source,
    right: Source,
    pivot: Var,
    clause: Clause,
}

struct OracleSearch<'a> {
    axioms: &'a [Clause],
    nodes: u64,
    budget: u64,
    visited: HashSet<(Vec<Clause>, u64)>,
}

impl OracleSearch<'_> {
    fn clause_of<'b>(&'b self, derived: &'b [Derivation], s: Source) -> &'b Clause {
        match s {
            Source::Axiom(i) => &self.axioms[i],
            Source::Derived(i) => &derived[i].clause,
        }
    }

    fn cost(derived: &[Derivation], used: u64) -> usize {
        derived.len() + used.count_ones() as usize
    }

    fn dfs(&mut self, derived: &mut Vec<Derivation>, used: u64, bound: usize) -> Result<Option<Vec<Derivation>>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!("oracle explored {} states", self.budget)));
        }
        let mut key: Vec<Clause> = derived.iter().map(|d| d.clause.clone()).collect();
        key.sort();
        if !self.visited.insert((key, used)) {
            return Ok(None);
        }
        let cost = Self::cost(derived, used);
        let sources: Vec<Source> = (0..self.axioms.len())
            .map(Source::Axiom)
            .chain((0..derived.len()).map(Source::Derived))
            .collect();
        let mut known: HashSet<&Clause> = self.axioms.iter().collect();
        known.extend(derived.iter().map(|d| &d.clause));
        let mut moves = Vec::new();
        for (x, &s) in sources.iter().enumerate() {
            for &t in &sources[x + 1..] {
                let (c1, c2) = (self.clause_of(derived, s), self.clause_of(derived, t));
                let Ok(r) = cnf::resolve(c1, c2) else { continue };
                if known.contains(&r) {
                    continue;
                }
                let mut new_used = used;
                for src in [s, t] {
                    if let Source::Axiom(i) = src {
                        new_used |= 1 << i;
                    }
                }
                let extra = 1 + (new_used.count_ones() - used.count_ones()) as usize;
                if cost + extra > bound {
                    continue;
                }
                let pivot = c1.clashing_lits(c2)[0].var();
                moves.push((new_used, Derivation { left: s, right: t, pivot, clause: r }));
            }
        }
        // The empty clause ends the search at this depth.
        if let Some(pos) = moves.iter().position(|(_, d)| d.clause.is_empty()) {
            let (_, d) = moves.swap_remove(pos);
            derived.push(d);
            let path = derived.clone();
            derived.pop();
            return Ok(Some(path));
        }
        for (new_used, d) in moves {
            // A non-empty clause is only worth deriving with room left for ⊥.
            if cost + 1 + (new_used.count_ones() - used.count_ones()) as usize + 1 > bound {
                continue;
            }
            derived.push(d);
            let found = self.dfs(derived, new_used, bound)?;
            derived.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn build(&self, path: &[Derivation]) -> RefutationDag {
        // Only ancestors of the final clause survive; minimality makes this
        // a no-op in practice but keeps the witness tidy.
        let mut used_axioms: Vec<usize> = Vec::new();
        for d in path {
            for s in [d.left, d.right] {
                if let Source::Axiom(i) = s {
                    used_axioms.push(i);
                }
            }
        }
        used_axioms.sort_unstable();
        used_axioms.dedup();
        let axiom_index: HashMap<usize, usize> =
            used_axioms.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut steps: Vec<Step> =
            used_axioms.iter().map(|&i| Step::Axiom(self.axioms[i].clone())).collect();
        let base = steps.len();
        let index = |s: Source| match s {
            Source::Axiom(i) => axiom_index[&i],
            Source::Derived(i) => base + i,
        };
        for d in path {
            steps.push(Step::Resolvent {
                premises: (index(d.left), index(d.right)),
                pivot: d.pivot,
                clause: d.clause.clone(),
            });
        }
        RefutationDag::new(steps).trimmed()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixture_proofs_validate() {
        let p2 = fixtures::mu_two_5_proof();
        assert_eq!(p2.len(), 10);
        assert_eq!(p2.validate(&fixtures::mu_two(5)), Ok(()));
        let p4 = fixtures::g_reducible_proof();
        assert_eq!(p4.len(), 20);
        assert_eq!(p4.validate(&fixtures::g_reducible()), Ok(()));
    }

    #[test]
    fn mutation_is_pinpointed() {
        let text = fixtures::MU_TWO_5_PROOF.replace("R 2 4 3 1 2 0", "R 2 4 3 1 0");
        let p = RefutationDag::parse(&text).unwrap();
        assert_eq!(
            p.validate(&fixtures::mu_two(5)),
            Err(ProofDiagnostic { step: 5, kind: ProofErrorKind::WrongResolvent })
        );
    }

    #[test]
    fn read_once_examples() {
        assert!(!fixtures::mu_two_5_proof().is_read_once());
        let p = RefutationDag::parse("A 1 0\nA -1 0\nR 1 2 1 0\n").unwrap();
        assert!(p.validate(&fixtures::unit_pair()).is_ok());
        assert!(p.is_read_once());
        let deg = fixtures::mu_two_5_proof().out_degrees();
        assert_eq!(deg[1], 2);
        assert_eq!(deg.iter().filter(|&&d| d > 1).count(), 1);
    }

    #[test]
    fn text_round_trip() {
        let p = fixtures::g_reducible_proof();
        assert_eq!(RefutationDag::parse(&p.to_text()).unwrap(), p);
        assert!(RefutationDag::parse("R 1 2 0").is_err());
        assert!(RefutationDag::parse("A 1 2").is_err());
        assert!(RefutationDag::parse("X 1 0").is_err());
    }

    #[test]
    fn structural_errors() {
        let f = fixtures::unit_pair();
        let bad_order = RefutationDag::parse("A 1 0\nR 1 3 1 0\nA -1 0\n").unwrap();
        assert_eq!(bad_order.validate(&f).unwrap_err().kind, ProofErrorKind::PremiseOutOfOrder);
        let not_axiom = RefutationDag::parse("A 2 0\n").unwrap();
        assert_eq!(not_axiom.validate(&f).unwrap_err().kind, ProofErrorKind::AxiomNotInFormula);
        let not_empty = RefutationDag::parse("A 1 0\n").unwrap();
        assert_eq!(not_empty.validate(&f).unwrap_err().kind, ProofErrorKind::DoesNotEndInEmptyClause);
        let wrong_pivot = RefutationDag::parse("A 1 0\nA -1 0\nR 1 2 2 0\n").unwrap();
        assert_eq!(wrong_pivot.validate(&f).unwrap_err().kind, ProofErrorKind::NotResolvable);
    }

    #[test]
    fn oracle_examples() {
        let (h, p) = shortest_refutation_bruteforce(&fixtures::bottom(), 5).unwrap().unwrap();
        assert_eq!((h, p.len()), (1, 1));
        let (h, p) = shortest_refutation_bruteforce(&fixtures::unit_pair(), 5).unwrap().unwrap();
        assert_eq!(h, 3);
        assert!(p.validate(&fixtures::unit_pair()).is_ok());
        let f = fixtures::mu_two(5);
        let (h, p) = shortest_refutation_bruteforce(&f, 12).unwrap().unwrap();
        assert_eq!(h, 10);
        assert!(p.validate(&f).is_ok());
        assert_eq!(p.num_axioms(), 5);
        assert!(shortest_refutation_bruteforce(&f, 9).unwrap().is_none());
    }

    #[test]
    fn oracle_counts_only_used_axioms() {
        // {x}, {¬x}, {y}: the third clause is never needed.
        let f = Formula::from_dimacs(&[&[1], &[-1], &[2]]).unwrap();
        let (h, _) = shortest_refutation_bruteforce(&f, 5).unwrap().unwrap();
        assert_eq!(h, 3);
        assert_eq!(shortest_refutation_bruteforce(&fixtures::binary_with_units(), 10).unwrap().unwrap().0, 5);
    }

    #[test]
    fn trimming_drops_dead_steps() {
        let p = RefutationDag::parse("A 1 2 0\nA -1 0\nA -2 0\nR 1 2 1 2 0\nR 1 3 2 1 0\nR 4 3 2 0\n").unwrap();
        let f = fixtures::binary_with_units();
        assert!(p.validate(&f).is_ok());
        let t = p.trimmed();
        assert_eq!(t.len(), 5);
        assert!(t.validate(&f).is_ok());
    }
}
