//! SAT encoding of "F has a resolution refutation with exactly `s` steps".
//!
//! Steps `1..=m` are the axioms of `F` in normalized order, fixed by unit
//! clauses. Steps `m+1..=s` are resolvents. For each step `i` and variable
//! `v`, `pos(i,v)` / `neg(i,v)` say which literals the clause contains;
//! `arc(i,j)` marks step `i` as a premise of step `j`, and `pivot(j,v)`
//! names the variable resolved on. Resolvents need not be used later,
//! which makes satisfiability monotone in `s`.

use std::collections::HashMap;
use std::fmt;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cnf::{self, Clause, Formula, Var};
use crate::error::{Error, Result};
use crate::factor;
use crate::iso::{self, CanonicalKey, SymmetryInfo};
use crate::refutation::{self, RefutationDag, Step};
use crate::satgate::{self, Backend, Cnf, Model, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EncVar {
    Pos(usize, u32),
    Neg(usize, u32),
    Arc(usize, usize),
    Pivot(usize, u32),
    Active(usize, usize),
    /// Sequential-counter register `(kind, step, index, bit)`.
    Counter(&'static str, usize, usize, usize),
}

impl fmt::Display for EncVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncVar::Pos(i, v) => write!(f, "pos({i},{v})"),
            EncVar::Neg(i, v) => write!(f, "neg({i},{v})"),
            EncVar::Arc(i, j) => write!(f, "arc({i},{j})"),
            EncVar::Pivot(j, v) => write!(f, "pivot({j},{v})"),
            EncVar::Active(i, j) => write!(f, "active({i},{j})"),
            EncVar::Counter(kind, j, i, b) => write!(f, "{kind}({j},{i},{b})"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodeOptions {
    /// Some axiom premise of the first resolvent is used again later.
    pub reuse: bool,
    /// Also require reuse at every later resolvent with two axiom premises,
    /// not only the first one.
    pub reuse_all_positions: bool,
    /// The refutation ends with `{v}, {¬v}, ⊥` for an orbit
    /// representative `v`.
    pub symmetry: bool,
    /// Each resolvent has a premise at least as late as the earlier
    /// premise of the step before it.
    pub ordering: bool,
    /// Sequential counters instead of pairwise at-most constraints.
    pub sequential_counters: bool,
}

impl EncodeOptions {
    pub fn all_combinations() -> Vec<EncodeOptions> {
        let mut out = Vec::new();
        for reuse in [false, true] {
            for symmetry in [false, true] {
                out.push(EncodeOptions { reuse, symmetry, ..EncodeOptions::default() });
            }
        }
        out
    }
}

/// Which optional constraint families actually went in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Applied {
    pub reuse: bool,
    pub symmetry: bool,
    pub ordering: bool,
}

#[derive(Clone, Debug)]
pub struct Encoding {
    pub cnf: Cnf,
    pub options: EncodeOptions,
    pub applied: Applied,
    formula: Formula,
    vars: Vec<Var>,
    s: usize,
    index: HashMap<EncVar, u32>,
    names: Vec<EncVar>,
    fixed: HashMap<u32, bool>,
}

impl Encoding {
    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn steps(&self) -> usize {
        self.s
    }

    pub fn num_axioms(&self) -> usize {
        self.formula.len()
    }

    pub fn var(&self, v: EncVar) -> Option<u32> {
        self.index.get(&v).copied()
    }

    /// Name table `name -> DIMACS index`.
    pub fn varmap(&self) -> serde_json::Map<String, serde_json::Value> {
        self.names.iter().enumerate().map(|(i, n)| (n.to_string(), serde_json::Value::from(i + 1))).collect()
    }

    pub fn varmap_json(&self) -> String {
        serde_json::to_string_pretty(&self.varmap()).expect("plain map")
    }

    fn new_var(&mut self, name: EncVar) -> u32 {
        let id = self.names.len() as u32 + 1;
        self.names.push(name);
        self.index.insert(name, id);
        self.cnf.num_vars = id;
        id
    }

    fn lit(&self, name: EncVar) -> i32 {
        self.index[&name] as i32
    }

    fn fix(&mut self, var: u32, value: bool) {
        self.fixed.insert(var, value);
        self.cnf.add(vec![if value { var as i32 } else { -(var as i32) }]);
    }

    /// Adds a clause after dropping literals fixed false; clauses with a
    /// literal fixed true are skipped.
    fn clause(&mut self, lits: impl IntoIterator<Item = i32>) {
        let mut out = Vec::new();
        for l in lits {
            match self.fixed.get(&l.unsigned_abs()) {
                Some(&value) if value == (l > 0) => return,
                Some(_) => {}
                None => out.push(l),
            }
        }
        out.sort_unstable();
        out.dedup();
        if out.iter().any(|l| out.binary_search(&-l).is_ok()) {
            return;
        }
        self.cnf.add(out);
    }

    fn at_most(&mut self, kind: &'static str, step: usize, lits: &[i32], k: usize) {
        if lits.len() <= k {
            return;
        }
        if !self.options.sequential_counters {
            let mut combo: Vec<usize> = (0..=k).collect();
            loop {
                let c: Vec<i32> = combo.iter().map(|&i| -lits[i]).collect();
                self.clause(c);
                // Next (k+1)-combination.
                let mut t = k as isize;
                while t >= 0 && combo[t as usize] == lits.len() - 1 - (k - t as usize) {
                    t -= 1;
                }
                if t < 0 {
                    break;
                }
                combo[t as usize] += 1;
                for u in t as usize + 1..=k {
                    combo[u] = combo[u - 1] + 1;
                }
            }
            return;
        }
        // r(i,b): at least b of the first i+1 literals are true.
        let n = lits.len();
        let regs: Vec<Vec<i32>> = (0..n)
            .map(|i| (1..=k).map(|b| self.new_var(EncVar::Counter(kind, step, i, b)) as i32).collect())
            .collect();
        for i in 0..n {
            self.clause([-lits[i], regs[i][0]]);
            if i > 0 {
                for b in 0..k {
                    self.clause([-regs[i - 1][b], regs[i][b]]);
                }
                for b in 1..k {
                    self.clause([-lits[i], -regs[i - 1][b - 1], regs[i][b]]);
                }
                self.clause([-lits[i], -regs[i - 1][k - 1]]);
            }
        }
    }
}

/// Builds the base encoding and whichever options apply to `formula`.
/// Options whose preconditions fail are skipped and reported in
/// [`Encoding::applied`].
pub fn encode(formula: &Formula, s: usize, options: EncodeOptions) -> Result<Encoding> {
    let m = formula.len();
    if s <= m {
        return Err(Error::Precondition(format!("{s} steps cannot refute a formula with {m} axioms plus a resolvent")));
    }
    if formula.num_vars() <= cnf::DEFAULT_BRUTE_FORCE_LIMIT && !cnf::is_minimally_unsatisfiable(formula)? {
        return Err(Error::Precondition("formula is not minimally unsatisfiable".into()));
    }
    let mut e = base_encoding(formula, s, options);
    if options.reuse && reuse_applies(formula)? {
        add_reuse_constraint(&mut e)?;
    }
    if options.symmetry && symmetry_applies(formula, s) {
        add_symmetry_breaking(&mut e, &iso::automorphisms(formula))?;
    }
    if options.ordering {
        add_ordering(&mut e);
    }
    Ok(e)
}

fn base_encoding(formula: &Formula, s: usize, options: EncodeOptions) -> Encoding {
    let m = formula.len();
    let vars = formula.vars();
    let mut e = Encoding {
        cnf: Cnf::new(0),
        options,
        applied: Applied::default(),
        formula: formula.clone(),
        vars: vars.clone(),
        s,
        index: HashMap::new(),
        names: Vec::new(),
        fixed: HashMap::new(),
    };
    for i in 1..=s {
        for v in &vars {
            e.new_var(EncVar::Pos(i, v.id()));
            e.new_var(EncVar::Neg(i, v.id()));
        }
    }
    for j in m + 1..=s {
        for i in 1..j {
            e.new_var(EncVar::Arc(i, j));
        }
        for v in &vars {
            e.new_var(EncVar::Pivot(j, v.id()));
        }
    }
    for (i, c) in formula.clauses().iter().enumerate() {
        for v in &vars {
            let p = e.index[&EncVar::Pos(i + 1, v.id())];
            let n = e.index[&EncVar::Neg(i + 1, v.id())];
            e.fix(p, c.contains(v.lit(true)));
            e.fix(n, c.contains(v.lit(false)));
        }
    }
    let ids: Vec<u32> = vars.iter().map(|v| v.id()).collect();
    for j in m + 1..=s {
        let arcs: Vec<i32> = (1..j).map(|i| e.lit(EncVar::Arc(i, j))).collect();
        e.at_most("arcs", j, &arcs, 2);
        for skip in 0..arcs.len() {
            let others: Vec<i32> = arcs.iter().enumerate().filter(|&(t, _)| t != skip).map(|(_, &a)| a).collect();
            e.clause(others);
        }
        let pivots: Vec<i32> = ids.iter().map(|&v| e.lit(EncVar::Pivot(j, v))).collect();
        e.clause(pivots.clone());
        e.at_most("pivots", j, &pivots, 1);
        for &v in &ids {
            let (pj, nj, piv) = (e.lit(EncVar::Pos(j, v)), e.lit(EncVar::Neg(j, v)), e.lit(EncVar::Pivot(j, v)));
            e.clause([-pj, -nj]);
            e.clause([-piv, -pj]);
            e.clause([-piv, -nj]);
            for i in 1..j {
                let a = e.lit(EncVar::Arc(i, j));
                let (pi, ni) = (e.lit(EncVar::Pos(i, v)), e.lit(EncVar::Neg(i, v)));
                e.clause([-piv, -a, pi, ni]);
                e.clause([-a, -pi, piv, pj]);
                e.clause([-a, -ni, piv, nj]);
                for i2 in i + 1..j {
                    let a2 = e.lit(EncVar::Arc(i2, j));
                    let (pi2, ni2) = (e.lit(EncVar::Pos(i2, v)), e.lit(EncVar::Neg(i2, v)));
                    e.clause([-piv, -a, -a2, -pi, -pi2]);
                    e.clause([-piv, -a, -a2, -ni, -ni2]);
                    e.clause([-a, -a2, -pj, pi, pi2]);
                    e.clause([-a, -a2, -nj, ni, ni2]);
                }
            }
        }
    }
    for &v in &ids {
        let (ps, ns) = (e.lit(EncVar::Pos(s, v)), e.lit(EncVar::Neg(s, v)));
        e.clause([-ps]);
        e.clause([-ns]);
    }
    e
}

/// Reuse is justified for strongly irreducible MU formulas with more than
/// two clauses.
pub fn reuse_applies(formula: &Formula) -> Result<bool> {
    Ok(formula.len() > 2 && factor::is_strongly_irreducible(formula)?)
}

/// The last two resolvents can be taken as unit clauses only when no
/// axiom is a unit clause and there is room for them after the axioms.
pub fn symmetry_applies(formula: &Formula, s: usize) -> bool {
    s >= formula.len() + 3 && formula.clauses().iter().all(|c| c.len() != 1)
}

/// For the first resolvent (or every resolvent, by option) with axiom
/// premises `i < i'`: one of them is a premise again later.
pub fn add_reuse_constraint(e: &mut Encoding) -> Result<()> {
    if !reuse_applies(&e.formula)? {
        return Err(Error::Precondition(
            "reuse needs a strongly irreducible formula with more than two clauses".into(),
        ));
    }
    let (m, s) = (e.formula.len(), e.s);
    let k = m + 1;
    for i in 1..=m {
        let act = e.new_var(EncVar::Active(i, k + 1)) as i32;
        let later: Vec<i32> = (k + 1..=s).map(|t| e.lit(EncVar::Arc(i, t))).collect();
        e.clause(std::iter::once(-act).chain(later.iter().copied()));
        for a in later {
            e.clause([-a, act]);
        }
    }
    for i in 1..=m {
        for i2 in i + 1..=m {
            let (a, a2) = (e.lit(EncVar::Arc(i, k)), e.lit(EncVar::Arc(i2, k)));
            let (act, act2) = (e.lit(EncVar::Active(i, k + 1)), e.lit(EncVar::Active(i2, k + 1)));
            e.clause([-a, -a2, act, act2]);
        }
    }
    if e.options.reuse_all_positions {
        // Later positions: the axioms may already have been used before `k`,
        // so any other use counts.
        for k in m + 2..=s {
            for i in 1..=m {
                for i2 in i + 1..=m {
                    let mut c = vec![-e.lit(EncVar::Arc(i, k)), -e.lit(EncVar::Arc(i2, k))];
                    for t in (m + 1..=s).filter(|&t| t != k) {
                        c.push(e.lit(EncVar::Arc(i, t)));
                        c.push(e.lit(EncVar::Arc(i2, t)));
                    }
                    e.clause(c);
                }
            }
        }
    }
    e.applied.reuse = true;
    Ok(())
}

/// Forces the refutation to end with `{v}, {¬v}, ⊥` where `v` is the
/// smallest variable of its orbit.
pub fn add_symmetry_breaking(e: &mut Encoding, sym: &SymmetryInfo) -> Result<()> {
    let s = e.s;
    if !symmetry_applies(&e.formula, s) {
        return Err(Error::Precondition(
            "symmetry breaking needs a formula without unit clauses and at least three resolvents".into(),
        ));
    }
    let ids: Vec<u32> = e.vars.iter().map(|v| v.id()).collect();
    for &v in &ids {
        let l = e.lit(EncVar::Pos(s - 1, v));
        e.clause([-l]);
        let l = e.lit(EncVar::Neg(s - 2, v));
        e.clause([-l]);
        let (n1, p2) = (e.lit(EncVar::Neg(s - 1, v)), e.lit(EncVar::Pos(s - 2, v)));
        if sym.is_representative(Var::new(v)) {
            e.clause([-n1, p2]);
            e.clause([n1, -p2]);
        } else {
            e.clause([-n1]);
            e.clause([-p2]);
        }
    }
    let (a, b, c) = (e.lit(EncVar::Arc(s - 2, s)), e.lit(EncVar::Arc(s - 1, s)), e.lit(EncVar::Arc(s - 2, s - 1)));
    e.clause([a]);
    e.clause([b]);
    e.clause([-c]);
    e.applied.symmetry = true;
    Ok(())
}

/// For consecutive resolvents `j-1, j`: if `p` is the earlier premise of
/// `j-1`, some premise of `j` is at `p` or later. Any refutation can be
/// reordered to comply by always placing next the available step with
/// the smallest (later premise, earlier premise) pair. The final steps
/// pinned by symmetry breaking are exempt.
fn add_ordering(e: &mut Encoding) {
    let (m, s) = (e.formula.len(), e.s);
    let last = if e.applied.symmetry { s - 3 } else { s - 1 };
    for j in m + 2..=last {
        for p in 1..j - 1 {
            let mut c = vec![-e.lit(EncVar::Arc(p, j - 1))];
            c.extend((1..p).map(|i| e.lit(EncVar::Arc(i, j - 1))));
            c.extend((p..j).map(|i| e.lit(EncVar::Arc(i, j))));
            e.clause(c);
        }
    }
    e.applied.ordering = true;
}

/// Reads the full `s`-step derivation out of a model.
pub fn decode(e: &Encoding, model: &Model) -> Result<RefutationDag> {
    let m = e.formula.len();
    let val = |name: EncVar| model.value(e.lit(name));
    let mut steps: Vec<Step> = e.formula.clauses().iter().cloned().map(Step::Axiom).collect();
    for j in m + 1..=e.s {
        let premises: Vec<usize> = (1..j).filter(|&i| val(EncVar::Arc(i, j))).collect();
        let pivots: Vec<Var> = e.vars.iter().copied().filter(|v| val(EncVar::Pivot(j, v.id()))).collect();
        if premises.len() != 2 || pivots.len() != 1 {
            return Err(Error::DecodeInconsistency(format!(
                "step {j} has {} premises and {} pivots",
                premises.len(),
                pivots.len()
            )));
        }
        let mut lits = Vec::new();
        for v in &e.vars {
            if val(EncVar::Pos(j, v.id())) {
                lits.push(v.lit(true));
            }
            if val(EncVar::Neg(j, v.id())) {
                lits.push(v.lit(false));
            }
        }
        let clause = Clause::new(lits).map_err(|_| Error::DecodeInconsistency(format!("step {j} is tautological")))?;
        steps.push(Step::Resolvent { premises: (premises[0] - 1, premises[1] - 1), pivot: pivots[0], clause });
    }
    let dag = RefutationDag::new(steps);
    dag.validate(&e.formula).map_err(|d| Error::DecodeInconsistency(d.to_string()))?;
    Ok(dag)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Exhaustive search; `cap` bounds the length explored.
    Oracle { cap: usize },
    Solver(Backend),
}

impl Engine {
    pub fn name(&self) -> String {
        match self {
            Engine::Oracle { .. } => "oracle".into(),
            Engine::Solver(b) => b.name(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HardnessConfig {
    pub engine: Engine,
    pub options: EncodeOptions,
    /// Per solver call.
    pub timeout: Option<Duration>,
}

impl Default for HardnessConfig {
    fn default() -> HardnessConfig {
        HardnessConfig { engine: Engine::Solver(Backend::Builtin), options: EncodeOptions::default(), timeout: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthAttempt {
    pub s: usize,
    pub status: Status,
    pub seconds: f64,
    pub conflicts: u64,
    pub clauses: usize,
}

#[derive(Clone, Debug)]
pub struct HardnessRecord {
    pub formula_key: CanonicalKey,
    pub h: usize,
    /// A refutation of length `h` with every step used.
    pub witness: RefutationDag,
    pub engine: String,
    pub applied: Applied,
    pub attempts: Vec<LengthAttempt>,
}

impl HardnessRecord {
    /// Solver time for the satisfiable instance at `h`.
    pub fn sat_time(&self) -> Option<f64> {
        self.attempts.iter().find(|a| a.s == self.h && a.status == Status::Sat).map(|a| a.seconds)
    }

    /// Solver time for the unsatisfiable instance at `h - 1`. `None` when
    /// `h - 1` is too short to encode (no resolvent fits).
    pub fn unsat_time(&self) -> Option<f64> {
        self.attempts.iter().find(|a| a.s + 1 == self.h && a.status == Status::Unsat).map(|a| a.seconds)
    }
}

/// A refutation must resolve all `m` axioms of an MU formula together,
/// which takes at least `m - 1` resolvents.
pub fn length_lower_bound(formula: &Formula) -> usize {
    (2 * formula.len()).saturating_sub(1).max(1)
}

fn solve_length(formula: &Formula, s: usize, config: &HardnessConfig, backend: &Backend)
    -> Result<(LengthAttempt, Option<RefutationDag>, Applied)> {
    let e = encode(formula, s, config.options)?;
    let verdict = satgate::solve(&e.cnf, backend, config.timeout)?;
    let attempt = LengthAttempt {
        s,
        status: verdict.status,
        seconds: verdict.stats.seconds,
        conflicts: verdict.stats.conflicts,
        clauses: e.cnf.clauses.len(),
    };
    let dag = match (&verdict.status, &verdict.model) {
        (Status::Sat, Some(model)) => Some(decode(&e, model)?),
        (Status::Unknown, _) => return Err(Error::BudgetExceeded(format!("solver gave up at {s} steps"))),
        _ => None,
    };
    Ok((attempt, dag, e.applied))
}

/// Computes `h(F)` for a minimally unsatisfiable formula.
pub fn hardness(formula: &Formula, config: &HardnessConfig) -> Result<HardnessRecord> {
    let formula_key = iso::canonical_key(formula);
    if formula.contains(&Clause::empty()) {
        if formula.len() != 1 {
            return Err(Error::Precondition("formula is not minimally unsatisfiable".into()));
        }
        return Ok(HardnessRecord {
            formula_key,
            h: 1,
            witness: RefutationDag::new(vec![Step::Axiom(Clause::empty())]),
            engine: config.engine.name(),
            applied: Applied::default(),
            attempts: Vec::new(),
        });
    }
    match &config.engine {
        Engine::Oracle { cap } => {
            let (h, witness) = refutation::shortest_refutation_bruteforce(formula, *cap)?
                .ok_or_else(|| Error::BudgetExceeded(format!("no refutation within {cap} steps")))?;
            Ok(HardnessRecord { formula_key, h, witness, engine: config.engine.name(), applied: Applied::default(), attempts: Vec::new() })
        }
        Engine::Solver(backend) => {
            let m = formula.len();
            let start = length_lower_bound(formula).max(m + 1);
            let mut attempts = Vec::new();
            let mut s = start;
            loop {
                let (attempt, dag, applied) = solve_length(formula, s, config, backend)?;
                attempts.push(attempt);
                if let Some(dag) = dag {
                    if s == start && s - 1 > m {
                        let (below, _, _) = solve_length(formula, s - 1, config, backend)?;
                        if below.status != Status::Unsat {
                            return Err(Error::Solver(format!("{} steps satisfiable below the lower bound", s - 1)));
                        }
                        attempts.push(below);
                    }
                    let witness = dag.trimmed();
                    if witness.len() != s {
                        return Err(Error::DecodeInconsistency(format!(
                            "shortest model at {s} steps trims to {}",
                            witness.len()
                        )));
                    }
                    attempts.sort_by_key(|a| a.s);
                    return Ok(HardnessRecord { formula_key, h: s, witness, engine: config.engine.name(), applied, attempts });
                }
                s += 1;
            }
        }
    }
}

/// Runs [`hardness`] over many formulas in parallel, preserving order.
pub fn hardness_many(formulas: &[Formula], config: &HardnessConfig) -> Vec<Result<HardnessRecord>> {
    formulas.par_iter().map(|f| hardness(f, config)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn solve_at(f: &Formula, s: usize, options: EncodeOptions) -> Status {
        let e = encode(f, s, options).unwrap();
        satgate::solve(&e.cnf, &Backend::Builtin, None).unwrap().status
    }

    #[test]
    fn unit_pair_refutes_in_three() {
        let f = fixtures::unit_pair();
        let e = encode(&f, 3, EncodeOptions::default()).unwrap();
        let v = satgate::solve(&e.cnf, &Backend::Builtin, None).unwrap();
        assert_eq!(v.status, Status::Sat);
        let dag = decode(&e, v.model.as_ref().unwrap()).unwrap();
        assert!(dag.is_valid_refutation(&f));
        assert!(matches!(encode(&f, 2, EncodeOptions::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn rejects_non_mu_input() {
        let f = Formula::from_dimacs(&[&[1], &[-1], &[2]]).unwrap();
        assert!(matches!(encode(&f, 5, EncodeOptions::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn small_hardness_values() {
        for (f, h) in [(fixtures::unit_pair(), 3), (fixtures::binary_with_units(), 5), (fixtures::full_two(), 7)] {
            let r = hardness(&f, &HardnessConfig::default()).unwrap();
            assert_eq!(r.h, h, "{f}");
            assert!(r.witness.is_valid_refutation(&f));
            assert_eq!(r.witness.len(), h);
        }
        assert_eq!(hardness(&fixtures::bottom(), &HardnessConfig::default()).unwrap().h, 1);
    }

    #[test]
    fn mu_two_five_boundary() {
        let f = fixtures::mu_two(5);
        for options in EncodeOptions::all_combinations() {
            assert_eq!(solve_at(&f, 9, options), Status::Unsat, "{options:?}");
            assert_eq!(solve_at(&f, 10, options), Status::Sat, "{options:?}");
        }
    }

    #[test]
    fn options_report_what_applied() {
        let all = EncodeOptions { reuse: true, symmetry: true, ordering: true, ..Default::default() };
        let e = encode(&fixtures::unit_pair(), 3, all).unwrap();
        assert_eq!(e.applied, Applied { reuse: false, symmetry: false, ordering: true });
        let e = encode(&fixtures::mu_two(5), 10, all).unwrap();
        assert_eq!(e.applied, Applied { reuse: true, symmetry: true, ordering: true });
        let mut base = encode(&fixtures::unit_pair(), 4, EncodeOptions::default()).unwrap();
        assert!(add_reuse_constraint(&mut base).is_err());
        let sym = iso::automorphisms(&fixtures::unit_pair());
        assert!(add_symmetry_breaking(&mut base, &sym).is_err());
    }

    #[test]
    fn symmetry_witness_ends_with_representative_units() {
        let f = fixtures::mu_two(5);
        let opts = EncodeOptions { symmetry: true, ..Default::default() };
        let e = encode(&f, 10, opts).unwrap();
        let v = satgate::solve(&e.cnf, &Backend::Builtin, None).unwrap();
        let dag = decode(&e, v.model.as_ref().unwrap()).unwrap();
        let steps = dag.steps();
        let rep = iso::automorphisms(&f).representatives()[0];
        assert_eq!(*steps[7].clause(), Clause::new([rep.lit(true)]).unwrap());
        assert_eq!(*steps[8].clause(), Clause::new([rep.lit(false)]).unwrap());
    }

    #[test]
    fn tampered_model_is_rejected() {
        let f = fixtures::binary_with_units();
        let e = encode(&f, 5, EncodeOptions::default()).unwrap();
        let v = satgate::solve(&e.cnf, &Backend::Builtin, None).unwrap();
        let mut model = v.model.unwrap();
        let arc = e.var(EncVar::Arc(1, 5)).unwrap() as usize - 1;
        model.0[arc] = !model.0[arc];
        assert!(matches!(decode(&e, &model), Err(Error::DecodeInconsistency(_))));
    }

    #[test]
    fn sequential_counters_agree() {
        let f = fixtures::mu_two(5);
        let opts = EncodeOptions { sequential_counters: true, ..Default::default() };
        assert_eq!(solve_at(&f, 9, opts), Status::Unsat);
        assert_eq!(solve_at(&f, 10, opts), Status::Sat);
    }

    #[test]
    fn varmap_names_every_variable() {
        let e = encode(&fixtures::unit_pair(), 3, EncodeOptions::default()).unwrap();
        let map = e.varmap();
        assert_eq!(map.len(), e.cnf.num_vars as usize);
        assert_eq!(map["arc(1,3)"], serde_json::Value::from(e.var(EncVar::Arc(1, 3)).unwrap()));
    }
}
