//! Literals, clauses, formulas and the elementary operations on them.
//!
//! Clauses are kept with their literals sorted by variable and formulas are
//! kept with their clauses sorted by `(size, literals)`, so structural
//! equality coincides with set equality and every textual output is
//! deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Default bound on the number of variables for exhaustive evaluation.
pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 20;

/// A propositional variable, numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn new(id: u32) -> Var {
        assert!(id >= 1, "variable ids start at 1");
        Var(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    /// Zero-based index, handy for bit masks.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn lit(self, positive: bool) -> Lit {
        Lit::new(self, positive)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal in DIMACS convention: `v` or `-v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Lit {
        let v = var.0 as i32;
        Lit(if positive { v } else { -v })
    }

    pub fn from_dimacs(code: i32) -> Lit {
        assert!(code != 0, "0 is not a literal");
        Lit(code)
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Dense code `2 * index + (negative as usize)`.
    pub fn code(self) -> usize {
        2 * self.var().index() + usize::from(!self.is_positive())
    }

    pub fn from_code(code: usize) -> Lit {
        Lit::new(Var::new(code as u32 / 2 + 1), code % 2 == 0)
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl Ord for Lit {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.var(), !self.is_positive()).cmp(&(other.var(), !other.is_positive()))
    }
}

impl PartialOrd for Lit {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "{}", self.var())
        } else {
            write!(f, "-{}", self.var())
        }
    }
}

/// A non-tautological set of literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// The empty clause.
    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    /// Builds a clause, removing duplicates. Fails on tautologies.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Clause> {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return Err(Error::Tautology(lits.iter().map(|l| l.to_dimacs()).collect()));
        }
        Ok(Clause { lits })
    }

    pub fn from_dimacs(codes: &[i32]) -> Result<Clause> {
        if codes.contains(&0) {
            return Err(Error::Parse { line: 0, msg: "0 inside clause".into() });
        }
        Clause::new(codes.iter().map(|&c| Lit::from_dimacs(c)))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.lits.iter().map(|l| l.var())
    }

    /// `C ∩ ¬D`: literals of `self` whose complement is in `other`.
    pub fn clashing_lits(&self, other: &Clause) -> Vec<Lit> {
        self.lits.iter().copied().filter(|&l| other.contains(!l)).collect()
    }

    pub fn clashes_with(&self, other: &Clause) -> bool {
        self.lits.iter().any(|&l| other.contains(!l))
    }

    pub fn is_subset_of(&self, other: &Clause) -> bool {
        self.lits.iter().all(|&l| other.contains(l))
    }

    pub fn intersection(&self, other: &Clause) -> Clause {
        Clause { lits: self.lits.iter().copied().filter(|&l| other.contains(l)).collect() }
    }

    /// `self ∖ other`.
    pub fn difference(&self, other: &Clause) -> Clause {
        Clause { lits: self.lits.iter().copied().filter(|&l| !other.contains(l)).collect() }
    }

    /// Union of two clauses; fails if the result would be tautological.
    pub fn union(&self, other: &Clause) -> Result<Clause> {
        Clause::new(self.lits.iter().chain(other.lits.iter()).copied())
    }

    pub fn with_lit(&self, lit: Lit) -> Result<Clause> {
        Clause::new(self.lits.iter().copied().chain(std::iter::once(lit)))
    }

    pub fn map_lits(&self, f: impl Fn(Lit) -> Lit) -> Result<Clause> {
        Clause::new(self.lits.iter().map(|&l| f(l)))
    }

    pub fn to_dimacs(&self) -> Vec<i32> {
        self.lits.iter().map(|l| l.to_dimacs()).collect()
    }
}

impl Ord for Clause {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.lits.len().cmp(&other.lits.len()).then_with(|| self.lits.cmp(&other.lits))
    }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return write!(f, "⊥");
        }
        write!(f, "{{")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// A (possibly partial) truth assignment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<Var, bool>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    /// Builds an assignment from the literals it makes true.
    pub fn from_lits(lits: impl IntoIterator<Item = Lit>) -> Result<Assignment> {
        let mut a = Assignment::new();
        for l in lits {
            match a.values.insert(l.var(), l.is_positive()) {
                Some(prev) if prev != l.is_positive() => {
                    return Err(Error::InconsistentAssignment(l.var().id()))
                }
                _ => {}
            }
        }
        Ok(a)
    }

    pub fn set(&mut self, var: Var, value: bool) {
        self.values.insert(var, value);
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.values.get(&var).copied()
    }

    pub fn value(&self, lit: Lit) -> Option<bool> {
        self.get(lit.var()).map(|v| v == lit.is_positive())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The literals set to true.
    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.values.iter().map(|(&v, &b)| Lit::new(v, b))
    }

    pub fn satisfies(&self, clause: &Clause) -> bool {
        clause.lits().iter().any(|&l| self.value(l) == Some(true))
    }
}

/// A CNF formula: a finite set of clauses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Formula {
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(clauses: impl IntoIterator<Item = Clause>) -> Formula {
        let mut clauses: Vec<Clause> = clauses.into_iter().collect();
        clauses.sort();
        clauses.dedup();
        Formula { clauses }
    }

    /// Convenience constructor from DIMACS-style integer clauses.
    pub fn from_dimacs(clauses: &[&[i32]]) -> Result<Formula> {
        let clauses: Result<Vec<Clause>> = clauses.iter().map(|c| Clause::from_dimacs(c)).collect();
        Ok(Formula::new(clauses?))
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn contains(&self, clause: &Clause) -> bool {
        self.clauses.binary_search(clause).is_ok()
    }

    /// Position of a clause in the normalized order.
    pub fn position(&self, clause: &Clause) -> Option<usize> {
        self.clauses.binary_search(clause).ok()
    }

    /// `var(F)`, sorted.
    pub fn vars(&self) -> Vec<Var> {
        let mut vars: Vec<Var> = self.clauses.iter().flat_map(|c| c.vars()).collect();
        vars.sort();
        vars.dedup();
        vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars().len()
    }

    /// Largest variable id, 0 for variable-free formulas.
    pub fn max_var(&self) -> u32 {
        self.clauses.iter().flat_map(|c| c.vars()).map(|v| v.id()).max().unwrap_or(0)
    }

    /// Number of clauses containing `lit`.
    pub fn occurrences(&self, lit: Lit) -> usize {
        self.clauses.iter().filter(|c| c.contains(lit)).count()
    }

    pub fn without(&self, index: usize) -> Formula {
        let mut clauses = self.clauses.clone();
        clauses.remove(index);
        Formula { clauses }
    }

    pub fn with_clause(&self, clause: Clause) -> Formula {
        Formula::new(self.clauses.iter().cloned().chain(std::iter::once(clause)))
    }

    /// Sub-formula made of the clauses at `indices`.
    pub fn subset(&self, indices: &[usize]) -> Formula {
        Formula::new(indices.iter().map(|&i| self.clauses[i].clone()))
    }

    pub fn total_literals(&self) -> usize {
        self.clauses.iter().map(|c| c.len()).sum()
    }

    /// Rename variables to `1..=k` in order of first appearance in `vars()`.
    pub fn compacted(&self) -> Formula {
        let vars = self.vars();
        let map: BTreeMap<Var, Var> =
            vars.iter().enumerate().map(|(i, &v)| (v, Var::new(i as u32 + 1))).collect();
        Formula::new(self.clauses.iter().map(|c| {
            c.map_lits(|l| Lit::new(map[&l.var()], l.is_positive())).expect("renaming keeps clauses")
        }))
    }

    pub fn to_dimacs(&self) -> Vec<Vec<i32>> {
        self.clauses.iter().map(|c| c.to_dimacs()).collect()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// Result of restricting a clause by an assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restricted {
    Satisfied,
    Clause(Clause),
}

/// `C[τ]`.
pub fn restrict_clause(clause: &Clause, tau: &Assignment) -> Restricted {
    if tau.satisfies(clause) {
        return Restricted::Satisfied;
    }
    Restricted::Clause(Clause {
        lits: clause.lits().iter().copied().filter(|&l| tau.value(l).is_none()).collect(),
    })
}

/// `F[τ] = {C[τ] | C ∈ F} ∖ {⊤}`.
pub fn restrict(formula: &Formula, tau: &Assignment) -> Formula {
    Formula::new(formula.clauses().iter().filter_map(|c| match restrict_clause(c, tau) {
        Restricted::Satisfied => None,
        Restricted::Clause(c) => Some(c),
    }))
}

/// Restriction by the falsifying assignment of a clause: `F[¬C]`.
pub fn restrict_by_negation(formula: &Formula, clause: &Clause) -> Formula {
    let tau = Assignment::from_lits(clause.lits().iter().map(|&l| !l)).expect("clauses are consistent");
    restrict(formula, &tau)
}

/// The resolution rule. Requires exactly one clashing literal.
pub fn resolve(c1: &Clause, c2: &Clause) -> Result<Clause> {
    let clash = c1.clashing_lits(c2);
    if clash.len() != 1 {
        return Err(Error::NotResolvable { clashes: clash.len() });
    }
    let pivot = clash[0].var();
    Clause::new(c1.lits().iter().chain(c2.lits().iter()).copied().filter(|l| l.var() != pivot))
}

/// Resolution on an explicitly named pivot variable.
pub fn resolve_on(c1: &Clause, c2: &Clause, pivot: Var) -> Result<Clause> {
    let clash = c1.clashing_lits(c2);
    if clash.len() != 1 || clash[0].var() != pivot {
        return Err(Error::NotResolvable { clashes: clash.len() });
    }
    resolve(c1, c2)
}

/// Clauses as bit masks over a local variable numbering, for exhaustive
/// evaluation. Bit `i` of an assignment word is the value of `vars[i]`.
#[derive(Clone, Debug)]
pub(crate) struct MaskedFormula {
    pub vars: Vec<Var>,
    pub clauses: Vec<(u64, u64)>,
}

impl MaskedFormula {
    pub fn new(formula: &Formula, extra: &[Var]) -> MaskedFormula {
        let mut vars = formula.vars();
        vars.extend_from_slice(extra);
        vars.sort();
        vars.dedup();
        let clauses = formula.clauses().iter().map(|c| clause_masks(c, &vars)).collect();
        MaskedFormula { vars, clauses }
    }

    pub fn satisfied_by(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|&(p, n)| assignment & p != 0 || !assignment & n != 0)
    }
}

pub(crate) fn clause_masks(clause: &Clause, vars: &[Var]) -> (u64, u64) {
    let mut pos = 0u64;
    let mut neg = 0u64;
    for &l in clause.lits() {
        let i = vars.binary_search(&l.var()).expect("variable in table");
        if l.is_positive() {
            pos |= 1 << i;
        } else {
            neg |= 1 << i;
        }
    }
    (pos, neg)
}

pub(crate) fn check_limit(vars: usize, limit: usize) -> Result<()> {
    if vars > limit || vars > 40 {
        return Err(Error::LimitExceeded { vars, limit });
    }
    Ok(())
}

/// Exact number of models over total assignments to `var(F)`.
pub fn count_models_bruteforce(formula: &Formula) -> Result<u64> {
    count_models_bruteforce_with_limit(formula, DEFAULT_BRUTE_FORCE_LIMIT)
}

pub fn count_models_bruteforce_with_limit(formula: &Formula, limit: usize) -> Result<u64> {
    let masked = MaskedFormula::new(formula, &[]);
    check_limit(masked.vars.len(), limit)?;
    Ok((0..1u64 << masked.vars.len()).filter(|&a| masked.satisfied_by(a)).count() as u64)
}

pub fn is_satisfiable(formula: &Formula) -> Result<bool> {
    is_satisfiable_with_limit(formula, DEFAULT_BRUTE_FORCE_LIMIT)
}

pub fn is_satisfiable_with_limit(formula: &Formula, limit: usize) -> Result<bool> {
    let masked = MaskedFormula::new(formula, &[]);
    check_limit(masked.vars.len(), limit)?;
    Ok((0..1u64 << masked.vars.len()).any(|a| masked.satisfied_by(a)))
}

/// Some model of the formula, if any, by exhaustive search.
pub fn find_model(formula: &Formula) -> Result<Option<Assignment>> {
    let masked = MaskedFormula::new(formula, &[]);
    check_limit(masked.vars.len(), DEFAULT_BRUTE_FORCE_LIMIT)?;
    Ok((0..1u64 << masked.vars.len()).find(|&a| masked.satisfied_by(a)).map(|a| {
        let mut tau = Assignment::new();
        for (i, &v) in masked.vars.iter().enumerate() {
            tau.set(v, a >> i & 1 == 1);
        }
        tau
    }))
}

/// `F ⊨ C`, decided by checking that `F ∧ ¬C` has no model.
pub fn entails(formula: &Formula, clause: &Clause) -> Result<bool> {
    let masked = MaskedFormula::new(formula, &clause.vars().collect::<Vec<_>>());
    check_limit(masked.vars.len(), DEFAULT_BRUTE_FORCE_LIMIT)?;
    let (cp, cn) = clause_masks(clause, &masked.vars);
    Ok(!(0..1u64 << masked.vars.len())
        .any(|a| masked.satisfied_by(a) && a & cp == 0 && !a & cn == 0))
}

/// Minimal unsatisfiability by brute force.
pub fn is_minimally_unsatisfiable(formula: &Formula) -> Result<bool> {
    if is_satisfiable(formula)? {
        return Ok(false);
    }
    for i in 0..formula.len() {
        if !is_satisfiable(&formula.without(i))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Reads a DIMACS CNF file into a formula.
pub fn read_dimacs(reader: impl BufRead) -> Result<Formula> {
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(Error::Parse { line: lineno + 1, msg: format!("bad header `{line}`") });
            }
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::Parse { line: lineno + 1, msg: e.to_string() })
            };
            header = Some((parse(parts[2])?, parse(parts[3])?));
            continue;
        }
        for tok in line.split_whitespace() {
            let code: i32 = tok
                .parse()
                .map_err(|_| Error::Parse { line: lineno + 1, msg: format!("bad literal `{tok}`") })?;
            if code == 0 {
                clauses.push(Clause::from_dimacs(&current)?);
                current.clear();
            } else {
                current.push(code);
            }
        }
    }
    if !current.is_empty() {
        return Err(Error::Parse { line: 0, msg: "unterminated clause".into() });
    }
    let (_, m) = header.ok_or(Error::Parse { line: 0, msg: "missing `p cnf` header".into() })?;
    if m != clauses.len() {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header announces {m} clauses, found {}", clauses.len()),
        });
    }
    Ok(Formula::new(clauses))
}

/// Writes a formula as DIMACS CNF. `num_vars` defaults to the largest id.
pub fn write_dimacs(formula: &Formula, num_vars: Option<u32>, mut out: impl Write) -> Result<()> {
    let n = num_vars.unwrap_or(0).max(formula.max_var());
    writeln!(out, "p cnf {} {}", n, formula.len())?;
    for c in formula.clauses() {
        for l in c.lits() {
            write!(out, "{} ", l.to_dimacs())?;
        }
        writeln!(out, "0")?;
    }
    Ok(())
}

pub fn to_dimacs_string(formula: &Formula) -> String {
    let mut buf = Vec::new();
    write_dimacs(formula, None, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}
