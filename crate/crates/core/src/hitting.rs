//! Hitting formulas: exact model counting, unsatisfiability, saturation,
//! deficiency, regularity and singular DP-reduction.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::cnf::{self, Clause, Formula, Var};
use crate::error::{Error, Result};

/// A nonnegative dyadic rational `numerator / 2^log2_denominator`.
///
/// Always kept canonical: the numerator is odd, or it is zero and the
/// exponent is zero. Two canonical values are equal iff their fields are.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicCount {
    numerator: BigUint,
    log2_denominator: u32,
}

impl DyadicCount {
    pub fn zero() -> DyadicCount {
        DyadicCount { numerator: BigUint::zero(), log2_denominator: 0 }
    }

    pub fn one() -> DyadicCount {
        DyadicCount { numerator: BigUint::one(), log2_denominator: 0 }
    }

    /// `2^-k`.
    pub fn inverse_power_of_two(k: u32) -> DyadicCount {
        DyadicCount { numerator: BigUint::one(), log2_denominator: k }
    }

    pub fn new(numerator: BigUint, log2_denominator: u32) -> DyadicCount {
        let mut d = DyadicCount { numerator, log2_denominator };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.numerator.is_zero() {
            self.log2_denominator = 0;
            return;
        }
        let tz = self.numerator.trailing_zeros().unwrap_or(0).min(self.log2_denominator as u64);
        self.numerator >>= tz;
        self.log2_denominator -= tz as u32;
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn log2_denominator(&self) -> u32 {
        self.log2_denominator
    }

    pub fn is_one(&self) -> bool {
        self.log2_denominator == 0 && self.numerator.is_one()
    }

    /// Numerator over the fixed denominator `2^l`, if `l` is large enough.
    pub fn numerator_at(&self, l: u32) -> Option<BigUint> {
        (l >= self.log2_denominator).then(|| &self.numerator << (l - self.log2_denominator))
    }

    pub fn to_f64(&self) -> f64 {
        let num: f64 = self.numerator.to_string().parse().unwrap_or(f64::INFINITY);
        num / 2f64.powi(self.log2_denominator as i32)
    }
}

impl std::ops::Add for &DyadicCount {
    type Output = DyadicCount;
    fn add(self, rhs: &DyadicCount) -> DyadicCount {
        let l = self.log2_denominator.max(rhs.log2_denominator);
        let a = self.numerator_at(l).expect("l is the max");
        let b = rhs.numerator_at(l).expect("l is the max");
        DyadicCount::new(a + b, l)
    }
}

impl Ord for DyadicCount {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.log2_denominator.max(other.log2_denominator);
        self.numerator_at(l).cmp(&other.numerator_at(l))
    }
}

impl PartialOrd for DyadicCount {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_denominator == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.log2_denominator)
        }
    }
}

/// `Σ_{C ∈ F} 2^{-|C|}`.
pub fn clause_weight_sum(formula: &Formula) -> DyadicCount {
    let l = formula.clauses().iter().map(|c| c.len()).max().unwrap_or(0) as u32;
    let total: BigUint =
        formula.clauses().iter().map(|c| BigUint::one() << (l - c.len() as u32)).sum();
    DyadicCount::new(total, l)
}

/// Every pair of distinct clauses clashes.
pub fn is_hitting(formula: &Formula) -> bool {
    let cs = formula.clauses();
    cs.iter().enumerate().all(|(i, c)| cs[i + 1..].iter().all(|d| c.clashes_with(d)))
}

/// Models over `n` variables by the closed form `2^n (1 - Σ 2^{-|C|})`.
pub fn count_models_hitting(formula: &Formula, n: usize) -> Result<BigUint> {
    if !is_hitting(formula) {
        return Err(Error::NotHitting);
    }
    if n < formula.num_vars() {
        return Err(Error::Precondition(format!(
            "n = {n} is smaller than the {} variables of the formula",
            formula.num_vars()
        )));
    }
    let total = BigUint::one() << n;
    let covered: BigUint =
        formula.clauses().iter().map(|c| BigUint::one() << (n - c.len())).sum();
    if covered > total {
        return Err(Error::NegativeCount);
    }
    Ok(total - covered)
}

/// A hitting formula is unsatisfiable iff its clause weights sum to one.
pub fn is_unsat_hitting(formula: &Formula) -> Result<bool> {
    if !is_hitting(formula) {
        return Err(Error::NotHitting);
    }
    Ok(clause_weight_sum(formula).is_one())
}

/// Saturated minimal unsatisfiability, checked exhaustively.
///
/// Literal additions range over `var(F)` plus one fresh variable; further
/// fresh variables behave identically to the first one.
pub fn is_saturated_mu(formula: &Formula) -> Result<bool> {
    if !cnf::is_minimally_unsatisfiable(formula)? {
        return Ok(false);
    }
    let mut vars = formula.vars();
    vars.push(Var::new(formula.max_var() + 1));
    for (i, clause) in formula.clauses().iter().enumerate() {
        let rest = formula.without(i);
        for &v in &vars {
            if clause.vars().any(|w| w == v) {
                continue;
            }
            for positive in [true, false] {
                let grown = clause.with_lit(v.lit(positive))?;
                if !cnf::is_satisfiable(&rest.with_clause(grown))? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `|F| - |var(F)|`.
pub fn deficiency(formula: &Formula) -> i64 {
    formula.len() as i64 - formula.num_vars() as i64
}

/// Variables with a literal occurring in exactly one clause.
pub fn singular_vars(formula: &Formula) -> Vec<Var> {
    formula
        .vars()
        .into_iter()
        .filter(|&v| formula.occurrences(v.lit(true)) == 1 || formula.occurrences(v.lit(false)) == 1)
        .collect()
}

/// Every literal over `var(F)` occurs in at least two clauses.
pub fn is_regular(formula: &Formula) -> bool {
    formula
        .vars()
        .into_iter()
        .all(|v| formula.occurrences(v.lit(true)) >= 2 && formula.occurrences(v.lit(false)) >= 2)
}

/// DP-elimination of one variable: all non-tautological resolvents on `v`
/// replace the clauses mentioning `v`.
pub fn dp_eliminate(formula: &Formula, v: Var) -> Formula {
    let (with_v, rest): (Vec<&Clause>, Vec<&Clause>) =
        formula.clauses().iter().partition(|c| c.vars().any(|w| w == v));
    let pos: Vec<&Clause> = with_v.iter().copied().filter(|c| c.contains(v.lit(true))).collect();
    let neg: Vec<&Clause> = with_v.iter().copied().filter(|c| c.contains(v.lit(false))).collect();
    let mut out: Vec<Clause> = rest.into_iter().cloned().collect();
    for p in &pos {
        for q in &neg {
            if let Ok(r) = cnf::resolve(p, q) {
                out.push(r);
            }
        }
    }
    Formula::new(out)
}

/// Exhaustive singular DP-reduction, smallest singular variable first.
pub fn singular_dp_reduce(formula: &Formula) -> Formula {
    let mut current = formula.clone();
    while let Some(&v) = singular_vars(&current).first() {
        current = dp_eliminate(&current, v);
    }
    current
}

/// Literal occurrence counts indexed by [`Lit::code`].
pub fn occurrence_table(formula: &Formula) -> Vec<usize> {
    let mut occ = vec![0; 2 * formula.max_var() as usize];
    for c in formula.clauses() {
        for &l in c.lits() {
            occ[l.code()] += 1;
        }
    }
    occ
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn dyadic_is_canonical() {
        let half = DyadicCount::inverse_power_of_two(1);
        let sum = &half + &half;
        assert!(sum.is_one());
        assert_eq!(sum, DyadicCount::one());
        let three_eighths = DyadicCount::new(BigUint::from(6u32), 4);
        assert_eq!(three_eighths.numerator(), &BigUint::from(3u32));
        assert_eq!(three_eighths.log2_denominator(), 3);
        assert_eq!(DyadicCount::new(BigUint::zero(), 9), DyadicCount::zero());
        assert!(DyadicCount::inverse_power_of_two(3) < DyadicCount::inverse_power_of_two(2));
    }

    #[test]
    fn hitting_examples() {
        assert!(is_hitting(&fixtures::three_cycle()));
        assert!(!is_hitting(&Formula::from_dimacs(&[&[1], &[2]]).unwrap()));
        assert!(is_hitting(&Formula::new([Clause::empty()])));
    }

    #[test]
    fn iwama_examples() {
        assert_eq!(count_models_hitting(&fixtures::three_cycle(), 3).unwrap(), BigUint::zero());
        assert_eq!(
            count_models_hitting(&Formula::from_dimacs(&[&[1]]).unwrap(), 1).unwrap(),
            BigUint::one()
        );
        assert_eq!(count_models_hitting(&Formula::new([Clause::empty()]), 0).unwrap(), BigUint::zero());
        assert!(matches!(
            count_models_hitting(&Formula::from_dimacs(&[&[1], &[2]]).unwrap(), 2),
            Err(Error::NotHitting)
        ));
    }

    #[test]
    fn unsat_hitting_examples() {
        assert!(is_unsat_hitting(&Formula::from_dimacs(&[&[1], &[-1]]).unwrap()).unwrap());
        assert!(is_unsat_hitting(&fixtures::three_cycle()).unwrap());
        assert_eq!(cnf::count_models_bruteforce(&fixtures::three_cycle()).unwrap(), 0);
        assert!(!is_unsat_hitting(&Formula::from_dimacs(&[&[1, 2], &[-1]]).unwrap()).unwrap());
    }

    #[test]
    fn saturation_examples() {
        assert!(is_saturated_mu(&fixtures::mu_two(5)).unwrap());
        assert!(is_saturated_mu(&fixtures::three_cycle()).unwrap());
        assert!(!is_saturated_mu(&fixtures::binary_with_units()).unwrap());
        assert!(cnf::is_minimally_unsatisfiable(&fixtures::binary_with_units()).unwrap());
        assert!(!is_saturated_mu(&Formula::from_dimacs(&[&[1]]).unwrap()).unwrap());
    }

    #[test]
    fn deficiency_and_regularity() {
        let mu5 = fixtures::mu_two(5);
        assert_eq!(deficiency(&mu5), 2);
        assert!(is_regular(&mu5));
        let units = fixtures::binary_with_units();
        assert_eq!(deficiency(&units), 1);
        assert!(!is_regular(&units));
        assert_eq!(singular_vars(&units), vec![Var::new(1), Var::new(2)]);
    }

    #[test]
    fn singular_dp_reduction_preserves_deficiency() {
        // {x}, {¬x, y}, {¬x, ¬y} is an SSMU formula of deficiency 1.
        let f = Formula::from_dimacs(&[&[1], &[-1, 2], &[-1, -2]]).unwrap();
        let r = singular_dp_reduce(&f);
        assert_eq!(deficiency(&r), deficiency(&f));
        assert!(singular_vars(&r).is_empty());
        assert_eq!(r, Formula::new([Clause::empty()]));

        // MU(2) with one variable split off singularly.
        let g = Formula::from_dimacs(&[&[1, 2], &[1, -2], &[-1, 2, 3], &[-1, -2], &[-3, -1, 2]]).unwrap();
        assert!(cnf::is_minimally_unsatisfiable(&g).unwrap());
        {
            let r = singular_dp_reduce(&g);
            assert_eq!(deficiency(&r), deficiency(&g));
            assert!(singular_vars(&r).is_empty());
        }
    }
}
