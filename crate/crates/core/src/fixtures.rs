//! Named formulas and proofs used throughout the test suites and the CLI.

use crate::cnf::{read_dimacs, Clause, Formula, Lit, Var};
use crate::refutation::RefutationDag;

pub const MU_TWO_5_CNF: &str = include_str!("../fixtures/mutwo5.cnf");
pub const F_4_8_52_CNF: &str = include_str!("../fixtures/f4_8_52.cnf");
pub const G_REDUCIBLE_CNF: &str = include_str!("../fixtures/g_reducible.cnf");
pub const MU_TWO_5_PROOF: &str = include_str!("../fixtures/mutwo5.proof");
pub const G_REDUCIBLE_PROOF: &str = include_str!("../fixtures/g_reducible.proof");

fn lit(code: i32) -> Lit {
    Lit::from_dimacs(code)
}

/// The unique regular minimally unsatisfiable formula of deficiency 2 with
/// `m >= 4` clauses: the implication cycle `x1 ← x2 ← … ← xn ← x1` plus the
/// all-positive and all-negative clauses, `n = m - 2`.
pub fn mu_two(m: usize) -> Formula {
    assert!(m >= 4, "MU(2) formulas have at least four clauses");
    let n = (m - 2) as i32;
    let mut clauses: Vec<Clause> = (1..=n)
        .map(|i| Clause::new([lit(i), lit(-(i % n + 1))]).expect("distinct variables"))
        .collect();
    clauses.push(Clause::new((1..=n).map(lit)).unwrap());
    clauses.push(Clause::new((1..=n).map(|i| lit(-i))).unwrap());
    Formula::new(clauses)
}

/// A five-clause hitting formula: the implication cycle on three variables
/// plus the all-positive and all-negative clauses.
pub fn three_cycle() -> Formula {
    Formula::from_dimacs(&[&[1, -2], &[2, -3], &[3, -1], &[1, 2, 3], &[-1, -2, -3]]).unwrap()
}

/// `{x, y}, {¬x}, {¬y}`: minimally unsatisfiable and irreducible, but not
/// saturated and not strongly irreducible.
pub fn binary_with_units() -> Formula {
    Formula::from_dimacs(&[&[1, 2], &[-1], &[-2]]).unwrap()
}

/// MU(2) with six clauses, minus `x4` in the all-positive clause.
pub fn mu_two_6_shortened() -> Formula {
    Formula::from_dimacs(&[&[1, -2], &[2, -3], &[3, -4], &[4, -1], &[1, 2, 3], &[-1, -2, -3, -4]])
        .unwrap()
}

/// The irreducible eight-clause hitting formula of hardness 19.
pub fn f_4_8_52() -> Formula {
    read_dimacs(F_4_8_52_CNF.as_bytes()).expect("fixture parses")
}

/// `f_4_8_52` with `{¬x, z, ¬e}` replaced by its two extensions on `y`.
pub fn g_reducible() -> Formula {
    read_dimacs(G_REDUCIBLE_CNF.as_bytes()).expect("fixture parses")
}

/// The two clauses of `g_reducible` forming a factor with basis `{¬x, z, ¬e}`.
pub fn g_factor_clauses() -> (Clause, Clause, Clause) {
    (
        Clause::from_dimacs(&[-1, 2, 3, -4]).unwrap(),
        Clause::from_dimacs(&[-1, -2, 3, -4]).unwrap(),
        Clause::from_dimacs(&[-1, 3, -4]).unwrap(),
    )
}

/// The pair of isomorphic formulas used to illustrate isomorphism.
pub fn iso_pair() -> (Formula, Formula) {
    (
        Formula::from_dimacs(&[&[1, 2], &[-1, 2], &[-2]]).unwrap(),
        Formula::from_dimacs(&[&[-3, 4], &[3, 4], &[-4]]).unwrap(),
    )
}

/// All four full clauses over two variables: the only RUH(2, 4).
pub fn full_two() -> Formula {
    Formula::from_dimacs(&[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap()
}

pub fn bottom() -> Formula {
    Formula::new([Clause::empty()])
}

pub fn unit_pair() -> Formula {
    Formula::new([Clause::new([Var::new(1).lit(true)]).unwrap(), Clause::new([Var::new(1).lit(false)]).unwrap()])
}

pub fn mu_two_5_proof() -> RefutationDag {
    RefutationDag::parse(MU_TWO_5_PROOF).expect("fixture parses")
}

pub fn g_reducible_proof() -> RefutationDag {
    RefutationDag::parse(G_REDUCIBLE_PROOF).expect("fixture parses")
}
