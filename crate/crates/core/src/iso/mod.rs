//! Clause-literal graphs, canonical keys and formula automorphisms.
//!
//! The clause-literal graph has one vertex per literal of `var(F)` and one
//! per clause, with an edge between complementary literals and between each
//! clause and its literals. Literal and clause vertices carry different
//! colors. Two formulas are isomorphic exactly when these colored graphs
//! are, and because clauses are distinct sets every graph automorphism is
//! determined by its action on literals.

pub mod canon;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cnf::{Clause, Formula, Lit, Var};
use crate::error::{Error, Result};
use canon::{canonical_labeling, ColoredGraph, Labeling};

const KEY_VERSION: u8 = 1;

/// The two-colored clause-literal graph of a formula.
#[derive(Clone, Debug)]
pub struct ClauseLiteralGraph {
    /// Variables of the formula; variable `vars[i]` owns literal vertices
    /// `2i` (positive) and `2i + 1` (negative).
    pub vars: Vec<Var>,
    pub num_clauses: usize,
    pub graph: ColoredGraph,
}

impl ClauseLiteralGraph {
    pub fn new(formula: &Formula) -> ClauseLiteralGraph {
        let vars = formula.vars();
        let index: BTreeMap<Var, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let k = vars.len();
        let m = formula.len();
        let mut colors = vec![0; 2 * k];
        colors.extend(std::iter::repeat_n(1, m));
        let mut graph = ColoredGraph::new(colors);
        for i in 0..k {
            graph.add_edge(2 * i, 2 * i + 1);
        }
        for (j, c) in formula.clauses().iter().enumerate() {
            for &l in c.lits() {
                graph.add_edge(2 * k + j, literal_vertex(index[&l.var()], l.is_positive()));
            }
        }
        ClauseLiteralGraph { vars, num_clauses: m, graph }
    }

    /// Builds the graph from clause bitmasks over variables `0..nvars`,
    /// keeping only variables that occur. Returns the graph together with
    /// the occurring variable indices.
    pub(crate) fn from_masks(nvars: usize, clauses: &[(u64, u64)]) -> (ColoredGraph, Vec<usize>) {
        let used_mask = clauses.iter().fold(0u64, |acc, &(p, n)| acc | p | n);
        let used: Vec<usize> = (0..nvars).filter(|&v| used_mask >> v & 1 == 1).collect();
        let mut index = [usize::MAX; 64];
        for (i, &v) in used.iter().enumerate() {
            index[v] = i;
        }
        let k = used.len();
        let mut colors = vec![0; 2 * k];
        colors.extend(std::iter::repeat_n(1, clauses.len()));
        let mut graph = ColoredGraph::new(colors);
        for i in 0..k {
            graph.add_edge(2 * i, 2 * i + 1);
        }
        for (j, &(p, n)) in clauses.iter().enumerate() {
            for &v in &used {
                if p >> v & 1 == 1 {
                    graph.add_edge(2 * k + j, 2 * index[v]);
                }
                if n >> v & 1 == 1 {
                    graph.add_edge(2 * k + j, 2 * index[v] + 1);
                }
            }
        }
        (graph, used)
    }

    pub fn num_literal_vertices(&self) -> usize {
        2 * self.vars.len()
    }
}

fn literal_vertex(var_index: usize, positive: bool) -> usize {
    2 * var_index + usize::from(!positive)
}

/// Canonical identifier of an isomorphism class of formulas.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub(crate) fn from_certificate(num_vars: usize, num_clauses: usize, certificate: &[u8]) -> CanonicalKey {
        let mut bytes = Vec::with_capacity(5 + certificate.len());
        bytes.push(KEY_VERSION);
        bytes.extend_from_slice(&(num_vars as u16).to_be_bytes());
        bytes.extend_from_slice(&(num_clauses as u16).to_be_bytes());
        bytes.extend_from_slice(certificate);
        CanonicalKey(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn num_vars(&self) -> usize {
        u16::from_be_bytes([self.0[1], self.0[2]]) as usize
    }

    pub fn num_clauses(&self) -> usize {
        u16::from_be_bytes([self.0[3], self.0[4]]) as usize
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for CanonicalKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<CanonicalKey> {
        let bytes = hex::decode(s).map_err(|e| Error::Parse { line: 0, msg: format!("bad key: {e}") })?;
        if bytes.len() < 5 || bytes[0] != KEY_VERSION {
            return Err(Error::Parse { line: 0, msg: "unsupported key version".into() });
        }
        Ok(CanonicalKey(bytes))
    }
}

impl From<CanonicalKey> for String {
    fn from(k: CanonicalKey) -> String {
        k.to_hex()
    }
}

impl TryFrom<String> for CanonicalKey {
    type Error = Error;

    fn try_from(s: String) -> Result<CanonicalKey> {
        s.parse()
    }
}

/// A negation-compatible permutation of literals, stored by the image of
/// each positive literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralPermutation {
    images: BTreeMap<Var, Lit>,
}

impl LiteralPermutation {
    pub fn new(images: BTreeMap<Var, Lit>) -> LiteralPermutation {
        LiteralPermutation { images }
    }

    pub fn apply(&self, l: Lit) -> Lit {
        match self.images.get(&l.var()) {
            Some(&img) if l.is_positive() => img,
            Some(&img) => !img,
            None => l,
        }
    }

    pub fn apply_clause(&self, c: &Clause) -> Clause {
        c.map_lits(|l| self.apply(l)).expect("literal permutations preserve consistency")
    }

    pub fn apply_formula(&self, f: &Formula) -> Formula {
        Formula::new(f.clauses().iter().map(|c| self.apply_clause(c)))
    }

    /// The induced permutation of variables.
    pub fn var_image(&self, v: Var) -> Var {
        self.apply(v.lit(true)).var()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().all(|(&v, &l)| l == v.lit(true))
    }
}

/// The automorphism group of a formula.
#[derive(Clone, Debug)]
pub struct SymmetryInfo {
    pub generators: Vec<LiteralPermutation>,
    pub order: BigUint,
    pub variable_orbits: Vec<Vec<Var>>,
}

impl SymmetryInfo {
    /// Smallest variable of each orbit.
    pub fn representatives(&self) -> Vec<Var> {
        self.variable_orbits.iter().map(|o| o[0]).collect()
    }

    pub fn is_representative(&self, v: Var) -> bool {
        self.variable_orbits.iter().any(|o| o[0] == v)
    }
}

/// Canonical labeling of a formula with everything derived from it.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    /// The isomorphic copy of the formula obtained by renaming variables
    /// and polarities according to the canonical labeling. Isomorphic
    /// inputs produce identical formulas.
    pub formula: Formula,
    pub symmetry: SymmetryInfo,
}

fn labeling_of(formula: &Formula) -> (ClauseLiteralGraph, Labeling) {
    let g = ClauseLiteralGraph::new(formula);
    let l = canonical_labeling(&g.graph);
    (g, l)
}

pub fn canonical_key(formula: &Formula) -> CanonicalKey {
    let (g, l) = labeling_of(formula);
    CanonicalKey::from_certificate(g.vars.len(), g.num_clauses, &l.certificate)
}

pub fn canonical_form(formula: &Formula) -> CanonicalForm {
    let (g, l) = labeling_of(formula);
    let key = CanonicalKey::from_certificate(g.vars.len(), g.num_clauses, &l.certificate);
    let renaming = canonical_renaming(&g.vars, &l.position);
    let formula = renaming.apply_formula(formula);
    let symmetry = symmetry_from_labeling(&g.vars, &l);
    CanonicalForm { key, formula, symmetry }
}

/// Sends each variable to the rank of its first literal position, with the
/// earlier literal becoming positive.
fn canonical_renaming(vars: &[Var], position: &[u32]) -> LiteralPermutation {
    let mut order: Vec<(u32, usize, bool)> = vars
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let (p, n) = (position[2 * i], position[2 * i + 1]);
            (p.min(n), i, p < n)
        })
        .collect();
    order.sort_unstable();
    let images = order
        .iter()
        .enumerate()
        .map(|(rank, &(_, i, positive_first))| (vars[i], Var::new(rank as u32 + 1).lit(positive_first)))
        .collect();
    LiteralPermutation::new(images)
}

fn symmetry_from_labeling(vars: &[Var], l: &Labeling) -> SymmetryInfo {
    let k = vars.len();
    let generators = l
        .generators
        .iter()
        .map(|perm| {
            let images = (0..k)
                .map(|i| {
                    let w = perm[2 * i] as usize;
                    assert!(w < 2 * k, "automorphism maps a literal to a clause");
                    assert_eq!(perm[2 * i + 1] as usize, w ^ 1, "automorphism is not negation-compatible");
                    (vars[i], vars[w / 2].lit(w % 2 == 0))
                })
                .collect();
            LiteralPermutation::new(images)
        })
        .collect();
    let mut orbits: BTreeMap<u32, Vec<Var>> = BTreeMap::new();
    for (i, &v) in vars.iter().enumerate() {
        // Literal vertices of one orbit share a representative; fold the
        // negative literal in so that flips do not split a variable orbit.
        let rep = l.orbit_rep[2 * i].min(l.orbit_rep[2 * i + 1]) / 2;
        orbits.entry(rep).or_default().push(v);
    }
    let mut variable_orbits: Vec<Vec<Var>> = orbits.into_values().collect();
    variable_orbits.sort();
    SymmetryInfo { generators, order: l.group_order.clone(), variable_orbits }
}

pub fn automorphisms(formula: &Formula) -> SymmetryInfo {
    let (g, l) = labeling_of(formula);
    symmetry_from_labeling(&g.vars, &l)
}

pub fn are_isomorphic(a: &Formula, b: &Formula) -> bool {
    canonical_key(a) == canonical_key(b)
}

/// Number of distinct formulas over `var(F)` isomorphic to `F`.
pub fn count_labeled_copies(formula: &Formula) -> BigUint {
    let n = formula.num_vars();
    let mut total = BigUint::one() << n;
    for i in 2..=n {
        total *= BigUint::from(i);
    }
    total / automorphisms(formula).order
}
