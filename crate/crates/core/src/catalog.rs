//! Flat-file catalogs of formulas keyed by canonical form, and the
//! per-cell hardness summaries built from them.
//!
//! One formula per line: `n m | c1 ; c2 ; ... ; cm`, each clause a list of
//! space-separated signed integers. Blank lines and `#` comments are
//! ignored.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cnf::{Clause, Formula};
use crate::encode::HardnessRecord;
use crate::error::{Error, Result};
use crate::genesis::{FormulaClass, GenerationResult};
use crate::iso::{self, CanonicalKey};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub key: CanonicalKey,
    pub formula: Formula,
    pub n: usize,
}

impl CatalogEntry {
    /// Labeled formulas over the same `n` variables isomorphic to this one.
    pub fn copies(&self) -> BigUint {
        iso::count_labeled_copies(&self.formula)
    }
}

/// Formulas deduplicated by canonical key, kept in key order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Catalog {
    entries: BTreeMap<CanonicalKey, CatalogEntry>,
}

impl Catalog {
    pub fn new() -> Catalog {
        Catalog::default()
    }

    pub fn from_generation(result: &GenerationResult) -> Catalog {
        let mut c = Catalog::new();
        for g in &result.formulas {
            c.entries.insert(g.key.clone(), CatalogEntry { key: g.key.clone(), formula: g.formula.clone(), n: result.task.n });
        }
        c
    }

    /// Adds `formula` unless an isomorphic copy is present. Returns whether
    /// it was new.
    pub fn insert(&mut self, formula: Formula) -> bool {
        let key = iso::canonical_key(&formula);
        if self.entries.contains_key(&key) {
            return false;
        }
        let n = formula.num_vars();
        self.entries.insert(key.clone(), CatalogEntry { key, formula, n });
        true
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }

    pub fn get(&self, key: &CanonicalKey) -> Option<&CatalogEntry> {
        self.entries.get(key)
    }

    pub fn formulas(&self) -> Vec<Formula> {
        self.entries.values().map(|e| e.formula.clone()).collect()
    }

    /// Reads a catalog. Duplicate isomorphism classes are rejected.
    pub fn read(reader: impl BufRead) -> Result<Catalog> {
        let mut c = Catalog::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let (n, formula) = parse_line(text).map_err(|msg| Error::Parse { line: i + 1, msg })?;
            let key = iso::canonical_key(&formula);
            if c.entries.contains_key(&key) {
                return Err(Error::Parse { line: i + 1, msg: "isomorphic to an earlier entry".into() });
            }
            c.entries.insert(key.clone(), CatalogEntry { key, formula, n });
        }
        Ok(c)
    }

    pub fn write(&self, mut out: impl Write) -> Result<()> {
        for e in self.entries.values() {
            writeln!(out, "{}", format_line(e.n, &e.formula))?;
        }
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Catalog> {
        Catalog::read(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write(&mut out)?;
        out.flush()?;
        Ok(())
    }
}

/// Formats one catalog line; `n` may exceed the variables that occur.
pub fn format_line(n: usize, formula: &Formula) -> String {
    let clauses: Vec<String> = formula
        .clauses()
        .iter()
        .map(|c| c.to_dimacs().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    format!("{n} {} | {}", formula.len(), clauses.join(" ; "))
}

pub fn parse_line(text: &str) -> std::result::Result<(usize, Formula), String> {
    let (head, body) = text.split_once('|').ok_or("missing '|'")?;
    let nums: Vec<usize> = head
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| format!("bad count {t:?}")))
        .collect::<std::result::Result<_, _>>()?;
    let [n, m] = nums[..] else { return Err("expected `n m` before '|'".into()) };
    let mut clauses = Vec::new();
    for part in body.split(';') {
        let lits: Vec<i32> = part
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| format!("bad literal {t:?}")))
            .collect::<std::result::Result<_, _>>()?;
        if lits.iter().any(|&l| l == 0 || l.unsigned_abs() as usize > n) {
            return Err(format!("literal out of range in {:?}", part.trim()));
        }
        clauses.push(Clause::from_dimacs(&lits).map_err(|e| e.to_string())?);
    }
    let formula = Formula::new(clauses);
    if formula.len() != m {
        return Err(format!("expected {m} distinct clauses, found {}", formula.len()));
    }
    Ok((n, formula))
}

/// One row of a hardness table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardnessRow {
    pub key: String,
    pub n: usize,
    pub m: usize,
    pub class: String,
    pub h: usize,
    pub engine: String,
    pub sat_time: Option<f64>,
    pub unsat_time: Option<f64>,
    pub copies: String,
}

impl HardnessRow {
    pub fn new(entry: &CatalogEntry, class: Option<FormulaClass>, record: &HardnessRecord) -> HardnessRow {
        HardnessRow {
            key: entry.key.to_hex(),
            n: entry.n,
            m: entry.formula.len(),
            class: class.map_or_else(|| "none".to_string(), |c| c.to_string()),
            h: record.h,
            engine: record.engine.clone(),
            sat_time: record.sat_time(),
            unsat_time: record.unsat_time(),
            copies: entry.copies().to_string(),
        }
    }
}

/// Summary of one `(class, n, m)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub class: String,
    pub n: usize,
    pub m: usize,
    pub max_h: usize,
    /// Formulas attaining `max_h`.
    pub count_max: usize,
    pub total: usize,
    /// Mean of `h` over all labeled copies.
    pub weighted_average: f64,
}

impl fmt::Display for CellStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} m={}: {}_{}^{} avg {:.2}",
            self.class, self.n, self.m, self.max_h, self.count_max, self.total, self.weighted_average
        )
    }
}

/// Groups rows by `(class, n, m)` and summarizes each cell.
pub fn cell_stats(rows: &[HardnessRow]) -> Result<Vec<CellStats>> {
    let mut cells: BTreeMap<(String, usize, usize), Vec<&HardnessRow>> = BTreeMap::new();
    for r in rows {
        cells.entry((r.class.clone(), r.n, r.m)).or_default().push(r);
    }
    let mut out = Vec::new();
    for ((class, n, m), rs) in cells {
        let max_h = rs.iter().map(|r| r.h).max().unwrap_or(0);
        let mut weight = BigUint::default();
        let mut weighted = BigUint::default();
        for r in &rs {
            let c: BigUint = r.copies.parse().map_err(|_| Error::Parse { line: 0, msg: format!("bad copy count {:?}", r.copies) })?;
            weighted += &c * BigUint::from(r.h);
            weight += c;
        }
        let weighted_average = if rs.is_empty() {
            0.0
        } else {
            weighted.to_f64().unwrap_or(f64::NAN) / weight.to_f64().unwrap_or(f64::NAN)
        };
        out.push(CellStats {
            class,
            n,
            m,
            max_h,
            count_max: rs.iter().filter(|r| r.h == max_h).count(),
            total: rs.len(),
            weighted_average,
        });
    }
    Ok(out)
}
