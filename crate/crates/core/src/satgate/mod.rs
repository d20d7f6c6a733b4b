//! One interface over the built-in CDCL solver and external solver
//! binaries speaking the SAT competition output format.

mod cdcl;

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming the default external solver command.
pub const SOLVER_ENV: &str = "HITTING_SOLVER";

/// A CNF instance over variables `1..=num_vars` in DIMACS literal form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new(num_vars: u32) -> Cnf {
        Cnf { num_vars, clauses: Vec::new() }
    }

    pub fn add(&mut self, clause: Vec<i32>) {
        debug_assert!(clause.iter().all(|&l| l != 0 && l.unsigned_abs() <= self.num_vars));
        self.clauses.push(clause);
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn parse_dimacs(text: &str) -> Result<Cnf> {
        let mut cnf = Cnf::default();
        let mut header = false;
        let mut current = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("p") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(Error::Parse { line: no + 1, msg: "bad header".into() });
                }
                cnf.num_vars = parts[1].parse().map_err(|_| Error::Parse { line: no + 1, msg: "bad header".into() })?;
                header = true;
                continue;
            }
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| Error::Parse { line: no + 1, msg: format!("bad literal {tok}") })?;
                if l == 0 {
                    cnf.clauses.push(std::mem::take(&mut current));
                } else {
                    if !header || l.unsigned_abs() > cnf.num_vars {
                        return Err(Error::Parse { line: no + 1, msg: format!("literal {l} out of range") });
                    }
                    current.push(l);
                }
            }
        }
        if !current.is_empty() {
            cnf.clauses.push(current);
        }
        Ok(cnf)
    }

    pub fn is_satisfied_by(&self, model: &Model) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| model.value(l)))
    }
}

/// Total assignment; index `v - 1` holds the value of variable `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model(pub Vec<bool>);

impl Model {
    pub fn value(&self, lit: i32) -> bool {
        let v = self.0.get(lit.unsigned_abs() as usize - 1).copied().unwrap_or(false);
        if lit > 0 {
            v
        } else {
            !v
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub reductions: u64,
    pub deleted: u64,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct SolverVerdict {
    pub status: Status,
    pub model: Option<Model>,
    pub stats: SolverStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    Builtin,
    /// Shell command template. `{cnf}` is replaced by the instance path;
    /// without the placeholder the path is appended.
    External(String),
}

impl Backend {
    /// External solver from the environment, or the built-in solver.
    pub fn from_env() -> Backend {
        match std::env::var(SOLVER_ENV) {
            Ok(cmd) if !cmd.trim().is_empty() => Backend::External(cmd),
            _ => Backend::Builtin,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Backend::Builtin => "builtin".into(),
            Backend::External(cmd) => format!("external:{cmd}"),
        }
    }
}

pub fn solve(cnf: &Cnf, backend: &Backend, timeout: Option<Duration>) -> Result<SolverVerdict> {
    let verdict = match backend {
        Backend::Builtin => {
            let deadline = timeout.map(|t| Instant::now() + t);
            let (status, model, stats) = cdcl::Solver::new(cnf).solve(deadline);
            SolverVerdict { status, model, stats }
        }
        Backend::External(template) => solve_external(cnf, template, timeout)?,
    };
    if let Some(model) = &verdict.model {
        if !cnf.is_satisfied_by(model) {
            return Err(Error::Solver(format!("{} returned a model that violates the instance", backend.name())));
        }
    }
    Ok(verdict)
}

fn solve_external(cnf: &Cnf, template: &str, timeout: Option<Duration>) -> Result<SolverVerdict> {
    let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
    file.write_all(cnf.to_dimacs().as_bytes())?;
    file.flush()?;
    let path = file.path().to_string_lossy().into_owned();
    let command = if template.contains("{cnf}") {
        template.replace("{cnf}", &path)
    } else {
        format!("{template} {path}")
    };
    let start = Instant::now();
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&command)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| Error::Solver(format!("cannot start {command:?}: {e}")))?;
    let mut stdout = child.stdout.take().expect("piped");
    let mut stderr = child.stderr.take().expect("piped");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });
    let exit = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if timeout.is_some_and(|t| start.elapsed() >= t) {
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    let seconds = start.elapsed().as_secs_f64();
    let Some(exit) = exit else {
        // Grandchildren of the shell may still hold the pipes open, so the
        // reader threads are left to finish on their own.
        return Ok(SolverVerdict {
            status: Status::Unknown,
            model: None,
            stats: SolverStats { seconds, ..SolverStats::default() },
        });
    };
    let output = out_reader.join().unwrap_or_default();
    let errors = err_reader.join().unwrap_or_default();
    let (status, model) = parse_competition_output(&output, exit.code(), cnf.num_vars).map_err(|e| {
        let e = match e {
            Error::Solver(msg) => msg,
            other => other.to_string(),
        };
        Error::Solver(format!("{e}; command {command:?}; stdout: {}; stderr: {}", tail(&output), tail(&errors)))
    })?;
    Ok(SolverVerdict { status, model, stats: SolverStats { seconds, ..SolverStats::default() } })
}

fn tail(s: &str) -> String {
    let lines: Vec<&str> = s.lines().collect();
    lines[lines.len().saturating_sub(5)..].join(" | ")
}

/// Parses `s ...` status and `v ...` model lines. Exit codes 10 and 20
/// stand in for a missing status line.
pub fn parse_competition_output(output: &str, exit_code: Option<i32>, num_vars: u32) -> Result<(Status, Option<Model>)> {
    let mut status = None;
    let mut values: Vec<Option<bool>> = vec![None; num_vars as usize];
    let mut saw_values = false;
    let mut terminated = false;
    for line in output.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(match rest.trim() {
                "SATISFIABLE" => Status::Sat,
                "UNSATISFIABLE" => Status::Unsat,
                "UNKNOWN" | "INDETERMINATE" => Status::Unknown,
                other => return Err(Error::Solver(format!("unrecognized status line {other:?}"))),
            });
        } else if let Some(rest) = line.strip_prefix("v ").or_else(|| (line == "v").then_some("")) {
            saw_values = true;
            for tok in rest.split_whitespace() {
                let l: i64 = tok.parse().map_err(|_| Error::Solver(format!("bad model token {tok:?}")))?;
                if l == 0 {
                    terminated = true;
                    continue;
                }
                let v = l.unsigned_abs() as usize;
                if v > num_vars as usize {
                    return Err(Error::Solver(format!("model literal {l} out of range")));
                }
                values[v - 1] = Some(l > 0);
            }
        }
    }
    let status = match (status, exit_code) {
        (Some(s), _) => s,
        (None, Some(10)) => Status::Sat,
        (None, Some(20)) => Status::Unsat,
        _ => return Err(Error::Solver("no status line in solver output".into())),
    };
    if status != Status::Sat {
        return Ok((status, None));
    }
    if !saw_values || !terminated {
        return Err(Error::Solver("satisfiable answer without a complete model".into()));
    }
    Ok((status, Some(Model(values.into_iter().map(|v| v.unwrap_or(false)).collect()))))
}

/// Formats a verdict the way competition solvers do.
pub fn format_competition_output(verdict: &SolverVerdict) -> String {
    let mut out = String::new();
    match verdict.status {
        Status::Sat => {
            out.push_str("s SATISFIABLE\n");
            let model = verdict.model.as_ref().expect("sat verdicts carry a model");
            let lits: Vec<String> = model
                .0
                .iter()
                .enumerate()
                .map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) })
                .collect();
            for chunk in lits.chunks(10) {
                let _ = writeln!(out, "v {}", chunk.join(" "));
            }
            out.push_str("v 0\n");
        }
        Status::Unsat => out.push_str("s UNSATISFIABLE\n"),
        Status::Unknown => out.push_str("s UNKNOWN\n"),
    }
    out
}

/// Conventional exit code for a verdict.
pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Sat => 10,
        Status::Unsat => 20,
        Status::Unknown => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(cnf: &Cnf) -> bool {
        let n = cnf.num_vars as usize;
        (0..1u32 << n).any(|a| {
            let m = Model((0..n).map(|i| a >> i & 1 == 1).collect());
            cnf.is_satisfied_by(&m)
        })
    }

    fn pigeonhole(holes: u32) -> Cnf {
        let pigeons = holes + 1;
        let var = |p: u32, h: u32| (p * holes + h + 1) as i32;
        let mut cnf = Cnf::new(pigeons * holes);
        for p in 0..pigeons {
            cnf.add((0..holes).map(|h| var(p, h)).collect());
        }
        for h in 0..holes {
            for p in 0..pigeons {
                for q in p + 1..pigeons {
                    cnf.add(vec![-var(p, h), -var(q, h)]);
                }
            }
        }
        cnf
    }

    #[test]
    fn trivial_instances() {
        let mut cnf = Cnf::new(1);
        cnf.add(vec![1]);
        assert_eq!(solve(&cnf, &Backend::Builtin, None).unwrap().status, Status::Sat);
        cnf.add(vec![-1]);
        assert_eq!(solve(&cnf, &Backend::Builtin, None).unwrap().status, Status::Unsat);
        let empty = Cnf::new(3);
        assert_eq!(solve(&empty, &Backend::Builtin, None).unwrap().status, Status::Sat);
        let mut with_empty_clause = Cnf::new(1);
        with_empty_clause.add(vec![]);
        assert_eq!(solve(&with_empty_clause, &Backend::Builtin, None).unwrap().status, Status::Unsat);
    }

    #[test]
    fn pigeonhole_is_unsat() {
        for h in 2..=6 {
            assert_eq!(solve(&pigeonhole(h), &Backend::Builtin, None).unwrap().status, Status::Unsat);
        }
    }

    proptest! {
        #[test]
        fn agrees_with_enumeration(
            clauses in prop::collection::vec(prop::collection::vec((1i32..=8, any::<bool>()), 1..4), 0..40)
        ) {
            let mut cnf = Cnf::new(8);
            for c in clauses {
                cnf.add(c.into_iter().map(|(v, s)| if s { v } else { -v }).collect());
            }
            let v = solve(&cnf, &Backend::Builtin, None).unwrap();
            prop_assert_eq!(v.status == Status::Sat, brute(&cnf));
        }
    }

    #[test]
    fn dimacs_round_trip() {
        let cnf = pigeonhole(2);
        assert_eq!(Cnf::parse_dimacs(&cnf.to_dimacs()).unwrap(), cnf);
    }

    #[test]
    fn competition_output_parsing() {
        let (s, m) = parse_competition_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", Some(10), 3).unwrap();
        assert_eq!(s, Status::Sat);
        assert_eq!(m.unwrap().0, vec![true, false, true]);
        assert_eq!(parse_competition_output("s UNSATISFIABLE\n", Some(20), 3).unwrap().0, Status::Unsat);
        assert_eq!(parse_competition_output("", Some(20), 3).unwrap().0, Status::Unsat);
        assert!(parse_competition_output("garbage\n", Some(1), 3).is_err());
        assert!(parse_competition_output("s SATISFIABLE\nv 1 2\n", Some(10), 3).is_err());
        assert!(parse_competition_output("s MAYBE\n", None, 3).is_err());
        assert!(parse_competition_output("s SATISFIABLE\nv 9 0\n", None, 3).is_err());
    }

    #[test]
    fn external_backend_via_shell() {
        let cnf = pigeonhole(2);
        let v = solve(&cnf, &Backend::External("printf 's UNSATISFIABLE\\n'; exit 20; true".into()), None).unwrap();
        assert_eq!(v.status, Status::Unsat);
        let bad = solve(&cnf, &Backend::External("echo nonsense".into()), None);
        assert!(matches!(bad, Err(Error::Solver(_))));
        let slow = solve(&cnf, &Backend::External("sleep 5 # {cnf}".into()), Some(Duration::from_millis(100))).unwrap();
        assert_eq!(slow.status, Status::Unknown);
        let lying = solve(&cnf, &Backend::External("printf 's SATISFIABLE\\nv 1 2 3 4 5 6 0\\n'".into()), None);
        assert!(matches!(lying, Err(Error::Solver(_))));
    }
}
