use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use hitting_core::catalog::{self, Catalog, CatalogEntry, HardnessRow};
use hitting_core::cnf::{self, Formula};
use hitting_core::encode::{self, EncodeOptions, Engine, HardnessConfig};
use hitting_core::factor;
use hitting_core::genesis::{self, FormulaClass, GenerationTask, Manifest, Strategy};
use hitting_core::hitting;
use hitting_core::iso;
use hitting_core::refutation::RefutationDag;
use hitting_core::satgate::{self, Backend, Cnf};

#[derive(Parser)]
#[command(name = "hitting", version, about = "Unsatisfiable hitting formulas: generation, analysis and resolution hardness")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Time budget in seconds, per generation run or per solver call.
    #[arg(long, global = true)]
    budget: Option<f64>,
    /// External solver command; `{cnf}` is replaced by the instance path.
    /// Defaults to $HITTING_SOLVER, else the builtin solver.
    #[arg(long, global = true)]
    solver: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate all formulas of a class with n variables and m clauses, up to isomorphism.
    Generate(GenerateArgs),
    /// Report structural properties of each formula in a file.
    Check { file: PathBuf },
    /// Count satisfying assignments.
    Count { file: PathBuf },
    /// Print canonical keys and canonical representatives.
    Canon { file: PathBuf },
    /// Write the CNF asking for a refutation of exactly the given length.
    Encode(EncodeArgs),
    /// Compute the length of a shortest resolution refutation.
    Hardness(HardnessArgs),
    /// Check a resolution refutation against a formula.
    Verify { formula: PathBuf, proof: PathBuf },
    /// Summarize hardness per (class, n, m) cell from CSV rows or catalogs.
    Stats(StatsArgs),
    /// Write each catalog entry as a DIMACS file.
    ExportDimacs {
        catalog: PathBuf,
        #[arg(long)]
        dir: PathBuf,
    },
    /// Solve a DIMACS CNF and print SAT-competition output.
    #[command(hide = true)]
    Solve { cnf: PathBuf },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long = "vars")]
    n: usize,
    #[arg(long = "clauses")]
    m: usize,
    #[arg(long, default_value = "iuh")]
    class: FormulaClass,
    /// Catalog file; the catalog goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON run manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Deduplicate by canonical key instead of canonical augmentation.
    #[arg(long)]
    key_dedup: bool,
    #[arg(long)]
    no_counting: bool,
    #[arg(long)]
    no_factors: bool,
    #[arg(long)]
    capacity: bool,
}

#[derive(Args, Clone, Copy)]
struct EncodeFlags {
    /// Forbid resolving two axioms together at the first resolvent unless one is used again (strongly irreducible formulas only).
    #[arg(long)]
    reuse: bool,
    /// With --reuse, also constrain every later resolvent with two axiom premises.
    #[arg(long)]
    reuse_all_positions: bool,
    /// Fix the last three steps to x, ~x, empty for a representative variable x.
    #[arg(long)]
    symmetry: bool,
    /// Break step permutations with a mild ordering on premises.
    #[arg(long)]
    ordering: bool,
    /// Encode the at-most-two arc constraint with sequential counters instead of pairwise clauses.
    #[arg(long)]
    sequential_counters: bool,
}

impl EncodeFlags {
    fn options(self) -> EncodeOptions {
        EncodeOptions {
            reuse: self.reuse,
            reuse_all_positions: self.reuse_all_positions,
            symmetry: self.symmetry,
            ordering: self.ordering,
            sequential_counters: self.sequential_counters,
        }
    }
}

#[derive(Args)]
struct EncodeArgs {
    file: PathBuf,
    #[arg(long)]
    steps: usize,
    /// Which formula of the file (0-based).
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[command(flatten)]
    flags: EncodeFlags,
    /// DIMACS output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON map from encoding variable names to DIMACS indices.
    #[arg(long)]
    varmap: Option<PathBuf>,
}

#[derive(Args)]
struct HardnessArgs {
    file: PathBuf,
    #[command(flatten)]
    flags: EncodeFlags,
    /// Use the exhaustive search instead of a SAT solver.
    #[arg(long)]
    oracle: bool,
    /// Longest refutation the exhaustive search considers.
    #[arg(long, default_value_t = 16)]
    oracle_cap: usize,
    /// Directory for one proof file per formula.
    #[arg(long)]
    proofs: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Hardness CSV files or catalogs (hardness is computed for catalogs).
    files: Vec<PathBuf>,
    #[command(flatten)]
    flags: EncodeFlags,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Generate(args) => generate(cli, args),
        Command::Check { file } => {
            let rows = read_formulas(file)?.iter().enumerate().map(|(i, (n, f))| check(i, *n, f)).collect::<Result<Vec<_>>>()?;
            emit(cli.format, &rows)
        }
        Command::Count { file } => {
            let rows = read_formulas(file)?.iter().enumerate().map(|(i, (n, f))| count(i, *n, f)).collect::<Result<Vec<_>>>()?;
            emit(cli.format, &rows)
        }
        Command::Canon { file } => {
            let rows: Vec<CanonRow> = read_formulas(file)?
                .iter()
                .enumerate()
                .map(|(index, (n, f))| {
                    let c = iso::canonical_form(f);
                    CanonRow {
                        index,
                        key: c.key.to_hex(),
                        canonical: catalog::format_line(*n, &c.formula),
                        aut_order: c.symmetry.order.to_string(),
                    }
                })
                .collect();
            emit(cli.format, &rows)
        }
        Command::Encode(args) => encode_cmd(args),
        Command::Hardness(args) => hardness_cmd(cli, args),
        Command::Verify { formula, proof } => verify(cli, formula, proof),
        Command::Stats(args) => stats(cli, args),
        Command::ExportDimacs { catalog, dir } => {
            let cat = Catalog::read_file(catalog).with_context(|| format!("reading {}", catalog.display()))?;
            fs::create_dir_all(dir)?;
            for (i, e) in cat.entries().enumerate() {
                let path = dir.join(format!("{}_{}_{i:04}.cnf", e.n, e.formula.len()));
                let mut out = io::BufWriter::new(fs::File::create(&path)?);
                cnf::write_dimacs(&e.formula, Some(e.n as u32), &mut out)?;
                out.flush()?;
            }
            eprintln!("wrote {} files to {}", cat.len(), dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { cnf } => {
            let text = read_text(cnf)?;
            let instance = Cnf::parse_dimacs(&text)?;
            let verdict = satgate::solve(&instance, &backend(cli), timeout(cli))?;
            print!("{}", satgate::format_competition_output(&verdict));
            Ok(ExitCode::from(satgate::exit_code(verdict.status) as u8))
        }
    }
}

fn backend(cli: &Cli) -> Backend {
    match &cli.solver {
        Some(cmd) => Backend::External(cmd.clone()),
        None => Backend::from_env(),
    }
}

fn timeout(cli: &Cli) -> Option<Duration> {
    cli.budget.map(Duration::from_secs_f64)
}

fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

/// Formulas from a catalog (lines containing `|`) or a DIMACS file, with
/// their declared variable counts.
fn read_formulas(path: &Path) -> Result<Vec<(usize, Formula)>> {
    let text = read_text(path)?;
    let is_catalog = text.lines().any(|l| l.contains('|') && !l.trim_start().starts_with('c'));
    if is_catalog {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let entry = catalog::parse_line(line).map_err(|msg| anyhow::anyhow!("{}:{}: {msg}", path.display(), i + 1))?;
            out.push(entry);
        }
        Ok(out)
    } else {
        let f = cnf::read_dimacs(text.as_bytes())?;
        Ok(vec![(f.max_var() as usize, f)])
    }
}

fn emit<T: Serialize>(format: Format, rows: &[T]) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Text => {
            for (i, r) in rows.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                if let serde_json::Value::Object(map) = serde_json::to_value(r)? {
                    for (k, v) in map {
                        match v {
                            serde_json::Value::String(s) => writeln!(out, "{k}: {s}")?,
                            serde_json::Value::Null => writeln!(out, "{k}: -")?,
                            v => writeln!(out, "{k}: {v}")?,
                        }
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(cli: &Cli, args: &GenerateArgs) -> Result<ExitCode> {
    let mut task = GenerationTask::new(args.n, args.m, args.class);
    task.limits.max_nodes = args.max_nodes;
    task.limits.max_seconds = cli.budget;
    task.prune.counting = !args.no_counting;
    task.prune.factors = !args.no_factors;
    task.prune.capacity = args.capacity;
    if args.key_dedup {
        task.strategy = Strategy::KeyDedup;
    }
    let result = genesis::generate(&task)?;
    let cat = Catalog::from_generation(&result);
    let manifest = Manifest::from(&result);
    if let Some(path) = &args.manifest {
        fs::write(path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    }
    let summary = format!(
        "{} n={} m={}: {} formulas{} in {:.2}s ({} nodes)",
        args.class,
        args.n,
        args.m,
        result.formulas.len(),
        if result.complete { "" } else { " (incomplete: budget exhausted)" },
        result.seconds,
        result.stats.nodes
    );
    match &args.out {
        Some(path) => {
            cat.write_file(path)?;
            match cli.format {
                Format::Text => println!("{summary}"),
                _ => {
                    emit(cli.format, &[GenerateRow::from(&manifest)])?;
                }
            }
        }
        None => {
            cat.write(io::stdout().lock())?;
            eprintln!("{summary}");
        }
    }
    Ok(if result.complete { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

#[derive(Serialize)]
struct GenerateRow {
    n: usize,
    m: usize,
    class: String,
    count: usize,
    complete: bool,
    nodes: u64,
    seconds: f64,
}

impl From<&Manifest> for GenerateRow {
    fn from(m: &Manifest) -> GenerateRow {
        GenerateRow {
            n: m.task.n,
            m: m.task.m,
            class: m.task.class.to_string(),
            count: m.count,
            complete: m.complete,
            nodes: m.stats.nodes,
            seconds: m.wall_seconds,
        }
    }
}

#[derive(Serialize)]
struct CheckRow {
    index: usize,
    n: usize,
    m: usize,
    hitting: bool,
    unsat: bool,
    mu: bool,
    saturated: bool,
    regular: bool,
    deficiency: i64,
    irreducible: bool,
    strongly_irreducible: bool,
    class: String,
    aut_order: String,
    orbits: String,
}

fn check(index: usize, n: usize, f: &Formula) -> Result<CheckRow> {
    let is_hitting = hitting::is_hitting(f);
    let unsat = if is_hitting { hitting::is_unsat_hitting(f)? } else { !cnf::is_satisfiable(f)? };
    // Unsatisfiable hitting formulas are minimally unsatisfiable.
    let mu = if is_hitting { unsat } else { cnf::is_minimally_unsatisfiable(f)? };
    let sym = iso::automorphisms(f);
    let orbits: Vec<String> = sym
        .variable_orbits
        .iter()
        .map(|o| o.iter().map(|v| v.id().to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    Ok(CheckRow {
        index,
        n,
        m: f.len(),
        hitting: is_hitting,
        unsat,
        mu,
        saturated: mu && hitting::is_saturated_mu(f)?,
        regular: hitting::is_regular(f),
        deficiency: hitting::deficiency(f),
        irreducible: factor::is_irreducible(f)?,
        strongly_irreducible: factor::is_strongly_irreducible(f)?,
        class: genesis::classify(f)?.map_or_else(|| "none".into(), |c| c.to_string()),
        aut_order: sym.order.to_string(),
        orbits: orbits.join(" | "),
    })
}

#[derive(Serialize)]
struct CountRow {
    index: usize,
    n: usize,
    models: String,
    method: &'static str,
}

fn count(index: usize, n: usize, f: &Formula) -> Result<CountRow> {
    let n = n.max(f.max_var() as usize);
    let (models, method) = if hitting::is_hitting(f) {
        (hitting::count_models_hitting(f, n)?.to_string(), "closed-form")
    } else {
        let free = n - f.num_vars();
        ((BigUint::from(cnf::count_models_bruteforce(f)?) << free).to_string(), "enumeration")
    };
    Ok(CountRow { index, n, models, method })
}

#[derive(Serialize)]
struct CanonRow {
    index: usize,
    key: String,
    canonical: String,
    aut_order: String,
}

fn encode_cmd(args: &EncodeArgs) -> Result<ExitCode> {
    let formulas = read_formulas(&args.file)?;
    let Some((_, f)) = formulas.get(args.index) else {
        bail!("{} has {} formulas", args.file.display(), formulas.len());
    };
    let e = encode::encode(f, args.steps, args.flags.options())?;
    let text = e.cnf.to_dimacs();
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &args.varmap {
        fs::write(path, e.varmap_json() + "\n")?;
    }
    eprintln!(
        "{} variables, {} clauses; reuse {}, symmetry {}, ordering {}",
        e.cnf.num_vars,
        e.cnf.clauses.len(),
        e.applied.reuse,
        e.applied.symmetry,
        e.applied.ordering
    );
    Ok(ExitCode::SUCCESS)
}

fn hardness_config(cli: &Cli, flags: EncodeFlags, oracle: Option<usize>) -> HardnessConfig {
    HardnessConfig {
        engine: match oracle {
            Some(cap) => Engine::Oracle { cap },
            None => Engine::Solver(backend(cli)),
        },
        options: flags.options(),
        timeout: timeout(cli),
    }
}

fn hardness_rows(formulas: &[(usize, Formula)], config: &HardnessConfig, proofs: Option<&Path>) -> Result<Vec<HardnessRow>> {
    let plain: Vec<Formula> = formulas.iter().map(|(_, f)| f.clone()).collect();
    let records = encode::hardness_many(&plain, config);
    let mut rows = Vec::new();
    for (i, ((n, f), record)) in formulas.iter().zip(records).enumerate() {
        let record = record.with_context(|| format!("formula {i}: {f}"))?;
        let entry = CatalogEntry { key: record.formula_key.clone(), formula: f.clone(), n: *n };
        rows.push(HardnessRow::new(&entry, genesis::classify(f)?, &record));
        if let Some(dir) = proofs {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(format!("{i:04}.proof")), record.witness.to_text())?;
        }
    }
    Ok(rows)
}

fn hardness_cmd(cli: &Cli, args: &HardnessArgs) -> Result<ExitCode> {
    let formulas = read_formulas(&args.file)?;
    let config = hardness_config(cli, args.flags, args.oracle.then_some(args.oracle_cap));
    let rows = hardness_rows(&formulas, &config, args.proofs.as_deref())?;
    emit(cli.format, &rows)
}

#[derive(Serialize)]
struct VerifyRow {
    valid: bool,
    length: usize,
    read_once: bool,
    error: Option<String>,
}

fn verify(cli: &Cli, formula: &Path, proof: &Path) -> Result<ExitCode> {
    let formulas = read_formulas(formula)?;
    let Some((_, f)) = formulas.first() else { bail!("{} contains no formula", formula.display()) };
    let dag = RefutationDag::parse(&read_text(proof)?)?;
    let error = dag.validate(f).err().map(|d| d.to_string());
    let row = VerifyRow { valid: error.is_none(), length: dag.len(), read_once: dag.is_read_once(), error };
    let valid = row.valid;
    emit(cli.format, &[row])?;
    Ok(if valid { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn stats(cli: &Cli, args: &StatsArgs) -> Result<ExitCode> {
    let mut rows: Vec<HardnessRow> = Vec::new();
    for path in &args.files {
        if path.extension().is_some_and(|e| e == "csv") {
            let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
            for row in r.deserialize() {
                rows.push(row?);
            }
        } else {
            let config = hardness_config(cli, args.flags, None);
            rows.extend(hardness_rows(&read_formulas(path)?, &config, None)?);
        }
    }
    let cells = catalog::cell_stats(&rows)?;
    if cli.format == Format::Text {
        for c in &cells {
            println!("{c}");
        }
        Ok(ExitCode::SUCCESS)
    } else {
        emit(cli.format, &cells)
    }
}
