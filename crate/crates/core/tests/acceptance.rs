//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Run with `cargo test -p hitting-core --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hitting_core::cnf::{self, Clause, Formula, Lit, Var};
use hitting_core::encode::{self, EncodeOptions, Engine, HardnessConfig};
use hitting_core::factor;
use hitting_core::fixtures;
use hitting_core::genesis::{generate, FormulaClass, GenerationTask};
use hitting_core::hitting;
use hitting_core::iso::{self, LiteralPermutation};
use hitting_core::refutation::{RefutationDag, Step};
use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

const SEED: u64 = 0x5eed_2024;

// Criterion 1.
const IWAMA_FORMULAS: usize = 1000;
const IWAMA_MAX_VARS: u32 = 12;
const IWAMA_TIME_LIMIT: Duration = Duration::from_secs(10);
// Criteria 2 and 3.
const GENERATION_TIME_LIMIT: Duration = Duration::from_secs(600);
const GENERATION_TIME_LIMIT_M10: Duration = Duration::from_secs(1800);
// Criterion 5.
const ORACLE_MAX_CLAUSES: usize = 5;
const ORACLE_CAP: usize = 16;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(300);
// Criterion 6.
const THEOREM_MAX_CLAUSES: usize = 8;
// Criterion 10.
const ISO_FORMULAS: usize = 50;
const ISO_IMAGES: usize = 100;

const IUH_CELLS: [((usize, usize), usize); 8] =
    [((3, 5), 1), ((4, 7), 2), ((4, 8), 2), ((4, 9), 1), ((5, 9), 15), ((5, 10), 47), ((5, 11), 138), ((6, 11), 112)];
const RUH_CELLS: [((usize, usize), usize); 12] = [
    ((2, 4), 1),
    ((3, 5), 1),
    ((3, 6), 3),
    ((3, 7), 1),
    ((3, 8), 1),
    ((4, 7), 10),
    ((4, 8), 49),
    ((4, 9), 79),
    ((5, 8), 9),
    ((5, 9), 207),
    ((6, 9), 4),
    ((7, 10), 1),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn solver_config(options: EncodeOptions) -> HardnessConfig {
    HardnessConfig { options, ..HardnessConfig::default() }
}

fn fast_options() -> EncodeOptions {
    EncodeOptions { reuse: true, symmetry: true, ordering: true, ..EncodeOptions::default() }
}

fn cell(n: usize, m: usize, class: FormulaClass) -> Vec<Formula> {
    generate(&GenerationTask::new(n, m, class)).unwrap().formulas.into_iter().map(|g| g.formula).collect()
}

/// Every unsatisfiable hitting formula with at most `max_m` clauses.
fn uh_catalog(max_m: usize) -> Vec<Formula> {
    let mut out = Vec::new();
    for m in 1..=max_m {
        for n in 0..m {
            out.extend(cell(n, m, FormulaClass::Uh));
        }
    }
    out
}

/// Leaves of a random decision tree, a random subset of them kept, and
/// random literals added; every such formula is hitting.
fn random_hitting(rng: &mut StdRng) -> (Formula, usize) {
    let n = rng.gen_range(1..=IWAMA_MAX_VARS);
    fn grow(rng: &mut StdRng, free: &mut Vec<u32>, path: &mut Vec<Lit>, out: &mut Vec<Vec<Lit>>) {
        let stop = 0.15 + 0.1 * path.len() as f64;
        if free.is_empty() || (!path.is_empty() && rng.gen_bool(stop.min(1.0))) {
            out.push(path.iter().map(|&l| !l).collect());
            return;
        }
        let i = rng.gen_range(0..free.len());
        let v = free.swap_remove(i);
        for positive in [true, false] {
            path.push(Var::new(v).lit(positive));
            grow(rng, free, path, out);
            path.pop();
        }
        free.push(v);
    }
    let mut leaves = Vec::new();
    grow(rng, &mut (1..=n).collect(), &mut Vec::new(), &mut leaves);
    let mut clauses = Vec::new();
    for mut c in leaves {
        if !rng.gen_bool(0.6) {
            continue;
        }
        for v in 1..=n {
            if rng.gen_bool(0.08) && !c.iter().any(|l| l.var().id() == v) {
                c.push(Var::new(v).lit(rng.gen()));
            }
        }
        clauses.push(Clause::new(c).unwrap());
    }
    if clauses.is_empty() {
        clauses.push(Clause::new([Var::new(1).lit(true)]).unwrap());
    }
    (Formula::new(clauses), n as usize)
}

fn criterion_1() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let formulas: Vec<(Formula, usize)> = (0..IWAMA_FORMULAS).map(|_| random_hitting(&mut rng)).collect();
    let start = Instant::now();
    let mut mismatches = 0;
    let mut not_hitting = 0;
    let mut unsat = 0;
    for (f, n) in &formulas {
        if !hitting::is_hitting(f) {
            not_hitting += 1;
            continue;
        }
        let closed = hitting::count_models_hitting(f, *n).unwrap();
        let brute = BigUint::from(cnf::count_models_bruteforce(f).unwrap()) << (n - f.num_vars());
        if closed != brute {
            mismatches += 1;
        }
        if brute == BigUint::default() {
            unsat += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && not_hitting == 0 && elapsed < IWAMA_TIME_LIMIT,
        format!(
            "Iwama count = enumeration on {IWAMA_FORMULAS} random hitting formulas (<= {IWAMA_MAX_VARS} vars, {unsat} unsat): \
             {mismatches} mismatches, {:.2}s (limit {}s)",
            elapsed.as_secs_f64(),
            IWAMA_TIME_LIMIT.as_secs()
        ),
    )
}

fn check_counts(class: FormulaClass, cells: &[((usize, usize), usize)], limit_for: impl Fn(usize) -> Duration) -> (bool, Vec<String>) {
    let mut pass = true;
    let mut notes = Vec::new();
    for &((n, m), expected) in cells {
        let r = generate(&GenerationTask::new(n, m, class)).unwrap();
        let ok = r.complete && r.formulas.len() == expected && Duration::from_secs_f64(r.seconds) < limit_for(m);
        pass &= ok;
        notes.push(format!("({n},{m})={}{}", r.formulas.len(), if ok { "" } else { "!" }));
    }
    (pass, notes)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let (mut pass, notes) = check_counts(FormulaClass::Iuh, &IUH_CELLS, |_| GENERATION_TIME_LIMIT);
    let mut nonzero = Vec::new();
    for m in [2, 3, 4, 6] {
        for n in 0..m {
            let c = cell(n, m, FormulaClass::Iuh).len();
            if c != 0 {
                nonzero.push(format!("({n},{m})={c}"));
            }
        }
    }
    pass &= nonzero.is_empty();
    outcome(
        pass,
        format!(
            "IUH cell counts {}; nonzero cells with m in {{2,3,4,6}}: {}; {:.1}s",
            notes.join(" "),
            if nonzero.is_empty() { "none".into() } else { nonzero.join(" ") },
            start.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let limit = |m: usize| if m >= 10 { GENERATION_TIME_LIMIT_M10 } else { GENERATION_TIME_LIMIT };
    let (pass, notes) = check_counts(FormulaClass::Ruh, &RUH_CELLS, limit);
    outcome(pass, format!("RUH cell counts {}; {:.1}s", notes.join(" "), start.elapsed().as_secs_f64()))
}

fn criterion_4(witnesses: &mut Vec<(Formula, RefutationDag)>) -> Outcome {
    let start = Instant::now();
    let config = solver_config(fast_options());
    let mut notes = Vec::new();
    let mut pass = true;
    let mut expect = |label: &str, formulas: Vec<Formula>, max: usize, attaining: usize, witnesses: &mut Vec<(Formula, RefutationDag)>| {
        let hs: Vec<usize> = formulas
            .iter()
            .map(|f| {
                let r = encode::hardness(f, &config).unwrap();
                assert!(r.witness.is_valid_refutation(f) && r.witness.len() == r.h);
                witnesses.push((f.clone(), r.witness));
                r.h
            })
            .collect();
        let got_max = hs.iter().copied().max().unwrap_or(0);
        let got_attaining = hs.iter().filter(|&&h| h == got_max).count();
        let ok = got_max == max && got_attaining == attaining;
        pass &= ok;
        notes.push(format!("{label}={got_max}{}{}", if attaining > 1 { format!("x{got_attaining}") } else { String::new() }, if ok { "" } else { "!" }));
    };
    expect("bottom", vec![fixtures::bottom()], 1, 1, witnesses);
    expect("RUH(2,4)", cell(2, 4, FormulaClass::Ruh), 7, 1, witnesses);
    expect("MUtwo(5)", vec![fixtures::mu_two(5)], 10, 1, witnesses);
    expect("RUH(3,6)", cell(3, 6, FormulaClass::Ruh), 11, 3, witnesses);
    expect("RUH(3,7)", cell(3, 7, FormulaClass::Ruh), 13, 1, witnesses);
    expect("RUH(3,8)", cell(3, 8, FormulaClass::Ruh), 15, 1, witnesses);
    expect("IUH(4,7)", cell(4, 7, FormulaClass::Iuh), 14, 2, witnesses);
    expect("F_4_8_52", vec![fixtures::f_4_8_52()], 19, 1, witnesses);
    expect("G", vec![fixtures::g_reducible()], 20, 1, witnesses);
    outcome(pass, format!("hardness {} (builtin solver); {:.1}s", notes.join(" "), start.elapsed().as_secs_f64()))
}

fn criterion_5(witnesses: &mut Vec<(Formula, RefutationDag)>) -> Outcome {
    let start = Instant::now();
    let formulas = uh_catalog(ORACLE_MAX_CLAUSES);
    let oracle = HardnessConfig { engine: Engine::Oracle { cap: ORACLE_CAP }, ..HardnessConfig::default() };
    let mut disagreements = Vec::new();
    let mut checks = 0;
    for f in &formulas {
        let expected = encode::hardness(f, &oracle).unwrap().h;
        for options in EncodeOptions::all_combinations() {
            let r = encode::hardness(f, &solver_config(options)).unwrap();
            checks += 1;
            if r.h != expected {
                disagreements.push(format!("{f} {options:?}: {} vs {expected}", r.h));
            }
            if !options.reuse {
                witnesses.push((f.clone(), r.witness));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        disagreements.is_empty() && elapsed < ORACLE_TIME_LIMIT,
        format!(
            "exhaustive search = encode+solve on {} MU formulas with <= {ORACLE_MAX_CLAUSES} clauses x 4 flag sets ({checks} checks): \
             {} disagreements, {:.1}s (limit {}s)",
            formulas.len(),
            disagreements.len(),
            elapsed.as_secs_f64(),
            ORACLE_TIME_LIMIT.as_secs()
        ) + &disagreements.first().map(|d| format!("; first: {d}")).unwrap_or_default(),
    )
}

fn criterion_6() -> Outcome {
    let formulas = uh_catalog(THEOREM_MAX_CLAUSES);
    let mut counter = Vec::new();
    let mut irreducible = 0;
    for f in &formulas {
        let a = factor::is_irreducible(f).unwrap();
        let b = factor::is_strongly_irreducible(f).unwrap();
        irreducible += a as usize;
        if a != b {
            counter.push(f.to_string());
        }
    }
    outcome(
        counter.is_empty(),
        format!(
            "irreducible <=> strongly irreducible on {} UH formulas with <= {THEOREM_MAX_CLAUSES} clauses ({irreducible} irreducible): {} counterexamples",
            formulas.len(),
            counter.len()
        ) + &counter.first().map(|c| format!("; first: {c}")).unwrap_or_default(),
    )
}

fn criterion_7(witnesses: &mut Vec<(Formula, RefutationDag)>) -> Outcome {
    // Shortest refutations of the remaining catalog formulas with up to 8
    // clauses and of the IUH cells with 8 and 9 clauses, computed without
    // the reuse constraint.
    let options = EncodeOptions { symmetry: true, ordering: true, ..EncodeOptions::default() };
    let mut extra: Vec<Formula> = uh_catalog(THEOREM_MAX_CLAUSES).into_iter().filter(|f| f.len() > ORACLE_MAX_CLAUSES).collect();
    for (n, m) in [(4, 8), (4, 9), (5, 9)] {
        extra.extend(cell(n, m, FormulaClass::Iuh));
    }
    for f in extra {
        let r = encode::hardness(&f, &solver_config(options)).unwrap();
        witnesses.push((f, r.witness));
    }
    let mut checked = 0;
    let mut read_once = Vec::new();
    let mut cache: BTreeMap<String, bool> = BTreeMap::new();
    for (f, w) in witnesses.iter() {
        if f.len() <= 2 {
            continue;
        }
        let si = *cache.entry(f.to_string()).or_insert_with(|| factor::is_strongly_irreducible(f).unwrap());
        if !si {
            continue;
        }
        checked += 1;
        if w.is_read_once() {
            read_once.push(f.to_string());
        }
    }
    outcome(
        read_once.is_empty() && checked > 0,
        format!(
            "no shortest refutation of a strongly irreducible MU formula (> 2 clauses) is read-once: {checked} refutations, {} read-once",
            read_once.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let g = fixtures::g_reducible();
    let config = solver_config(fast_options());
    let proof = factor::build_decomposition_refutation(&g, &mut |piece| Ok(encode::hardness(piece, &config)?.witness)).unwrap();
    let h = encode::hardness(&g, &config).unwrap().h;
    let valid = proof.is_valid_refutation(&g);
    outcome(
        valid && proof.len() == 21 && h == 20,
        format!("decomposition refutation of G: valid={valid}, length {} (expected 21), h(G)={h} (expected 20)", proof.len()),
    )
}

/// Copies of `proof` with one literal of one step flipped, dropped or added.
fn literal_mutations(proof: &RefutationDag, vars: &[Var]) -> Vec<RefutationDag> {
    let mut out = Vec::new();
    for (i, step) in proof.steps().iter().enumerate() {
        let clause = step.clause();
        let mut variants: Vec<Clause> = Vec::new();
        for &l in clause.lits() {
            let rest = clause.lits().iter().copied().filter(|&x| x != l);
            variants.push(Clause::new(rest.clone().chain([!l])).unwrap());
            variants.push(Clause::new(rest).unwrap());
        }
        for &v in vars {
            for positive in [true, false] {
                if let Ok(c) = clause.with_lit(v.lit(positive)) {
                    if c != *clause {
                        variants.push(c);
                    }
                }
            }
        }
        for c in variants {
            let mut steps = proof.steps().to_vec();
            steps[i] = match step {
                Step::Axiom(_) => Step::Axiom(c),
                Step::Resolvent { premises, pivot, .. } => Step::Resolvent { premises: *premises, pivot: *pivot, clause: c },
            };
            out.push(RefutationDag::new(steps));
        }
    }
    out
}

fn criterion_9() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for (label, proof, formula, len) in [
        ("MUtwo(5) proof", fixtures::mu_two_5_proof(), fixtures::mu_two(5), 10),
        ("G proof", fixtures::g_reducible_proof(), fixtures::g_reducible(), 20),
    ] {
        let valid = proof.is_valid_refutation(&formula) && proof.len() == len;
        let mutants = literal_mutations(&proof, &formula.vars());
        let accepted = mutants.iter().filter(|p| p.is_valid_refutation(&formula)).count();
        pass &= valid && accepted == 0;
        notes.push(format!("{label}: valid={valid} length {}, {accepted}/{} mutants accepted", proof.len(), mutants.len()));
    }
    outcome(pass, notes.join("; "))
}

fn random_image(f: &Formula, rng: &mut StdRng) -> Formula {
    let vars = f.vars();
    let mut targets: Vec<Var> = (1..=vars.len() as u32 + 3).map(Var::new).collect();
    targets.shuffle(rng);
    let perm = LiteralPermutation::new(vars.iter().zip(&targets).map(|(&v, &t)| (v, t.lit(rng.gen()))).collect());
    let mut clauses = perm.apply_formula(f).clauses().to_vec();
    clauses.shuffle(rng);
    Formula::new(clauses)
}

fn criterion_10() -> Outcome {
    let mut catalogs: Vec<Vec<Formula>> = Vec::new();
    for &((n, m), _) in IUH_CELLS.iter().filter(|((_, m), _)| *m <= 10) {
        catalogs.push(cell(n, m, FormulaClass::Iuh));
    }
    for &((n, m), _) in RUH_CELLS.iter().filter(|((_, m), _)| *m <= 9) {
        catalogs.push(cell(n, m, FormulaClass::Ruh));
    }
    for m in 1..=THEOREM_MAX_CLAUSES {
        for n in 0..m {
            catalogs.push(cell(n, m, FormulaClass::Uh));
        }
    }
    let total: usize = catalogs.iter().map(Vec::len).sum();
    let removed: usize =
        catalogs.iter().map(|c| c.len() - c.iter().map(iso::canonical_key).collect::<BTreeSet<_>>().len()).sum();

    let mut rng = StdRng::seed_from_u64(SEED);
    let mut pool: Vec<&Formula> = catalogs.iter().flatten().filter(|f| f.len() >= 5).collect();
    pool.shuffle(&mut rng);
    let mut mismatched = 0;
    for f in pool.iter().take(ISO_FORMULAS) {
        let key = iso::canonical_key(f);
        for _ in 0..ISO_IMAGES {
            if iso::canonical_key(&random_image(f, &mut rng)) != key {
                mismatched += 1;
            }
        }
    }
    let sampled = pool.len().min(ISO_FORMULAS);
    outcome(
        removed == 0 && mismatched == 0 && sampled == ISO_FORMULAS,
        format!(
            "dedup by key removed {removed} of {total} catalog entries; {mismatched} of {} signed-permutation images changed key",
            sampled * ISO_IMAGES
        ),
    )
}

fn run(number: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = panic::catch_unwind(AssertUnwindSafe(f));
    let (pass, detail) = match result {
        Ok(o) => (o.pass, o.detail),
        Err(e) => {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        }
    };
    println!(
        "{} {number:>2} {name}: {detail} [{:.1}s]",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    pass
}

fn main() -> ExitCode {
    let only: Option<BTreeSet<usize>> = {
        let picks: BTreeSet<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
        (!picks.is_empty()).then_some(picks)
    };
    let wanted = |n: usize| only.as_ref().is_none_or(|s| s.contains(&n));
    let mut witnesses = Vec::new();
    let mut all = true;
    let mut run_if = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        if wanted(n) {
            all &= run(n, name, f);
        }
    };
    run_if(1, "Iwama correctness", &mut criterion_1);
    run_if(2, "generation counts, IUH", &mut criterion_2);
    run_if(3, "generation counts, RUH", &mut criterion_3);
    run_if(4, "hardness values", &mut || criterion_4(&mut witnesses));
    let mut w5 = Vec::new();
    run_if(5, "oracle equivalence", &mut || criterion_5(&mut w5));
    run_if(6, "irreducible iff strongly irreducible", &mut criterion_6);
    run_if(7, "read-once impossibility", &mut || {
        let mut w = std::mem::take(&mut witnesses);
        w.append(&mut w5);
        criterion_7(&mut w)
    });
    run_if(8, "decomposition bound", &mut criterion_8);
    run_if(9, "fixture validation", &mut criterion_9);
    run_if(10, "isomorph-freeness", &mut criterion_10);
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
