//! Slow independent oracles for generation, canonical keys and automorphism
//! groups: every labeled formula in a small cell is enumerated and
//! classified with brute force, and isomorphism classes are computed by
//! minimizing over all signed permutations.

use std::collections::{BTreeSet, HashMap};

use hitting_core::cnf::{Clause, Formula};
use hitting_core::fixtures;
use hitting_core::genesis::{generate, FormulaClass, GenerationTask, PruneConfig, Strategy};
use hitting_core::iso;
use num_bigint::BigUint;

type Form = Vec<Vec<i32>>;

fn all_clauses(n: usize) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    for code in 1..3usize.pow(n as u32) {
        let mut c = Vec::new();
        let mut x = code;
        for v in 1..=n as i32 {
            match x % 3 {
                1 => c.push(v),
                2 => c.push(-v),
                _ => {}
            }
            x /= 3;
        }
        out.push(c);
    }
    out
}

fn clash(a: &[i32], b: &[i32]) -> bool {
    a.iter().any(|l| b.contains(&-l))
}

fn signed_permutations(n: usize) -> Vec<Vec<i32>> {
    fn perms(rest: &mut Vec<i32>, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            for s in [1, -1] {
                cur.push(s * v);
                perms(rest, cur, out);
                cur.pop();
            }
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    perms(&mut (1..=n as i32).collect(), &mut Vec::new(), &mut out);
    out
}

fn image(f: &Form, p: &[i32]) -> Form {
    let mut g: Form = f
        .iter()
        .map(|c| {
            let mut d: Vec<i32> = c.iter().map(|&l| p[l.unsigned_abs() as usize - 1] * l.signum()).collect();
            d.sort_unstable();
            d
        })
        .collect();
    g.sort();
    g
}

fn brute_canonical(f: &Form, perms: &[Vec<i32>]) -> Form {
    perms.iter().map(|p| image(f, p)).min().unwrap()
}

fn to_formula(f: &Form) -> Formula {
    Formula::new(f.iter().map(|c| Clause::from_dimacs(c).unwrap()))
}

fn occurrences(f: &Form, lit: i32) -> usize {
    f.iter().filter(|c| c.contains(&lit)).count()
}

fn models(f: &[Vec<i32>], n: usize) -> Vec<u32> {
    (0..1u32 << n)
        .filter(|a| f.iter().all(|c| c.iter().any(|&l| ((a >> (l.unsigned_abs() - 1)) & 1 == 1) == (l > 0))))
        .collect()
}

fn has_factor(f: &Form, n: usize) -> bool {
    let m = f.len();
    for mask in 1u32..(1 << m) {
        let size = mask.count_ones() as usize;
        if size < 2 || size >= m {
            continue;
        }
        let sub: Form = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| f[i].clone()).collect();
        let basis: Vec<i32> = sub[0].iter().copied().filter(|l| sub.iter().all(|c| c.contains(l))).collect();
        if models(&sub, n) == models(&[basis], n) {
            return true;
        }
    }
    false
}

/// Isomorphism classes per class label, by brute force.
fn brute_cell(n: usize, m: usize) -> HashMap<FormulaClass, BTreeSet<Form>> {
    let clauses = all_clauses(n);
    let perms = signed_permutations(n);
    let mut out: HashMap<FormulaClass, BTreeSet<Form>> = HashMap::new();
    let mut stack: Vec<usize> = Vec::new();
    fn rec(
        start: usize,
        n: usize,
        m: usize,
        clauses: &[Vec<i32>],
        perms: &[Vec<i32>],
        stack: &mut Vec<usize>,
        out: &mut HashMap<FormulaClass, BTreeSet<Form>>,
    ) {
        if stack.len() == m {
            let f: Form = stack.iter().map(|&i| clauses[i].clone()).collect();
            let used = (1..=n as i32).all(|v| occurrences(&f, v) + occurrences(&f, -v) > 0);
            if !used || !models(&f, n).is_empty() {
                return;
            }
            let canon = brute_canonical(&f, perms);
            out.entry(FormulaClass::Uh).or_default().insert(canon.clone());
            let regular = (1..=n as i32).all(|v| occurrences(&f, v) >= 2 && occurrences(&f, -v) >= 2);
            if regular {
                out.entry(FormulaClass::Ruh).or_default().insert(canon.clone());
                if !has_factor(&f, n) {
                    out.entry(FormulaClass::Iuh).or_default().insert(canon);
                }
            }
            return;
        }
        for i in start..clauses.len() {
            if stack.iter().all(|&j| clash(&clauses[i], &clauses[j])) {
                stack.push(i);
                rec(i + 1, n, m, clauses, perms, stack, out);
                stack.pop();
            }
        }
    }
    rec(0, n, m, &clauses, &perms, &mut stack, &mut out);
    out
}

#[test]
fn generation_matches_labeled_enumeration() {
    for (n, m) in [(1, 2), (2, 3), (2, 4), (3, 4), (3, 5), (3, 6), (3, 7), (3, 8), (4, 5), (4, 6)] {
        let brute = brute_cell(n, m);
        for class in [FormulaClass::Uh, FormulaClass::Ruh, FormulaClass::Iuh] {
            let expected = brute.get(&class).map_or(0, |s| s.len());
            for prune in [PruneConfig::default(), PruneConfig::minimal()] {
                for strategy in [Strategy::CanonicalAugmentation, Strategy::KeyDedup] {
                    let mut task = GenerationTask::new(n, m, class);
                    task.prune = prune;
                    task.strategy = strategy;
                    let r = generate(&task).unwrap();
                    assert_eq!(r.formulas.len(), expected, "({n},{m}) {class} {prune:?} {strategy:?}");
                }
            }
            // The generated representatives fall in distinct brute-force classes.
            let r = generate(&GenerationTask::new(n, m, class)).unwrap();
            let perms = signed_permutations(n);
            let got: BTreeSet<Form> = r.formulas.iter().map(|g| brute_canonical(&g.formula.to_dimacs(), &perms)).collect();
            assert_eq!(Some(&got).filter(|s| !s.is_empty()), brute.get(&class), "({n},{m}) {class}");
        }
    }
}

#[test]
fn keys_agree_with_brute_force_classes() {
    // All labeled hitting formulas with at most 3 variables and 5 clauses.
    let n = 3;
    let clauses = all_clauses(n);
    let perms = signed_permutations(n);
    let mut by_key: HashMap<iso::CanonicalKey, Form> = HashMap::new();
    let mut by_form: HashMap<Form, iso::CanonicalKey> = HashMap::new();
    let mut count = 0;
    let mut stack = Vec::new();
    fn walk(start: usize, clauses: &[Vec<i32>], stack: &mut Vec<usize>, visit: &mut dyn FnMut(Form)) {
        if stack.len() == 5 {
            visit(stack.iter().map(|&i| clauses[i].clone()).collect());
            return;
        }
        for i in start..clauses.len() {
            if stack.iter().all(|&j| clash(&clauses[i], &clauses[j])) {
                stack.push(i);
                walk(i + 1, clauses, stack, visit);
                stack.pop();
            }
        }
    }
    walk(0, &clauses, &mut stack, &mut |f: Form| {
        count += 1;
        let key = iso::canonical_key(&to_formula(&f));
        let canon = brute_canonical(&f, &perms);
        assert_eq!(by_key.entry(key.clone()).or_insert_with(|| canon.clone()), &canon);
        assert_eq!(by_form.entry(canon).or_insert(key.clone()), &key);
    });
    assert!(count > 100);
    assert_eq!(by_key.len(), by_form.len());
}

#[test]
fn group_orders_match_brute_force() {
    let mut cases = vec![fixtures::mu_two(5), fixtures::mu_two(6), fixtures::full_two(), fixtures::three_cycle()];
    for (n, m) in [(3, 5), (3, 6), (4, 7), (5, 8)] {
        cases.extend(generate(&GenerationTask::new(n, m, FormulaClass::Ruh)).unwrap().formulas.into_iter().map(|g| g.formula));
    }
    for f in cases {
        let compact = f.compacted();
        let n = compact.num_vars();
        let form = compact.to_dimacs();
        let base = image(&form, &(1..=n as i32).collect::<Vec<_>>());
        let fixed = signed_permutations(n).iter().filter(|p| image(&form, p) == base).count();
        assert_eq!(iso::automorphisms(&compact).order, BigUint::from(fixed), "{f}");
    }
}
