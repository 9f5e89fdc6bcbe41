//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when a criterion fails, unless that failure is listed in
//! `KNOWN_FAILURES` together with the reason it cannot pass.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use octant_ns::initdata::{octant_decompose, random_admissible, recompose, FullLatticeData, InitialData};
use octant_ns::io::entry_json;
use octant_ns::lattice::{modes_up_to, MultiIndex};
use octant_ns::recursion::{lambda_key, solve, solve_exact, CoefficientTable};
use octant_ns::scalar::{Exact, Scalar};
use octant_ns::verify::{
    abel_identity, check_decay_bounds, compare_with_oracle, conjugate_check, corollary_bound, galerkin_oracle,
    pointwise_residual, symbolic_residual_vanishes, tail_bound,
};

/// Criteria that fail for a reason outside the implementation.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    6,
    "for B_{2,(1,0,0)} = B_{1,(0,1,0)} the advection term at (1,1,0) is parallel to k, \
     so the pressure absorbs it and T_{(1,1,0)} stays zero; no t·e^(-2t) term can arise",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const FIXTURE_SEEDS: std::ops::Range<u64> = 0..20;
const FIXTURE_SUPPORT: u32 = 3;

struct Fixtures {
    exact: Vec<CoefficientTable<Exact>>,
    solve_time: Duration,
}

fn exact_fixtures() -> Fixtures {
    let start = Instant::now();
    let exact = FIXTURE_SEEDS
        .map(|s| solve_exact(&random_admissible(s, FIXTURE_SUPPORT, 1.0), 6).expect("admissible data solves"))
        .collect();
    Fixtures {
        exact,
        solve_time: start.elapsed(),
    }
}

fn criterion_1(f: &Fixtures) -> Outcome {
    let start = Instant::now();
    let bad: Vec<(usize, MultiIndex)> = f
        .exact
        .iter()
        .enumerate()
        .flat_map(|(i, t)| {
            modes_up_to(6)
                .into_iter()
                .filter(move |k| !t.divergence(k).unwrap().is_zero())
                .map(move |k| (i, k))
        })
        .collect();
    let total = f.solve_time + start.elapsed();
    let pass = bad.is_empty() && total <= Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "{} fixtures, N = 6, {} nonzero k·T_k, {:.1} s (limit 60 s)",
            f.exact.len(),
            bad.len(),
            total.as_secs_f64()
        ),
    )
}

fn criterion_2(f: &Fixtures) -> Outcome {
    let failing: Vec<usize> = f
        .exact
        .iter()
        .enumerate()
        .filter(|(_, t)| !symbolic_residual_vanishes(*t))
        .map(|(i, _)| i)
        .collect();
    outcome(
        failing.is_empty(),
        format!("momentum and continuity residuals symbolically zero on {}/{} fixtures", f.exact.len() - failing.len(), f.exact.len()),
    )
}

fn criterion_3() -> Outcome {
    let times = [0.0, 0.1, 1.0, 10.0];
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    let mut runs = 0;
    for nu in [1.0, 2.0] {
        for seed in FIXTURE_SEEDS {
            let data = random_admissible(seed, 6, 1.0).with_nu(nu);
            let table = solve(&data, 6).unwrap();
            let r = check_decay_bounds(&table, &times).unwrap();
            worst = worst.max(r.worst_ratio);
            violations += r.violations;
            runs += 1;
        }
    }
    outcome(
        violations == 0 && worst <= 1.0,
        format!("{runs} inputs at margin 1, worst ratio {worst:.3e}, {violations} violations"),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let rows = abel_identity(200);
    let abel_ok = rows.iter().all(|r| r.first_equal);
    let mut checked = 0;
    let mut failed = 0;
    for a in 1..=8u32 {
        let mut cases = vec![vec![a]];
        for b in 1..=8u32 {
            cases.push(vec![a, b]);
            cases.extend((1..=8u32).map(|cc| vec![a, b, cc]));
        }
        for k in cases {
            checked += 1;
            if !corollary_bound(&k).unwrap().holds {
                failed += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        abel_ok && failed == 0 && elapsed <= Duration::from_secs(10),
        format!(
            "identity exact for k = 1..200: {abel_ok}; product bound holds on {}/{checked}; {:.2} s (limit 10 s)",
            checked - failed,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_5() -> Outcome {
    let times = [0.1, 0.5, 1.0];
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let data = random_admissible(seed, 5, 1.0);
        let table = solve(&data, 5).unwrap();
        let oracle = galerkin_oracle(&data, 5, &times, 1e-3).unwrap();
        worst = worst.max(compare_with_oracle(&table, &oracle).max_abs_diff);
    }
    outcome(worst <= 1e-6, format!("10 fixtures, N = 5, max |series − oracle| = {worst:.3e} (limit 1e-6)"))
}

/// Looks for a `t e^{−2t}` term in the (1,1,0) functions and compares the
/// series with the oracle at `t = 1`.
fn resonance_check(data: &InitialData) -> Outcome {
    let k = MultiIndex::new(1, 1, 0);
    let table = solve(data, 4).unwrap();
    let f = table.get(&k).unwrap();
    let key = lambda_key(&k);
    let with_term: Vec<usize> = (0..3).filter(|&j| f[j].coeff(&key, 1).is_some()).collect();
    if with_term.is_empty() {
        let terms: Vec<usize> = f.iter().map(|p| p.len()).collect();
        return outcome(
            false,
            format!("no t·e^(-2t) term in T_(1,1,0); term counts (T1, T2, T3, T4) = {terms:?}"),
        );
    }
    let oracle = galerkin_oracle(data, 4, &[1.0], 1e-3).unwrap();
    let o = oracle.value(0, &k).unwrap();
    let mut worst: f64 = 0.0;
    for &j in &with_term {
        let series = f[j].evaluate(1.0, data.nu, &data.mean);
        worst = worst.max((series - o[j]).norm() / series.norm());
    }
    outcome(
        worst <= 1e-8,
        format!("t·e^(-2t) term in components {:?}, relative oracle difference {worst:.3e} (limit 1e-8)", with_term.iter().map(|j| j + 1).collect::<Vec<_>>()),
    )
}

fn criterion_6() -> Outcome {
    let mut data = InitialData::new(1.0).unwrap();
    data.add_coeff(1, MultiIndex::new(1, 0, 0), c(1e-4, 0.0)).unwrap();
    data.add_coeff(0, MultiIndex::new(0, 1, 0), c(1e-4, 0.0)).unwrap();
    resonance_check(&data)
}

/// The crossed pair whose advection term is not a gradient; reported next
/// to criterion 6.
fn criterion_6_crossed() -> Outcome {
    let mut data = InitialData::new(1.0).unwrap();
    data.add_coeff(1, MultiIndex::new(1, 0, 0), c(1e-4, 0.0)).unwrap();
    data.add_coeff(2, MultiIndex::new(0, 1, 0), c(1e-4, 0.0)).unwrap();
    resonance_check(&data)
}

fn criterion_7() -> Outcome {
    let mut fixtures: Vec<InitialData> = (0..5).map(|s| random_admissible(100 + s, 3, 1.0)).collect();
    let mut imaginary = InitialData::new(1.0).unwrap();
    imaginary.add_coeff(2, MultiIndex::new(1, 1, 0), c(0.0, 1e-4)).unwrap();
    fixtures.push(imaginary);
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for (i, d) in fixtures.iter().enumerate() {
        let r = conjugate_check(d, 6, 50, i as u64).unwrap();
        worst = worst.max(r.probe_max_diff);
        pass &= r.pass;
    }
    outcome(
        pass && worst <= 1e-10,
        format!("{} fixtures × 50 probes, max |conjugate field − conj(field)| = {worst:.3e} (limit 1e-10)", fixtures.len()),
    )
}

/// Random divergence-free data on the box `|k_i| ≤ 2` of ℤ³, mean included.
fn random_lattice_data(seed: u64) -> FullLatticeData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = FullLatticeData::new(1.0);
    for k1 in -2..=2 {
        for k2 in -2..=2 {
            for k3 in -2..=2 {
                if rng.gen_bool(0.4) {
                    continue;
                }
                let k = [k1 as f64, k2 as f64, k3 as f64];
                let mut pick = || -> [f64; 3] { std::array::from_fn(|_| rng.gen_range(-8..=8) as f64 / 1024.0) };
                let (re, im) = (pick(), pick());
                let cross = |v: [f64; 3]| [v[1] * k[2] - v[2] * k[1], v[2] * k[0] - v[0] * k[2], v[0] * k[1] - v[1] * k[0]];
                let v = if k1 == 0 && k2 == 0 && k3 == 0 {
                    std::array::from_fn(|j| c(re[j], im[j]))
                } else {
                    let (a, b) = (cross(re), cross(im));
                    std::array::from_fn(|j| c(a[j], b[j]))
                };
                data.coeffs.insert(MultiIndex::new(k1, k2, k3), v);
            }
        }
    }
    data
}

fn criterion_8() -> Outcome {
    let mut exact = 0;
    let mut divergence_ok = 0;
    for seed in 0..10 {
        let data = random_lattice_data(seed);
        let pieces = octant_decompose(&data);
        let back = recompose(&pieces, data.nu);
        // all-zero vectors carry no information and are not reproduced
        if back.pruned(0.0) == data.clone().pruned(0.0) {
            exact += 1;
        }
        if pieces.iter().all(|p| p.check_divergence().pass && p.validate().is_ok()) {
            divergence_ok += 1;
        }
    }
    outcome(
        exact == 10 && divergence_ok == 10,
        format!("exact round trip on {exact}/10 datasets, all pieces divergence-free on {divergence_ok}/10"),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let tau = std::f64::consts::TAU;
    let tables: Vec<CoefficientTable> = (0..4).map(|s| solve(&random_admissible(200 + s, 4, 1.0), 8).unwrap()).collect();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let table = &tables[i % tables.len()];
        let x: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..tau));
        let t = rng.gen_range(0.5..3.0);
        let r = pointwise_residual(table, x, t);
        worst = worst.max(r / tail_bound(8, t, table.init().nu));
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 10.0 && elapsed <= Duration::from_secs(120),
        format!(
            "100 probes, N = 8, t in [0.5, 3): worst residual / tail bound = {worst:.3e} (limit 10); {:.1} s (limit 120 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn same_low_shells<C: Scalar>(small: &CoefficientTable<C>, large: &CoefficientTable<C>) -> bool {
    modes_up_to(small.order()).iter().all(|k| {
        let a = entry_json(k, small.get(k).unwrap()).unwrap();
        let b = entry_json(k, large.get(k).unwrap()).unwrap();
        a == b
    })
}

fn criterion_10(f: &Fixtures) -> Outcome {
    let mut float_ok = 0;
    let mut exact_ok = 0;
    for (i, seed) in FIXTURE_SEEDS.enumerate() {
        let data = random_admissible(seed, FIXTURE_SUPPORT, 1.0);
        if same_low_shells(&solve(&data, 4).unwrap(), &solve(&data, 6).unwrap()) {
            float_ok += 1;
        }
        if same_low_shells(&solve_exact(&data, 4).unwrap(), &f.exact[i]) {
            exact_ok += 1;
        }
    }
    let n = f.exact.len();
    outcome(
        float_ok == n && exact_ok == n,
        format!("shells ≤ 4 identical after serialization: float {float_ok}/{n}, exact {exact_ok}/{n}"),
    )
}

fn main() {
    let fixtures = exact_fixtures();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1", Box::new(|| criterion_1(&fixtures))),
        ("2", Box::new(|| criterion_2(&fixtures))),
        ("3", Box::new(criterion_3)),
        ("4", Box::new(criterion_4)),
        ("5", Box::new(criterion_5)),
        ("6", Box::new(criterion_6)),
        ("6 (crossed pair, supplementary)", Box::new(criterion_6_crossed)),
        ("7", Box::new(criterion_7)),
        ("8", Box::new(criterion_8)),
        ("9", Box::new(criterion_9)),
        ("10", Box::new(|| criterion_10(&fixtures))),
    ];
    let mut unexpected = 0;
    for (name, check) in &criteria {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let known = KNOWN_FAILURES
            .iter()
            .find(|(n, _)| n.to_string() == *name)
            .map(|(_, why)| *why);
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {name}: {verdict}: {}", result.detail);
        match (result.pass, known) {
            (false, Some(why)) => println!("    known failure: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => println!("    listed as a known failure but passed"),
            (true, None) => {}
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}
