//! Acceptance suite: one test per shipped criterion, each printing its
//! PASS/FAIL line with the measured numbers. Run with `--release`; the
//! sum-rule batch carries a wall-clock budget.
//!
//! Two criteria probe claims that the measurements refute (the blanket
//! monotonicity of log fₙ(0), and the radial-mean/boundary-mean identity
//! behind the L² cross-check). Those tests assert the criteria as stated
//! and fail honestly; the printed tables carry the counterexamples.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use opuc::asymptotics::{
    arc_l2, bound_scan, dtilde_ring, l2_error, pointwise_table, rakhmanov_check, singular_decay,
    wave_symbol_check,
};
use opuc::cmv;
use opuc::config::MeasureSpecFile;
use opuc::grid::{CircleGrid, TrigPoly};
use opuc::measure::{make_bernstein_szego, PsMeasure, WeightPoly};
use opuc::outer::{psi_p1_closed_form, OuterEvaluator};
use opuc::runner::{default_arcs, random_candidates, sampled_n};
use opuc::sumrule;
use opuc::szego::{horner, recurse, VerblunskySeq};
use opuc::variational::{classical_distance, sandwich_check, NormalizedWeight};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report(criterion: &str, passed: bool, detail: &str) -> bool {
    println!(
        "ACCEPTANCE {criterion}: {} ({detail})",
        if passed { "PASS" } else { "FAIL" }
    );
    passed
}

fn weight_one() -> WeightPoly {
    WeightPoly::single_zero_at_one()
}

fn weight_two() -> WeightPoly {
    WeightPoly::new(vec![0.0, std::f64::consts::PI], vec![1, 1]).unwrap()
}

fn shipped_spec(name: &str) -> PsMeasure {
    let path = format!("{}/../../specs/{name}.toml", env!("CARGO_MANIFEST_DIR"));
    MeasureSpecFile::load(std::path::Path::new(&path))
        .unwrap_or_else(|e| panic!("shipped spec {name}: {e}"))
        .build_measure(None)
        .unwrap_or_else(|e| panic!("shipped spec {name}: {e}"))
}

const SHIPPED: [&str; 4] = ["lebesgue", "bs_half", "beta15", "beta15_atom"];

fn random_alpha(rng: &mut ChaCha8Rng, len: usize, cap: f64) -> VerblunskySeq {
    let vals: Vec<Complex64> = (0..len)
        .map(|_| {
            let re = (2.0 * rng.gen::<f64>() - 1.0) * cap;
            let im = (2.0 * rng.gen::<f64>() - 1.0) * cap;
            let mut a = c(re, im);
            if a.norm() > cap {
                a = a / a.norm() * cap;
            }
            a
        })
        .collect();
    VerblunskySeq::new(vals).unwrap()
}

/// Durand–Kerner largest root modulus of a monic polynomial.
fn max_root_radius(coeffs: &[Complex64]) -> f64 {
    let n = coeffs.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.7, 0.1 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..300 {
        let mut shift = 0.0f64;
        for i in 0..n {
            let mut denom = c(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let delta = horner(coeffs, roots[i]) / denom;
            roots[i] -= delta;
            shift = shift.max(delta.norm());
        }
        if shift < 1e-12 {
            break;
        }
    }
    roots.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn criterion_01_sum_rule_exactness() {
    let start = Instant::now();
    let w1 = weight_one();

    let bs = make_bernstein_szego(
        VerblunskySeq::from_reals(&[0.5]).unwrap(),
        w1.clone(),
        CircleGrid::new(4096, 0.5).unwrap(),
    )
    .unwrap();
    let want = 2.0 * 0.75f64.ln() - 1.0;
    let (zd, _) = sumrule::z_direct(&bs, &w1).unwrap();
    let zt = sumrule::z_trace(&VerblunskySeq::from_reals(&[0.5]).unwrap(), &w1).unwrap();
    let closed_ok = (zd - want).abs() <= 1e-8 && (zt - want).abs() <= 1e-8;

    let mut rng = ChaCha8Rng::seed_from_u64(20260811);
    let mut worst = 0.0f64;
    let mut done = 0usize;
    while done < 100 {
        let len = 1 + (rng.gen::<u64>() % 8) as usize;
        let alpha = random_alpha(&mut rng, len, 0.8);
        let pair = recurse(&alpha, len).unwrap();
        let rmax = max_root_radius(&pair.phi);
        if rmax > 1.0 - 8e-5 {
            // Near-atomic draw: the density cannot be resolved at desk
            // scale; redraw (deterministic given the seed).
            continue;
        }
        let m_grid = (((40.0 / (1.0 - rmax)) as usize).next_power_of_two()).max(4096);
        let grid = CircleGrid::new(m_grid, 0.5).unwrap();
        for w in [&w1, &weight_two()] {
            let measure = make_bernstein_szego(alpha.clone(), w.clone(), grid.clone()).unwrap();
            let (zd, _) = sumrule::z_direct(&measure, w).unwrap();
            let zt = sumrule::z_trace(&alpha, w).unwrap();
            worst = worst.max((zd - zt).abs());
        }
        done += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = report(
        "1 sum-rule-exactness",
        closed_ok && worst <= 1e-8 && elapsed < 30.0,
        &format!(
            "Z_direct-Z_closed {:.2e}, worst random |Zd-Zt| {worst:.2e}, {elapsed:.1}s",
            (zd - want).abs()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_02_cmv_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_char = 0.0f64;
    for i in 0..50 {
        let n = 1 + i % 12;
        let alpha = random_alpha(&mut rng, n, 0.8);
        worst_char = worst_char.max(cmv::char_poly_check(&alpha, n).unwrap());
    }
    let traces = cmv::trace_moments(&VerblunskySeq::from_reals(&[0.5]).unwrap(), 8).unwrap();
    let mut worst_trace = 0.0f64;
    for k in 1..=8usize {
        worst_trace = worst_trace.max((traces[k] - c(0.5f64.powi(k as i32), 0.0)).norm());
    }
    let ok = report(
        "2 cmv-identity",
        worst_char <= 1e-10 && worst_trace <= 1e-10,
        &format!("worst char-poly dev {worst_char:.2e}, worst t_k dev {worst_trace:.2e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_03_exact_asymptotics_finite_cases() {
    let probes = opuc::asymptotics::default_probes();
    let grid = CircleGrid::new(4096, 0.5).unwrap();
    let cases: Vec<VerblunskySeq> = vec![
        VerblunskySeq::from_reals(&[0.5]).unwrap(),
        VerblunskySeq::new(vec![c(0.0, 0.5)]).unwrap(),
        VerblunskySeq::new(vec![c(0.3, 0.0), c(-0.25, 0.4)]).unwrap(),
    ];
    let mut worst_pw = 0.0f64;
    let mut worst_l2 = 0.0f64;
    let mut worst_rk = 0.0f64;
    for alpha in cases {
        let n_sup = alpha.len();
        let measure = make_bernstein_szego(alpha, weight_one(), grid.clone()).unwrap();
        let ev = OuterEvaluator::new(&measure, n_sup + 4).unwrap();
        let ns: Vec<usize> = (n_sup..=n_sup + 4).collect();
        for row in pointwise_table(&measure, &ev, &probes, &ns).unwrap() {
            for e in row.errors {
                worst_pw = worst_pw.max(e);
            }
        }
        for &n in &ns {
            let e = l2_error(&measure, &ev, n).unwrap();
            worst_l2 = worst_l2.max(e.direct).max(e.mass_formula.abs());
            let fns = vec![
                TrigPoly::constant(c(1.0, 0.0)),
                TrigPoly::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap(),
            ];
            let rk = rakhmanov_check(&measure, &ev, &fns, n).unwrap();
            for (v, t) in rk.values.iter().zip(&rk.targets) {
                worst_rk = worst_rk.max((v - t).norm());
            }
        }
    }
    let ok = report(
        "3 exact-asymptotics-finite-cases",
        worst_pw <= 1e-10 && worst_l2 <= 1e-8 && worst_rk <= 1e-10,
        &format!("pointwise {worst_pw:.2e}, L² {worst_l2:.2e}, Rakhmanov {worst_rk:.2e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_04_monotone_descent() {
    // As specified: log fₙ(0) nonincreasing (slack 1e−12) for n ≤ 200 on
    // every shipped measure, hitting ½C₁Z exactly at n = N for
    // Bernstein–Szegő. The (pS)∖(S) families ascend toward ½C₁Z from
    // below (their mass sits opposite the weight zero), so this criterion
    // records a FAIL with the measured counterexample.
    let mut all_ok = true;
    for name in SHIPPED {
        let measure = shipped_spec(name);
        let weight = measure.weight().clone();
        let rep = sumrule::sum_rule_report(&measure, &weight, 200).unwrap();
        let mut monotone = true;
        let mut worst = 0.0f64;
        for w in rep.f_sequence.windows(2) {
            if w[1] > w[0] + 1e-12 {
                monotone = false;
                worst = worst.max(w[1] - w[0]);
            }
        }
        let mut exact = true;
        if let Some(alpha) = measure.finite_alpha() {
            let n_sup = alpha.len();
            exact = rep.f_sequence[n_sup..]
                .iter()
                .all(|f| (f - rep.f_target).abs() <= 1e-10);
        }
        let ok = monotone && exact;
        println!(
            "  measure {name}: monotone={monotone} (worst ascent {worst:.3e}), \
             target_exact={exact}"
        );
        all_ok &= ok;
    }
    let ok = report(
        "4 monotone-descent",
        all_ok,
        "see per-measure lines; ascent on the β-families is the documented counterexample",
    );
    assert!(ok);
}

#[test]
fn criterion_05_l2_identity_cross_check() {
    // As specified: |near-boundary L² − mass formula| ≤ 2e−3 on every
    // shipped measure for n ≤ 200. The radial means of ξₙ exceed the
    // boundary means whenever the combined log-data has nonzero mean
    // (ξₙ ∉ H²): below the Bernstein–Szegő support and on the (pS)∖(S)
    // families the direct quadrature blows up, and the criterion records
    // a FAIL with the measured values.
    let ns = [0usize, 1, 10, 50, 200];
    let mut all_ok = true;
    for name in SHIPPED {
        let measure = shipped_spec(name);
        let ev = OuterEvaluator::new(&measure, 200).unwrap();
        let mut worst = 0.0f64;
        for &n in &ns {
            let e = l2_error(&measure, &ev, n).unwrap();
            let gap = (e.richardson - e.mass_formula).abs();
            let gap = if gap.is_finite() { gap } else { f64::INFINITY };
            worst = worst.max(gap);
        }
        println!("  measure {name}: worst |direct - mass| = {worst:.3e}");
        all_ok &= worst <= 2e-3;
    }
    let ok = report(
        "5 l2-identity-cross-check",
        all_ok,
        "radial means of the modified kernel exceed boundary means off the trivial cases",
    );
    assert!(ok);
}

#[test]
fn criterion_06_uniform_bound_statistic() {
    let measure = shipped_spec("beta15");
    let ev = OuterEvaluator::new(&measure, 200).unwrap();
    let ns = sampled_n(200);
    let scan = bound_scan(&measure, &ev, 0.3, &ns).unwrap();
    let max_to = |cap: usize| {
        scan.n_list
            .iter()
            .zip(&scan.per_n)
            .filter(|(n, _)| **n <= cap)
            .map(|(_, v)| *v)
            .fold(0.0f64, f64::max)
    };
    let (m100, m200) = (max_to(100), max_to(200));
    let growth = (m200 - m100) / m100;
    let ok = report(
        "6 uniform-bound-statistic",
        growth < 0.05,
        &format!(
            "running max {m100:.6} (n≤100) -> {m200:.6} (n≤200), growth {:.3}%",
            100.0 * growth
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_07_example_cross_validation() {
    let w = weight_one();
    let grid = CircleGrid::new(8192, 0.5).unwrap();
    let probes = [c(0.2, 0.0), c(0.0, 0.4), c(-0.5, 0.0)];
    let mut worst = 0.0f64;
    for alpha in [
        VerblunskySeq::from_reals(&[0.5]).unwrap(),
        VerblunskySeq::new(vec![c(0.0, 0.5)]).unwrap(),
    ] {
        let measure = make_bernstein_szego(alpha, w.clone(), grid.clone()).unwrap();
        let ev = OuterEvaluator::new(&measure, 20).unwrap();
        for n in 0..=20usize {
            for &z in &probes {
                let integral = ev.psi(n, z).unwrap();
                let closed = psi_p1_closed_form(&w, ev.alpha(), n, z).unwrap();
                worst = worst.max((integral - closed).norm() / closed.norm());
            }
        }
    }
    let ok = report(
        "7 example-cross-validation",
        worst <= 1e-6,
        &format!("worst relative deviation {worst:.2e} over n ≤ 20, both α"),
    );
    assert!(ok);
}

#[test]
fn criterion_08_variational_sandwich() {
    let lebesgue = shipped_spec("lebesgue");
    let p0 = NormalizedWeight::new(weight_one());
    let candidates = random_candidates(20260811, 200);
    let rep = sandwich_check(&lebesgue, &p0, &candidates, &[0, 5]).unwrap();
    let want = 2.0 / std::f64::consts::E;
    let lower_ok = (rep.lower - want).abs() <= 1e-6;
    let jensen_ok = rep.worst_slack >= -1e-9;

    let bs = shipped_spec("bs_half");
    let mut dist_ok = true;
    for n in 1..=4usize {
        let d = classical_distance(&bs, n).unwrap();
        dist_ok &= (d - 0.75).abs() <= 1e-8;
    }
    let ok = report(
        "8 variational-sandwich",
        lower_ok && jensen_ok && dist_ok,
        &format!(
            "lower-2/e {:.2e}, worst Jensen slack {:.2e}, distance ok {dist_ok}",
            (rep.lower - want).abs(),
            rep.worst_slack
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_09_trend_suite() {
    let measure = shipped_spec("beta15_atom");
    let ev = OuterEvaluator::new(&measure, 402).unwrap();
    let (n0, n1) = (10usize, 200usize);

    let probes = [c(0.5, 0.0)];
    let pw = pointwise_table(&measure, &ev, &probes, &[n0, n1]).unwrap();
    let pw_ok = pw[1].errors[0] < pw[0].errors[0];

    // L² error via the boundary-trace mass formula (the direct radial
    // quadrature is divergent on this family; see criterion 5) with the
    // arc-restricted error as a second witness.
    let e0 = l2_error(&measure, &ev, n0).unwrap();
    let e1 = l2_error(&measure, &ev, n1).unwrap();
    let mass_ok = e1.mass_formula.abs() < e0.mass_formula.abs();
    let arcs = default_arcs(&measure, 0.3);
    let a0 = arc_l2(&measure, &ev, &arcs, 0.3, n0).unwrap();
    let a1 = arc_l2(&measure, &ev, &arcs, 0.3, n1).unwrap();
    let arc_ok = a1
        .errors
        .iter()
        .zip(&a0.errors)
        .all(|(late, early)| late < early);

    let sing = singular_decay(&measure, &ev, n1).unwrap();
    let sing_ok = sing[n1] < sing[n0];

    let ring = dtilde_ring(&measure, &ev).unwrap();
    let w0 = wave_symbol_check(&measure, &ev, &ring, n0, 1).unwrap();
    let w1 = wave_symbol_check(&measure, &ev, &ring, n1, 1).unwrap();
    let wave_ok = w1.symbol_error < w0.symbol_error && w1.shift_error < w0.shift_error;

    let ok = report(
        "9 trend-suite",
        pw_ok && mass_ok && arc_ok && sing_ok && wave_ok,
        &format!(
            "pointwise {:.2e}->{:.2e}, mass {:.2e}->{:.2e}, arc {:.2e}->{:.2e}, \
             singular {:.2e}->{:.2e}, wave ({:.2e},{:.2e})->({:.2e},{:.2e})",
            pw[0].errors[0],
            pw[1].errors[0],
            e0.mass_formula.abs(),
            e1.mass_formula.abs(),
            a0.errors[0],
            a1.errors[0],
            sing[n0],
            sing[n1],
            w0.symbol_error,
            w0.shift_error,
            w1.symbol_error,
            w1.shift_error
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_10_reproducibility() {
    let spec_path = format!("{}/../../specs/bs_half.toml", env!("CARGO_MANIFEST_DIR"));
    let run = |dir: &std::path::Path, workers: usize| {
        let config = opuc::config::ExperimentConfig::resolve(
            std::path::Path::new(&spec_path),
            "",
            Some(1024),
            30,
            12345,
            dir,
            workers,
        )
        .unwrap();
        opuc::runner::run_experiment(&config).unwrap()
    };
    let t1 = tempfile::tempdir().unwrap();
    let t2 = tempfile::tempdir().unwrap();
    let t3 = tempfile::tempdir().unwrap();
    run(t1.path(), 1);
    run(t2.path(), 1);
    run(t3.path(), 4);

    let mut identical = true;
    let mut names: Vec<String> = std::fs::read_dir(t1.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for name in &names {
        let a = std::fs::read(t1.path().join(name)).unwrap();
        let b = std::fs::read(t2.path().join(name)).unwrap();
        let w = std::fs::read(t3.path().join(name)).unwrap();
        identical &= a == b && a == w;
    }
    let ok = report(
        "10 reproducibility",
        identical,
        &format!(
            "{} report files byte-compared across runs and worker counts",
            names.len()
        ),
    );
    assert!(ok);
}
