//! Experiment runner: turns a measure-spec file into one tabular report
//! per task plus a pass/fail summary.
//!
//! Tasks are pure functions of (measure, config); they run on a small
//! thread pool when `workers > 1` and the outputs are assembled in task
//! order, so the report bytes do not depend on the worker count.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::{
    arc_l2, bound_scan, dtilde_ring, l2_error, pointwise_table, rakhmanov_check, singular_decay,
    wave_symbol_check, Arc,
};
use crate::config::{ExperimentConfig, Task};
use crate::error::{Error, Result};
use crate::grid::TrigPoly;
use crate::measure::PsMeasure;
use crate::outer::OuterEvaluator;
use crate::report::{fmt_f, header, summary, CheckResult};
use crate::sumrule;
use crate::variational::{self, NormalizedWeight, OuterPoly};

const BOUND_EPS: f64 = 0.3;
const WAVE_SHIFT: usize = 1;
const CANDIDATE_COUNT: usize = 200;

/// One finished task: the file content plus its check verdicts.
#[derive(Debug, Clone)]
pub struct TaskOutput {
    pub task: Task,
    pub file_name: String,
    pub content: String,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub outputs: Vec<TaskOutput>,
    pub summary_text: String,
    pub all_passed: bool,
}

/// Geometric-ish sample of n values up to n_max (always contains 0, 1 and
/// n_max, and the 10-neighborhood the trend checks compare against).
pub fn sampled_n(n_max: usize) -> Vec<usize> {
    let base = [
        0usize, 1, 2, 3, 5, 8, 10, 15, 25, 40, 60, 100, 150, 200, 300, 500, 750, 1000,
    ];
    let mut out: Vec<usize> = base.iter().copied().filter(|&n| n <= n_max).collect();
    if !out.contains(&n_max) {
        out.push(n_max);
    }
    out
}

fn trend_pair(ns: &[usize]) -> Option<(usize, usize)> {
    let last = *ns.last()?;
    let early = ns
        .iter()
        .copied()
        .find(|&n| n >= 10)
        .filter(|&n| n < last)?;
    Some((early, last))
}

/// Run every configured task and write the reports under `out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let measure = config.spec.build_measure(config.grid_m)?;
    let outputs = run_tasks(config, &measure)?;
    let results: Vec<(Task, Vec<CheckResult>)> =
        outputs.iter().map(|o| (o.task, o.checks.clone())).collect();
    let (summary_text, all_passed) = summary(config, &results);

    std::fs::create_dir_all(&config.out_dir)?;
    for out in &outputs {
        std::fs::write(config.out_dir.join(&out.file_name), &out.content)?;
    }
    std::fs::write(config.out_dir.join("summary.txt"), &summary_text)?;
    Ok(ExperimentResult {
        outputs,
        summary_text,
        all_passed,
    })
}

/// Execute the task list on up to `workers` threads, deterministic order.
fn run_tasks(config: &ExperimentConfig, measure: &PsMeasure) -> Result<Vec<TaskOutput>> {
    let tasks = &config.tasks;
    let workers = config.workers.min(tasks.len()).max(1);
    if workers == 1 {
        return tasks
            .iter()
            .map(|&t| run_task(t, config, measure))
            .collect();
    }
    let mut slots: Vec<Option<Result<TaskOutput>>> = (0..tasks.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let cfg = config;
            let m = measure;
            handles.push(scope.spawn(move || {
                let mut mine = Vec::new();
                for (i, &t) in tasks.iter().enumerate() {
                    if i % workers == w {
                        mine.push((i, run_task(t, cfg, m)));
                    }
                }
                mine
            }));
        }
        for h in handles {
            for (i, r) in h.join().expect("task worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every task slot filled"))
        .collect()
}

fn run_task(task: Task, config: &ExperimentConfig, measure: &PsMeasure) -> Result<TaskOutput> {
    match task {
        Task::SumRule => task_sumrule(config, measure),
        Task::Pointwise => task_pointwise(config, measure),
        Task::L2 => task_l2(config, measure),
        Task::Arcs => task_arcs(config, measure),
        Task::Bound => task_bound(config, measure),
        Task::Rakhmanov => task_rakhmanov(config, measure),
        Task::Singular => task_singular(config, measure),
        Task::Wave => task_wave(config, measure),
        Task::Variational => task_variational(config, measure),
        Task::Distance => task_distance(config, measure),
    }
    .map_err(|e| Error::Numerical(format!("task {}: {e}", task.name())))
}

fn finite_support(measure: &PsMeasure) -> Option<usize> {
    measure.finite_alpha().map(|a| a.len())
}

fn task_sumrule(config: &ExperimentConfig, measure: &PsMeasure) -> Result<TaskOutput> {
    let weight = measure.weight().clone();
    let report = sumrule::sum_rule_report(measure, &weight, config.n_max)?;
    let mut s = header(Task::SumRule, config, measure.grid().len(), "n log_f_n");
    let p_list: Vec<String> = report
        .p_coeffs
        .iter()
        .map(|c| crate::report::fmt_complex(*c))
        .collect();
    writeln!(s, "# P_coeffs (ascending) = {}", p_list.join(" ")).unwrap();
    write!(
        s,
        "# Z_direct={} A0={} C1={} f_target={}\n# scan_values={},{},{} scan_converged={}\n",
        fmt_f(report.z_direct),
        fmt_f(report.a0),
        fmt_f(report.c1),
        fmt_f(report.f_target),
        fmt_f(report.scan.values[0]),
        fmt_f(report.scan.values[1]),
        fmt_f(report.scan.values[2]),
        report.scan.converged
    )
    .unwrap();
    if let (Some(zt), Some(d)) = (report.z_trace, report.discrepancy) {
        writeln!(s, "# Z_trace={} discrepancy={}", fmt_f(zt), fmt_f(d)).unwrap();
    }
    for (n, f) in report.f_sequence.iter().enumerate() {
        writeln!(s, "{n} {}", fmt_f(*f)).unwrap();
    }

    let mut checks = vec![CheckResult::new(
        "scan_converged",
        report.scan.converged,
        format!(
            "diffs {} {}",
            fmt_f(report.scan.diffs[0]),
            fmt_f(report.scan.diffs[1])
        ),
    )];
    match report.discrepancy {
        Some(d) => checks.push(CheckResult::new(
            "sum_rule_equality",
            d <= 1e-8,
            format!("|Z_direct - Z_trace| = {}", fmt_f(d)),
        )),
        None => checks.push(CheckResult::not_applicable(
            "sum_rule_equality",
            "no finite Verblunsky support",
        )),
    }
    let mut monotone = true;
    let mut worst = 0.0f64;
    for w in report.f_sequence.windows(2) {
        let rise = w[1] - w[0];
        if rise > 1e-12 {
            monotone = false;
            worst = worst.max(rise);
        }
    }
    checks.push(CheckResult::new(
        "descent_monotone",
        monotone,
        if monotone {
            "nonincreasing".into()
        } else {
            format!("worst ascent {}", fmt_f(worst))
        },
    ));
    if let Some(n_sup) = finite_support(measure) {
        if n_sup <= config.n_max {
            let hit = report.f_sequence[n_sup..]
                .iter()
                .all(|f| (f - report.f_target).abs() <= 1e-10);
            checks.push(CheckResult::new(
                "descent_target_at_support",
                hit,
                format!(
                    "|log f_N - target| = {}",
                    fmt_f((report.f_sequence[n_sup] - report.f_target).abs())
                ),
            ));
        }
    }
    Ok(TaskOutput {
        task: Task::SumRule,
        file_name: "sumrule.txt".into(),
        content: s,
        checks,
    })
}

fn task_pointwise(config: &ExperimentConfig, measure: &PsMeasure) -> Result<TaskOutput> {
    let ns = sampled_n(config.n_max);
    let ev = OuterEvaluator::new(measure, config.n_max)?;
    let rows = pointwise_table(measure, &ev, &config.probes, &ns)?;
    let mut s = header(
        Task::Pointwise,
        config,
        measure.grid().len(),
        "n err_per_probe...",
    );
    for (i, z) in config.probes.iter().enumerate() {
        writeln!(s, "# probe{} = {}", i, crate::report::fmt_complex(*z)).unwrap();
    }
    for row in &rows {
        write!(s, "{}", row.n).unwrap();
        for e in &row.errors {
            write!(s, " {}", fmt_f(*e)).unwrap();
        }
        s.push('\n');
    }

    let mut checks = Vec::new();
    match finite_support(measure) {
        Some(n_sup) => {
            let worst = rows
                .iter()
                .filter(|r| r.n >= n_sup)
                .flat_map(|r| r.errors.iter().copied())
                .fold(0.0f64, f64::max);
            checks.push(CheckResult::new(
                "finite_support_floor",
                worst <= 1e-10,
                format!("max error for n >= {n_sup}: {}", fmt_f(worst)),
            ));
        }
        None => {
            if let Some((n0, n1)) = trend_pair(&ns) {
                let row0 = rows.iter().find(|r| r.n == n0).expect("sampled");
                let row1 = rows.iter().find(|r| r.n == n1).expect("sampled");
                let ok = row0.errors.iter().zip(&row1.errors).all(|(a, b)| b < a);
                checks.push(CheckResult::new(
                    "trend_decreasing",
                    ok,
                    format!(
                        "n={n0}: {} -> n={n1}: {}",
                        fmt_f(row0.errors[0]),
                        fmt_f(row1.errors[0])
                    ),
                ));
            }
        }
    }
    Ok(TaskOutput {
        task: Task::Pointwise,
        file_name: "pointwise.txt".into(),
        content: s,
        checks,
    })
}

fn task_l2(config: &ExperimentConfig, measure: &PsMeasure) -> Result<TaskOutput> {
    let ns = sampled_n(config.n_max);
    let ev = OuterEvaluator::new(measure, config.n_max)?;
    let mut s = header(
        Task::L2,
        config,
        measure.grid().len(),
        "n direct direct_coarse richardson mass_formula",
    );
    let mut rows = Vec::new();
    for &n in &ns {
        let e = l2_error(measure, &ev, n)?;
        writeln!(
            s,
            "{n} {} {} {} {}",
            fmt_f(e.direct),
            fmt_f(e.direct_coarse),
            fmt_f(e.richardson),
            fmt_f(e.mass_formula)
        )
        .unwrap();
        rows.push(e);
    }

    let mut checks = Vec::new();
    let worst_gap = rows
        .iter()
        .map(|e| {
            let gap = (e.richardson - e.mass_formula).abs();
            if gap.is_finite() {
                gap
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0f64, f64::max);
    checks.push(CheckResult::new(
        "mass_identity_2e3",
        worst_gap <= 2e-3,
        format!("max |richardson - mass| = {}", fmt_f(worst_gap)),
    ));
    match finite_support(measure) {
        Some(n_sup) => {
            let worst = rows
                .iter()
                .filter(|e| e.n >= n_sup)
                .map(|e| e.direct.max(e.mass_formula.abs()))
                .fold(0.0f64, f64::max);
            checks.push(CheckResult::new(
                "finite_support_floor",
                worst <= 1e-8,
                format!("max error for n >= {n_sup}: {}", fmt_f(worst)),
            ));
        }
        None => {
            if !measure.atoms().is_empty() {
                if let Some((n0, n1)) = trend_pair(&ns) {
                    let m0 = rows.iter().find(|e| e.n == n0).unwrap().mass_formula.abs();
                    let m1 = rows.iter().find(|e| e.n == n1).unwrap().mass_formula.abs();
                    checks.push(CheckResult::new(
                        "mass_trend_decreasing",
                        m1 < m0,
                        format!("|mass| n={n0}: {} -> n={n1}: {}", fmt_f(m0), fmt_f(m1)),
                    ));
                }
            }
        }
    }
    Ok(TaskOutput {
        task: Task::L2,
        file_name: "l2.txt".into(),
        content: s,
        checks,
    })
}

/// Default arcs: the maximal sub-arc of each gap between consecutive
/// weight zeros, shrunk a little past the ε margin on both sides.
pub fn default_arcs(measure: &PsMeasure, eps: f64) -> Vec<Arc> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let shrink = eps + 0.01;
    let mut angles: Vec<f64> = measure
        .weight()
        .zero_angles()
        .iter()
        .map(|a| a.rem_euclid(two_pi))
        .collect();
    angles.sort_by(f64::total_cmp);
    let mut arcs = Vec::new();
    for (i, &a) in angles.iter().enumerate() {
        let b = if i + 1 < angles.len() {
            angles[i + 1]
        } else {
            angles[0] + two_pi
        };
        if b - a > 2.0 * shrink + 0.1 {
            arcs.push(Arc {
                lo: (a + shrink).rem_euclid(two_pi),
                hi: (b - shrink).rem_euclid(two_pi),
            });
        }
    }
    arcs
}

fn task_arcs(config: &ExperimentConfig, measure: &PsMeasure) -> Result<TaskOutput> {
    let ns = sampled_n(config.n_max);
    let ev = OuterEvaluator::new(measure, config.n_max)?;
    let arcs = default_arcs(measure, BOUND_EPS);
    let mut s = header(
        Task::Arcs,
        config,
        measure.grid().len(),
        "n arc_index err mass arc_measure",
    );
    for (i, a) in arcs.iter().enumerate() {
        writeln!(s, "# arc{} = [{}, {}]", i, fmt_f(a.lo), fmt_f(a.hi)).unwrap();
    }
    let mut rows = Vec::new();
    for &n in &ns {
        let r = arc_l2(measure, &ev, &arcs, BOUND_EPS, n)?;
        for i in 0..arcs.len() {
            writeln!(
                s,
                "{n} {i} {} {} {}",
                fmt_f(r.errors[i]),
                fmt_f(r.masses[i]),
                fmt_f(r.arc_measure[i])
            )
            .unwrap();
        }
        rows.push(r);
    }

    let mut checks = Vec::new();
    match finite_support(measure) {
        Some(n_sup) => {
            let worst = rows
                .iter()
                .filter(|r| r.n >= n_sup)
                .flat_map(|r| r.errors.iter().copied())
                .fold(0.0f64, f64::max);
            checks.push(CheckResult::new(
                "finite_support_floor",
                worst <= 1e-8,
                format!("max arc error for n >= {n_sup}: {}", fmt_f(worst)),
            ));
        }
        None => {
            if let Some((n0, n1)) = trend_pair(&ns) {
                let gap = |n: usize| {
                    let r = rows.iter().find(|r| r.n == n).unwrap();
                    r.masses
                        .iter()
                        .zip(&r.arc_measure)
                        .map(|(m, f)| (m - f).abs())
                        .fold(0.0f64, f64::max)
                };
                let (g0, g1) = (gap(n0), gap(n1));
                checks.push(CheckResult::new(
                    "arc_mass_gap_trend",
                    g1 < g0,
                    format!(
                        "max |mass - m(I)| n={n0}: {} -> n={n1}: {}",
                        fmt_f(g0),
                        fmt_f(g1)
                    ),
                ));
            }
        }
    }
    Ok(TaskOutput {
        task: Task::Arcs,
        file_name: "arcs.txt".into(),
        content: s,
        checks,
    })
}

fn task_bound(config: &ExperimentConfig, measure: &PsMeasure) -> Result<TaskOutput> {
    let ns = sampled_n(config.n_max);
    let ev = OuterEvaluator::new(measure, config.n_max)?;
    let scan = bound_scan(measure, &ev, BOUND_EPS, &ns)?;
    let mut s = header(Task::Bound, config, measure.grid().len(), "n statistic");
    writeln!(s, "# eps={BOUND_EPS} rings=0.9,0.99,0.999").unwrap();
    for (n, v) in scan.n_list.iter().zip(&scan.per_n) {
        writeln!(s, "{n} {}", fmt_f(*v)).unwrap();
    }
    let checks = vec![CheckResult::new(
        "no_growth",
        !scan.growth_flagged,
        format!(
            "max over first half {} vs full {}",
            fmt_f(scan.max_first_half),
            fmt_f(scan.max_full)
        ),
    )];
    Ok(TaskOutput {
        task: Task::Bound,
        file_name: "bound.txt".into(),
        content: s,
        checks,
    })
}

fn rakhmanov_testfns() -> Vec<TrigPoly> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    vec![
        TrigPoly::constant(one),
        TrigPoly::new(vec![zero, zero, one]).unwrap(),
        TrigPoly::new(vec![zero, zero, zero, zero, one]).unwrap(),
    ]
}

fn task_rakhmanov(config: &ExperimentConfig, measure: &PsMeasure) -> Result<TaskOutput> {
    let ns = sampled_n(config.n_max);
    let ev = OuterEvaluator::new(measure, config.n_max)?;
    let fns = rakhmanov_testfns();
    let mut s = header(
        Task::Rakhmanov,
        config,
        measure.grid().len(),
        "n fn_index |value - target| value_re value_im",
    );
    writeln!(s, "# testfns: 1, t, t^2").unwrap();
    let mut rows = Vec::new();
    for &n in &ns {
        let r = rakhmanov_check(measure, &ev, &fns, n)?;
        for i in 0..fns.len() {
            writeln!(
                s,
                "{n} {i} {} {} {}",
                fmt_f((r.values[i] - r.targets[i]).norm()),
                fmt_f(r.values[i].re),
                fmt_f(r.values[i].im)
            )
            .unwrap();
        }
        rows.push(r);
    }

    let mut checks = Vec::new();
    let worst_norm = rows
        .iter()
        .map(|r| (r.values[0] - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0f64, f64::max);
    checks.push(CheckResult::new(
        "normalization",
        worst_norm <= 1e-10,
        format!("max |functional(1) - 1| = {}", fmt_f(worst_norm)),
    ));
    match finite_support(measure) {
        Some(n_sup) => {
            let worst = rows
                .iter()
                .filter(|r| r.n >= n_sup)
                .flat_map(|r| r.values.iter().zip(&r.targets).map(|(v, t)| (v - t).norm()))
                .fold(0.0f64, f64::max);
            checks.push(CheckResult::new(
                "finite_support_exact",
                worst <= 1e-10,
                format!("max deviation for n >= {n_sup}: {}", fmt_f(worst)),
            ));
        }
        None => {
            if let Some((n0, n1)) = trend_pair(&ns) {
                let dev = |n: usize| {
                    let r = rows.iter().find(|r| r.n == n).unwrap();
                    (r.values[1] - r.targets[1]).norm()
                };
                let (d0, d1) = (dev(n0), dev(n1));
                checks.push(CheckResult::new(
                    "trend_decreasing",
                    d1 < d0,
                    format!(
                        "|∫t|φ_n|²dσ| n={n0}: {} -> n={n1}: {}",
                        fmt_f(d0),
                        fmt_f(d1)
                    ),
                ));
            }
        }
    }
    Ok(TaskOutput {
        task: Task::Rakhmanov,
        file_name: "rakhmanov.txt".into(),
        content: s,
        checks,
    })
}

fn task_singular(config: &ExperimentConfig, measure: &PsMeasure) -> Result<TaskOutput> {
    let ev = OuterEvaluator::new(measure, config.n_max)?;
    let masses = singular_decay(measure, &ev, config.n_max)?;
    let mut s = header(
        Task::Singular,
        config,
        measure.grid().len(),
        "n singular_mass",
    );
    for (n, v) in masses.iter().enumerate() {
        writeln!(s, "{n} {}", fmt_f(*v)).unwrap();
    }
    let checks = if measure.atoms().is_empty() {
        vec![CheckResult::not_applicable("decay_trend", "no atoms")]
    } else if let Some((n0, n1)) = trend_pair(&sampled_n(config.n_max)) {
        vec![CheckResult::new(
            "decay_trend",
            masses[n1] < masses[n0],
            format!(
                "n={n0}: {} -> n={n1}: {}",
                fmt_f(masses[n0]),
                fmt_f(masses[n1])
            ),
        )]
    } else {
        vec![CheckResult::not_applicable(
            "decay_trend",
            "n_max too small",
        )]
    };
    Ok(TaskOutput {
        task: Task::Singular,
        file_name: "singular.txt".into(),
        content: s,
        checks,
    })
}

fn task_wave(config: &ExperimentConfig, measure: &PsMeasure) -> Result<TaskOutput> {
    let ns = sampled_n(config.n_max / 2);
    let ev = OuterEvaluator::new(measure, 2 * (config.n_max / 2 + WAVE_SHIFT))?;
    let ring = dtilde_ring(measure, &ev)?;
    let mut s = header(
        Task::Wave,
        config,
        measure.grid().len(),
        "n symbol_error shift_error",
    );
    writeln!(s, "# shift l={WAVE_SHIFT}").unwrap();
    let mut rows = Vec::new();
    for &n in &ns {
        let r = wave_symbol_check(measure, &ev, &ring, n, WAVE_SHIFT)?;
        writeln!(s, "{n} {} {}", fmt_f(r.symbol_error), fmt_f(r.shift_error)).unwrap();
        rows.push(r);
    }

    let mut checks = Vec::new();
    match finite_support(measure) {
        Some(n_sup) => {
            let worst_sym = rows
                .iter()
                .filter(|r| r.n >= n_sup)
                .map(|r| r.symbol_error)
                .fold(0.0f64, f64::max);
            let worst_shift = rows
                .iter()
                .filter(|r| r.n >= n_sup)
                .map(|r| r.shift_error)
                .fold(0.0f64, f64::max);
            checks.push(CheckResult::new(
                "finite_support_floor",
                worst_sym <= 1e-6 && worst_shift <= 1e-12,
                format!(
                    "n >= {n_sup}: symbol {} shift {}",
                    fmt_f(worst_sym),
                    fmt_f(worst_shift)
                ),
            ));
        }
        None => {
            if let Some((n0, n1)) = trend_pair(&ns) {
                let at = |n: usize| rows.iter().find(|r| r.n == n).unwrap();
                let (a0, a1) = (at(n0), at(n1));
                checks.push(CheckResult::new(
                    "trend_decreasing",
                    a1.symbol_error < a0.symbol_error && a1.shift_error < a0.shift_error,
                    format!(
                        "symbol {} -> {}, shift {} -> {}",
                        fmt_f(a0.symbol_error),
                        fmt_f(a1.symbol_error),
                        fmt_f(a0.shift_error),
                        fmt_f(a1.shift_error)
                    ),
                ));
            }
        }
    }
    Ok(TaskOutput {
        task: Task::Wave,
        file_name: "wave.txt".into(),
        content: s,
        checks,
    })
}

/// Seeded random candidates: up to four roots outside the closed disk.
pub fn random_candidates(seed: u64, count: usize) -> Vec<OuterPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let nroots = rng.gen_range(0..=4usize);
        let mut roots = Vec::with_capacity(nroots);
        for _ in 0..nroots {
            let radius = 1.05 + 3.0 * rng.gen::<f64>();
            let angle = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            roots.push(Complex64::from_polar(radius, angle));
        }
        let scale = (2.0 * rng.gen::<f64>() - 1.0).exp();
        out.push(OuterPoly::new(roots, scale).expect("construction respects the class"));
    }
    out
}

fn task_variational(config: &ExperimentConfig, measure: &PsMeasure) -> Result<TaskOutput> {
    let p0 = NormalizedWeight::new(measure.weight().clone());
    let candidates = random_candidates(config.seed, CANDIDATE_COUNT);
    let witness_ns = sampled_n(config.n_max);
    let mut checks = Vec::new();
    let mut s = header(
        Task::Variational,
        config,
        measure.grid().len(),
        "witness_n witness_value",
    );
    match variational::sandwich_check(measure, &p0, &candidates, &witness_ns) {
        Ok(rep) => {
            write!(
                s,
                "# candidates={CANDIDATE_COUNT}\n# lower={} upper={} best_candidate={} worst_slack={}\n",
                fmt_f(rep.lower),
                fmt_f(rep.upper),
                fmt_f(rep.best_candidate),
                fmt_f(rep.worst_slack)
            )
            .unwrap();
            if let Some(i) = rep.best_index {
                writeln!(s, "# best_g = {}", candidates[i].serialize()).unwrap();
            }
            for (n, w) in &rep.witnesses {
                writeln!(s, "{n} {}", fmt_f(*w)).unwrap();
            }
            checks.push(CheckResult::new(
                "jensen_lower_bound",
                rep.worst_slack >= -variational::JENSEN_SLACK,
                format!("worst candidate slack {}", fmt_f(rep.worst_slack)),
            ));
            let worst_witness = rep
                .witnesses
                .iter()
                .map(|(_, w)| rep.lower - w)
                .fold(f64::MIN, f64::max);
            checks.push(CheckResult::new(
                "witnesses_above_lower",
                worst_witness <= variational::JENSEN_SLACK,
                format!("max lower - witness = {}", fmt_f(worst_witness)),
            ));
            let is_lebesgue = measure
                .finite_alpha()
                .map(|a| a.is_empty() && measure.atoms().is_empty())
                .unwrap_or(false);
            if is_lebesgue && measure.weight().zeros() == [Complex64::new(1.0, 0.0)] {
                let want = 2.0 / std::f64::consts::E;
                checks.push(CheckResult::new(
                    "lebesgue_lower_closed_form",
                    (rep.lower - want).abs() <= 1e-6,
                    format!("lower {} vs 2/e {}", fmt_f(rep.lower), fmt_f(want)),
                ));
            }
        }
        Err(Error::Numerical(msg)) => {
            writeln!(s, "# sandwich failed: {msg}").unwrap();
            checks.push(CheckResult::new("jensen_lower_bound", false, msg));
        }
        Err(other) => return Err(other),
    }
    Ok(TaskOutput {
        task: Task::Variational,
        file_name: "variational.txt".into(),
        content: s,
        checks,
    })
}

fn task_distance(config: &ExperimentConfig, measure: &PsMeasure) -> Result<TaskOutput> {
    let ns: Vec<usize> = sampled_n(config.n_max.min(120));
    let mut s = header(Task::Distance, config, measure.grid().len(), "n distance");
    if measure.is_szego {
        // exp(∫log σ′ dm) for comparison; the scan value at the base grid.
        let logs = measure.log_density_samples(measure.grid());
        let szego_value = measure.grid().mean_real(&logs)?.exp();
        writeln!(s, "# szego_infimum={}", fmt_f(szego_value)).unwrap();
    }
    let mut values = Vec::new();
    for &n in &ns {
        let d = variational::classical_distance(measure, n)?;
        writeln!(s, "{n} {}", fmt_f(d)).unwrap();
        values.push(d);
    }

    let mut checks = Vec::new();
    let nonincreasing = values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    checks.push(CheckResult::new(
        "nonincreasing",
        nonincreasing,
        "nested feasible sets".into(),
    ));
    if let Some(alpha) = measure.finite_alpha() {
        let mut worst = 0.0f64;
        for (&n, d) in ns.iter().zip(&values) {
            let want: f64 = (0..n.min(alpha.len()))
                .map(|k| 1.0 - alpha.get(k).norm_sqr())
                .product();
            worst = worst.max((d - want).abs());
        }
        checks.push(CheckResult::new(
            "finite_support_product",
            worst <= 1e-8,
            format!("max |distance - prod rho^2| = {}", fmt_f(worst)),
        ));
    }
    Ok(TaskOutput {
        task: Task::Distance,
        file_name: "distance.txt".into(),
        content: s,
        checks,
    })
}
