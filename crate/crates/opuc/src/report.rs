//! Deterministic plain-text report assembly.
//!
//! Reports are tabular text: `#`-prefixed header lines (tool, task, seed,
//! effective settings, column names), then one space-separated row per
//! record. Floats are printed with a fixed scientific format so that
//! identical runs produce byte-identical files; no timestamps, no
//! environment-dependent content.

use crate::config::{ExperimentConfig, Task};

/// Fixed float format used in every table.
pub fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.12e}")
    }
}

pub fn fmt_complex(z: num_complex::Complex64) -> String {
    format!(
        "{}{}{}i",
        fmt_f(z.re),
        if z.im < 0.0 { "" } else { "+" },
        fmt_f(z.im)
    )
}

/// Standard header block; every output file starts with this.
pub fn header(task: Task, config: &ExperimentConfig, grid_m: usize, columns: &str) -> String {
    let mut s = String::new();
    s.push_str(&format!("# opuc report task={}\n", task.name()));
    s.push_str(&format!("# spec={}\n", config.spec_path.display()));
    s.push_str(&format!("# seed={}\n", config.seed));
    s.push_str(&format!("# grid_m={grid_m} n_max={}\n", config.n_max));
    s.push_str(&format!("# columns: {columns}\n"));
    s
}

/// One verdict line of the summary file.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }

    pub fn not_applicable(name: &str, why: &str) -> Self {
        Self {
            name: name.into(),
            passed: true,
            detail: format!("n/a: {why}"),
        }
    }
}

/// Render the summary: one line per check, fixed order, machine-greppable.
pub fn summary(config: &ExperimentConfig, results: &[(Task, Vec<CheckResult>)]) -> (String, bool) {
    let mut all = true;
    let mut s = String::new();
    s.push_str("# opuc summary\n");
    s.push_str(&format!("# spec={}\n", config.spec_path.display()));
    s.push_str(&format!("# seed={}\n", config.seed));
    for (task, checks) in results {
        for c in checks {
            all &= c.passed;
            s.push_str(&format!(
                "{} {} {} {}\n",
                task.name(),
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.detail
            ));
        }
    }
    s.push_str(&format!("overall {}\n", if all { "PASS" } else { "FAIL" }));
    (s, all)
}
