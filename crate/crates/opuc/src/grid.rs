//! Uniform grids, quadrature and Fourier analysis on the unit circle 𝕋.
//!
//! Everything downstream integrates against the probability Lebesgue measure
//! dm(t) = dθ/2π, t = e^{iθ}. On a uniform M-point grid the mean value
//! (1/M)Σⱼ f(tⱼ) reproduces ∫f dm exactly for trigonometric polynomials of
//! degree < M/2, which is the spectral-accuracy property all tolerances in
//! this crate lean on.
//!
//! Grids carry an `offset` fraction of the spacing. The default offset 1/2
//! keeps every node away from roots of unity, so weights p(t) = ∏|t−ζₖ|^{2κₖ}
//! with zeros at roots of unity are never sampled exactly at a zero.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_OFFSET: f64 = 0.5;

/// Minimal distance to the boundary accepted by Schwarz-type evaluators.
pub const DELTA_MIN: f64 = 1e-8;

/// Uniform quadrature grid tⱼ = exp(2πi(j+offset)/M) on the unit circle.
#[derive(Debug, Clone)]
pub struct CircleGrid {
    m: usize,
    offset: f64,
    angles: Vec<f64>,
    nodes: Vec<Complex64>,
}

impl CircleGrid {
    /// Build an M-point grid. M must be a power of two, M ≥ 4, 0 ≤ offset < 1.
    pub fn new(m: usize, offset: f64) -> Result<Self> {
        if m < 4 || !m.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size must be a power of two ≥ 4, got {m}"
            )));
        }
        if !(0.0..1.0).contains(&offset) {
            return Err(Error::Config(format!(
                "grid offset must lie in [0,1), got {offset}"
            )));
        }
        let step = 2.0 * std::f64::consts::PI / m as f64;
        let angles: Vec<f64> = (0..m).map(|j| step * (j as f64 + offset)).collect();
        let nodes = angles
            .iter()
            .map(|&th| Complex64::from_polar(1.0, th))
            .collect();
        Ok(Self {
            m,
            offset,
            angles,
            nodes,
        })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    /// Same offset, twice the points.
    pub fn refined(&self) -> Self {
        Self::new(self.m * 2, self.offset).expect("doubling preserves grid invariants")
    }

    /// Sample a function of the node over the grid in node order.
    pub fn sample<T>(&self, f: impl FnMut(Complex64) -> T) -> Vec<T> {
        self.nodes.iter().copied().map(f).collect()
    }

    /// Sample a function of the angle θⱼ over the grid in node order.
    pub fn sample_angles<T>(&self, f: impl FnMut(f64) -> T) -> Vec<T> {
        self.angles.iter().copied().map(f).collect()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.m {
            return Err(Error::Contract(format!(
                "sample count {n} does not match grid size {}",
                self.m
            )));
        }
        Ok(())
    }

    /// Probability-mean quadrature (1/M)Σ f(tⱼ), exact for trig polynomials
    /// of degree < M/2. Uses compensated summation in a fixed order, so the
    /// result does not depend on how callers chunk their work.
    pub fn mean(&self, samples: &[Complex64]) -> Result<Complex64> {
        self.check_len(samples.len())?;
        let re = neumaier_sum(samples.iter().map(|c| c.re));
        let im = neumaier_sum(samples.iter().map(|c| c.im));
        Ok(Complex64::new(re, im) / self.m as f64)
    }

    /// Real-data variant of [`CircleGrid::mean`].
    pub fn mean_real(&self, samples: &[f64]) -> Result<f64> {
        self.check_len(samples.len())?;
        Ok(neumaier_sum(samples.iter().copied()) / self.m as f64)
    }

    /// Fourier coefficients aⱼ = ∫f t^{−j} dm for |j| ≤ k, as a [`TrigPoly`].
    pub fn fourier_coeffs(&self, samples: &[Complex64], k: usize) -> Result<TrigPoly> {
        self.check_len(samples.len())?;
        if 2 * k >= self.m {
            return Err(Error::Config(format!(
                "max Fourier index {k} needs a grid larger than {} points",
                self.m
            )));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k + 1];
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let j = idx as i64 - k as i64;
            let weighted: Vec<Complex64> = self
                .nodes
                .iter()
                .zip(samples)
                .map(|(t, f)| f * t.powi(-j as i32))
                .collect();
            *c = self.mean(&weighted)?;
        }
        Ok(TrigPoly { coeffs, degree: k })
    }

    /// Schwarz integral ∫ (t+z)/(t−z) · g(t) dm(t) for real boundary data g
    /// and |z| ≤ 1 − δ_min.
    pub fn schwarz_eval(&self, logdata: &[f64], z: Complex64) -> Result<Complex64> {
        self.check_len(logdata.len())?;
        check_interior(z)?;
        let samples: Vec<Complex64> = self
            .nodes
            .iter()
            .zip(logdata)
            .map(|(&t, &g)| (t + z) / (t - z) * g)
            .collect();
        self.mean(&samples)
    }
}

/// Reject evaluation points within `DELTA_MIN` of the unit circle.
pub fn check_interior(z: Complex64) -> Result<()> {
    if z.norm() > 1.0 - DELTA_MIN {
        return Err(Error::Domain(format!(
            "|z| = {} exceeds the evaluation radius 1 − {DELTA_MIN}",
            z.norm()
        )));
    }
    Ok(())
}

/// Neumaier compensated sum; deterministic for a fixed iteration order.
/// An infinite term propagates as inf (the compensation would otherwise
/// turn it into inf − inf = NaN).
pub fn neumaier_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    let total = sum + comp;
    if total.is_nan() && !sum.is_nan() {
        sum
    } else {
        total
    }
}

/// Laurent-style trigonometric polynomial Σ_{|j|≤N} aⱼ tʲ on the circle.
#[derive(Debug, Clone)]
pub struct TrigPoly {
    /// Coefficients a₋N..a_N stored at index j+N.
    coeffs: Vec<Complex64>,
    degree: usize,
}

impl TrigPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::Contract(
                "trig polynomial needs an odd coefficient count a₋N..a_N".into(),
            ));
        }
        let degree = coeffs.len() / 2;
        Ok(Self { coeffs, degree })
    }

    /// The constant polynomial a₀.
    pub fn constant(a0: Complex64) -> Self {
        Self {
            coeffs: vec![a0],
            degree: 0,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient aⱼ, zero outside the stored range.
    pub fn coeff(&self, j: i64) -> Complex64 {
        let n = self.degree as i64;
        if j < -n || j > n {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(j + n) as usize]
        }
    }

    /// Evaluate at a point of the unit circle (t^{−1} = conj t).
    pub fn eval(&self, t: Complex64) -> Complex64 {
        let tbar = t.conj();
        // Horner in t for j ≥ 0 and in t̄ for j < 0.
        let n = self.degree as i64;
        let mut pos = Complex64::new(0.0, 0.0);
        for j in (1..=n).rev() {
            pos = (pos + self.coeff(j)) * t;
        }
        let mut neg = Complex64::new(0.0, 0.0);
        for j in (1..=n).rev() {
            neg = (neg + self.coeff(-j)) * tbar;
        }
        pos + neg + self.coeff(0)
    }

    /// True when the coefficients satisfy the real-value symmetry a₋ⱼ = āⱼ.
    pub fn is_real_symmetric(&self, tol: f64) -> bool {
        (0..=self.degree as i64).all(|j| (self.coeff(-j) - self.coeff(j).conj()).norm() <= tol)
    }
}

/// Verdict of a three-level (M, 2M, 4M) quadrature refinement scan.
///
/// `values[i]` is the mean at level i; `diffs` the successive Cauchy
/// differences. The integrand is declared convergent when the last
/// difference is negligible outright or the differences contract
/// geometrically — integrable power-law singularities give a contraction
/// ratio 2^{−s} < 1, divergent ones give ratios ≥ 1.
#[derive(Debug, Clone)]
pub struct RefinementScan {
    pub values: [f64; 3],
    pub diffs: [f64; 2],
    pub converged: bool,
}

pub const SCAN_ABS_TOL: f64 = 1e-6;
pub const SCAN_RATIO_MAX: f64 = 0.8;

/// Run the scan for a real integrand sampled per grid.
pub fn refinement_scan(
    base: &CircleGrid,
    mut integrand: impl FnMut(&CircleGrid) -> Result<f64>,
) -> Result<RefinementScan> {
    let g1 = base.clone();
    let g2 = g1.refined();
    let g4 = g2.refined();
    let values = [integrand(&g1)?, integrand(&g2)?, integrand(&g4)?];
    let diffs = [(values[1] - values[0]).abs(), (values[2] - values[1]).abs()];
    let abs_tol = SCAN_ABS_TOL * (1.0 + values[2].abs());
    let converged = values.iter().all(|v| v.is_finite())
        && (diffs[1] <= abs_tol || diffs[1] <= SCAN_RATIO_MAX * diffs[0]);
    Ok(RefinementScan {
        values,
        diffs,
        converged,
    })
}
