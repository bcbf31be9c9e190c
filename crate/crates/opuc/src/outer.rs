//! Classical and modified Szegő functions.
//!
//! The classical Szegő function is D(z) = exp(½∫(t+z)/(t−z)·log σ′ dm).
//! For a polynomial-Szegő measure the same construction with the modified
//! kernel K(t,z) = (t+z)/(t−z)·q(t)/q(z), q the analytic avatar of the
//! weight, yields
//!
//!   D̃(z)    = exp(½∫K(t,z) log σ′ dm)
//!   φ̃*ₙ(z)  = exp(∫K(t,z) log|φ*ₙ| dm)
//!   ψₙ(z)   = φ̃*ₙ/φ*ₙ = exp(∫(t+z)/(t−z)·(q(t)/q(z) − 1)·log|φ*ₙ| dm)
//!   ξₙ(z)   = D̃·φ̃*ₙ  = exp(½∫K(t,z) log(|φ*ₙ|²σ′) dm)
//!
//! Because q has a pole at the origin, K(·,0) ≡ 0 and all modified
//! functions equal 1 at z = 0 exactly. On the boundary |D̃|² recovers σ′
//! and |ψₙ| = 1 a.e.
//!
//! The exponent of ψₙ is a finite combination of Möbius powers
//! wₖ = (z+ζₖ)/(z−ζₖ): for simple weight zeros the combination is
//! extracted in closed form by residue calculus (the coefficients are
//! quadratures of explicit trigonometric polynomials against log|φ*ₙ|);
//! higher multiplicities fall back to a linear least-squares fit of the
//! exponent.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{check_interior, CircleGrid};
use crate::measure::PsMeasure;
use crate::szego::{self, VerblunskySeq};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Pointwise modified kernel K(t, z) = (t+z)/(t−z)·q(t)/q(z) for t on the
/// circle and z in the open disk. K(·, 0) ≡ 0 because q has a pole at the
/// origin; on the circle the t-factor q(t) = p(t) is real and nonnegative.
pub fn kernel_k(
    weight: &crate::measure::WeightPoly,
    t: Complex64,
    z: Complex64,
) -> Result<Complex64> {
    check_interior(z)?;
    if z.norm() == 0.0 {
        return Ok(ZERO);
    }
    let qz = weight.q_eval(z)?;
    if qz.norm() == 0.0 {
        return Err(Error::Domain(format!(
            "z = {z} is a zero of the weight avatar q; K(·, z) has a pole"
        )));
    }
    Ok((t + z) / (t - z) * weight.eval(t) / qz)
}

/// Evaluator for the outer-type functions of one measure.
///
/// Construction resolves the Verblunsky coefficients once (exact for
/// Bernstein–Szegő, Levinson inversion otherwise) and caches the weight and
/// log-density samples on the measure's grid.
pub struct OuterEvaluator {
    grid: CircleGrid,
    alpha: VerblunskySeq,
    /// q(t) = p(t) on the grid (real and nonnegative there).
    p_samples: Vec<f64>,
    log_sigma: Vec<f64>,
    is_szego: bool,
    is_poly_szego: bool,
    weight: crate::measure::WeightPoly,
}

impl OuterEvaluator {
    pub fn new(measure: &PsMeasure, n_max: usize) -> Result<Self> {
        let grid = measure.grid().clone();
        let alpha = measure.verblunsky(n_max)?;
        let p_samples = grid.sample(|t| measure.weight().eval(t));
        let log_sigma = measure.log_density_samples(&grid);
        Ok(Self {
            grid,
            alpha,
            p_samples,
            log_sigma,
            is_szego: measure.is_szego,
            is_poly_szego: measure.is_poly_szego,
            weight: measure.weight().clone(),
        })
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn alpha(&self) -> &VerblunskySeq {
        &self.alpha
    }

    pub fn max_n(&self) -> usize {
        self.alpha.len()
    }

    /// log|φ*ₙ| on the grid.
    pub fn log_phi_star_samples(&self, n: usize) -> Result<Vec<f64>> {
        let pair = szego::recurse(&self.alpha, n)?;
        let log_a = self.alpha.log_a_partial(n);
        Ok(self
            .grid
            .sample(|t| 0.5 * pair.eval_phi_star(t).norm_sqr().ln() - log_a))
    }

    /// φ*ₙ at one point.
    pub fn phi_star_at(&self, n: usize, z: Complex64) -> Result<Complex64> {
        let pair = szego::recurse(&self.alpha, n)?;
        Ok(pair.eval_phi_star(z) / self.alpha.a_partial(n))
    }

    /// ∫(t+z)/(t−z)·q(t)·g(t) dm / q(z): the modified-kernel mean. The
    /// weight enters as the product q(t)·g(t), which stays finite for
    /// (pS) log-data even where g alone diverges.
    pub fn kernel_quad(&self, data: &[f64], z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        if z.norm() == 0.0 {
            // q has a pole of order N′ at 0, so K(·,0) ≡ 0.
            return Ok(ZERO);
        }
        let qz = self.weight.q_eval(z)?;
        if qz.norm() == 0.0 {
            return Err(Error::Domain(format!(
                "z = {z} is a zero of the weight avatar q; the modified \
                 kernel has a pole there"
            )));
        }
        let samples: Vec<Complex64> = self
            .grid
            .nodes()
            .iter()
            .zip(self.p_samples.iter().zip(data))
            .map(|(&t, (&p, &g))| (t + z) / (t - z) * (p * g))
            .collect();
        Ok(self.grid.mean(&samples)? / qz)
    }

    /// Exponent of ψ-type functions: ∫(t+z)/(t−z)·(q(t)/q(z) − 1)·g dm.
    pub fn psi_exponent(&self, data: &[f64], z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        if z.norm() == 0.0 {
            // Kernel degenerates to −1: exponent = −∫g dm.
            return Ok(Complex64::new(-self.grid.mean_real(data)?, 0.0));
        }
        Ok(self.kernel_quad(data, z)? - self.grid.schwarz_eval(data, z)?)
    }

    /// Classical Szegő function D(z); requires the Szegő class.
    pub fn d(&self, z: Complex64) -> Result<Complex64> {
        if !self.is_szego {
            return Err(Error::Class(
                "classical D is undefined: ∫log σ′ dm diverges for this measure".into(),
            ));
        }
        Ok((0.5 * self.grid.schwarz_eval(&self.log_sigma, z)?).exp())
    }

    /// Modified Szegő function D̃(z); D̃(0) = 1.
    pub fn dtilde(&self, z: Complex64) -> Result<Complex64> {
        self.require_poly_szego()?;
        Ok((0.5 * self.kernel_quad(&self.log_sigma, z)?).exp())
    }

    /// Phase function ψₙ(z) = φ̃*ₙ/φ*ₙ.
    pub fn psi(&self, n: usize, z: Complex64) -> Result<Complex64> {
        self.require_poly_szego()?;
        let data = self.log_phi_star_samples(n)?;
        Ok(self.psi_exponent(&data, z)?.exp())
    }

    /// Modified reversed polynomial φ̃*ₙ = ψₙ·φ*ₙ; φ̃*ₙ(0) = 1.
    pub fn phitilde_star(&self, n: usize, z: Complex64) -> Result<Complex64> {
        Ok(self.psi(n, z)? * self.phi_star_at(n, z)?)
    }

    /// ξₙ = D̃·φ̃*ₙ evaluated through the single combined quadrature of
    /// log(|φ*ₙ|²σ′).
    pub fn xi(&self, n: usize, z: Complex64) -> Result<Complex64> {
        self.require_poly_szego()?;
        let data = self.xi_logdata(n)?;
        Ok((0.5 * self.kernel_quad(&data, z)?).exp())
    }

    /// log(|φ*ₙ|²σ′) samples, the ξₙ integrand data.
    pub fn xi_logdata(&self, n: usize) -> Result<Vec<f64>> {
        let lps = self.log_phi_star_samples(n)?;
        Ok(lps
            .iter()
            .zip(&self.log_sigma)
            .map(|(&l, &s)| 2.0 * l + s)
            .collect())
    }

    /// ξ from externally supplied log(|φ*ₙ|²σ′) samples (used by the
    /// incremental n-sweeps).
    pub fn xi_from_logdata(&self, data: &[f64], z: Complex64) -> Result<Complex64> {
        Ok((0.5 * self.kernel_quad(data, z)?).exp())
    }

    fn require_poly_szego(&self) -> Result<()> {
        if !self.is_poly_szego {
            return Err(Error::Class(
                "measure failed the (pS) scan: modified Szegő functions are undefined".into(),
            ));
        }
        Ok(())
    }

    /// Extract the Möbius-power coefficients of log ψₙ.
    pub fn coeff_extract(&self, n: usize) -> Result<CoeffExtraction> {
        let data = self.log_phi_star_samples(n)?;
        let simple = self.weight.multiplicities().iter().all(|&k| k == 1);
        if simple {
            self.extract_by_residues(&data)
        } else {
            self.extract_by_fit(&data)
        }
    }

    /// Closed-form path for simple zeros: partial fractions of the kernel
    /// in z leave explicit trigonometric polynomials aⱼₖ(t) whose means
    /// against log|φ*ₙ| are the coefficients.
    fn extract_by_residues(&self, data: &[f64]) -> Result<CoeffExtraction> {
        let w = &self.weight;
        let zeros = w.zeros();
        let n_prime = w.total_multiplicity();
        let mut per_zero = Vec::with_capacity(zeros.len());
        let mut a0_t = vec![Complex64::new(-1.0, 0.0); self.grid.len()];
        for (k, &zk) in zeros.iter().enumerate() {
            // qₖ(z) = q(z)/(z−ζₖ)² extended through ζₖ.
            let qk_at = |z: Complex64| -> Complex64 {
                let mut prod = w.c_norm();
                for (j, &zj) in zeros.iter().enumerate() {
                    if j != k {
                        prod *= (z - zj).powu(2 * w.multiplicities()[j]);
                    }
                }
                prod / z.powu(n_prime)
            };
            let qk = qk_at(zk);
            // logarithmic derivative of qₖ at ζₖ
            let mut dlog = -Complex64::new(n_prime as f64, 0.0) / zk;
            for (j, &zj) in zeros.iter().enumerate() {
                if j != k {
                    dlog += Complex64::new(2.0 * w.multiplicities()[j] as f64, 0.0) / (zk - zj);
                }
            }
            let qk_prime_over_sq = dlog / qk;

            let mut a1_t = Vec::with_capacity(self.grid.len());
            let mut a2_t = Vec::with_capacity(self.grid.len());
            for &t in self.grid.nodes() {
                let qk_t = qk_at(t);
                // d(t) = (t+ζₖ)(t−ζₖ)·qₖ(t)/qₖ(ζₖ): double-pole strength.
                let d = (t + zk) * (t - zk) * qk_t / qk;
                // c(t) = derivative part of the pole expansion.
                let cc = 2.0 * t * qk_t / qk - (t + zk) * (t - zk) * qk_t * qk_prime_over_sq;
                let a2 = d / (4.0 * zk * zk);
                let a1 = (cc - 4.0 * zk * a2) / (2.0 * zk);
                a1_t.push(a1);
                a2_t.push(a2);
            }
            for (a0, (a1, a2)) in a0_t.iter_mut().zip(a1_t.iter().zip(&a2_t)) {
                *a0 += a1 - a2;
            }
            let w1: Vec<Complex64> = a1_t.iter().zip(data).map(|(a, &g)| a * g).collect();
            let w2: Vec<Complex64> = a2_t.iter().zip(data).map(|(a, &g)| a * g).collect();
            per_zero.push(vec![self.grid.mean(&w1)?, self.grid.mean(&w2)?]);
        }
        let w0: Vec<Complex64> = a0_t.iter().zip(data).map(|(a, &g)| a * g).collect();
        let a0 = self.grid.mean(&w0)?;
        Ok(CoeffExtraction::finish(
            a0,
            per_zero,
            self.weight.zeros().to_vec(),
            0.0,
        ))
    }

    /// Least-squares fit of the ψ exponent in the basis {1, wₖʲ} at interior
    /// sample points; covers multiplicities κ > 1.
    fn extract_by_fit(&self, data: &[f64]) -> Result<CoeffExtraction> {
        let zeros = self.weight.zeros();
        let mult = self.weight.multiplicities();
        let dim = 1 + mult.iter().map(|&k| 2 * k as usize).sum::<usize>();
        let mut samples = Vec::new();
        for &r in &[0.25f64, 0.45, 0.65] {
            for i in 0..(4 * dim) {
                let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.37) / (4 * dim) as f64;
                samples.push(Complex64::from_polar(r, th));
            }
        }
        let rows = samples.len();
        let mut a = vec![ZERO; rows * dim];
        let mut b = vec![ZERO; rows];
        for (row, &z) in samples.iter().enumerate() {
            b[row] = self.psi_exponent(data, z)?;
            a[row * dim] = ONE;
            let mut col = 1;
            for (&zk, &kk) in zeros.iter().zip(mult) {
                let wk = (z + zk) / (z - zk);
                let mut p = ONE;
                for _ in 0..2 * kk as usize {
                    p *= wk;
                    a[row * dim + col] = p;
                    col += 1;
                }
            }
        }
        let x = lstsq(&a, &b, rows, dim)?;
        // residual
        let mut resid = 0.0f64;
        for row in 0..rows {
            let mut pred = ZERO;
            for col in 0..dim {
                pred += a[row * dim + col] * x[col];
            }
            resid = resid.max((pred - b[row]).norm());
        }
        if resid > 1e-6 {
            return Err(Error::Numerical(format!(
                "Möbius-basis fit residual {resid} exceeds 1e-6; exponent is \
                 not captured by the expected pole structure"
            )));
        }
        let mut per_zero = Vec::new();
        let mut col = 1;
        for &kk in mult {
            let mut coeffs = Vec::new();
            for _ in 0..2 * kk as usize {
                coeffs.push(x[col]);
                col += 1;
            }
            per_zero.push(coeffs);
        }
        Ok(CoeffExtraction::finish(
            x[0],
            per_zero,
            zeros.to_vec(),
            resid,
        ))
    }
}

/// Coefficients of log ψₙ = A₀ + Σₖ Σⱼ A_{j,k}·((z+ζₖ)/(z−ζₖ))ʲ.
#[derive(Debug, Clone)]
pub struct CoeffExtraction {
    pub a0: Complex64,
    /// Per weight zero: [A_{1,k}, A_{2,k}, …, A_{2κₖ,k}].
    pub per_zero: Vec<Vec<Complex64>>,
    pub zeros: Vec<Complex64>,
    pub fit_residual: f64,
    /// Worst violation of the reality pattern forced by |ψₙ| = 1 on the
    /// circle (A₀, A_{even} ∈ iℝ, A_{odd} ∈ ℝ).
    pub reality_defect: f64,
}

impl CoeffExtraction {
    fn finish(
        a0: Complex64,
        per_zero: Vec<Vec<Complex64>>,
        zeros: Vec<Complex64>,
        fit_residual: f64,
    ) -> Self {
        let mut defect = a0.re.abs();
        for coeffs in &per_zero {
            for (j, c) in coeffs.iter().enumerate() {
                // j = 0 is A₁ (odd index), j = 1 is A₂ (even), …
                if j % 2 == 0 {
                    defect = defect.max(c.im.abs());
                } else {
                    defect = defect.max(c.re.abs());
                }
            }
        }
        Self {
            a0,
            per_zero,
            zeros,
            fit_residual,
            reality_defect: defect,
        }
    }

    /// Evaluate the fitted exponent at z.
    pub fn exponent_at(&self, z: Complex64) -> Complex64 {
        let mut e = self.a0;
        for (zk, coeffs) in self.zeros.iter().zip(&self.per_zero) {
            let wk = (z + zk) / (z - zk);
            let mut p = ONE;
            for c in coeffs {
                p *= wk;
                e += c * p;
            }
        }
        e
    }
}

/// Dense complex least squares via normal equations, adequate for the tiny
/// fit dimensions here.
fn lstsq(a: &[Complex64], b: &[Complex64], rows: usize, cols: usize) -> Result<Vec<Complex64>> {
    let mut g = vec![ZERO; cols * cols];
    let mut rhs = vec![ZERO; cols];
    for i in 0..cols {
        for j in 0..cols {
            let mut s = ZERO;
            for r in 0..rows {
                s += a[r * cols + i].conj() * a[r * cols + j];
            }
            g[i * cols + j] = s;
        }
        let mut s = ZERO;
        for r in 0..rows {
            s += a[r * cols + i].conj() * b[r];
        }
        rhs[i] = s;
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..cols {
        let mut piv = col;
        for r in col + 1..cols {
            if g[r * cols + col].norm() > g[piv * cols + col].norm() {
                piv = r;
            }
        }
        if g[piv * cols + col].norm() < 1e-14 {
            return Err(Error::Conditioning(
                "singular normal equations in fit".into(),
            ));
        }
        if piv != col {
            for j in 0..cols {
                g.swap(col * cols + j, piv * cols + j);
            }
            rhs.swap(col, piv);
        }
        let d = g[col * cols + col];
        for r in 0..cols {
            if r == col {
                continue;
            }
            let f = g[r * cols + col] / d;
            for j in col..cols {
                let v = g[col * cols + j];
                g[r * cols + j] -= f * v;
            }
            let v = rhs[col];
            rhs[r] -= f * v;
        }
    }
    Ok((0..cols).map(|i| rhs[i] / g[i * cols + i]).collect())
}

/// Closed-form ψₙ for the weight p₁ = ½|1−t|² (single simple zero at 1):
///
///   ψₙ(z) = exp(Aₙ(1+z)/(1−z) + Bₙ[((1+z)/(1−z))² − 1])
///
/// with Aₙ = Σ_{k<n} log ρₖ and Bₙ = (i/4)·Im(α₀ − Σ_{k=1}^{n−1} ᾱ_{k−1}αₖ).
/// Both sums run over exactly the coefficients α₀..α_{n−1} that determine
/// φ*ₙ (ψ₀ ≡ 1 falls out as the empty case); see `psi_p1_index_resolution`
/// for the numerical pin-down of this indexing.
pub fn psi_p1_closed_form(
    weight: &crate::measure::WeightPoly,
    alpha: &VerblunskySeq,
    n: usize,
    z: Complex64,
) -> Result<Complex64> {
    let (a_n, b_n) = psi_p1_coefficients(weight, alpha, n)?;
    let w = (ONE + z) / (ONE - z);
    Ok((a_n * w + b_n * (w * w - ONE)).exp())
}

/// The (Aₙ, Bₙ) pair of the closed form.
pub fn psi_p1_coefficients(
    weight: &crate::measure::WeightPoly,
    alpha: &VerblunskySeq,
    n: usize,
) -> Result<(Complex64, Complex64)> {
    let ok = weight.zeros().len() == 1
        && weight.multiplicities() == [1]
        && (weight.zeros()[0] - ONE).norm() < 1e-12;
    if !ok {
        return Err(Error::Contract(
            "closed form requires the weight with a single simple zero at t = 1".into(),
        ));
    }
    let a_n = Complex64::new(alpha.log_a_partial(n), 0.0);
    let mut s = alpha.get(0);
    if n == 0 {
        s = ZERO;
    }
    for k in 1..n {
        s -= alpha.get(k - 1).conj() * alpha.get(k);
    }
    let b_n = Complex64::new(0.0, 0.25 * s.im);
    Ok((a_n, b_n))
}
