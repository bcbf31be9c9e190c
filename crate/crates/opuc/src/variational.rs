//! The variational principle: for the normalized weight p₀ = C₀p and
//! λ(g) = exp(∫p₀ log|g| dm) over outer polynomials g with g(0) > 0,
//!
//!   exp(∫p₀ log(σ′/p₀) dm) ≤ inf ‖g‖²_σ/λ(g)² ≤ exp(∫p₀ log σ′ dm),
//!
//! with the reversed polynomials φ*ₙ as witnesses (‖φ*ₙ‖_σ = 1). The
//! module verifies the sandwich on candidate families rather than solving
//! the infimum: the lower bound is Jensen, the witnesses approach the
//! upper bound. The classical n-th extremal distance
//! min{‖f‖²_σ : deg f ≤ n, f(0) = 1} is computed from the normal equations
//! of the Toeplitz moment matrix as a cross-check against ∏(1−|αₖ|²).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{CircleGrid, TrigPoly};
use crate::measure::{PsMeasure, WeightPoly};
use crate::outer::OuterEvaluator;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Analytic polynomial with no zeros in the closed unit disk and positive
/// value at 0 — membership in the candidate class is structural.
#[derive(Debug, Clone)]
pub struct OuterPoly {
    roots: Vec<Complex64>,
    scale: f64,
}

impl OuterPoly {
    pub fn new(roots: Vec<Complex64>, scale: f64) -> Result<Self> {
        if scale <= 0.0 {
            return Err(Error::Contract(format!("scale must be > 0, got {scale}")));
        }
        for r in &roots {
            if r.norm() <= 1.0 {
                return Err(Error::Contract(format!(
                    "root {r} lies in the closed unit disk"
                )));
            }
        }
        Ok(Self { roots, scale })
    }

    pub fn constant(scale: f64) -> Result<Self> {
        Self::new(Vec::new(), scale)
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// g(z) = scale·∏(1 − z/zⱼ).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut v = Complex64::new(self.scale, 0.0);
        for r in &self.roots {
            v *= ONE - z / r;
        }
        v
    }

    pub fn log_abs(&self, z: Complex64) -> f64 {
        let mut v = self.scale.ln();
        for r in &self.roots {
            v += (ONE - z / r).norm().ln();
        }
        v
    }
}

/// p₀ = C₀p with ∫p₀ dm = 1, kept as exact trig coefficients plus the
/// original product form.
#[derive(Debug, Clone)]
pub struct NormalizedWeight {
    weight: WeightPoly,
    c0: f64,
    coeffs: TrigPoly,
}

impl NormalizedWeight {
    pub fn new(weight: WeightPoly) -> Self {
        let coeffs = weight.trig_coeffs();
        // ∫p dm = a₀ (exact), so C₀ = 1/a₀.
        let c0 = 1.0 / coeffs.coeff(0).re;
        let scaled: Vec<Complex64> = (-(coeffs.degree() as i64)..=coeffs.degree() as i64)
            .map(|j| coeffs.coeff(j) * c0)
            .collect();
        let coeffs = TrigPoly::new(scaled).expect("odd length preserved");
        Self { weight, c0, coeffs }
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn weight(&self) -> &WeightPoly {
        &self.weight
    }

    pub fn coeffs(&self) -> &TrigPoly {
        &self.coeffs
    }

    /// p₀(t), nonnegative with unit mean.
    pub fn eval(&self, t: Complex64) -> f64 {
        self.c0 * self.weight.eval(t)
    }

    pub fn samples(&self, grid: &CircleGrid) -> Vec<f64> {
        grid.sample(|t| self.eval(t))
    }
}

/// λ(g) = exp(∫p₀ log|g| dm).
pub fn lambda_eval(g: &OuterPoly, p0: &NormalizedWeight, grid: &CircleGrid) -> Result<f64> {
    let samples: Vec<f64> = grid.sample(|t| p0.eval(t) * g.log_abs(t));
    Ok(grid.mean_real(&samples)?.exp())
}

/// ‖g‖²_σ = ∫|g|² dσ: density quadrature plus exact atom sums.
pub fn norm_sq_sigma(g: &OuterPoly, measure: &PsMeasure) -> Result<f64> {
    let grid = measure.grid();
    let density = measure.density_samples(grid);
    let samples: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&density)
        .map(|(&t, &s)| g.eval(t).norm_sqr() * s)
        .collect();
    let mut v = grid.mean_real(&samples)?;
    for atom in measure.atoms() {
        v += g.eval(atom.location).norm_sqr() * atom.mass;
    }
    Ok(v)
}

/// Sandwich verification result.
#[derive(Debug, Clone)]
pub struct SandwichReport {
    /// exp(∫p₀ log(σ′/p₀) dm): the Jensen lower bound.
    pub lower: f64,
    /// exp(∫p₀ log σ′ dm): the upper bound.
    pub upper: f64,
    /// Best (smallest) candidate value ‖g‖²_σ/λ(g)² among the candidates.
    pub best_candidate: f64,
    /// Index of the best candidate in the input list.
    pub best_index: Option<usize>,
    /// Witness values 1/λ(φ*ₙ)² per requested n (‖φ*ₙ‖_σ = 1).
    pub witnesses: Vec<(usize, f64)>,
    /// Worst signed slack min(‖g‖²/λ² − lower) over candidates; ≥ −1e−9.
    pub worst_slack: f64,
}

impl OuterPoly {
    /// Root-list serialization: `scale; re,im; re,im; …`.
    pub fn serialize(&self) -> String {
        let mut s = format!("{:.12e}", self.scale);
        for r in &self.roots {
            s.push_str(&format!("; {:.12e},{:.12e}", r.re, r.im));
        }
        s
    }
}

pub const JENSEN_SLACK: f64 = 1e-9;

/// Check lower·λ(g)² ≤ ‖g‖²_σ for every candidate, record the best
/// candidate value and the φ*ₙ witness chain.
pub fn sandwich_check(
    measure: &PsMeasure,
    p0: &NormalizedWeight,
    candidates: &[OuterPoly],
    witness_ns: &[usize],
) -> Result<SandwichReport> {
    if !measure.is_poly_szego {
        return Err(Error::Class("sandwich needs a (pS) measure".into()));
    }
    let grid = measure.grid();
    let p0_samples = p0.samples(grid);
    let log_sigma = measure.log_density_samples(grid);

    // Lower bound: ∫p₀ log(σ′/p₀) dm. On the offset grid p₀ > 0 at every
    // node and p₀·log p₀ extends by 0 across the weight zeros.
    let lower_samples: Vec<f64> = p0_samples
        .iter()
        .zip(&log_sigma)
        .map(|(&p, &ls)| p * ls - p * p.ln())
        .collect();
    let lower = grid.mean_real(&lower_samples)?.exp();
    let upper_samples: Vec<f64> = p0_samples
        .iter()
        .zip(&log_sigma)
        .map(|(&p, &ls)| p * ls)
        .collect();
    let upper = grid.mean_real(&upper_samples)?.exp();

    let mut best = f64::INFINITY;
    let mut best_index = None;
    let mut worst_slack = f64::INFINITY;
    for (i, g) in candidates.iter().enumerate() {
        let lam = lambda_eval(g, p0, grid)?;
        let nrm = norm_sq_sigma(g, measure)?;
        let value = nrm / (lam * lam);
        if value < best {
            best = value;
            best_index = Some(i);
        }
        let slack = value - lower;
        worst_slack = worst_slack.min(slack);
        if slack < -JENSEN_SLACK {
            return Err(Error::Numerical(format!(
                "candidate {i} (scale {}, {} roots) violates the Jensen \
                 lower bound: ‖g‖²/λ² = {value} < {lower}",
                g.scale(),
                g.roots().len()
            )));
        }
    }

    // Witnesses: ‖φ*ₙ‖_σ = 1, so the candidate value is 1/λ(φ*ₙ)² with
    // λ evaluated from the log samples directly.
    let n_max = witness_ns.iter().copied().max().unwrap_or(0);
    let ev = OuterEvaluator::new(measure, n_max)?;
    let mut witnesses = Vec::with_capacity(witness_ns.len());
    for &n in witness_ns {
        let lps = ev.log_phi_star_samples(n)?;
        let integrand: Vec<f64> = p0_samples.iter().zip(&lps).map(|(&p, &l)| p * l).collect();
        let log_lambda = grid.mean_real(&integrand)?;
        witnesses.push((n, (-2.0 * log_lambda).exp()));
    }

    Ok(SandwichReport {
        lower,
        upper,
        best_candidate: best,
        best_index,
        witnesses,
        worst_slack,
    })
}

/// min{‖f‖²_σ : deg f ≤ n, f(0) = 1} via the normal equations of the
/// Toeplitz moment matrix: the minimum equals 1/x₀ where Gx = e₀.
pub fn classical_distance(measure: &PsMeasure, n: usize) -> Result<f64> {
    let c = measure.moments(n)?;
    // G_{j,k} = ∫tʲ t̄ᵏ dσ = μ_{j−k}, μ_m = conj(c_m) for m ≥ 0.
    let dim = n + 1;
    let mu = |m: i64| -> Complex64 {
        if m >= 0 {
            c[m as usize].conj()
        } else {
            c[(-m) as usize]
        }
    };
    let mut g = vec![Complex64::new(0.0, 0.0); dim * dim];
    for j in 0..dim {
        for k in 0..dim {
            g[j * dim + k] = mu(j as i64 - k as i64);
        }
    }
    let x = solve_hermitian(&mut g, dim)?;
    if x.re <= 0.0 {
        return Err(Error::Conditioning(
            "normal equations produced a nonpositive extremal value".into(),
        ));
    }
    Ok(1.0 / x.re)
}

/// Cholesky-based solve of Gx = e₀ returning x₀; errors when a pivot
/// collapses (singular moment matrix).
fn solve_hermitian(g: &mut [Complex64], dim: usize) -> Result<Complex64> {
    // In-place LL^H factorization.
    for j in 0..dim {
        let mut d = g[j * dim + j].re;
        for k in 0..j {
            d -= g[j * dim + k].norm_sqr();
        }
        if d <= 1e-14 {
            return Err(Error::Conditioning(format!(
                "Toeplitz moment matrix is numerically singular at order {j}"
            )));
        }
        let d = d.sqrt();
        g[j * dim + j] = Complex64::new(d, 0.0);
        for i in j + 1..dim {
            let mut v = g[i * dim + j];
            for k in 0..j {
                v -= g[i * dim + k] * g[j * dim + k].conj();
            }
            g[i * dim + j] = v / d;
        }
    }
    // Solve L y = e₀, then L^H x = y; only x₀ is needed.
    let mut y = vec![Complex64::new(0.0, 0.0); dim];
    for i in 0..dim {
        let mut v = if i == 0 {
            ONE
        } else {
            Complex64::new(0.0, 0.0)
        };
        for k in 0..i {
            v -= g[i * dim + k] * y[k];
        }
        y[i] = v / g[i * dim + i];
    }
    let mut x = vec![Complex64::new(0.0, 0.0); dim];
    for i in (0..dim).rev() {
        let mut v = y[i];
        for k in i + 1..dim {
            v -= g[k * dim + i].conj() * x[k];
        }
        x[i] = v / g[i * dim + i];
    }
    Ok(x[0])
}

/// ν(s) = ∫₀ˢ p₀ ds′ from the exact coefficients:
/// ν(s) = a₀s + 2ReΣⱼ aⱼ(e^{ijs} − 1)/(ij).
pub fn nu_phase(p0: &NormalizedWeight, s: f64) -> Result<f64> {
    if !(0.0..=2.0 * std::f64::consts::PI + 1e-12).contains(&s) {
        return Err(Error::Contract(format!("s = {s} outside [0, 2π]")));
    }
    let coeffs = p0.coeffs();
    let mut v = coeffs.coeff(0).re * s;
    for j in 1..=coeffs.degree() as i64 {
        let aj = coeffs.coeff(j);
        let e = Complex64::new(0.0, j as f64 * s).exp() - ONE;
        let term = aj * e / Complex64::new(0.0, j as f64);
        v += 2.0 * term.re;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{make_bernstein_szego, make_ps_family};
    use crate::szego::VerblunskySeq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p1() -> NormalizedWeight {
        NormalizedWeight::new(WeightPoly::single_zero_at_one())
    }

    fn lebesgue(m: usize) -> PsMeasure {
        make_bernstein_szego(
            VerblunskySeq::empty(),
            WeightPoly::single_zero_at_one(),
            CircleGrid::new(m, 0.5).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn outer_poly_structural_membership() {
        assert!(OuterPoly::new(vec![c(0.9, 0.0)], 1.0).is_err());
        assert!(OuterPoly::new(vec![c(1.2, 0.0)], -1.0).is_err());
        let g = OuterPoly::new(vec![c(2.0, 0.0), c(0.0, -1.5)], 0.7).unwrap();
        assert!((g.eval(c(0.0, 0.0)).re - 0.7).abs() < 1e-15);
    }

    #[test]
    fn normalized_weight_p1() {
        let p0 = p1();
        assert!((p0.c0() - 0.5).abs() < 1e-15);
        let g = CircleGrid::new(256, 0.5).unwrap();
        let mean = g.mean_real(&p0.samples(&g)).unwrap();
        assert!((mean - 1.0).abs() < 1e-12);
        // p₀ = p₁ = 1 − cos θ.
        for (&t, &th) in g.nodes().iter().zip(g.angles()).step_by(17) {
            assert!((p0.eval(t) - (1.0 - th.cos())).abs() < 1e-13);
        }
    }

    #[test]
    fn lambda_examples() {
        let p0 = p1();
        let g = CircleGrid::new(1024, 0.5).unwrap();
        let one = OuterPoly::constant(1.0).unwrap();
        assert!((lambda_eval(&one, &p0, &g).unwrap() - 1.0).abs() < 1e-13);
        let const_c = OuterPoly::constant(2.5).unwrap();
        assert!((lambda_eval(&const_c, &p0, &g).unwrap() - 2.5).abs() < 1e-12);
        // g = 1 − 0.5z: λ = e^{1/4}.
        let half = OuterPoly::new(vec![c(2.0, 0.0)], 1.0).unwrap();
        let want = 0.25f64.exp();
        assert!((lambda_eval(&half, &p0, &g).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn sandwich_lebesgue_closed_form() {
        let m = lebesgue(8192);
        let p0 = p1();
        let candidates = vec![
            OuterPoly::constant(1.0).unwrap(),
            OuterPoly::new(vec![c(1.7, 0.4)], 0.9).unwrap(),
            OuterPoly::new(vec![c(-2.0, 0.0), c(0.0, 3.0)], 1.4).unwrap(),
        ];
        let rep = sandwich_check(&m, &p0, &candidates, &[0, 1, 2]).unwrap();
        // ∫p₁ log p₁ dm = 1 − ln 2, so the lower bound is 2/e.
        let want = 2.0 / std::f64::consts::E;
        assert!((rep.lower - want).abs() < 1e-6, "lower = {}", rep.lower);
        assert!((rep.upper - 1.0).abs() < 1e-12);
        // g ≡ 1 is feasible: value 1 within the sandwich.
        assert!(rep.best_candidate <= 1.0 + 1e-12);
        assert!(rep.best_candidate >= rep.lower - 1e-9);
        for (_, w) in &rep.witnesses {
            assert!((w - 1.0).abs() < 1e-12, "witnesses are trivial for σ = m");
        }
        assert!(rep.worst_slack >= -1e-9);
    }

    #[test]
    fn witness_chain_on_ps_family() {
        let m = make_ps_family(
            WeightPoly::single_zero_at_one(),
            vec![1.5],
            Vec::new(),
            CircleGrid::new(2048, 0.5).unwrap(),
        )
        .unwrap();
        let p0 = p1();
        let rep = sandwich_check(&m, &p0, &[], &[0, 10, 50, 150, 200]).unwrap();
        for (n, w) in &rep.witnesses {
            assert!(*w >= rep.lower - 1e-9, "witness n={n} below lower bound");
        }
        // The witness values approach the upper bound from above.
        let last = rep.witnesses.last().unwrap().1;
        assert!(last >= rep.upper - 1e-9);
        assert!(
            last <= rep.upper + 1e-3,
            "witness at n=200 should be within 1e-3 of the upper bound: {last} vs {}",
            rep.upper
        );
    }

    #[test]
    fn witnesses_stationary_for_bernstein_szego() {
        let bs = make_bernstein_szego(
            VerblunskySeq::from_reals(&[0.5]).unwrap(),
            WeightPoly::single_zero_at_one(),
            CircleGrid::new(2048, 0.5).unwrap(),
        )
        .unwrap();
        let p0 = p1();
        let rep = sandwich_check(&bs, &p0, &[], &[1, 2, 3, 4]).unwrap();
        let first = rep.witnesses[0].1;
        for (n, w) in &rep.witnesses {
            assert!((w - first).abs() < 1e-12, "witness n={n} moved");
            assert!(*w >= rep.lower - 1e-9 && *w <= rep.upper + 1e-9);
        }
    }

    #[test]
    fn classical_distance_examples() {
        let m = lebesgue(512);
        for n in 0..5 {
            assert!((classical_distance(&m, n).unwrap() - 1.0).abs() < 1e-12);
        }

        let bs = make_bernstein_szego(
            VerblunskySeq::from_reals(&[0.5]).unwrap(),
            WeightPoly::single_zero_at_one(),
            CircleGrid::new(2048, 0.5).unwrap(),
        )
        .unwrap();
        let mut prev = f64::INFINITY;
        for n in 0..6 {
            let d = classical_distance(&bs, n).unwrap();
            assert!(d <= prev + 1e-12, "distances must be nonincreasing");
            prev = d;
            if n >= 1 {
                assert!((d - 0.75).abs() < 1e-8, "n={n}: {d}");
            }
        }
    }

    #[test]
    fn classical_distance_matches_rho_products() {
        let alpha = VerblunskySeq::new(vec![c(0.3, 0.4), c(-0.2, 0.1), c(0.1, -0.5)]).unwrap();
        let bs = make_bernstein_szego(
            alpha.clone(),
            WeightPoly::single_zero_at_one(),
            CircleGrid::new(4096, 0.5).unwrap(),
        )
        .unwrap();
        for n in 0..=4usize {
            let d = classical_distance(&bs, n).unwrap();
            let want: f64 = (0..n.min(3))
                .map(|k| 1.0 - alpha.get(k).norm_sqr())
                .product();
            assert!((d - want).abs() < 1e-8, "n={n}: {d} vs {want}");
        }
    }

    #[test]
    fn nu_phase_closed_form() {
        let p0 = p1();
        assert!(nu_phase(&p0, 0.0).unwrap().abs() < 1e-15);
        let two_pi = 2.0 * std::f64::consts::PI;
        assert!((nu_phase(&p0, two_pi).unwrap() - two_pi).abs() < 1e-12);
        let mut prev = 0.0;
        for k in 1..=16 {
            let s = two_pi * k as f64 / 16.0;
            let v = nu_phase(&p0, s).unwrap();
            assert!((v - (s - s.sin())).abs() < 1e-12, "ν(s) = s − sin s");
            assert!(v >= prev - 1e-14, "ν must be nondecreasing");
            prev = v;
        }
    }
}
