//! Weights p(t) = ∏|t−ζₖ|^{2κₖ} and probability measures on the circle.
//!
//! A measure here is dσ = σ′_ac dm + Σᵢ μᵢ δ_{tᵢ}: a sampled absolutely
//! continuous density plus a finite atom list. Membership in the Szegő
//! class (∫log σ′ dm > −∞) and the polynomial Szegő class
//! (∫p log σ′ dm > −∞) is decided numerically by a three-level quadrature
//! refinement scan; the flags are a numerical verdict, never a proof.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{refinement_scan, CircleGrid, RefinementScan};
use crate::szego::{self, VerblunskySeq};

/// Wrap-around angular distance on [0, 2π).
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = (a - b).rem_euclid(two_pi);
    d.min(two_pi - d)
}

/// Trigonometric weight p(t) = ∏ₖ |t−ζₖ|^{2κₖ} with zeros on the circle,
/// together with its analytic avatar q(z) = C·∏(z−ζₖ)^{2κₖ}/z^{N′} which
/// agrees with p on the circle and has a pole of order N′ = Σκₖ at 0.
#[derive(Debug, Clone)]
pub struct WeightPoly {
    zero_angles: Vec<f64>,
    zeros: Vec<Complex64>,
    multiplicities: Vec<u32>,
    n_prime: u32,
    c_norm: Complex64,
}

impl WeightPoly {
    pub fn new(zero_angles: Vec<f64>, multiplicities: Vec<u32>) -> Result<Self> {
        if zero_angles.len() != multiplicities.len() {
            return Err(Error::Contract(
                "zero and multiplicity lists must have the same length".into(),
            ));
        }
        if zero_angles.is_empty() {
            return Err(Error::Config("weight needs at least one zero".into()));
        }
        if multiplicities.contains(&0) {
            return Err(Error::Config("multiplicities must be ≥ 1".into()));
        }
        let zeros: Vec<Complex64> = zero_angles
            .iter()
            .map(|&a| Complex64::from_polar(1.0, a))
            .collect();
        let n_prime = multiplicities.iter().sum();
        // C = (∏ₖ(−ζₖ)^{κₖ})^{−1}, so |C| = 1 and q = p on the circle.
        let mut prod = Complex64::new(1.0, 0.0);
        for (z, &k) in zeros.iter().zip(&multiplicities) {
            prod *= (-z).powu(k);
        }
        let c_norm = prod.inv();
        Ok(Self {
            zero_angles,
            zeros,
            multiplicities,
            n_prime,
            c_norm,
        })
    }

    /// The weight |t−1|², the workhorse single-zero case.
    pub fn single_zero_at_one() -> Self {
        Self::new(vec![0.0], vec![1]).expect("static weight is valid")
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn zero_angles(&self) -> &[f64] {
        &self.zero_angles
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// N′ = Σκₖ: total multiplicity, also the pole order of q at 0.
    pub fn total_multiplicity(&self) -> u32 {
        self.n_prime
    }

    pub fn c_norm(&self) -> Complex64 {
        self.c_norm
    }

    /// Trig-polynomial degree of p.
    pub fn degree(&self) -> usize {
        self.n_prime as usize
    }

    /// p(t) = ∏|t−ζₖ|^{2κₖ} for t on the circle.
    pub fn eval(&self, t: Complex64) -> f64 {
        self.zeros
            .iter()
            .zip(&self.multiplicities)
            .map(|(z, &k)| (t - z).norm_sqr().powi(k as i32))
            .product()
    }

    /// q(z) = C·∏(z−ζₖ)^{2κₖ}/z^{N′}; pole error at z = 0.
    pub fn q_eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() == 0.0 {
            return Err(Error::Domain(format!(
                "q has a pole of order {} at z = 0",
                self.n_prime
            )));
        }
        let mut prod = self.c_norm;
        for (zeta, &k) in self.zeros.iter().zip(&self.multiplicities) {
            prod *= (z - zeta).powu(2 * k);
        }
        Ok(prod / z.powu(self.n_prime))
    }

    /// Angular distance from θ to the nearest weight zero.
    pub fn distance_to_zeros(&self, theta: f64) -> f64 {
        self.zero_angles
            .iter()
            .map(|&za| angular_distance(theta, za))
            .fold(f64::INFINITY, f64::min)
    }

    /// max p over a grid, used to pick the constant C₁ with 0 ≤ C₁p ≤ 1.
    pub fn max_on_grid(&self, grid: &CircleGrid) -> f64 {
        grid.nodes()
            .iter()
            .map(|&t| self.eval(t))
            .fold(0.0, f64::max)
    }

    /// Exact Laurent coefficients of p by convolving the factors
    /// |t−ζₖ|² = 2 − ζ̄ₖt − ζₖt̄ (κₖ times each). Grid-free companion to
    /// sampling + `fourier_coeffs`.
    pub fn trig_coeffs(&self) -> crate::grid::TrigPoly {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        let mut degree = 0i64;
        for (zeta, &k) in self.zeros.iter().zip(&self.multiplicities) {
            for _ in 0..k {
                let new_degree = degree + 1;
                let mut next = vec![Complex64::new(0.0, 0.0); (2 * new_degree + 1) as usize];
                for (idx, c) in coeffs.iter().enumerate() {
                    let j = idx as i64 - degree;
                    // c·tʲ · (2 − ζ̄t − ζt̄)
                    next[(j + new_degree) as usize] += 2.0 * c;
                    next[(j + 1 + new_degree) as usize] -= zeta.conj() * c;
                    next[(j - 1 + new_degree) as usize] -= zeta * c;
                }
                coeffs = next;
                degree = new_degree;
            }
        }
        crate::grid::TrigPoly::new(coeffs).expect("odd length by construction")
    }
}

/// How the a.c. density is generated.
#[derive(Debug, Clone)]
pub enum DensityKind {
    /// σ′ = A_N²/|Φ*_N|², the measure with Verblunsky coefficients `alpha`
    /// (exact finite support when no atoms are attached).
    BernsteinSzego { alpha: VerblunskySeq },
    /// σ′ ∝ exp(−Σₖ dₖ(θ)^{−βₖ}), dₖ = angular distance to ζₖ. Realizes
    /// (pS)∖(S) for 1 ≤ βₖ < 2κₖ + 1.
    PsFamily { betas: Vec<f64> },
    /// Raw nonnegative samples on the construction grid.
    Table { values: Vec<f64> },
}

/// Point mass of the singular part.
#[derive(Debug, Clone)]
pub struct Atom {
    pub angle: f64,
    pub location: Complex64,
    pub mass: f64,
}

impl Atom {
    pub fn new(angle: f64, mass: f64) -> Result<Self> {
        if mass <= 0.0 {
            return Err(Error::Config(format!("atom mass must be > 0, got {mass}")));
        }
        Ok(Self {
            angle,
            location: Complex64::from_polar(1.0, angle),
            mass,
        })
    }
}

/// Probability measure dσ = σ′dm + Σμᵢδ_{tᵢ} with its class verdicts.
#[derive(Debug, Clone)]
pub struct PsMeasure {
    grid: CircleGrid,
    weight: WeightPoly,
    kind: DensityKind,
    atoms: Vec<Atom>,
    density_scale: f64,
    /// For Bernstein–Szegő kinds: (log A_N², Φ*_N coefficients).
    star_cache: Option<(f64, Vec<Complex64>)>,
    pub is_szego: bool,
    pub is_poly_szego: bool,
    pub szego_scan: RefinementScan,
    pub poly_szego_scan: RefinementScan,
}

/// Floor under table densities before taking logs; nodes at the floor are
/// counted, not silently accepted.
pub const DENSITY_FLOOR: f64 = 1e-300;

impl PsMeasure {
    /// General constructor: normalizes the density so that the total mass
    /// (density mean + atom masses) is 1, then runs the class scans.
    pub fn build(
        kind: DensityKind,
        weight: WeightPoly,
        atoms: Vec<Atom>,
        grid: CircleGrid,
    ) -> Result<Self> {
        let atom_mass: f64 = atoms.iter().map(|a| a.mass).sum();
        if atom_mass >= 1.0 {
            return Err(Error::Class(format!(
                "atom masses sum to {atom_mass} ≥ 1: no mass left for the \
                 a.c. part, and a purely singular measure is outside (pS)"
            )));
        }
        if let DensityKind::PsFamily { betas } = &kind {
            if betas.len() != weight.zeros().len() {
                return Err(Error::Contract(
                    "one exponent βₖ per weight zero is required".into(),
                ));
            }
            for (b, &k) in betas.iter().zip(weight.multiplicities()) {
                let cap = 2.0 * k as f64 + 1.0;
                if *b <= 0.0 {
                    return Err(Error::Config(format!("βₖ must be > 0, got {b}")));
                }
                if *b >= cap {
                    return Err(Error::Class(format!(
                        "β = {b} ≥ 2κ+1 = {cap}: ∫p·log σ′ dm diverges, the \
                         family leaves the (pS) class"
                    )));
                }
            }
        }
        if let DensityKind::Table { values } = &kind {
            if values.len() != grid.len() {
                return Err(Error::Contract(format!(
                    "table has {} samples for a {}-point grid",
                    values.len(),
                    grid.len()
                )));
            }
            if values.iter().any(|&v| v < 0.0) {
                return Err(Error::Class("table density has negative samples".into()));
            }
        }

        let star_cache = match &kind {
            DensityKind::BernsteinSzego { alpha } => {
                let pair = szego::recurse(alpha, alpha.len())?;
                Some((2.0 * alpha.log_a_partial(alpha.len()), pair.phi_star))
            }
            _ => None,
        };
        let mut measure = Self {
            grid,
            weight,
            kind,
            atoms,
            density_scale: 1.0,
            star_cache,
            is_szego: false,
            is_poly_szego: false,
            szego_scan: RefinementScan {
                values: [0.0; 3],
                diffs: [0.0; 2],
                converged: true,
            },
            poly_szego_scan: RefinementScan {
                values: [0.0; 3],
                diffs: [0.0; 2],
                converged: true,
            },
        };

        let raw_mean = measure
            .grid
            .mean_real(&measure.raw_density_samples(&measure.grid.clone()))?;
        if raw_mean.is_nan() || raw_mean <= 0.0 {
            return Err(Error::Class(
                "density template has zero mass on the grid".into(),
            ));
        }
        measure.density_scale = (1.0 - atom_mass) / raw_mean;

        match &measure.kind {
            DensityKind::BernsteinSzego { .. } => {
                // φ*_N is zero-free on the closed disk, so log σ′ is smooth:
                // both class integrals exist.
                measure.is_szego = true;
                measure.is_poly_szego = true;
            }
            _ => {
                let base = measure.grid.clone();
                let m = measure.clone();
                measure.szego_scan = refinement_scan(&base, |g| {
                    let logs = m.log_density_samples(g);
                    g.mean_real(&logs)
                })?;
                let m2 = measure.clone();
                measure.poly_szego_scan = refinement_scan(&base, |g| {
                    let logs = m2.log_density_samples(g);
                    let integrand: Vec<f64> = g
                        .nodes()
                        .iter()
                        .zip(&logs)
                        .map(|(&t, &l)| m2.weight.eval(t) * l)
                        .collect();
                    g.mean_real(&integrand)
                })?;
                measure.is_szego = measure.szego_scan.converged;
                // (S) ⊂ (pS): the weighted integral converges whenever the
                // unweighted one does.
                measure.is_poly_szego = measure.poly_szego_scan.converged || measure.is_szego;
            }
        }

        // Total-mass sanity on the construction grid.
        let mass = measure
            .grid
            .mean_real(&measure.density_samples(&measure.grid.clone()))?
            + atom_mass;
        if (mass - 1.0).abs() > 1e-10 {
            return Err(Error::Numerical(format!(
                "normalization failed: total mass {mass}"
            )));
        }
        Ok(measure)
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn weight(&self) -> &WeightPoly {
        &self.weight
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// The exact Verblunsky sequence when the measure is a pure
    /// Bernstein–Szegő measure (finite support, no singular part).
    pub fn finite_alpha(&self) -> Option<&VerblunskySeq> {
        match &self.kind {
            DensityKind::BernsteinSzego { alpha } if self.atoms.is_empty() => Some(alpha),
            _ => None,
        }
    }

    fn raw_density_at(&self, theta: f64) -> f64 {
        match &self.kind {
            DensityKind::BernsteinSzego { .. } => {
                let (log_a_sq, star) = self.star_cache.as_ref().expect("cached at build");
                let t = Complex64::from_polar(1.0, theta);
                (log_a_sq - szego::horner(star, t).norm_sqr().ln()).exp()
            }
            DensityKind::PsFamily { betas } => {
                let mut e = 0.0;
                for (&za, &b) in self.weight.zero_angles().iter().zip(betas) {
                    let d = angular_distance(theta, za);
                    e -= d.powf(-b);
                }
                e.exp()
            }
            DensityKind::Table { values } => {
                // Piecewise-linear in θ between construction-grid nodes.
                let m = self.grid.len() as f64;
                let step = 2.0 * std::f64::consts::PI / m;
                let x = (theta / step - self.grid.offset()).rem_euclid(m);
                let j = x.floor() as usize % values.len();
                let frac = x - x.floor();
                let jn = (j + 1) % values.len();
                values[j] * (1.0 - frac) + values[jn] * frac
            }
        }
    }

    fn raw_density_samples(&self, grid: &CircleGrid) -> Vec<f64> {
        grid.sample_angles(|th| self.raw_density_at(th))
    }

    /// σ′_ac(e^{iθ}) including normalization.
    pub fn density_at(&self, theta: f64) -> f64 {
        self.density_scale * self.raw_density_at(theta)
    }

    pub fn density_samples(&self, grid: &CircleGrid) -> Vec<f64> {
        grid.sample_angles(|th| self.density_at(th))
    }

    /// log σ′_ac(e^{iθ}), evaluated analytically for the generated families
    /// so that the (pS) integrands p·log σ′ stay exact even where the
    /// density itself underflows. Table densities fall back to a floored
    /// logarithm.
    pub fn log_density_at(&self, theta: f64) -> f64 {
        let ls = self.density_scale.ln();
        match &self.kind {
            DensityKind::BernsteinSzego { .. } => {
                let (log_a_sq, star) = self.star_cache.as_ref().expect("cached at build");
                let t = Complex64::from_polar(1.0, theta);
                ls + log_a_sq - szego::horner(star, t).norm_sqr().ln()
            }
            DensityKind::PsFamily { betas } => {
                let mut e = 0.0;
                for (&za, &b) in self.weight.zero_angles().iter().zip(betas) {
                    let d = angular_distance(theta, za);
                    e -= d.powf(-b);
                }
                ls + e
            }
            DensityKind::Table { .. } => ls + self.raw_density_at(theta).max(DENSITY_FLOOR).ln(),
        }
    }

    pub fn log_density_samples(&self, grid: &CircleGrid) -> Vec<f64> {
        grid.sample_angles(|th| self.log_density_at(th))
    }

    /// Number of grid nodes where a table density sits at the log floor.
    pub fn floored_nodes(&self, grid: &CircleGrid) -> usize {
        match &self.kind {
            DensityKind::Table { .. } => grid
                .angles()
                .iter()
                .filter(|&&th| self.raw_density_at(th) < DENSITY_FLOOR)
                .count(),
            _ => 0,
        }
    }

    /// Moments cₖ = ∫t^{−k}dσ for k = 0..=kmax.
    pub fn moments(&self, kmax: usize) -> Result<Vec<Complex64>> {
        if 2 * kmax >= self.grid.len() {
            return Err(Error::Config(format!(
                "moment order {kmax} needs a grid larger than {}",
                self.grid.len()
            )));
        }
        let density = self.density_samples(&self.grid);
        let mut out = Vec::with_capacity(kmax + 1);
        for k in 0..=kmax {
            let samples: Vec<Complex64> = self
                .grid
                .nodes()
                .iter()
                .zip(&density)
                .map(|(t, &d)| t.powi(-(k as i32)) * d)
                .collect();
            let mut ck = self.grid.mean(&samples)?;
            ck += atom_moment_sum(&self.atoms, k as i32);
            out.push(ck);
        }
        if (out[0] - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::Contract(format!(
                "measure is not normalized: c₀ = {}",
                out[0]
            )));
        }
        Ok(out)
    }

    /// Verblunsky coefficients α₀..α_{n−1} of this measure: exact for pure
    /// Bernstein–Szegő input, otherwise the Gram–Schmidt quadrature process
    /// below.
    pub fn verblunsky(&self, n: usize) -> Result<VerblunskySeq> {
        if let Some(alpha) = self.finite_alpha() {
            let mut padded = alpha.coeffs().to_vec();
            padded.resize(n.max(padded.len()), Complex64::new(0.0, 0.0));
            return VerblunskySeq::new(padded);
        }
        self.verblunsky_by_quadrature(n)
    }

    /// Stieltjes-style extraction: run the Szegő recurrence in value space
    /// on the grid and read each αₙ off the orthogonality quadratures
    ///
    ///   ᾱₙ = ⟨zΦₙ, Φ*ₙ⟩_σ / ‖Φₙ‖²_σ,
    ///
    /// with both inner products evaluated against the sampled density plus
    /// exact atom sums. Unlike the moment-space Levinson recursion this
    /// does not amplify rounding exponentially when the density nearly
    /// vanishes on a set (conditioning of the Toeplitz matrix), because the
    /// polynomial values are recomputed exactly at every step.
    fn verblunsky_by_quadrature(&self, n: usize) -> Result<VerblunskySeq> {
        let grid = &self.grid;
        if n >= grid.len() / 4 {
            return Err(Error::Config(format!(
                "extraction order {n} is too large for a {}-point grid",
                grid.len()
            )));
        }
        let density = self.density_samples(grid);
        let mut points = grid.nodes().to_vec();
        points.extend(self.atoms.iter().map(|a| a.location));
        let mut vr = szego::ValueRecurrence::new(points);
        let m = grid.len();
        let mut alpha = Vec::with_capacity(n);
        for k in 0..n {
            let phi = vr.phi_monic();
            let star = vr.star_monic();
            let num_samples: Vec<Complex64> = (0..m)
                .map(|j| grid.nodes()[j] * phi[j] * star[j].conj() * density[j])
                .collect();
            let den_samples: Vec<f64> = (0..m).map(|j| phi[j].norm_sqr() * density[j]).collect();
            let mut num = grid.mean(&num_samples)?;
            let mut den = grid.mean_real(&den_samples)?;
            for (i, atom) in self.atoms.iter().enumerate() {
                let pv = phi[m + i];
                let sv = star[m + i];
                num += atom.location * pv * sv.conj() * atom.mass;
                den += pv.norm_sqr() * atom.mass;
            }
            let a = (num / den).conj();
            if a.norm() >= 1.0 - 1e-12 {
                return Err(Error::Conditioning(format!(
                    "|α_{k}| = {} reached the unit bound during quadrature \
                     extraction",
                    a.norm()
                )));
            }
            alpha.push(a);
            vr.step(a);
        }
        VerblunskySeq::new(alpha)
    }
}

/// Σᵢ μᵢ tᵢ^{−k}: the exact atom contribution to the k-th moment.
pub fn atom_moment_sum(atoms: &[Atom], k: i32) -> Complex64 {
    atoms
        .iter()
        .map(|a| a.location.powi(-k) * a.mass)
        .fold(Complex64::new(0.0, 0.0), |s, v| s + v)
}

/// Bernstein–Szegő measure of a finite Verblunsky sequence: density
/// A_N²/|Φ*_N|², no singular part. Both class flags hold by construction.
pub fn make_bernstein_szego(
    alpha: VerblunskySeq,
    weight: WeightPoly,
    grid: CircleGrid,
) -> Result<PsMeasure> {
    PsMeasure::build(
        DensityKind::BernsteinSzego { alpha },
        weight,
        Vec::new(),
        grid,
    )
}

/// The exp(−Σ dₖ^{−βₖ}) family: in (pS)∖(S) for 1 ≤ β < 2κ+1, in (S) for
/// β < 1. Construction is refused for β ≥ 2κ+1. The β-threshold is an
/// engineering convention for this generated family, not a general claim.
pub fn make_ps_family(
    weight: WeightPoly,
    betas: Vec<f64>,
    atoms: Vec<Atom>,
    grid: CircleGrid,
) -> Result<PsMeasure> {
    PsMeasure::build(DensityKind::PsFamily { betas }, weight, atoms, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> CircleGrid {
        CircleGrid::new(512, 0.5).unwrap()
    }

    #[test]
    fn weight_eval_examples() {
        let w = WeightPoly::single_zero_at_one();
        assert!((w.eval(c(-1.0, 0.0)) - 4.0).abs() < 1e-15);
        assert!(w.eval(c(1.0, 0.0)).abs() < 1e-15);

        let w2 = WeightPoly::new(vec![0.0, std::f64::consts::PI], vec![1, 1]).unwrap();
        assert!((w2.eval(c(0.0, 1.0)) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn q_matches_weight_on_circle() {
        let w = WeightPoly::single_zero_at_one();
        // q(z) = −(z−1)²/z for ζ = {1}.
        assert!((w.q_eval(c(-1.0, 0.0)).unwrap() - c(4.0, 0.0)).norm() < 1e-14);
        assert!((w.q_eval(c(0.0, 1.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-14);
        assert!((w.c_norm().norm() - 1.0).abs() < 1e-15);

        let g = grid();
        let w2 = WeightPoly::new(vec![0.3, 2.0, 4.5], vec![1, 2, 1]).unwrap();
        assert!((w2.c_norm().norm() - 1.0).abs() < 1e-13);
        let pmax = w2.max_on_grid(&g);
        for &t in g.nodes() {
            let q = w2.q_eval(t).unwrap();
            let p = w2.eval(t);
            assert!((q - c(p, 0.0)).norm() <= 1e-12 * pmax, "t={t}");
        }
    }

    #[test]
    fn trig_coeffs_match_sampled_fourier() {
        let g = grid();
        let w = WeightPoly::new(vec![0.4, 2.2], vec![2, 1]).unwrap();
        let tp = w.trig_coeffs();
        assert_eq!(tp.degree(), 3);
        let samples: Vec<Complex64> = g.sample(|t| c(w.eval(t), 0.0));
        let sampled = g.fourier_coeffs(&samples, 3).unwrap();
        for j in -3i64..=3 {
            assert!((tp.coeff(j) - sampled.coeff(j)).norm() < 1e-12, "j={j}");
        }
        // |t−1|² has a₀ = 2, a±1 = −1.
        let tp1 = WeightPoly::single_zero_at_one().trig_coeffs();
        assert!((tp1.coeff(0) - c(2.0, 0.0)).norm() < 1e-15);
        assert!((tp1.coeff(1) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn q_pole_at_origin() {
        let w = WeightPoly::single_zero_at_one();
        assert!(matches!(w.q_eval(c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn lebesgue_moments_are_delta() {
        let m = make_bernstein_szego(
            VerblunskySeq::empty(),
            WeightPoly::single_zero_at_one(),
            grid(),
        )
        .unwrap();
        let c_seq = m.moments(6).unwrap();
        assert!((c_seq[0] - c(1.0, 0.0)).norm() < 1e-14);
        for ck in &c_seq[1..] {
            assert!(ck.norm() < 1e-14);
        }
        assert!(m.is_szego && m.is_poly_szego);
    }

    #[test]
    fn bernstein_szego_density_and_moments() {
        let alpha = VerblunskySeq::from_reals(&[0.5]).unwrap();
        let m = make_bernstein_szego(alpha, WeightPoly::single_zero_at_one(), grid()).unwrap();
        // σ′ = 0.75/|1−0.5t|².
        for (&t, &th) in m.grid().nodes().iter().zip(m.grid().angles()).step_by(37) {
            let want = 0.75 / (c(1.0, 0.0) - 0.5 * t).norm_sqr();
            assert!((m.density_at(th) - want).abs() < 1e-13);
        }
        let mass = m.grid().mean_real(&m.density_samples(&grid())).unwrap();
        assert!((mass - 1.0).abs() < 1e-12);

        let c_seq = m.moments(8).unwrap();
        for (k, ck) in c_seq.iter().enumerate() {
            assert!((ck - c(0.5f64.powi(k as i32), 0.0)).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn atom_moment_sum_is_exact() {
        let atoms = vec![Atom::new(0.0, 1.0).unwrap()];
        for k in 0..6 {
            assert!((atom_moment_sum(&atoms, k) - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn moment_symmetry_two_sided() {
        let alpha = VerblunskySeq::new(vec![c(0.4, 0.3), c(-0.2, 0.5)]).unwrap();
        let m = make_bernstein_szego(alpha, WeightPoly::single_zero_at_one(), grid()).unwrap();
        let c_seq = m.moments(5).unwrap();
        let density = m.density_samples(m.grid());
        for k in 1..=5i32 {
            // c₋ₖ computed directly as ∫tᵏ dσ.
            let samples: Vec<Complex64> = m
                .grid()
                .nodes()
                .iter()
                .zip(&density)
                .map(|(t, &d)| t.powi(k) * d)
                .collect();
            let c_neg = m.grid().mean(&samples).unwrap();
            assert!((c_neg - c_seq[k as usize].conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn ps_family_class_flags() {
        let w = WeightPoly::single_zero_at_one();
        let g = CircleGrid::new(1024, 0.5).unwrap();

        let ps = make_ps_family(w.clone(), vec![1.5], Vec::new(), g.clone()).unwrap();
        assert!(!ps.is_szego, "β = 1.5 must fail the Szegő scan");
        assert!(ps.is_poly_szego, "β = 1.5 must pass the weighted scan");

        let s = make_ps_family(w.clone(), vec![0.5], Vec::new(), g.clone()).unwrap();
        assert!(s.is_szego);
        assert!(s.is_poly_szego, "(S) ⊂ (pS)");

        let refused = make_ps_family(w, vec![3.5], Vec::new(), g);
        match refused {
            Err(Error::Class(msg)) => assert!(msg.contains("2κ+1")),
            other => panic!("expected class refusal, got {other:?}"),
        }
    }

    #[test]
    fn atoms_must_leave_density_mass() {
        let w = WeightPoly::single_zero_at_one();
        let atoms = vec![Atom::new(3.0, 0.7).unwrap(), Atom::new(2.0, 0.5).unwrap()];
        assert!(matches!(
            make_ps_family(w, vec![1.5], atoms, grid()),
            Err(Error::Class(_))
        ));
    }

    #[test]
    fn ps_family_with_atom_renormalizes() {
        let w = WeightPoly::single_zero_at_one();
        let atoms = vec![Atom::new(std::f64::consts::PI, 0.2).unwrap()];
        let m = make_ps_family(w, vec![1.5], atoms, grid()).unwrap();
        let mass = m.grid().mean_real(&m.density_samples(&grid())).unwrap();
        assert!((mass - 0.8).abs() < 1e-12);
        let c_seq = m.moments(3).unwrap();
        assert!((c_seq[0] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn table_density_round_trip() {
        let g = grid();
        let values: Vec<f64> = g.sample_angles(|th| 1.0 + 0.5 * th.sin());
        let m = PsMeasure::build(
            DensityKind::Table { values },
            WeightPoly::single_zero_at_one(),
            Vec::new(),
            g.clone(),
        )
        .unwrap();
        assert!(m.is_szego && m.is_poly_szego);
        assert_eq!(m.floored_nodes(&g), 0);
        let mass = g.mean_real(&m.density_samples(&g)).unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn bernstein_szego_round_trip(n in 1usize..=8, seed in 0u64..500) {
            // moments(make_bernstein_szego(α)) must invert back to α.
            let mut vals = Vec::with_capacity(n);
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            for _ in 0..n {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let re = ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 1.6;
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let im = ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 1.6;
                let mut a = c(re, im);
                if a.norm() > 0.8 {
                    a = a / a.norm() * 0.8;
                }
                vals.push(a);
            }
            // The density Fourier tail decays like r^M where r is the
            // largest |root| of Φₙ, and roots can sit within 1e−3 of the
            // circle for |α| ≤ 0.8. Size the grid from the actual roots;
            // draws that concentrate half their mass in an unresolvable
            // spike (r > 1 − 2e−4) are discarded as near-atomic.
            let alpha = VerblunskySeq::new(vals.clone()).unwrap();
            let pair = crate::szego::recurse(&alpha, n).unwrap();
            let rmax = crate::szego::tests::poly_roots(&pair.phi)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            prop_assume!(rmax < 1.0 - 2e-4);
            let m_grid = ((30.0 / (1.0 - rmax)) as usize).next_power_of_two().max(4096);
            let g = CircleGrid::new(m_grid, 0.5).unwrap();
            let m = make_bernstein_szego(alpha, WeightPoly::single_zero_at_one(), g).unwrap();
            let c_seq = m.moments(n).unwrap();
            let ext = crate::szego::verblunsky_from_moments(&c_seq, n).unwrap();
            for (k, want) in vals.iter().enumerate() {
                prop_assert!((ext.seq.get(k) - want).norm() < 1e-8, "k={k}");
            }
        }
    }
}
