//! Quantitative diagnostics for the asymptotic statements: pointwise and
//! L² convergence of ξₙ = D̃φ̃*ₙ to 1, the uniform |ξₙ|√(1−|z|) bound away
//! from the weight zeros, arc-restricted L² limits, the Rakhmanov property,
//! singular-mass decay, and the scalar wave-operator symbol limits.
//!
//! No convergence rates are asserted anywhere: exact Bernstein–Szegő cases
//! hit the quadrature floor at n = N, everything else is reported as a
//! trend over n.
//!
//! Near the weight zeros the integrands pit exponentially large factors
//! (the Möbius blow-up of the modified kernel) against exponentially small
//! ones (σ′ and its Poisson smoothing). All L²(σ) integrands are therefore
//! assembled in log space and exponentiated once, so a lost battle
//! underflows to 0 and a won one overflows to inf — never NaN.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TrigPoly;
use crate::measure::PsMeasure;
use crate::outer::OuterEvaluator;
use crate::szego::ValueRecurrence;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Default interior probe points, away from the shipped weight zeros.
pub fn default_probes() -> Vec<Complex64> {
    vec![
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.35, 0.35),
        Complex64::new(0.2, -0.55),
    ]
}

/// |e^E − 1|² without complex-exp overflow artifacts: real exponentials
/// only, and a won blow-up saturates to inf rather than NaN.
fn exp_minus_one_sq(e: Complex64) -> f64 {
    if e.re > 350.0 {
        return f64::INFINITY;
    }
    let amp = e.re.exp();
    amp * amp - 2.0 * amp * e.im.cos() + 1.0
}

/// exp(p)·|e^d − 1|² in log space; `p` is a log-prefactor.
fn guarded_term(p: f64, d: Complex64) -> f64 {
    if d.re > 250.0 {
        // |e^d − 1|² ≈ e^{2Re d}
        (p + 2.0 * d.re).exp()
    } else {
        p.exp() * exp_minus_one_sq(d)
    }
}

fn reject_near_zeros(measure: &PsMeasure, z: Complex64, what: &str) -> Result<()> {
    for &zeta in measure.weight().zeros() {
        if (z - zeta).norm() < 0.05 {
            return Err(Error::Contract(format!(
                "{what} at {z} is too close to the weight zero {zeta}"
            )));
        }
    }
    Ok(())
}

/// One pointwise-error row: |ξₙ(z) − 1| per probe.
#[derive(Debug, Clone)]
pub struct PointwiseRow {
    pub n: usize,
    pub errors: Vec<f64>,
}

/// |ξₙ(z) − 1| for every requested n and probe.
pub fn pointwise_table(
    measure: &PsMeasure,
    ev: &OuterEvaluator,
    probes: &[Complex64],
    n_list: &[usize],
) -> Result<Vec<PointwiseRow>> {
    for &z in probes {
        crate::grid::check_interior(z)?;
        reject_near_zeros(measure, z, "probe")?;
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let data = ev.xi_logdata(n)?;
        let errors = probes
            .iter()
            .map(|&z| Ok((ev.xi_from_logdata(&data, z)? - ONE).norm()))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(PointwiseRow { n, errors });
    }
    Ok(rows)
}

/// The two L²(m) error computations of the mass identity.
#[derive(Debug, Clone)]
pub struct L2Error {
    pub n: usize,
    /// quad_mean |ξₙ(rt) − 1|² at r = 1 − 10/M.
    pub direct: f64,
    /// Same at r = 1 − 20/M.
    pub direct_coarse: f64,
    /// Two-radius Richardson extrapolation 2·direct − direct_coarse.
    pub richardson: f64,
    /// quad_mean(|φ*ₙ|²σ′) − 1, the boundary-trace mass formula.
    pub mass_formula: f64,
}

/// Near-boundary L² error over the full grid (faithful to the defining
/// quadrature: blow-up regions near the weight zeros enter as inf) next to
/// the mass-formula value.
pub fn l2_error(measure: &PsMeasure, ev: &OuterEvaluator, n: usize) -> Result<L2Error> {
    let grid = measure.grid();
    let data = ev.xi_logdata(n)?;
    let delta = 10.0 / grid.len() as f64;
    let mut vals = [0.0f64; 2];
    for (i, d) in [delta, 2.0 * delta].iter().enumerate() {
        let r = 1.0 - d;
        let samples: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&t| {
                let e = 0.5 * ev.kernel_quad(&data, r * t)?;
                Ok(exp_minus_one_sq(e))
            })
            .collect::<Result<Vec<f64>>>()?;
        vals[i] = grid.mean_real(&samples)?;
    }
    let sigma = measure.density_samples(grid);
    let pair = crate::szego::recurse(ev.alpha(), n)?;
    let inv_a = (-ev.alpha().log_a_partial(n)).exp();
    let mass_samples: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&sigma)
        .map(|(&t, &s)| (pair.eval_phi_star(t) * inv_a).norm_sqr() * s)
        .collect();
    let mass_formula = grid.mean_real(&mass_samples)? - 1.0;
    Ok(L2Error {
        n,
        direct: vals[0],
        direct_coarse: vals[1],
        richardson: 2.0 * vals[0] - vals[1],
        mass_formula,
    })
}

/// Result of the uniform-bound scan sup |ξₙ(z)|√(1−|z|) over Ω_{2ε} rings.
#[derive(Debug, Clone)]
pub struct BoundScan {
    pub eps: f64,
    pub n_list: Vec<usize>,
    pub per_n: Vec<f64>,
    /// Running max over the first half of n_list vs the whole list.
    pub max_first_half: f64,
    pub max_full: f64,
    /// True when the running max grew by more than 5%.
    pub growth_flagged: bool,
}

/// Probe |ξₙ(z)|·√(1−|z|) on rings |z| ∈ {0.9, 0.99, 0.999} restricted to
/// distance > 2ε from every weight zero.
pub fn bound_scan(
    measure: &PsMeasure,
    ev: &OuterEvaluator,
    eps: f64,
    n_list: &[usize],
) -> Result<BoundScan> {
    if eps <= 0.0 {
        return Err(Error::Contract("ε must be positive".into()));
    }
    let mut probes = Vec::new();
    for &r in &[0.9f64, 0.99, 0.999] {
        for k in 0..256 {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 256.0;
            let z = Complex64::from_polar(r, th);
            if measure
                .weight()
                .zeros()
                .iter()
                .all(|&zeta| (z - zeta).norm() > 2.0 * eps)
            {
                probes.push(z);
            }
        }
    }
    let mut per_n = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let data = ev.xi_logdata(n)?;
        let mut stat = 0.0f64;
        for &z in &probes {
            let e = 0.5 * ev.kernel_quad(&data, z)?;
            let xi_abs = e.re.exp();
            stat = stat.max(xi_abs * (1.0 - z.norm()).sqrt());
        }
        per_n.push(stat);
    }
    let half = n_list.len().div_ceil(2);
    let max_first_half = per_n[..half].iter().copied().fold(0.0, f64::max);
    let max_full = per_n.iter().copied().fold(0.0, f64::max);
    Ok(BoundScan {
        eps,
        n_list: n_list.to_vec(),
        per_n,
        max_first_half,
        max_full,
        growth_flagged: max_full > 1.05 * max_first_half,
    })
}

/// Closed arc on the circle given by an angle interval [lo, hi].
#[derive(Debug, Clone, Copy)]
pub struct Arc {
    pub lo: f64,
    pub hi: f64,
}

impl Arc {
    pub fn length_fraction(&self) -> f64 {
        (self.hi - self.lo) / (2.0 * std::f64::consts::PI)
    }

    fn contains(&self, theta: f64) -> bool {
        let two_pi = 2.0 * std::f64::consts::PI;
        let t = theta.rem_euclid(two_pi);
        if self.lo <= self.hi {
            t >= self.lo && t <= self.hi
        } else {
            t >= self.lo || t <= self.hi
        }
    }
}

/// Per-arc L² diagnostics at the near-boundary radius.
#[derive(Debug, Clone)]
pub struct ArcL2 {
    pub n: usize,
    /// ∫_I |ξₙ − 1|² dm per arc.
    pub errors: Vec<f64>,
    /// ∫_I |ξₙ|² dm per arc.
    pub masses: Vec<f64>,
    /// m(I) per arc (grid fraction).
    pub arc_measure: Vec<f64>,
}

/// Arc-restricted L² error and mass; every arc must keep an angular margin
/// of at least ε from all weight zeros.
pub fn arc_l2(
    measure: &PsMeasure,
    ev: &OuterEvaluator,
    arcs: &[Arc],
    eps: f64,
    n: usize,
) -> Result<ArcL2> {
    let grid = measure.grid();
    for arc in arcs {
        for &za in measure.weight().zero_angles() {
            let margin = [arc.lo, arc.hi]
                .iter()
                .map(|&a| crate::measure::angular_distance(a, za))
                .fold(f64::INFINITY, f64::min);
            if arc.contains(za) || margin < eps - 1e-12 {
                return Err(Error::Contract(format!(
                    "arc [{}, {}] does not keep the ε = {eps} margin from \
                     the weight zero at angle {za}",
                    arc.lo, arc.hi
                )));
            }
        }
    }
    let data = ev.xi_logdata(n)?;
    let r = 1.0 - 10.0 / grid.len() as f64;
    let mut errors = vec![0.0f64; arcs.len()];
    let mut masses = vec![0.0f64; arcs.len()];
    let mut fractions = vec![0.0f64; arcs.len()];
    for (&t, &th) in grid.nodes().iter().zip(grid.angles()) {
        let hits: Vec<usize> = (0..arcs.len()).filter(|&i| arcs[i].contains(th)).collect();
        if hits.is_empty() {
            continue;
        }
        let e = 0.5 * ev.kernel_quad(&data, r * t)?;
        let err = exp_minus_one_sq(e);
        let mass = (2.0 * e.re).exp();
        for i in hits {
            errors[i] += err;
            masses[i] += mass;
            fractions[i] += 1.0;
        }
    }
    let m = grid.len() as f64;
    for i in 0..arcs.len() {
        errors[i] /= m;
        masses[i] /= m;
        fractions[i] /= m;
    }
    Ok(ArcL2 {
        n,
        errors,
        masses,
        arc_measure: fractions,
    })
}

/// ∫f·|φₙ|²dσ against ∫f dm for trigonometric test functions.
#[derive(Debug, Clone)]
pub struct RakhmanovRow {
    pub n: usize,
    pub values: Vec<Complex64>,
    pub targets: Vec<Complex64>,
}

pub fn rakhmanov_check(
    measure: &PsMeasure,
    ev: &OuterEvaluator,
    testfns: &[TrigPoly],
    n: usize,
) -> Result<RakhmanovRow> {
    let grid = measure.grid();
    let sigma = measure.density_samples(grid);
    let pair = crate::szego::recurse(ev.alpha(), n)?;
    let inv_a = (-ev.alpha().log_a_partial(n)).exp();
    let mut values = Vec::with_capacity(testfns.len());
    let mut targets = Vec::with_capacity(testfns.len());
    for f in testfns {
        let samples: Vec<Complex64> = grid
            .nodes()
            .iter()
            .zip(&sigma)
            .map(|(&t, &s)| f.eval(t) * (pair.eval_phi(t) * inv_a).norm_sqr() * s)
            .collect();
        let mut v = grid.mean(&samples)?;
        for atom in measure.atoms() {
            let pv = (pair.eval_phi(atom.location) * inv_a).norm_sqr();
            v += f.eval(atom.location) * pv * atom.mass;
        }
        values.push(v);
        let target_samples: Vec<Complex64> = grid.sample(|t| f.eval(t));
        targets.push(grid.mean(&target_samples)?);
    }
    Ok(RakhmanovRow { n, values, targets })
}

/// Exact atom sums Σμᵢ|φₙ(tᵢ)|² for n = 0..=n_max.
pub fn singular_decay(measure: &PsMeasure, ev: &OuterEvaluator, n_max: usize) -> Result<Vec<f64>> {
    if measure.atoms().is_empty() {
        return Ok(vec![0.0; n_max + 1]);
    }
    let points: Vec<Complex64> = measure.atoms().iter().map(|a| a.location).collect();
    let mut vr = ValueRecurrence::new(points);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            vr.step(ev.alpha().get(n - 1));
        }
        let inv_a_sq = (-2.0 * vr.log_a()).exp();
        let s: f64 = vr
            .phi_monic()
            .iter()
            .zip(measure.atoms())
            .map(|(v, a)| v.norm_sqr() * inv_a_sq * a.mass)
            .sum();
        out.push(s);
    }
    Ok(out)
}

/// The two scalar wave-symbol error norms at one n.
#[derive(Debug, Clone)]
pub struct WaveRow {
    pub n: usize,
    /// ‖ψₙφ*ₙ − χ_{E_ac}/D̃‖²_{L²(σ)}.
    pub symbol_error: f64,
    /// ‖(ψ_{2(n+l)} − ψ_{2n})φ*_{2n}‖²_{L²(σ)}.
    pub shift_error: f64,
}

/// log D̃ precomputed on the near-boundary ring r·tⱼ; n-independent, so
/// n-sweeps build it once.
#[derive(Debug, Clone)]
pub struct DtildeRing {
    pub r: f64,
    pub exponents: Vec<Complex64>,
}

pub fn dtilde_ring(measure: &PsMeasure, ev: &OuterEvaluator) -> Result<DtildeRing> {
    let grid = measure.grid();
    let log_sigma = measure.log_density_samples(grid);
    let r = 1.0 - 10.0 / grid.len() as f64;
    let exponents = grid
        .nodes()
        .iter()
        .map(|&t| Ok(0.5 * ev.kernel_quad(&log_sigma, r * t)?))
        .collect::<Result<Vec<Complex64>>>()?;
    Ok(DtildeRing { r, exponents })
}

/// Wave-symbol diagnostics: density parts by near-boundary quadrature at
/// r = 1 − 10/M, atom parts exact. ψ and D̃ are evaluated through their
/// exponents and combined in log space (see module docs).
pub fn wave_symbol_check(
    measure: &PsMeasure,
    ev: &OuterEvaluator,
    ring: &DtildeRing,
    n: usize,
    l: usize,
) -> Result<WaveRow> {
    let grid = measure.grid();
    let log_sigma = measure.log_density_samples(grid);
    let r = ring.r;

    let lps_n = ev.log_phi_star_samples(n)?;
    let lps_2n = ev.log_phi_star_samples(2 * n)?;
    let lps_2nl = ev.log_phi_star_samples(2 * (n + l))?;
    let pair_n = crate::szego::recurse(ev.alpha(), n)?;
    let pair_2n = crate::szego::recurse(ev.alpha(), 2 * n)?;
    let log_a_n = ev.alpha().log_a_partial(n);
    let log_a_2n = ev.alpha().log_a_partial(2 * n);

    // (a) |ψₙφ*ₙ − 1/D̃|²σ′ = exp(log σ′ − 2Re E_D)·|e^{Eψ+E_D}·φ*ₙ − 1|²,
    // with every factor taken at the same interior point z = rt so that
    // the Bernstein–Szegő identity ψₙφ*ₙD̃ = ξₙ ≡ 1 cancels exactly.
    let mut sym_samples = Vec::with_capacity(grid.len());
    for (j, &t) in grid.nodes().iter().enumerate() {
        let z = r * t;
        let e_psi = ev.psi_exponent(&lps_n, z)?;
        let e_d = ring.exponents[j];
        let star = pair_n.eval_phi_star(z);
        let star_log = 0.5 * star.norm_sqr().ln() - log_a_n;
        let d = e_psi + e_d + Complex64::new(star_log, star.arg());
        let p = log_sigma[j] - 2.0 * e_d.re;
        sym_samples.push(guarded_term(p, d));
    }
    let mut symbol_error = grid.mean_real(&sym_samples)?;
    for atom in measure.atoms() {
        // χ_{E_ac} vanishes at the atom: the term is |ψₙφ*ₙ|²μ.
        let z = r * atom.location;
        let e_psi = ev.psi_exponent(&lps_n, z)?;
        let star_log = 0.5 * pair_n.eval_phi_star(z).norm_sqr().ln() - log_a_n;
        symbol_error += (2.0 * (e_psi.re + star_log) + atom.mass.ln()).exp();
    }

    // (b) |(ψ_{2(n+l)} − ψ_{2n})φ*_{2n}|²σ′
    //   = exp(log σ′ + 2log|φ*_{2n}| + 2Re E_b)·|e^{E_a−E_b} − 1|²
    let mut shift_samples = Vec::with_capacity(grid.len());
    for (j, &t) in grid.nodes().iter().enumerate() {
        let z = r * t;
        let e_a = ev.psi_exponent(&lps_2nl, z)?;
        let e_b = ev.psi_exponent(&lps_2n, z)?;
        let star_log = 0.5 * pair_2n.eval_phi_star(z).norm_sqr().ln() - log_a_2n;
        let p = log_sigma[j] + 2.0 * star_log + 2.0 * e_b.re;
        shift_samples.push(guarded_term(p, e_a - e_b));
    }
    let mut shift_error = grid.mean_real(&shift_samples)?;
    for atom in measure.atoms() {
        let z = r * atom.location;
        let e_a = ev.psi_exponent(&lps_2nl, z)?;
        let e_b = ev.psi_exponent(&lps_2n, z)?;
        let star_log = 0.5 * pair_2n.eval_phi_star(z).norm_sqr().ln() - log_a_2n;
        let p = atom.mass.ln() + 2.0 * star_log + 2.0 * e_b.re;
        shift_error += guarded_term(p, e_a - e_b);
    }

    Ok(WaveRow {
        n,
        symbol_error,
        shift_error,
    })
}
