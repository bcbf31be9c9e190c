//! CMV matrices: the five-diagonal unitary representation of multiplication
//! by z in L²(σ).
//!
//! The matrix is assembled from the alternating 2×2-block factorization
//! 𝒞 = ℒℳ, with ℒ = Θ₀ ⊕ Θ₂ ⊕ ⋯, ℳ = 1 ⊕ Θ₁ ⊕ Θ₃ ⊕ ⋯ and
//! Θⱼ = [[ᾱⱼ, ρⱼ], [ρⱼ, −αⱼ]]. Correctness of the layout is pinned to the
//! characteristic-polynomial identity det(zI − 𝒞ₙ) = Φₙ(z), which
//! [`char_poly_check`] verifies coefficientwise against the Szegő
//! recurrence.
//!
//! Traces of differences like tr(P(𝒞) − P(𝒞₀)) are defined operationally on
//! truncations: a 5-diagonal band grows by 2 per power, so a truncation of
//! order support + 2·deg + margin already contains every diagonal entry
//! that differs from the α ≡ 0 matrix, and enlarging it further cannot
//! change the trace. The stabilization is checked, not assumed.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::szego::VerblunskySeq;

/// Dense complex matrix, just big enough for truncated CMV work.
#[derive(Debug, Clone)]
pub struct DenseMat {
    n: usize,
    a: Vec<Complex64>,
}

impl DenseMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// A† (conjugate transpose).
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (x, y) in out.a.iter_mut().zip(&other.a) {
            *x -= y;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// m×m truncation of the CMV matrix of a (finitely supported) Verblunsky
/// sequence.
#[derive(Debug, Clone)]
pub struct CmvMatrix {
    mat: DenseMat,
    m: usize,
}

impl CmvMatrix {
    pub fn order(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat.get(i, j)
    }

    pub fn dense(&self) -> &DenseMat {
        &self.mat
    }

    /// Worst unitarity defect ‖(𝒞*𝒞 − I)ᵢⱼ‖ over interior indices
    /// i, j ≤ m − 3 (the last rows feel the truncation).
    pub fn interior_unitarity_defect(&self) -> f64 {
        if self.m < 4 {
            return 0.0;
        }
        let prod = self.mat.adjoint().mul(&self.mat);
        let mut worst = 0.0f64;
        for i in 0..=self.m - 3 {
            for j in 0..=self.m - 3 {
                let want = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((prod.get(i, j) - want).norm());
            }
        }
        worst
    }

    /// Dense text dump for debugging.
    pub fn to_dense_string(&self) -> String {
        let mut s = String::new();
        for i in 0..self.m {
            for j in 0..self.m {
                let v = self.mat.get(i, j);
                s.push_str(&format!("{:+.6e}{:+.6e}i ", v.re, v.im));
            }
            s.push('\n');
        }
        s
    }
}

/// Build the m×m truncation 𝒞_m. α is zero-padded beyond its support, so
/// α ≡ 0 yields the free matrix 𝒞₀.
pub fn build_cmv(alpha: &VerblunskySeq, m: usize) -> Result<CmvMatrix> {
    if m == 0 {
        return Err(Error::Contract("truncation order must be ≥ 1".into()));
    }
    // Work at a padded even size so the m×m corner of the product equals
    // the corner of the infinite matrix.
    let work = m + 4 + (m % 2);
    let theta = |j: usize| -> (Complex64, f64) { (alpha.get(j), alpha.rho(j)) };

    let mut l = DenseMat::zeros(work);
    let mut mm = DenseMat::zeros(work);
    // ℒ = Θ₀ ⊕ Θ₂ ⊕ ⋯ on index pairs (2i, 2i+1).
    let mut row = 0;
    while row + 1 < work {
        let (a, r) = theta(row);
        l.set(row, row, a.conj());
        l.set(row, row + 1, Complex64::new(r, 0.0));
        l.set(row + 1, row, Complex64::new(r, 0.0));
        l.set(row + 1, row + 1, -a);
        row += 2;
    }
    if row < work {
        l.set(row, row, Complex64::new(1.0, 0.0));
    }
    // ℳ = 1 ⊕ Θ₁ ⊕ Θ₃ ⊕ ⋯ on index pairs (2i+1, 2i+2).
    mm.set(0, 0, Complex64::new(1.0, 0.0));
    let mut row = 1;
    while row + 1 < work {
        let (a, r) = theta(row);
        mm.set(row, row, a.conj());
        mm.set(row, row + 1, Complex64::new(r, 0.0));
        mm.set(row + 1, row, Complex64::new(r, 0.0));
        mm.set(row + 1, row + 1, -a);
        row += 2;
    }
    if row < work {
        mm.set(row, row, Complex64::new(1.0, 0.0));
    }

    let full = l.mul(&mm);
    let mut mat = DenseMat::zeros(m);
    for i in 0..m {
        for j in 0..m {
            mat.set(i, j, full.get(i, j));
        }
    }
    Ok(CmvMatrix { mat, m })
}

/// Coefficients of det(zI − A) by the Faddeev–LeVerrier recursion,
/// ascending powers. Dense O(n⁴); meant for the n ≤ 12 check regime.
pub fn char_poly(a: &DenseMat) -> Vec<Complex64> {
    let n = a.size();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut mk = DenseMat::zeros(n);
    for k in 1..=n {
        // Mₖ = A·M_{k−1} + c_{n−k+1}·I
        let mut next = a.mul(&mk);
        let ck = coeffs[n - k + 1];
        for i in 0..n {
            let v = next.get(i, i) + ck;
            next.set(i, i, v);
        }
        let am = a.mul(&next);
        coeffs[n - k] = -am.trace() / k as f64;
        mk = next;
    }
    coeffs
}

/// Max coefficient deviation between det(zI − 𝒞ₙ) and the recurrence Φₙ.
pub fn char_poly_check(alpha: &VerblunskySeq, n: usize) -> Result<f64> {
    if n > 12 {
        return Err(Error::Contract(
            "dense determinant check is limited to n ≤ 12".into(),
        ));
    }
    let cmv = build_cmv(alpha, n)?;
    let det = char_poly(cmv.dense());
    let pair = crate::szego::recurse(alpha, n)?;
    Ok(det
        .iter()
        .zip(&pair.phi)
        .map(|(d, p)| (d - p).norm())
        .fold(0.0, f64::max))
}

fn support(alpha: &VerblunskySeq) -> usize {
    let mut s = alpha.len();
    while s > 0 && alpha.get(s - 1).norm() == 0.0 {
        s -= 1;
    }
    s
}

/// tr(𝒞ᵏ − 𝒞₀ᵏ) for k = 1..=kmax on an order-m truncation.
fn truncated_power_traces(alpha: &VerblunskySeq, kmax: usize, m: usize) -> Result<Vec<Complex64>> {
    let c = build_cmv(alpha, m)?;
    let c0 = build_cmv(&VerblunskySeq::empty(), m)?;
    let mut pow = DenseMat::identity(m);
    let mut pow0 = DenseMat::identity(m);
    let mut out = Vec::with_capacity(kmax);
    for _ in 1..=kmax {
        pow = pow.mul(c.dense());
        pow0 = pow0.mul(c0.dense());
        out.push(pow.trace() - pow0.trace());
    }
    Ok(out)
}

/// Trace coefficients of log D: t₀ = Σ log ρₖ and tₖ = tr(𝒞̄ᵏ − 𝒞̄₀ᵏ),
/// computed on a truncation of order support + 2·kmax + 5 and verified to
/// be insensitive to enlarging it.
pub fn trace_moments(alpha: &VerblunskySeq, kmax: usize) -> Result<Vec<Complex64>> {
    let m = support(alpha) + 2 * kmax + 5;
    let base = truncated_power_traces(alpha, kmax, m)?;
    let wider = truncated_power_traces(alpha, kmax, m + 1)?;
    for (k, (a, b)) in base.iter().zip(&wider).enumerate() {
        if (a - b).norm() > 1e-12 {
            return Err(Error::Numerical(format!(
                "trace t_{} changed by {} between truncations {m} and {}; \
                 boundary contamination, retry with a larger truncation",
                k + 1,
                (a - b).norm(),
                m + 1
            )));
        }
    }
    let t0 = (0..support(alpha)).map(|k| alpha.rho(k).ln()).sum::<f64>();
    let mut out = vec![Complex64::new(t0, 0.0)];
    // tr(𝒞̄ᵏ − 𝒞̄₀ᵏ) = conj tr(𝒞ᵏ − 𝒞₀ᵏ).
    out.extend(base.iter().map(|t| t.conj()));
    Ok(out)
}

/// Re tr(P(𝒞) − P(𝒞₀)) for an analytic polynomial P = Σ_{j≥1} cⱼ zʲ given
/// by ascending coefficients (constant term must vanish).
pub fn trace_p_diff(alpha: &VerblunskySeq, p_coeffs: &[Complex64]) -> Result<f64> {
    if !p_coeffs.is_empty() && p_coeffs[0].norm() > 0.0 {
        return Err(Error::Contract("P must satisfy P(0) = 0".into()));
    }
    let deg = p_coeffs.len().saturating_sub(1);
    let m = support(alpha) + 2 * deg + 5;
    let value = |mm: usize| -> Result<Complex64> {
        let traces = truncated_power_traces(alpha, deg, mm)?;
        let mut s = Complex64::new(0.0, 0.0);
        for (j, c) in p_coeffs.iter().enumerate().skip(1) {
            s += c * traces[j - 1];
        }
        Ok(s)
    };
    let a = value(m)?;
    let b = value(m + 1)?;
    if (a - b).norm() > 1e-12 {
        return Err(Error::Numerical(format!(
            "tr(P(𝒞) − P(𝒞₀)) changed by {} between truncations {m} and {}",
            (a - b).norm(),
            m + 1
        )));
    }
    Ok(a.re)
}

/// Closed-form diagonal sum ᾱ₀ − Σ_{k≥1} ᾱₖα_{k−1}.
pub fn diagonal_trace_formula(alpha: &VerblunskySeq) -> Complex64 {
    let mut s = alpha.get(0).conj();
    for k in 1..=support(alpha) {
        s -= alpha.get(k).conj() * alpha.get(k - 1);
    }
    s
}
