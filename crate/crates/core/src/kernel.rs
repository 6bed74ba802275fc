//! The triangular-in-log weight w(u) and its Mellin transform K(s, t₀).
//!
//! w(u) = (2 log y − |log(x/u)|)(x/u)^{1+it₀} on (x/y², xy²), zero elsewhere,
//! and K(s, t₀) = ∫ w(u) u^{s−1} du = x^s ((y^{s−it₀−1} − y^{1+it₀−s})/(s−it₀−1))².

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::numeric::{integrate_gk, ComplexSum};

/// Below this |s − 1 − it₀| the closed form switches to its Taylor expansion.
pub const SINGULARITY_RADIUS: f64 = 1e-6;
const QUAD_REL_TOL: f64 = 1e-13;
const QUAD_MAX_INTERVALS: usize = 4000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("x must be positive and finite, got {0}")]
    BadX(f64),
    #[error("y = {y} outside [2, x^(1/3)] with x^(1/3) = {cap}")]
    BadY { y: f64, cap: f64 },
    #[error("y must exceed 1 for a nonempty support, got {0}")]
    EmptySupport(f64),
    #[error("|t0| must exceed 1, got {0}")]
    BadT0(f64),
    #[error("Re(s) = {0} outside the quadrature range |Re s| <= 4")]
    SOutOfRange(f64),
    #[error("quadrature did not converge: error estimate {error:e} against scale {scale:e}")]
    QuadratureFailed { error: f64, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelParams {
    x: f64,
    y: f64,
    t0: f64,
}

impl KernelParams {
    /// Parameters satisfying 2 ≤ y ≤ x^{1/3} and |t₀| > 1.
    pub fn new(x: f64, y: f64, t0: f64) -> Result<Self, KernelError> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(KernelError::BadX(x));
        }
        let cap = x.cbrt();
        if !(y >= 2.0 && y <= cap * (1.0 + 1e-12)) {
            return Err(KernelError::BadY { y, cap });
        }
        if !(t0.abs() > 1.0 && t0.is_finite()) {
            return Err(KernelError::BadT0(t0));
        }
        Ok(Self { x, y, t0 })
    }

    /// Only requires x > 0 and y > 1; used by sweeps that range outside the
    /// proof's parameter window.
    pub fn unconstrained(x: f64, y: f64, t0: f64) -> Result<Self, KernelError> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(KernelError::BadX(x));
        }
        if !(y > 1.0 && y.is_finite()) {
            return Err(KernelError::EmptySupport(y));
        }
        if !t0.is_finite() {
            return Err(KernelError::BadT0(t0));
        }
        Ok(Self { x, y, t0 })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Open support (x/y², x·y²).
    pub fn support(&self) -> (f64, f64) {
        let y2 = self.y * self.y;
        (self.x / y2, self.x * y2)
    }

    /// Same x, y with t₀ → −t₀.
    pub fn reflected(&self) -> Self {
        Self { t0: -self.t0, ..*self }
    }
}

pub fn weight_w(u: f64, p: &KernelParams) -> Complex64 {
    let (lo, hi) = p.support();
    if !(u > lo && u < hi) {
        return Complex64::new(0.0, 0.0);
    }
    let log_ratio = (p.x / u).ln();
    let height = 2.0 * p.y.ln() - log_ratio.abs();
    // (x/u)^{1+it0} = e^{(1+it0) log(x/u)}
    Complex64::new(log_ratio, p.t0 * log_ratio).exp() * height
}

/// ((y^w − y^{−w}) / w)² with w = s − 1 − it₀.
fn squared_sinh_ratio(w: Complex64, log_y: f64) -> Complex64 {
    if w.norm() < SINGULARITY_RADIUS {
        // (2L)² (1 + z²/3 + 2z⁴/45), z = wL
        let z2 = (w * log_y) * (w * log_y);
        return (1.0 + z2 / 3.0 + z2 * z2 * (2.0 / 45.0)) * (4.0 * log_y * log_y);
    }
    let a = (w * log_y).exp();
    let ratio = (a - a.inv()) / w;
    ratio * ratio
}

pub fn kernel_closed_form(s: Complex64, p: &KernelParams) -> Complex64 {
    let w = s - Complex64::new(1.0, p.t0);
    (s * p.x.ln()).exp() * squared_sinh_ratio(w, p.y.ln())
}

/// The bracket ((y^{ρ−1−it₀} − y^{1+it₀−ρ})/(ρ−1−it₀))² without the x^ρ factor.
pub fn kernel_bracket(s: Complex64, p: &KernelParams) -> Complex64 {
    squared_sinh_ratio(s - Complex64::new(1.0, p.t0), p.y.ln())
}

/// Adaptive quadrature of ∫_{x/y²}^{xy²} w(u) u^{s−1} du, split at u = x.
pub fn kernel_by_quadrature(s: Complex64, p: &KernelParams) -> Result<Complex64, KernelError> {
    if s.re.abs() > 4.0 {
        return Err(KernelError::SOutOfRange(s.re));
    }
    let (lo, hi) = p.support();
    let integrand = |u: f64| weight_w(u, p) * ((s - 1.0) * u.ln()).exp();
    let mut acc = ComplexSum::new();
    for (a, b) in [(lo, p.x), (p.x, hi)] {
        let q = integrate_gk(integrand, a, b, QUAD_REL_TOL, QUAD_MAX_INTERVALS);
        if !q.converged {
            return Err(KernelError::QuadratureFailed { error: q.error_estimate, scale: q.l1_estimate });
        }
        acc += q.value;
    }
    Ok(acc.value())
}

/// y_k = exp(π(2k+1) / (2|t₀|)), the k-th point where sin²(t₀ log y) = 1.
pub fn select_yk(t0: f64, k: u32) -> f64 {
    (PI * f64::from(2 * k + 1) / (2.0 * t0.abs())).exp()
}

/// Outcome of a closed-form vs quadrature sweep.
#[derive(Debug, Clone, Serialize)]
pub struct KernelCheckReport {
    pub samples: usize,
    pub seed: u64,
    pub max_relative_error: f64,
    pub mean_relative_error: f64,
    pub worst_case: KernelSample,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelSample {
    pub s_re: f64,
    pub s_im: f64,
    pub x: f64,
    pub y: f64,
    pub t0: f64,
    pub relative_error: f64,
}

/// Relative discrepancy between the closed form and quadrature at one point.
pub fn kernel_relative_error(s: Complex64, p: &KernelParams) -> Result<f64, KernelError> {
    let closed = kernel_closed_form(s, p);
    let quad = kernel_by_quadrature(s, p)?;
    Ok((closed - quad).norm() / closed.norm().max(f64::MIN_POSITIVE))
}

/// Evaluates the closed form against quadrature at the given sample points.
pub fn kernel_check(
    points: &[(Complex64, KernelParams)],
    seed: u64,
    exec: crate::par::Exec,
) -> Result<KernelCheckReport, KernelError> {
    let errors = crate::par::map(exec, points, |(s, p)| kernel_relative_error(*s, p));
    let mut worst: Option<KernelSample> = None;
    let mut total = 0.0;
    for ((s, p), e) in points.iter().zip(errors) {
        let e = e?;
        total += e;
        if worst.is_none_or(|w| e > w.relative_error) {
            worst = Some(KernelSample { s_re: s.re, s_im: s.im, x: p.x, y: p.y, t0: p.t0, relative_error: e });
        }
    }
    let worst = worst.unwrap_or(KernelSample { s_re: 0.0, s_im: 0.0, x: 0.0, y: 0.0, t0: 0.0, relative_error: 0.0 });
    Ok(KernelCheckReport {
        samples: points.len(),
        seed,
        max_relative_error: worst.relative_error,
        mean_relative_error: if points.is_empty() { 0.0 } else { total / points.len() as f64 },
        worst_case: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn weight_values() {
        let p = KernelParams::new(1000.0, 3.0, 2.0).unwrap();
        let at_x = weight_w(1000.0, &p);
        assert!((at_x - c(2.0 * 3f64.ln(), 0.0)).norm() < 1e-15);
        assert_eq!(weight_w(9000.0, &p), c(0.0, 0.0));
        assert_eq!(weight_w(20_000.0, &p), c(0.0, 0.0));
        assert_eq!(weight_w(1.0, &p), c(0.0, 0.0));
        let (lo, hi) = p.support();
        for u in [lo * (1.0 + 1e-9), hi * (1.0 - 1e-9)] {
            assert!(weight_w(u, &p).norm() <= 1.01e-9 * 9.0, "u={u}");
        }
    }

    #[test]
    fn weight_is_continuous_at_endpoints() {
        let p = KernelParams::unconstrained(50.0, 2.5, 3.0).unwrap();
        let (lo, _) = p.support();
        for u in [lo * (1.0 - 1e-9), lo * (1.0 + 1e-9)] {
            assert!(weight_w(u, &p).norm() <= 1.01e-9 * 2.5 * 2.5, "u={u}");
        }
    }

    #[test]
    fn closed_form_special_points() {
        let p = KernelParams::unconstrained(1.0, E, 3.0).unwrap();
        let v = kernel_closed_form(c(1.0, 3.0), &p);
        assert!((v - c(4.0, 0.0)).norm() < 1e-14);
        let y = 2.7_f64;
        let p = KernelParams::unconstrained(1.0, y, 3.0).unwrap();
        let v = kernel_closed_form(c(2.0, 3.0), &p);
        assert!((v - c((y - 1.0 / y).powi(2), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn continuity_at_removable_singularity() {
        let centre = c(1.0, 1.7);
        let dir = c(0.6, 0.8);
        let unit = KernelParams::unconstrained(1.0, 2.3, 1.7).unwrap();
        let near = kernel_closed_form(centre + dir * 1e-5, &unit);
        let nearer = kernel_closed_form(centre + dir * 1e-7, &unit);
        assert!((near - nearer).norm() / nearer.norm() < 1e-6);
        // x^s itself moves by ~ log(x)·|Δs|, so compare the bracket for x ≠ 1
        let p = KernelParams::unconstrained(7.0, 2.3, 1.7).unwrap();
        let near = kernel_bracket(centre + dir * 1e-5, &p);
        let nearer = kernel_bracket(centre + dir * 1e-7, &p);
        assert!((near - nearer).norm() / nearer.norm() < 1e-6);
        // both sides of the switch agree
        let inside = kernel_closed_form(centre + dir * 0.9e-6, &unit);
        let outside = kernel_closed_form(centre + dir * 1.1e-6, &unit);
        assert!((inside - outside).norm() / inside.norm() < 1e-9);
    }

    #[test]
    fn quadrature_matches_closed_form_at_s_zero() {
        let p = KernelParams::unconstrained(1.0, 2.0, 2.0).unwrap();
        let s = c(0.0, 0.0);
        let q = kernel_by_quadrature(s, &p).unwrap();
        let cf = kernel_closed_form(s, &p);
        assert!((q - cf).norm() / cf.norm() < 1e-10, "{q} vs {cf}");
        assert!(kernel_by_quadrature(c(5.0, 0.0), &p).is_err());
    }

    #[test]
    fn conjugation_symmetry() {
        let p = KernelParams::new(300.0, 2.5, 2.5).unwrap();
        for s in [c(0.5, 14.0), c(-0.7, 3.0), c(1.8, -9.0)] {
            let a = kernel_closed_form(s.conj(), &p.reflected());
            let b = kernel_closed_form(s, &p).conj();
            assert!((a - b).norm() <= 1e-13 * b.norm());
        }
    }

    #[test]
    fn yk_values() {
        assert!((select_yk(2.0, 0) - 2.193_280_050_738_015).abs() < 1e-12);
        assert!((select_yk(2.0, 1) - 10.550_724_074_197_76).abs() < 1e-9);
        for (t0, k) in [(1.5, 0), (-3.0, 4), (7.25, 11)] {
            let y = select_yk(t0, k);
            assert!(((t0 * y.ln()).sin().powi(2) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn param_validation() {
        assert!(KernelParams::new(1000.0, 2.0, 2.0).is_ok());
        assert!(KernelParams::new(1000.0, 11.0, 2.0).is_err());
        assert!(KernelParams::new(1000.0, 1.9, 2.0).is_err());
        assert!(KernelParams::new(1000.0, 3.0, 0.5).is_err());
        assert!(KernelParams::new(-1.0, 3.0, 2.0).is_err());
        assert!(KernelParams::unconstrained(1.0, 1.0, 2.0).is_err());
    }
}
