//! Euler–Maclaurin evaluation of ζ(s, a) and ∂ζ/∂s.
//!
//! ζ(s, a) = Σ_{n<M} (n+a)^{−s} + N^{1−s}/(s−1) + ½N^{−s}
//!           + Σ_{j=1}^{5} B_{2j}/(2j)! · (s)_{2j−1} · N^{−s−2j+1},   N = M + a.
//!
//! The pole term is kept separate so that character-weighted sums can cancel
//! it exactly before dividing by s − 1.

use num_complex::Complex64;

use super::LfuncError;
use crate::numeric::ComplexSum;

// B_{2j} / (2j)! for j = 1..=5
const BERNOULLI_OVER_FACTORIAL: [f64; 5] =
    [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30_240.0, -1.0 / 1_209_600.0, 1.0 / 47_900_160.0];
// |B_12| / 12!, the first omitted coefficient
const FIRST_OMITTED: f64 = 691.0 / 2730.0 / 479_001_600.0;
const OMITTED_TARGET: f64 = 1e-15;

/// Truncation point and the s-dependent rising factorials shared by every
/// shift a at the same s.
#[derive(Debug, Clone)]
pub(crate) struct EmPlan {
    pub s: Complex64,
    pub m: u64,
    // (s)_{2j-1} and its s-derivative
    rising: [(Complex64, Complex64); 5],
}

impl EmPlan {
    pub fn new(s: Complex64) -> Self {
        // |B12/12!| |(s)_11| N^{-11} <= target, relative to the N^{-σ} scale.
        // Factors are floored at 1: at s = 0, −1 the product vanishes but its
        // s-derivative does not.
        let poch11: f64 = (0..11).map(|i| (s + i as f64).norm().max(1.0)).product();
        let m = ((FIRST_OMITTED * poch11 / OMITTED_TARGET).powf(1.0 / 11.0).ceil() as u64).max(4);

        let mut rising = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 5];
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for k in 0..9u32 {
            let factor = s + f64::from(k);
            dp = dp * factor + p;
            p *= factor;
            // p = (s)_{k+1}
            if k % 2 == 0 {
                rising[(k / 2) as usize] = (p, dp);
            }
        }
        Self { s, m, rising }
    }
}

/// ζ(s, a) minus its pole term N^{1−s}/(s−1), with the s-derivative.
/// Also returns log N.
pub(crate) fn regular_part(plan: &EmPlan, a: f64) -> (Complex64, Complex64, f64) {
    let s = plan.s;
    let mut value = ComplexSum::new();
    let mut deriv = ComplexSum::new();
    for n in 0..plan.m {
        let l = (n as f64 + a).ln();
        let term = (-s * l).exp();
        value += term;
        deriv += -term * l;
    }
    let big_n = plan.m as f64 + a;
    let ln_n = big_n.ln();
    let n_pow = (-s * ln_n).exp();
    value += n_pow * 0.5;
    deriv += -n_pow * (0.5 * ln_n);

    let mut n_pow_j = n_pow / big_n; // N^{-s-1}
    let inv_n2 = 1.0 / (big_n * big_n);
    for (c, (p, dp)) in BERNOULLI_OVER_FACTORIAL.iter().zip(plan.rising.iter()) {
        value += n_pow_j * (*p * *c);
        deriv += n_pow_j * ((*dp - *p * ln_n) * *c);
        n_pow_j *= inv_n2;
    }
    (value.value(), deriv.value(), ln_n)
}

/// N^{1−s}/(s−1) and its derivative.
pub(crate) fn pole_term(s: Complex64, ln_n: f64) -> (Complex64, Complex64) {
    let u = s - 1.0;
    let np = (-u * ln_n).exp();
    let v = np / u;
    (v, -v * ln_n - v / u)
}

/// (N^{1−s} − 1)/(s−1) and its derivative, finite at s = 1.
pub(crate) fn pole_free_term(s: Complex64, ln_n: f64) -> (Complex64, Complex64) {
    let u = s - 1.0;
    let z = -u * ln_n;
    if z.norm() < 1e-3 {
        // g(u) = -L Σ_{k≥0} z^k/(k+1)!,  g'(u) = L² Σ_{k≥0} (k+1) z^k/(k+2)!
        let mut g = Complex64::new(0.0, 0.0);
        let mut dg = Complex64::new(0.0, 0.0);
        let mut zk = Complex64::new(1.0, 0.0);
        let mut fact = 1.0; // (k+1)!
        for k in 0..10 {
            let kf = f64::from(k);
            fact *= kf + 1.0;
            g += zk / fact;
            dg += zk * ((kf + 1.0) / (fact * (kf + 2.0)));
            zk *= z;
        }
        return (-g * ln_n, dg * (ln_n * ln_n));
    }
    let e = z.exp();
    let v = (e - 1.0) / u;
    (v, (-e * ln_n - v) / u)
}

/// ζ(s, a) and ∂ζ(s, a)/∂s for a ∈ (0, 1], Re s > −2, s ≠ 1.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<(Complex64, Complex64), LfuncError> {
    if (s - 1.0).norm() < 1e-8 {
        return Err(LfuncError::Pole(s));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(LfuncError::BadShift(a));
    }
    if s.re <= -2.0 {
        return Err(LfuncError::OutsideStrip(s));
    }
    let plan = EmPlan::new(s);
    let (v, d, ln_n) = regular_part(&plan, a);
    let (pv, pd) = pole_term(s, ln_n);
    Ok((v + pv, d + pd))
}
