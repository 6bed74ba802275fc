use num_complex::Complex64;
use std::f64::consts::PI;

use super::hurwitz::{pole_free_term, pole_term, regular_part, EmPlan};
use super::LfuncError;
use crate::characters::{factorize, root_number, Character};
use crate::numeric::{ln_gamma, ComplexSum};

/// Below this modulus L(s, χ) counts as a zero for log-derivative purposes.
pub const NEAR_ZERO: f64 = 1e-12;

/// L(s, χ) = q^{−s} Σ_a χ(a) ζ(s, a/q) with cached character values.
#[derive(Debug, Clone)]
pub struct LFunction {
    chi: Character,
    values: Vec<Complex64>,
    ln_q: f64,
    // ε(χ)^{-1/2} for primitive χ
    phase: Option<Complex64>,
}

impl LFunction {
    pub fn new(chi: Character) -> Self {
        let values = chi.value_table();
        let ln_q = (chi.modulus() as f64).ln();
        let phase = if chi.is_primitive() { root_number(&chi).ok().map(|eps| eps.sqrt().inv()) } else { None };
        Self { chi, values, ln_q, phase }
    }

    pub fn character(&self) -> &Character {
        &self.chi
    }

    /// L(s, χ) and L′(s, χ).
    pub fn value_and_derivative(&self, s: Complex64) -> Result<(Complex64, Complex64), LfuncError> {
        if s.re <= -2.0 {
            return Err(LfuncError::OutsideStrip(s));
        }
        let principal = self.chi.is_principal();
        if principal && (s - 1.0).norm() < 1e-8 {
            return Err(LfuncError::Pole(s));
        }
        let q = self.chi.modulus();
        let qf = q as f64;
        let plan = EmPlan::new(s);
        let mut sum = ComplexSum::new();
        let mut dsum = ComplexSum::new();
        for a in 1..=q {
            let c = self.values[(a % q) as usize];
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let (v, d, ln_n) = regular_part(&plan, a as f64 / qf);
            // Σχ(a) = 0 lets the 1/(s−1) pieces cancel before division
            let (pv, pd) = if principal { pole_term(s, ln_n) } else { pole_free_term(s, ln_n) };
            sum += c * (v + pv);
            dsum += c * (d + pd);
        }
        let scale = (-s * self.ln_q).exp();
        let s_val = sum.value();
        Ok((scale * s_val, scale * (dsum.value() - s_val * self.ln_q)))
    }

    pub fn value(&self, s: Complex64) -> Result<Complex64, LfuncError> {
        self.value_and_derivative(s).map(|(v, _)| v)
    }

    /// L′/L(s, χ) from the Hurwitz derivatives of χ itself.
    pub fn log_derivative_direct(&self, s: Complex64) -> Result<Complex64, LfuncError> {
        let (v, d) = self.value_and_derivative(s)?;
        if v.norm() <= NEAR_ZERO {
            return Err(LfuncError::NearZero { s, modulus: v.norm() });
        }
        Ok(d / v)
    }

    /// L′/L(s, χ); imprimitive χ goes through its inducing character:
    /// L′/L(s,χ) = L′/L(s,χ*) + Σ_{p|q} χ*(p) log p / (p^s − χ*(p)).
    pub fn log_derivative(&self, s: Complex64) -> Result<Complex64, LfuncError> {
        if self.chi.is_primitive() {
            return self.log_derivative_direct(s);
        }
        let star = self.chi.primitive();
        let base = LFunction::new(star.clone()).log_derivative_direct(s)?;
        let mut acc = ComplexSum::new();
        acc += base;
        for (p, _) in factorize(self.chi.modulus()) {
            let cp = star.value_complex(p);
            if cp.re == 0.0 && cp.im == 0.0 {
                continue;
            }
            let lp = (p as f64).ln();
            acc += cp * lp / ((s * lp).exp() - cp);
        }
        Ok(acc.value())
    }

    /// Λ(s, χ) = (q/π)^{(s+κ)/2} Γ((s+κ)/2) L(s, χ) for primitive χ.
    pub fn completed(&self, s: Complex64) -> Result<Complex64, LfuncError> {
        self.chi.require_primitive()?;
        let half = (s + f64::from(self.chi.parity_kappa())) * 0.5;
        let log_factor = half * (self.ln_q - PI.ln()) + ln_gamma(half);
        Ok(log_factor.exp() * self.value(s)?)
    }

    /// Unimodular rotation e^{iθ(t)} making L(1/2 + it, χ) real.
    pub fn z_rotation(&self, t: f64) -> Result<Complex64, LfuncError> {
        let phase = self.phase.ok_or(LfuncError::Character(crate::characters::CharacterError::NotPrimitive(
            self.chi.label(),
            self.chi.conductor(),
        )))?;
        let kappa = f64::from(self.chi.parity_kappa());
        let theta = 0.5 * t * (self.ln_q - PI.ln()) + ln_gamma(Complex64::new(0.25 + 0.5 * kappa, 0.5 * t)).im;
        Ok(phase * Complex64::new(0.0, theta).exp())
    }

    /// Z(t, χ), real-valued rotation of L on the critical line.
    pub fn hardy_z(&self, t: f64) -> Result<f64, LfuncError> {
        let rot = self.z_rotation(t)?;
        let z = rot * self.value(Complex64::new(0.5, t))?;
        if z.im.abs() >= 1e-8 * (1.0 + z.re.abs()) {
            return Err(LfuncError::PhaseInconsistency { t, re: z.re, im: z.im });
        }
        Ok(z.re)
    }
}

pub fn l_value(s: Complex64, chi: &Character) -> Result<Complex64, LfuncError> {
    LFunction::new(chi.clone()).value(s)
}

pub fn l_log_derivative(s: Complex64, chi: &Character) -> Result<Complex64, LfuncError> {
    LFunction::new(chi.clone()).log_derivative(s)
}

pub fn completed_l(s: Complex64, chi: &Character) -> Result<Complex64, LfuncError> {
    LFunction::new(chi.clone()).completed(s)
}

pub fn hardy_z(t: f64, chi: &Character) -> Result<f64, LfuncError> {
    LFunction::new(chi.clone()).hardy_z(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{enumerate_characters, CharacterLabel};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn chi(label: &str) -> Character {
        Character::from_label(label.parse::<CharacterLabel>().unwrap()).unwrap()
    }

    #[test]
    fn leibniz_at_one() {
        // alternating series with averaging of consecutive partial sums
        let mut partial = 0.0;
        let mut prev = 0.0;
        for k in 0..1_000_000u64 {
            prev = partial;
            let term = 1.0 / (2 * k + 1) as f64;
            partial += if k % 2 == 0 { term } else { -term };
        }
        let oracle = 0.5 * (partial + prev);
        let v = l_value(c(1.0, 0.0), &chi("4.3")).unwrap();
        assert!((v.re - oracle).abs() < 1e-11);
        assert!((v.re - PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn dirichlet_series_at_two() {
        for q in 3..=20u64 {
            for ch in enumerate_characters(q).unwrap().into_iter().filter(|c| !c.is_principal()) {
                let lf = LFunction::new(ch.clone());
                let mut acc = ComplexSum::new();
                for n in 1..1_000_000u64 {
                    let v = lf.values[(n % q) as usize];
                    acc += v / (n as f64 * n as f64);
                }
                let got = lf.value(c(2.0, 0.0)).unwrap();
                assert!((got - acc.value()).norm() < 1e-8, "{}", ch.label());
            }
        }
    }

    #[test]
    fn euler_product_lower_bound() {
        // ζ(6)/ζ(3) = Π(1 − p^{-3})/(1 − p^{-6})... ≤ |L(3 + it)|
        let zeta3 = 1.202_056_903_159_594_2;
        let zeta6 = PI.powi(6) / 945.0;
        for ch in enumerate_characters(12).unwrap() {
            for t in [0.0, 5.0, 40.0] {
                let v = l_value(c(3.0, t), &ch).unwrap();
                assert!(v.norm() >= zeta6 / zeta3, "{} t={t}", ch.label());
            }
        }
    }

    #[test]
    fn log_derivative_against_von_mangoldt_series() {
        let tables = crate::arithmetic::build_tables(100_000).unwrap();
        for label in ["5.2", "7.6", "8.3", "9.2"] {
            let ch = chi(label);
            let s = c(3.0, 1.5);
            let mut acc = ComplexSum::new();
            for (n, lam) in tables.prime_powers_up_to(100_000) {
                let v = ch.value_complex(n % ch.modulus());
                acc += -v * lam * (-s * (n as f64).ln()).exp();
            }
            let got = l_log_derivative(s, &ch).unwrap();
            assert!((got - acc.value()).norm() < 1e-8, "{label}");
        }
    }

    #[test]
    fn induced_relation_matches_direct() {
        for label in ["9.8", "15.4", "12.5", "20.13", "12.1", "6.5", "10.9"] {
            let ch = chi(label);
            assert!(!ch.is_primitive());
            let lf = LFunction::new(ch);
            let s = c(2.0, 0.0);
            let a = lf.log_derivative(s).unwrap();
            let b = lf.log_derivative_direct(s).unwrap();
            assert!((a - b).norm() < 1e-9, "{label}: {a} vs {b}");
        }
    }

    #[test]
    fn schwarz_reflection_of_log_derivative() {
        let ch = chi("7.3");
        let s = c(0.3, 4.2);
        let a = l_log_derivative(s.conj(), &ch.conjugate()).unwrap();
        let b = l_log_derivative(s, &ch).unwrap().conj();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn log_derivative_matches_finite_difference() {
        let ch = chi("11.2");
        let lf = LFunction::new(ch);
        let h = 1e-5;
        for s in [c(0.7, 3.3), c(1.5, -8.0), c(-0.5, 12.0)] {
            let ld = lf.log_derivative(s).unwrap();
            let fd = (lf.value(s + h).unwrap().ln() - lf.value(s - h).unwrap().ln()) / (2.0 * h);
            assert!((ld - fd).norm() / ld.norm() < 1e-6, "s={s}");
        }
    }

    #[test]
    fn near_zero_is_rejected() {
        // L(0, χ) = 0 for even χ
        let ch = chi("5.4");
        assert!(matches!(l_log_derivative(c(0.0, 0.0), &ch), Err(LfuncError::NearZero { .. })));
        assert!(matches!(l_value(c(1.0, 0.0), &Character::principal(5).unwrap()), Err(LfuncError::Pole(_))));
    }

    #[test]
    fn functional_equation_residual() {
        let ch = chi("5.4");
        let lf = LFunction::new(ch.clone());
        let lf_bar = LFunction::new(ch.conjugate());
        let eps = root_number(&ch).unwrap();
        let s = c(0.7, 3.0);
        let lhs = lf.completed(s).unwrap();
        let rhs = eps * lf_bar.completed(1.0 - s).unwrap();
        assert!((lhs - rhs).norm() / lhs.norm() < 1e-8);
        let half = lf.completed(c(0.5, 0.0)).unwrap();
        assert!(half.im.abs() < 1e-9 * half.norm());
        let two = completed_l(c(2.0, 0.0), &chi("4.3")).unwrap();
        assert!(two.norm() > 0.0 && two.is_finite());
    }

    #[test]
    fn hardy_z_properties() {
        let ch = chi("3.2");
        let lf = LFunction::new(ch.clone());
        let a = lf.hardy_z(8.0).unwrap();
        let b = lf.hardy_z(8.1).unwrap();
        assert!(a * b < 0.0);
        for t in [1.0, 2.0, 3.0] {
            let zp = lf.hardy_z(t).unwrap();
            let zm = lf.hardy_z(-t).unwrap();
            assert!((zp - zm).abs() < 1e-10 * zp.abs().max(1.0), "t={t}");
            let l = lf.value(c(0.5, t)).unwrap();
            assert!((zp.abs() - l.norm()).abs() < 1e-9);
        }
        // complex character: still real
        let lf = LFunction::new(chi("7.3"));
        for t in [0.5, 6.0, 33.3] {
            lf.hardy_z(t).unwrap();
        }
        assert!(LFunction::new(chi("9.8")).hardy_z(1.0).is_err());
    }
}
