//! Both sides of the two explicit formulas and their residuals.
//!
//! Linear weight:  Σ χ(n)Λ(n)(x − n) = −Σ_ρ x^{ρ+1}/(ρ(ρ+1)) + trivial terms.
//! Windowed weight: Σ w(n)χ(n)Λ(n) = −Σ_ρ K(ρ) − (1−κ) K(0) + remainder.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};

use super::{serialize_complex, ExplicitError};
use crate::arithmetic::{linear_weighted_sum, ArithError, ArithTables};
use crate::characters::{Character, CharacterError, CharacterLabel};
use crate::kernel::{kernel_closed_form, weight_w, KernelParams};
use crate::lfunc::{l_log_derivative, ZeroArchive, ZeroRecord};
use crate::numeric::{ComplexSum, EULER_GAMMA};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum FormulaVariant {
    /// (x − n)-weighted sum
    Theorem1 { x: f64 },
    /// w(n)-weighted sum
    Theorem2 { x: f64, y: f64, t0: f64 },
}

impl FormulaVariant {
    pub fn windowed(p: &KernelParams) -> Self {
        FormulaVariant::Theorem2 { x: p.x(), y: p.y(), t0: p.t0() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FormulaReport {
    pub character: CharacterLabel,
    #[serde(flatten)]
    pub variant: FormulaVariant,
    #[serde(serialize_with = "serialize_complex")]
    pub prime_side: Complex64,
    #[serde(serialize_with = "serialize_complex")]
    pub zero_side: Complex64,
    #[serde(serialize_with = "serialize_complex")]
    pub trivial_term: Complex64,
    pub truncation_height: f64,
    #[serde(serialize_with = "serialize_complex")]
    pub residual: Complex64,
    pub residual_scale: f64,
    pub zeros_used: usize,
    /// size of the unevaluated line-integral remainder, when known
    pub expected_remainder_scale: Option<f64>,
}

/// Σ w(n)χ(n)Λ(n) over the open support (x/y², xy²).
pub fn windowed_weighted_sum(
    chi: &Character,
    p: &KernelParams,
    tables: &ArithTables,
) -> Result<Complex64, ExplicitError> {
    let (lo, hi) = p.support();
    if hi > tables.limit() as f64 {
        return Err(ArithError::BeyondTable { x: hi, limit: tables.limit() }.into());
    }
    let mut acc = ComplexSum::new();
    if hi < 2.0 {
        return Ok(acc.value());
    }
    let start = (lo.floor() as u64 + 1).max(2);
    let end = hi.ceil() as u64 - 1;
    for n in start..=end {
        let lambda = tables.von_mangoldt(n);
        if lambda == 0.0 {
            continue;
        }
        let c = chi.value_complex(n);
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        acc += weight_w(n as f64, p) * c * lambda;
    }
    Ok(acc.value())
}

fn by_height(zeros: &[ZeroRecord], height: f64) -> Vec<ZeroRecord> {
    let mut kept: Vec<ZeroRecord> = zeros.iter().filter(|z| z.gamma.abs() <= height).copied().collect();
    kept.sort_by(|a, b| {
        a.gamma.abs().total_cmp(&b.gamma.abs()).then(a.gamma.total_cmp(&b.gamma)).then(a.beta.total_cmp(&b.beta))
    });
    kept
}

/// Zero side −Σ_{|γ| ≤ T} K(ρ) and the trivial-zero term −(1−κ)K(0).
pub fn zero_side_theorem2(zeros: &[ZeroRecord], p: &KernelParams, kappa: u8, height: f64) -> (Complex64, Complex64) {
    let mut acc = ComplexSum::new();
    for z in by_height(zeros, height) {
        acc += -kernel_closed_form(z.rho(), p);
    }
    let trivial = if kappa == 0 {
        // K(0) = (y^{1+it₀} − y^{−1−it₀})² / (1+it₀)², since x^0 = 1
        -kernel_closed_form(Complex64::new(0.0, 0.0), p)
    } else {
        Complex64::new(0.0, 0.0)
    };
    (acc.value(), trivial)
}

/// x^{ρ+1} / (ρ(ρ+1)).
pub fn theorem1_summand(rho: Complex64, x: f64) -> Complex64 {
    ((rho + 1.0) * x.ln()).exp() / (rho * (rho + 1.0))
}

/// −Σ_{|γ| ≤ T} x^{ρ+1}/(ρ(ρ+1)).
pub fn zero_side_theorem1(zeros: &[ZeroRecord], x: f64, height: f64) -> Complex64 {
    let mut acc = ComplexSum::new();
    for z in by_height(zeros, height) {
        acc += -theorem1_summand(z.rho(), x);
    }
    acc.value()
}

/// Residues of −L′/L(s) x^{s+1}/(s(s+1)) at s = 0, s = −1 and the trivial
/// zeros, for primitive non-principal χ. The log-derivatives at 0 and −1
/// come from the functional equation.
pub fn theorem1_trivial_term(chi: &Character, x: f64) -> Result<Complex64, ExplicitError> {
    chi.require_primitive()?;
    if chi.is_principal() {
        return Err(CharacterError::Principal(chi.label()).into());
    }
    if !(x >= 2.0 && x.is_finite()) {
        return Err(ExplicitError::BadInput(format!("x = {x} must be at least 2")));
    }
    let bar = chi.conjugate();
    let one = Complex64::new(1.0, 0.0);
    let ld1 = l_log_derivative(one, &bar)?;
    let ld2 = l_log_derivative(one * 2.0, &bar)?;
    let shift = (chi.modulus() as f64 / PI).ln();
    let digamma_part = EULER_GAMMA + LN_2;
    let ln_x = x.ln();
    let mut acc = ComplexSum::new();
    let first_trivial = if chi.parity_kappa() == 1 {
        // simple pole at 0; double pole at −1 from the trivial zero
        let ld0 = -ld1 - shift + digamma_part;
        let c_minus1 = -ld2 - shift - 1.0 + digamma_part;
        acc += -ld0 * x;
        acc += c_minus1 + ln_x + 1.0;
        3
    } else {
        // double pole at 0 from the trivial zero; simple pole at −1
        let c0 = -ld1 - shift + digamma_part;
        let ld_minus1 = -ld2 - shift + digamma_part - 1.0;
        acc += -x * (ln_x - 1.0) - c0 * x;
        acc += ld_minus1;
        2
    };
    let mut m = first_trivial;
    loop {
        let rho = -f64::from(m);
        let term = -(x.powf(rho + 1.0)) / (rho * (rho + 1.0));
        acc += Complex64::new(term, 0.0);
        if term.abs() < 1e-18 || m > 400 {
            break;
        }
        m += 2;
    }
    Ok(acc.value())
}

/// Both sides of the chosen identity for primitive non-principal χ, with
/// zeros taken from an archive complete to `height`.
pub fn residual_report(
    chi: &Character,
    variant: FormulaVariant,
    archive: &ZeroArchive,
    height: f64,
    tables: &ArithTables,
) -> Result<FormulaReport, ExplicitError> {
    chi.require_primitive()?;
    if chi.is_principal() {
        return Err(CharacterError::Principal(chi.label()).into());
    }
    let zeros = archive.zeros_up_to(chi.label(), height)?;
    let (prime_side, zero_side, trivial_term, expected) = match variant {
        FormulaVariant::Theorem1 { x } => {
            let prime = linear_weighted_sum(chi, x, tables)?;
            let zero = zero_side_theorem1(&zeros, x, height);
            (prime, zero, theorem1_trivial_term(chi, x)?, None)
        }
        FormulaVariant::Theorem2 { x, y, t0 } => {
            let p = KernelParams::new(x, y, t0)?;
            let prime = windowed_weighted_sum(chi, &p, tables)?;
            let (zero, trivial) = zero_side_theorem2(&zeros, &p, chi.parity_kappa(), height);
            let theta = 0.1;
            let q = chi.modulus() as f64;
            let scale = x.powf(-1.0 + theta) * y.powf(4.0 - 2.0 * theta) * (q * (t0.abs() + 4.0)).ln();
            (prime, zero, trivial, Some(scale))
        }
    };
    let residual = prime_side - zero_side - trivial_term;
    let denom = prime_side.norm().max(zero_side.norm()).max(1.0);
    Ok(FormulaReport {
        character: chi.label(),
        variant,
        prime_side,
        zero_side,
        trivial_term,
        truncation_height: height,
        residual,
        residual_scale: residual.norm() / denom,
        zeros_used: zeros.len(),
        expected_remainder_scale: expected,
    })
}
