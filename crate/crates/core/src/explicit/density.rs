//! Inverse-square sums over zeros around 1 + it₀ and empirical constants for
//! the two zero-counting lemmas.
//!
//! Disc counts use the scale τ = |t| + 4.

use num_complex::Complex64;
use serde::Serialize;

use super::ExplicitError;
use crate::characters::{Character, CharacterLabel};
use crate::lfunc::{ZeroArchive, ZeroRecord};
use crate::numeric::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseSquareMode {
    /// R < |ρ − 1 − it₀| ≤ 1, bound log(q(|t₀|+4))/R
    AnnulusRTo1,
    /// |ρ − 1 − it₀| > R, same bound
    BeyondR,
    /// |ρ − 1 − it₀| > K, bound log q/K + log(K+|t₀|+4)/K
    BeyondK,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InverseSquareSum {
    pub sum: f64,
    pub bound_form: f64,
    /// sum / bound_form, the empirical implied constant
    pub ratio: f64,
    pub terms: usize,
}

/// Σ 1/|ρ − 1 − it₀|² over the zeros selected by `mode`.
pub fn inverse_square_zero_sum(
    zeros: &[ZeroRecord],
    q: u64,
    t0: f64,
    radius: f64,
    mode: InverseSquareMode,
) -> Result<InverseSquareSum, ExplicitError> {
    if q < 1 || !radius.is_finite() || radius <= 0.0 {
        return Err(ExplicitError::BadInput(format!("q = {q}, R = {radius}")));
    }
    let qf = q as f64;
    let log_scale = (qf * (t0.abs() + 4.0)).ln();
    let bound_form = match mode {
        InverseSquareMode::AnnulusRTo1 => {
            if radius > 1.0 || radius * log_scale < 1.0 {
                return Err(ExplicitError::BadInput(format!(
                    "R = {radius} outside [1/log(q(|t0|+4)), 1] = [{}, 1]",
                    1.0 / log_scale
                )));
            }
            log_scale / radius
        }
        InverseSquareMode::BeyondR => log_scale / radius,
        InverseSquareMode::BeyondK => {
            if radius < 1.0 || radius.fract() != 0.0 {
                return Err(ExplicitError::BadInput(format!("K = {radius} must be an integer >= 1")));
            }
            qf.ln() / radius + (radius + t0.abs() + 4.0).ln() / radius
        }
    };
    let centre = Complex64::new(1.0, t0);
    let mut sorted: Vec<f64> = zeros.iter().map(|z| (z.rho() - centre).norm()).collect();
    sorted.sort_by(f64::total_cmp);
    let mut acc = NeumaierSum::new();
    let mut terms = 0;
    for d in sorted {
        let keep = match mode {
            InverseSquareMode::AnnulusRTo1 => d > radius && d <= 1.0,
            InverseSquareMode::BeyondR | InverseSquareMode::BeyondK => d > radius,
        };
        if keep {
            acc += 1.0 / (d * d);
            terms += 1;
        }
    }
    let sum = acc.value();
    Ok(InverseSquareSum { sum, bound_form, ratio: if terms == 0 { 0.0 } else { sum / bound_form }, terms })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WindowRow {
    pub t: u32,
    pub count: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiscRow {
    pub t: f64,
    pub r: f64,
    pub count: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityTable {
    pub character: CharacterLabel,
    pub t_max: u32,
    pub windows: Vec<WindowRow>,
    pub discs: Vec<DiscRow>,
    /// max over windows of count / log(q(T+2))
    pub c_fit_windows: f64,
    /// max over discs of count / (r log(qτ))
    pub c_fit_discs: f64,
    pub tau_convention: &'static str,
}

const DISC_RADII: usize = 8;

/// Window counts on [0,1]×[T,T+1] and disc counts n(r; t) around 1 + it for
/// integer T, t in [0, T_max] and r on a geometric grid in [1/log(qτ), 3/4].
pub fn zero_density_ratios(chi: &Character, archive: &ZeroArchive, t_max: u32) -> Result<DensityTable, ExplicitError> {
    let need = f64::from(t_max) + 1.0;
    let zeros = archive.zeros_up_to(chi.label(), need)?;
    let q = chi.modulus() as f64;

    let mut windows = Vec::with_capacity(t_max as usize + 1);
    for t in 0..=t_max {
        let lo = f64::from(t);
        let count = zeros.iter().filter(|z| z.gamma >= lo && z.gamma <= lo + 1.0).count();
        let ratio = count as f64 / (q * (lo + 2.0)).ln();
        windows.push(WindowRow { t, count, ratio });
    }

    let mut discs = Vec::new();
    for t in 0..t_max {
        let tf = f64::from(t);
        let log_qtau = (q * (tf + 4.0)).ln();
        let r_min = 1.0 / log_qtau;
        let r_max = 0.75;
        for k in 0..DISC_RADII {
            let r =
                if r_min >= r_max { r_max } else { r_min * (r_max / r_min).powf(k as f64 / (DISC_RADII - 1) as f64) };
            let centre = Complex64::new(1.0, tf);
            let count = zeros.iter().filter(|z| (z.rho() - centre).norm() <= r).count();
            discs.push(DiscRow { t: tf, r, count, ratio: count as f64 / (r * log_qtau) });
        }
    }
    let c_fit_windows = windows.iter().map(|w| w.ratio).fold(0.0, f64::max);
    let c_fit_discs = discs.iter().map(|d| d.ratio).fold(0.0, f64::max);
    Ok(DensityTable {
        character: chi.label(),
        t_max,
        windows,
        discs,
        c_fit_windows,
        c_fit_discs,
        tau_convention: "tau = |t| + 4",
    })
}
