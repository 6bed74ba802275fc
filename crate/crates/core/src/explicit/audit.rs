//! Height-limited hypothesis checks and log-space bound audits for n(χ), and
//! the principal-character main term 4x/t₀² sin²(t₀ log y).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::formula::windowed_weighted_sum;
use super::{serialize_complex, ExplicitError};
use crate::arithmetic::ArithTables;
use crate::characters::{least_nonresidue, Character, CharacterLabel};
use crate::kernel::KernelParams;
use crate::lfunc::ZeroArchive;

/// Largest argument for which exp stays finite in binary64.
const EXP_OVERFLOW: f64 = 709.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditMode {
    #[serde(rename = "theorem_1_2")]
    Theorem12,
    #[serde(rename = "theorem_1_3")]
    Theorem13,
    #[serde(rename = "theorem_1_3_centered")]
    Theorem13Centered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditConfig {
    pub mode: AuditMode,
    pub delta: f64,
    pub t0: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    pub theta: f64,
}

impl AuditConfig {
    pub fn new(mode: AuditMode, delta: f64, t0: f64) -> Self {
        Self { mode, delta, t0, c: 1.0, k1: 1.0, k2: 1.0, theta: 0.1 }
    }

    /// Hard errors for unusable parameters; soft range issues become warnings.
    pub fn validate(&self) -> Result<Vec<String>, ExplicitError> {
        let bad = |m: String| Err(ExplicitError::BadInput(m));
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return bad(format!("delta = {} outside (0, 1/2]", self.delta));
        }
        for (name, v) in [("C", self.c), ("K1", self.k1), ("K2", self.k2)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return bad(format!("theta = {} outside (0, 1)", self.theta));
        }
        let mut warnings = Vec::new();
        if self.mode != AuditMode::Theorem12 {
            if !(self.t0.abs() > 1.0 && self.t0.is_finite()) {
                return bad(format!("|t0| = {} must exceed 1", self.t0.abs()));
            }
            let lower = 1.0 / (self.t0.abs() + 4.0).ln();
            if self.delta < lower {
                warnings.push(format!(
                    "delta = {} below 1/log(|t0|+4) = {lower:.6}; the stated range [{lower:.6}, 0.5] is {}",
                    self.delta,
                    if lower > 0.5 { "empty" } else { "not met" }
                ));
            }
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum HypothesisStatus {
    /// no zero with 1 − δ < β < 1 among archived zeros up to `height`
    VerifiedToHeight {
        height: f64,
    },
    Violated {
        beta: f64,
        gamma: f64,
    },
    /// a precondition of the theorem fails or no archive data exists
    Indeterminate {
        height: f64,
    },
}

impl HypothesisStatus {
    fn name(&self) -> &'static str {
        match self {
            HypothesisStatus::VerifiedToHeight { .. } => "verified_to_height",
            HypothesisStatus::Violated { .. } => "violated",
            HypothesisStatus::Indeterminate { .. } => "indeterminate",
        }
    }

    fn height(&self) -> f64 {
        match *self {
            HypothesisStatus::VerifiedToHeight { height } | HypothesisStatus::Indeterminate { height } => height,
            HypothesisStatus::Violated { gamma, .. } => gamma.abs(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditResult {
    pub character: CharacterLabel,
    pub hypothesis_status: HypothesisStatus,
    pub log_x: f64,
    pub bound_value_log: f64,
    pub observed_n_chi: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passes: Option<bool>,
    /// exp(bound_value_log) when representable
    pub bound_value: Option<f64>,
    pub warnings: Vec<String>,
}

fn log_bounds(q: u64, cfg: &AuditConfig) -> (f64, f64) {
    let loglog_q = (q as f64).ln().ln();
    let inv = 1.0 / cfg.delta;
    match cfg.mode {
        AuditMode::Theorem12 => (inv * loglog_q, inv * loglog_q + cfg.c.ln()),
        AuditMode::Theorem13 | AuditMode::Theorem13Centered => {
            let t0_log = 2.0 * cfg.t0.abs().ln();
            let log_x = inv * (cfg.k2.ln() + t0_log + loglog_q - cfg.delta.ln());
            let bound = cfg.c.ln() + inv * (cfg.k1.ln() + t0_log + loglog_q - cfg.delta.ln());
            (log_x, bound)
        }
    }
}

/// Audits n(χ) against the selected bound for every non-principal χ in
/// `chars` (which must have modulus q), sorted by label.
pub fn audit_bound(
    q: u64,
    cfg: &AuditConfig,
    archive: &ZeroArchive,
    chars: &[Character],
) -> Result<Vec<AuditResult>, ExplicitError> {
    let base_warnings = cfg.validate()?;
    if q <= 2 {
        return Ok(Vec::new());
    }
    let mut selected: Vec<&Character> = chars.iter().filter(|c| !c.is_principal()).collect();
    if let Some(c) = selected.iter().find(|c| c.modulus() != q) {
        return Err(ExplicitError::BadInput(format!("character {} is not modulo {q}", c.label())));
    }
    selected.sort_by_key(|c| c.label());

    let (log_x, bound_log) = log_bounds(q, cfg);
    let log_q = (q as f64).ln();
    let region_height = cfg.k1 * cfg.t0 * cfg.t0 * log_q;
    let q_condition = cfg.mode == AuditMode::Theorem12 || (q as f64) >= cfg.t0.abs().exp() + 4.0;

    let mut out = Vec::with_capacity(selected.len());
    for chi in selected {
        let mut warnings = base_warnings.clone();
        let label = chi.label();
        // zeros from the conductor's character when χ is imprimitive
        let source = if chi.is_primitive() { label } else { chi.inducing_label() };
        let archived = archive.completeness(source).map(|c| c.height);
        let (centre, half) = match cfg.mode {
            AuditMode::Theorem12 => (0.0, f64::INFINITY),
            AuditMode::Theorem13 => (0.0, region_height),
            AuditMode::Theorem13Centered => (cfg.t0, region_height),
        };
        let needed = centre.abs() + half;
        let violation = archive
            .records(source)
            .iter()
            .find(|z| z.beta > 1.0 - cfg.delta && z.beta < 1.0 && (z.gamma - centre).abs() <= half);
        let status = match (violation, archived) {
            (Some(z), _) => HypothesisStatus::Violated { beta: z.beta, gamma: z.gamma },
            (None, None) => {
                warnings.push(format!("no complete zero archive for {source}"));
                HypothesisStatus::Indeterminate { height: 0.0 }
            }
            (None, Some(h)) => {
                let checked = h.min(needed);
                if h < needed {
                    warnings.push(format!("hypothesis region needs height {needed:.4}, archive reaches {h}"));
                }
                if q_condition {
                    HypothesisStatus::VerifiedToHeight { height: checked }
                } else {
                    HypothesisStatus::Indeterminate { height: checked }
                }
            }
        };
        if !q_condition {
            warnings.push(format!("q = {q} below e^|t0| + 4 = {:.4}", cfg.t0.abs().exp() + 4.0));
        }
        if bound_log > EXP_OVERFLOW {
            warnings.push(format!("bound exp({bound_log:.2}) overflows binary64"));
        }
        let n = least_nonresidue(chi)?;
        let passes = match status {
            HypothesisStatus::Violated { .. } => None,
            _ => Some((n as f64).ln() < bound_log),
        };
        out.push(AuditResult {
            character: label,
            hypothesis_status: status,
            log_x,
            bound_value_log: bound_log,
            observed_n_chi: n,
            passes,
            bound_value: (bound_log <= EXP_OVERFLOW).then(|| bound_log.exp()),
            warnings,
        });
    }
    Ok(out)
}

pub const AUDIT_CSV_HEADER: &str = "character,hypothesis,height,log_x,bound_log,n_chi,passes";

pub fn audit_csv(results: &[AuditResult]) -> String {
    let mut s = String::from(AUDIT_CSV_HEADER);
    s.push('\n');
    for r in results {
        let passes = match r.passes {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.character,
            r.hypothesis_status.name(),
            r.hypothesis_status.height(),
            r.log_x,
            r.bound_value_log,
            r.observed_n_chi,
            passes
        ));
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct MainTermCheck {
    pub q: u64,
    #[serde(serialize_with = "serialize_complex")]
    pub observed: Complex64,
    /// 4x/t₀²
    pub predicted: f64,
    pub sin_squared: f64,
    pub relative_gap: f64,
}

/// Windowed sum of the principal character against 4x/t₀².
pub fn principal_main_term_check(
    q: u64,
    p: &KernelParams,
    tables: &ArithTables,
) -> Result<MainTermCheck, ExplicitError> {
    let chi = Character::principal(q)?;
    let observed = windowed_weighted_sum(&chi, p, tables)?;
    let predicted = 4.0 * p.x() / (p.t0() * p.t0());
    let s = (p.t0() * p.y().ln()).sin();
    Ok(MainTermCheck {
        q,
        observed,
        predicted,
        sin_squared: s * s,
        relative_gap: (observed - predicted).norm() / predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::build_tables;
    use crate::characters::enumerate_characters;
    use crate::kernel::select_yk;
    use crate::lfunc::{build_archive, ScanConfig, ZeroMethod, ZeroRecord};
    use std::f64::consts::PI;

    fn primitive_nonprincipal(q: u64) -> Vec<Character> {
        enumerate_characters(q).unwrap().into_iter().filter(|c| c.is_primitive() && !c.is_principal()).collect()
    }

    fn quadratic(q: u64) -> Character {
        enumerate_characters(q).unwrap().into_iter().find(|c| c.order() == 2).unwrap()
    }

    #[test]
    fn worked_example_mod_seven() {
        let chars = primitive_nonprincipal(7);
        let cfg = AuditConfig::new(AuditMode::Theorem13, 0.5, 2.0);
        let (archive, _) = build_archive(&chars, 10.0, &ScanConfig::default()).unwrap();
        let res = audit_bound(7, &cfg, &archive, &[quadratic(7)]).unwrap();
        let r = &res[0];
        let direct = (4.0 * 7f64.ln() / 0.5).powi(2);
        assert!((direct - 242.3).abs() < 0.05);
        assert!((r.bound_value.unwrap() / direct - 1.0).abs() < 1e-9);
        assert!((r.log_x.exp() / direct - 1.0).abs() < 1e-9);
        assert_eq!(r.observed_n_chi, 3);
        assert_eq!(r.passes, Some(true));
        // 7 < e² + 4, so the theorem's range condition fails
        assert!(matches!(r.hypothesis_status, HypothesisStatus::Indeterminate { .. }));
    }

    #[test]
    fn theorem12_boundary_at_three() {
        let chars = primitive_nonprincipal(3);
        let (archive, _) = build_archive(&chars, 5.0, &ScanConfig::default()).unwrap();
        let cfg = AuditConfig::new(AuditMode::Theorem12, 0.5, 0.0);
        let r = &audit_bound(3, &cfg, &archive, &chars).unwrap()[0];
        assert!((r.bound_value.unwrap() - 3f64.ln().powi(2)).abs() < 1e-12);
        assert_eq!(r.observed_n_chi, 2);
        assert_eq!(r.passes, Some(false));
        assert!(matches!(r.hypothesis_status, HypothesisStatus::VerifiedToHeight { height } if height == 5.0));
    }

    #[test]
    fn injected_violation() {
        let chars = primitive_nonprincipal(5);
        let (mut archive, _) = build_archive(&chars, 5.0, &ScanConfig::default()).unwrap();
        let label = chars[0].label();
        archive
            .insert(ZeroRecord {
                character: label,
                beta: 0.8,
                gamma: 1.0,
                method: ZeroMethod::RectangleRefinement,
                tolerance: 1e-4,
            })
            .unwrap();
        let cfg = AuditConfig::new(AuditMode::Theorem12, 0.3, 0.0);
        let res = audit_bound(5, &cfg, &archive, &chars).unwrap();
        let r = res.iter().find(|r| r.character == label).unwrap();
        assert!(matches!(r.hypothesis_status, HypothesisStatus::Violated { .. }));
        assert_eq!(r.passes, None);
        let json = serde_json::to_value(r).unwrap();
        assert!(json.get("passes").is_none());
        assert_eq!(json["hypothesis_status"]["status"], "violated");
        let csv = audit_csv(&res);
        assert!(csv.starts_with(AUDIT_CSV_HEADER));
        assert!(csv.contains(",violated,"));
    }

    #[test]
    fn log_space_matches_direct() {
        for (mode, delta, t0, q) in [
            (AuditMode::Theorem12, 0.5, 0.0, 101u64),
            (AuditMode::Theorem12, 0.25, 0.0, 13),
            (AuditMode::Theorem13, 0.4, 3.0, 1009),
            (AuditMode::Theorem13Centered, 0.3, -2.5, 97),
        ] {
            let cfg = AuditConfig { c: 1.7, k1: 0.8, k2: 2.5, ..AuditConfig::new(mode, delta, t0) };
            let (lx, lb) = log_bounds(q, &cfg);
            let lq = (q as f64).ln();
            let (x, b) = match mode {
                AuditMode::Theorem12 => (lq.powf(1.0 / delta), cfg.c * lq.powf(1.0 / delta)),
                _ => (
                    (cfg.k2 * t0 * t0 * lq / delta).powf(1.0 / delta),
                    cfg.c * (cfg.k1 * t0 * t0 * lq / delta).powf(1.0 / delta),
                ),
            };
            assert!((lx.exp() / x - 1.0).abs() < 1e-9);
            assert!((lb.exp() / b - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn config_validation() {
        assert!(AuditConfig::new(AuditMode::Theorem12, 0.0, 0.0).validate().is_err());
        assert!(AuditConfig::new(AuditMode::Theorem12, 0.6, 0.0).validate().is_err());
        assert!(AuditConfig::new(AuditMode::Theorem13, 0.5, 0.5).validate().is_err());
        let w = AuditConfig::new(AuditMode::Theorem13, 0.5, 1.1).validate().unwrap();
        assert_eq!(w.len(), 1);
        assert!(AuditConfig::new(AuditMode::Theorem13, 0.5, 40.0).validate().unwrap().is_empty());
        let tiny = AuditConfig::new(AuditMode::Theorem12, 0.003, 0.0);
        let archive = ZeroArchive::new();
        let r = &audit_bound(10_007, &tiny, &archive, &[quadratic(10_007)]).unwrap()[0];
        assert!(r.bound_value.is_none());
        assert!(r.warnings.iter().any(|w| w.contains("overflows")));
        assert!(audit_bound(2, &AuditConfig::new(AuditMode::Theorem12, 0.5, 0.0), &archive, &[]).unwrap().is_empty());
    }

    #[test]
    fn main_term_resonance() {
        let t = build_tables(250_000).unwrap();
        let p = KernelParams::new(1e4, select_yk(2.0, 0), 2.0).unwrap();
        let on = principal_main_term_check(3, &p, &t).unwrap();
        assert!(on.relative_gap < 0.3, "{on:?}");
        assert!((on.sin_squared - 1.0).abs() < 1e-12);
        let off = KernelParams::new(1e4, (PI / 2.0).exp(), 2.0).unwrap();
        let off = principal_main_term_check(3, &off, &t).unwrap();
        assert!(off.sin_squared < 1e-20);
        assert!(off.observed.norm() < 0.5 * on.predicted);
        let tiny = KernelParams::unconstrained(0.3, 1.5, 2.0).unwrap();
        let z = principal_main_term_check(3, &tiny, &t).unwrap();
        assert_eq!(z.observed, Complex64::new(0.0, 0.0));
        assert_eq!(z.relative_gap, 1.0);
    }
}
