//! Zero location on the critical line by sign changes of Z(t, χ), with an
//! argument-principle cross-check and rectangle localization of anything the
//! scan cannot see.

use serde::Serialize;

use super::archive::{ZeroArchive, ZeroMethod, ZeroRecord};
use super::lvalue::LFunction;
use super::winding::{localize_zeros, winding_number, Rectangle};
use super::LfuncError;
use crate::characters::{Character, CharacterLabel};
use crate::par::{self, Exec};

/// Largest admissible grid step.
pub const MAX_STEP: f64 = 0.05;
/// Default height cap.
pub const MAX_HEIGHT: f64 = 500.0;
// scan margin covering the largest edge nudge of the cross-check
const MARGIN: f64 = 3e-3;

#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub step: f64,
    pub gamma_tolerance: f64,
    pub cross_check: bool,
    /// side length for rectangle localization of unseen zeros
    pub localize_side: f64,
    pub max_height: f64,
    pub exec: Exec,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            step: 0.02,
            gamma_tolerance: 1e-8,
            cross_check: true,
            localize_side: 1e-4,
            max_height: MAX_HEIGHT,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanOutcome {
    pub character: CharacterLabel,
    pub t_lo: f64,
    pub t_hi: f64,
    /// critical-line zeros first, then rectangle-localized ones, sorted by γ
    pub zeros: Vec<ZeroRecord>,
    pub sign_changes: usize,
    pub rectangle_count: Option<u32>,
    /// sign-change count and rectangle count disagree
    pub incomplete: bool,
    /// localization accounted for every zero the rectangle count reports
    pub resolved: bool,
}

fn validate(chi: &Character, t_lo: f64, t_hi: f64, cfg: &ScanConfig) -> Result<(), LfuncError> {
    chi.require_primitive()?;
    if !(cfg.step > 0.0 && cfg.step <= MAX_STEP) {
        return Err(LfuncError::BadRegion(format!("step {} outside (0, {MAX_STEP}]", cfg.step)));
    }
    if !(t_lo.is_finite() && t_hi.is_finite() && t_lo <= t_hi) {
        return Err(LfuncError::BadRegion(format!("interval [{t_lo}, {t_hi}]")));
    }
    if t_lo.abs().max(t_hi.abs()) > cfg.max_height {
        return Err(LfuncError::BadRegion(format!(
            "height {} exceeds cap {}",
            t_lo.abs().max(t_hi.abs()),
            cfg.max_height
        )));
    }
    Ok(())
}

/// Sign changes of Z on a uniform grid over [a, b], refined by bisection.
fn critical_zeros(lf: &LFunction, a: f64, b: f64, cfg: &ScanConfig) -> Result<Vec<f64>, LfuncError> {
    let n = ((b - a) / cfg.step).ceil().max(1.0) as usize;
    let grid = |k: usize| if k == n { b } else { a + (b - a) * k as f64 / n as f64 };
    let values: Vec<Result<f64, LfuncError>> = par::map_range(cfg.exec, n + 1, |k| lf.hardy_z(grid(k)));
    let values: Vec<f64> = values.into_iter().collect::<Result<_, _>>()?;

    let mut brackets = Vec::new();
    let mut exact = Vec::new();
    for k in 0..n {
        let (za, zb) = (values[k], values[k + 1]);
        if za == 0.0 {
            exact.push(grid(k));
        } else if za * zb < 0.0 {
            brackets.push((grid(k), za, grid(k + 1)));
        }
    }
    if values[n] == 0.0 {
        exact.push(b);
    }
    let refined: Vec<Result<f64, LfuncError>> = par::map(cfg.exec, &brackets, |&(mut lo, mut zlo, mut hi)| {
        while hi - lo > cfg.gamma_tolerance {
            let mid = 0.5 * (lo + hi);
            let zm = lf.hardy_z(mid)?;
            if zm == 0.0 {
                return Ok(mid);
            }
            if (zm < 0.0) == (zlo < 0.0) {
                lo = mid;
                zlo = zm;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    });
    let mut out: Vec<f64> = refined.into_iter().collect::<Result<_, _>>()?;
    out.extend(exact);
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Zeros of L(s, χ) with t_lo ≤ γ ≤ t_hi on the critical line, cross-checked
/// against the zero count of [0, 1] × [t_lo, t_hi].
pub fn scan_critical_zeros(chi: &Character, t_lo: f64, t_hi: f64, cfg: &ScanConfig) -> Result<ScanOutcome, LfuncError> {
    validate(chi, t_lo, t_hi, cfg)?;
    let label = chi.label();
    let mut outcome = ScanOutcome {
        character: label,
        t_lo,
        t_hi,
        zeros: Vec::new(),
        sign_changes: 0,
        rectangle_count: None,
        incomplete: false,
        resolved: true,
    };
    if t_lo == t_hi {
        return Ok(outcome);
    }
    let lf = LFunction::new(chi.clone());
    let (a, b) = if cfg.cross_check { (t_lo - MARGIN, t_hi + MARGIN) } else { (t_lo, t_hi) };
    let gammas = critical_zeros(&lf, a, b, cfg)?;
    let tol = cfg.gamma_tolerance;
    let mut zeros: Vec<ZeroRecord> =
        gammas.iter().filter(|&&g| (t_lo..=t_hi).contains(&g)).map(|&g| ZeroRecord::critical(label, g, tol)).collect();
    outcome.sign_changes = zeros.len();

    if cfg.cross_check {
        let f = |s| lf.value(s);
        let rect = Rectangle::new(0.0, 1.0, t_lo, t_hi)?;
        let w = winding_number(&f, &rect)?;
        outcome.rectangle_count = Some(w.count);
        let window = w.rectangle;
        let on_line = gammas.iter().filter(|&&g| g >= window.t_lo && g <= window.t_hi).count();
        if on_line != w.count as usize {
            outcome.incomplete = true;
            outcome.resolved = false;
            if let Ok(extra) = off_line_records(&f, &window, w.count, &gammas, label, cfg) {
                let located = on_line + extra.len();
                outcome.resolved = located == w.count as usize;
                zeros.extend(extra.into_iter().filter(|z| (t_lo..=t_hi).contains(&z.gamma)));
            }
        }
    }
    zeros.sort_by(|x, y| x.gamma.total_cmp(&y.gamma).then(x.beta.total_cmp(&y.beta)));
    outcome.zeros = zeros;
    Ok(outcome)
}

/// Localizes all zeros in `rect` and keeps those not explained by the
/// critical-line ordinates in `gammas`.
fn off_line_records<F>(
    f: &F,
    rect: &Rectangle,
    count: u32,
    gammas: &[f64],
    label: CharacterLabel,
    cfg: &ScanConfig,
) -> Result<Vec<ZeroRecord>, LfuncError>
where
    F: Fn(num_complex::Complex64) -> Result<num_complex::Complex64, LfuncError>,
{
    let boxes = localize_zeros(f, rect, count, cfg.localize_side)?;
    let mut used = vec![false; gammas.len()];
    let mut out = Vec::new();
    for b in boxes {
        let r = b.rectangle;
        let mut remaining = b.multiplicity;
        if r.sigma_lo <= 0.5 && 0.5 <= r.sigma_hi {
            for (i, g) in gammas.iter().enumerate() {
                if remaining > 0 && !used[i] && *g >= r.t_lo - cfg.gamma_tolerance && *g <= r.t_hi + cfg.gamma_tolerance
                {
                    used[i] = true;
                    remaining -= 1;
                }
            }
        }
        let c = r.center();
        for _ in 0..remaining {
            out.push(ZeroRecord {
                character: label,
                beta: c.re.clamp(0.0, 1.0),
                gamma: c.im,
                method: ZeroMethod::RectangleRefinement,
                tolerance: 0.5 * r.height().max(r.width()),
            });
        }
    }
    Ok(out)
}

/// Per-character result of an archive build.
#[derive(Debug, Clone, Serialize)]
pub struct ArchiveBuildReport {
    pub character: CharacterLabel,
    pub height: f64,
    pub zeros: usize,
    pub complete: bool,
    /// zeros taken from the conjugate character by reflection
    pub reflected: bool,
}

/// Archive of all zeros with |γ| ≤ height for the given primitive characters.
pub fn build_archive(
    chars: &[Character],
    height: f64,
    cfg: &ScanConfig,
) -> Result<(ZeroArchive, Vec<ArchiveBuildReport>), LfuncError> {
    let mut archive = ZeroArchive::new();
    let reports = extend_archive(&mut archive, chars, height, cfg)?;
    Ok((archive, reports))
}

/// Brings every character in `chars` up to completeness at `height`.
/// Real characters are scanned on [0, T] and mirrored; a complex character
/// whose conjugate is already complete reuses the conjugate's zeros.
pub fn extend_archive(
    archive: &mut ZeroArchive,
    chars: &[Character],
    height: f64,
    cfg: &ScanConfig,
) -> Result<Vec<ArchiveBuildReport>, LfuncError> {
    if !(height.is_finite() && height >= 0.0) {
        return Err(LfuncError::BadRegion(format!("height {height}")));
    }
    let mut reports = Vec::new();
    for chi in chars {
        chi.require_primitive()?;
        let label = chi.label();
        let have = archive.completeness(label).map_or(0.0, |c| c.height);
        if archive.completeness(label).is_some() && have >= height {
            reports.push(ArchiveBuildReport {
                character: label,
                height: have,
                zeros: archive.records(label).len(),
                complete: true,
                reflected: false,
            });
            continue;
        }
        let conj = chi.conjugate().label();
        let conj_done = conj != label && archive.completeness(conj).is_some_and(|c| c.height >= height);
        let mut complete = true;
        if conj_done {
            for z in archive.zeros_up_to(conj, height)? {
                archive.insert(ZeroRecord { character: label, gamma: -z.gamma, ..z })?;
            }
        } else {
            let mut pieces = Vec::new();
            if chi.is_real() {
                pieces.push(scan_critical_zeros(chi, have, height, cfg)?);
            } else {
                pieces.push(scan_critical_zeros(chi, have, height, cfg)?);
                pieces.push(scan_critical_zeros(chi, -height, -have, cfg)?);
            }
            for piece in pieces {
                complete &= !piece.incomplete || piece.resolved;
                for z in piece.zeros {
                    archive.insert(z)?;
                    if chi.is_real() {
                        archive.insert(ZeroRecord { gamma: -z.gamma, ..z })?;
                    }
                }
            }
        }
        if complete {
            archive.mark_complete(label, height);
        }
        reports.push(ArchiveBuildReport {
            character: label,
            height,
            zeros: archive.records(label).len(),
            complete,
            reflected: conj_done,
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;

    fn chi(label: &str) -> Character {
        Character::from_label(label.parse::<CharacterLabel>().unwrap()).unwrap()
    }

    #[test]
    fn first_zero_mod_three() {
        let cfg = ScanConfig { step: 0.01, ..ScanConfig::default() };
        let out = scan_critical_zeros(&chi("3.2"), 0.0, 10.0, &cfg).unwrap();
        assert_eq!(out.zeros.len(), 1);
        assert_eq!(out.rectangle_count, Some(1));
        assert!(!out.incomplete);
        let g = out.zeros[0].gamma;
        assert!(g > 8.0 && g < 8.1);
        assert!((g - 8.039_737_155_681_467).abs() < 1e-7);
    }

    #[test]
    fn empty_interval() {
        let out = scan_critical_zeros(&chi("7.3"), 5.0, 5.0, &ScanConfig::default()).unwrap();
        assert!(out.zeros.is_empty());
        assert!(!out.incomplete);
    }

    #[test]
    fn scan_matches_rectangle_mod_five() {
        let out = scan_critical_zeros(&chi("5.4"), 0.0, 30.0, &ScanConfig::default()).unwrap();
        assert!(!out.incomplete);
        assert_eq!(out.rectangle_count, Some(out.zeros.len() as u32));
        assert!(out.zeros.len() >= 5);
    }

    #[test]
    fn bad_arguments() {
        let cfg = ScanConfig { step: 0.1, ..ScanConfig::default() };
        assert!(scan_critical_zeros(&chi("3.2"), 0.0, 1.0, &cfg).is_err());
        assert!(scan_critical_zeros(&chi("9.8"), 0.0, 1.0, &ScanConfig::default()).is_err());
        assert!(scan_critical_zeros(&chi("3.2"), 2.0, 1.0, &ScanConfig::default()).is_err());
        assert!(scan_critical_zeros(&chi("3.2"), 0.0, 600.0, &ScanConfig::default()).is_err());
    }

    #[test]
    fn real_character_zeros_pair_up() {
        let cfg = ScanConfig::default();
        let up = scan_critical_zeros(&chi("8.3"), 0.0, 15.0, &cfg).unwrap();
        let down = scan_critical_zeros(&chi("8.3"), -15.0, 0.0, &cfg).unwrap();
        assert_eq!(up.zeros.len(), down.zeros.len());
        for (a, b) in up.zeros.iter().zip(down.zeros.iter().rev()) {
            assert!((a.gamma + b.gamma).abs() < 1e-7);
        }
    }

    #[test]
    fn conjugate_zeros_reflect() {
        let cfg = ScanConfig::default();
        let a = scan_critical_zeros(&chi("7.3"), -12.0, 12.0, &cfg).unwrap();
        let b = scan_critical_zeros(&chi("7.5"), -12.0, 12.0, &cfg).unwrap();
        assert_eq!(chi("7.3").conjugate().label(), chi("7.5").label());
        assert_eq!(a.zeros.len(), b.zeros.len());
        for (x, y) in a.zeros.iter().zip(b.zeros.iter().rev()) {
            assert!((x.gamma + y.gamma).abs() < 1e-7);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let seq = ScanConfig { exec: Exec::Sequential, cross_check: false, ..ScanConfig::default() };
        let par = ScanConfig { exec: Exec::Parallel, cross_check: false, ..ScanConfig::default() };
        let a = scan_critical_zeros(&chi("11.2"), 0.0, 20.0, &seq).unwrap();
        let b = scan_critical_zeros(&chi("11.2"), 0.0, 20.0, &par).unwrap();
        assert_eq!(a.zeros, b.zeros);
    }

    #[test]
    fn archive_build_and_extend() {
        let chars: Vec<Character> = enumerate_characters(7).unwrap().into_iter().filter(|c| c.is_primitive()).collect();
        let cfg = ScanConfig::default();
        let (mut archive, reports) = build_archive(&chars, 8.0, &cfg).unwrap();
        assert!(reports.iter().all(|r| r.complete));
        assert!(reports.iter().any(|r| r.reflected));
        let before = archive.len();
        extend_archive(&mut archive, &chars, 12.0, &cfg).unwrap();
        assert!(archive.len() > before);
        let (fresh, _) = build_archive(&chars, 12.0, &cfg).unwrap();
        for c in &chars {
            let a = archive.records(c.label());
            let b = fresh.records(c.label());
            assert_eq!(a.len(), b.len(), "{}", c.label());
            for (x, y) in a.iter().zip(b) {
                assert!((x.gamma - y.gamma).abs() < 1e-7);
            }
            assert_eq!(archive.completeness(c.label()).unwrap().height, 12.0);
        }
    }
}
