//! One function per subcommand. Each returns the rendered report, optional
//! plot data and whether its verification held.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use nonres_core::arithmetic::{build_tables_capped, ArithTables, DEFAULT_TABLE_LIMIT};
use nonres_core::characters::{enumerate_characters, is_prime, least_nonresidue};
use nonres_core::explicit::{
    audit_bound, audit_csv, principal_main_term_check, residual_report, zero_density_ratios, AuditConfig, AuditMode,
    AuditResult, DensityTable, FormulaReport, FormulaVariant, HypothesisStatus, MainTermCheck,
};
use nonres_core::kernel::{kernel_check, kernel_relative_error, select_yk, KernelCheckReport, KernelParams};
use nonres_core::lfunc::{extend_archive, ArchiveBuildReport, ScanConfig, ZeroArchive, MAX_HEIGHT, MAX_STEP};
use nonres_core::par::{self, Exec};
use nonres_core::{Character, CharacterLabel};
use serde::Serialize;

use crate::sampling::kernel_sample_points;
use crate::select::moduli;
use crate::{Cli, CliAuditMode, CliError, CliVariant, Command, FileConfig, Format, ModuliArgs, Outcome};

const DEFAULT_HEIGHT: f64 = 30.0;

struct Ctx<'a> {
    format: Option<Format>,
    plot: bool,
    exec: Exec,
    file: &'a FileConfig,
}

impl Ctx<'_> {
    fn format(&self, default: Format, csv: bool, cmd: &str) -> Result<Format, CliError> {
        let f = self.format.unwrap_or(default);
        if f == Format::Csv && !csv {
            return Err(CliError::Usage(format!("--format csv is not available for {cmd}")));
        }
        Ok(f)
    }

    fn no_plot(&self, cmd: &str) -> Result<(), CliError> {
        if self.plot {
            return Err(CliError::Usage(format!("--plot is not available for {cmd}")));
        }
        Ok(())
    }

    fn table_cap(&self) -> u64 {
        self.file.table_limit.unwrap_or(DEFAULT_TABLE_LIMIT)
    }

    fn scan(&self, step: Option<f64>) -> Result<ScanConfig, CliError> {
        let mut cfg = ScanConfig { exec: self.exec, ..ScanConfig::default() };
        if let Some(s) = step.or(self.file.scan_step) {
            if !(s > 0.0 && s <= MAX_STEP) {
                return Err(usage("--step", format!("{s} outside (0, {MAX_STEP}]")));
            }
            cfg.step = s;
        }
        Ok(cfg)
    }
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{flag}: {msg}"))
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn plot_csv(header: &str, rows: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut s = format!("{header}\n");
    for (a, b) in rows {
        let _ = writeln!(s, "{a},{b}");
    }
    s
}

fn check_height(flag: &str, h: f64) -> Result<f64, CliError> {
    if !(h.is_finite() && h > 0.0 && h <= MAX_HEIGHT) {
        return Err(usage(flag, format!("{h} outside (0, {MAX_HEIGHT}]")));
    }
    Ok(h)
}

fn tables(ctx: &Ctx, need: f64) -> Result<ArithTables, CliError> {
    let limit = need.ceil().max(2.0) as u64;
    build_tables_capped(limit, ctx.table_cap()).map_err(|e| usage("--x", e))
}

/// Primitive characters behind the non-principal characters selected by
/// `args`, deduplicated and in label order.
fn primitive_targets(args: &ModuliArgs, qs: &[u64]) -> Result<Vec<Character>, CliError> {
    let mut out = BTreeMap::new();
    for &q in qs {
        for chi in args.select.pick(q)? {
            if !chi.is_principal() {
                let p = chi.primitive();
                out.insert(p.label(), p);
            }
        }
    }
    Ok(out.into_values().collect())
}

/// Loads the archive at `path` if it exists, completes it to `height` for
/// `chars` and saves it back.
fn ensure_archive(
    path: Option<&Path>,
    chars: &[Character],
    height: f64,
    scan: &ScanConfig,
) -> Result<(ZeroArchive, Vec<ArchiveBuildReport>), CliError> {
    let mut archive = match path {
        Some(p) if p.exists() => ZeroArchive::load(p).map_err(|e| usage("--archive", e))?,
        _ => ZeroArchive::new(),
    };
    let reports = extend_archive(&mut archive, chars, height, scan).map_err(failed)?;
    if let Some(p) = path {
        archive.save(p).map_err(failed)?;
    }
    Ok((archive, reports))
}

pub fn dispatch(cli: &Cli, file: &FileConfig) -> Result<Outcome, CliError> {
    let ctx = Ctx {
        format: cli.global.format,
        plot: cli.global.plot.is_some(),
        exec: if cli.global.sequential { Exec::Sequential } else { Exec::default() },
        file,
    };
    match &cli.command {
        Command::Chars { q } => chars(&ctx, *q),
        Command::Nonres { moduli } => nonres(&ctx, moduli),
        Command::Zeros { moduli, height, step, archive } => zeros(&ctx, moduli, *height, *step, archive.as_deref()),
        Command::KernelCheck { samples, seed, tolerance } => kernel(&ctx, *samples, *seed, *tolerance),
        Command::Explicit { label, variant, x, t0, k, y, height, archive, max_residual } => explicit(
            &ctx,
            ExplicitArgs {
                label: *label,
                variant: *variant,
                x: *x,
                t0: *t0,
                k: *k,
                y: *y,
                height: *height,
                max_residual: *max_residual,
            },
            archive.as_deref(),
        ),
        Command::Density { moduli, t_max, archive, detail } => {
            density(&ctx, moduli, *t_max, archive.as_deref(), *detail)
        }
        Command::Audit { moduli, mode, primes_only, t0, delta, c, k1, k2, theta, height, archive } => {
            let mode = match mode {
                CliAuditMode::Theorem12 => AuditMode::Theorem12,
                CliAuditMode::Theorem13 => AuditMode::Theorem13,
                CliAuditMode::Theorem13Centered => AuditMode::Theorem13Centered,
            };
            let cfg = AuditConfig { mode, delta: *delta, t0: *t0, c: *c, k1: *k1, k2: *k2, theta: *theta };
            audit(&ctx, moduli, *primes_only, cfg, *height, archive.as_deref())
        }
        Command::MainTerm { q, t0, k, y, x, off_resonance, max_gap } => {
            main_term(&ctx, *q, *t0, *k, *y, *x, *off_resonance, *max_gap)
        }
    }
}

#[derive(Serialize)]
struct CharRow {
    label: CharacterLabel,
    order: u64,
    parity: u8,
    conductor: u64,
    primitive: bool,
    real: bool,
    n_chi: Option<u64>,
}

#[derive(Serialize)]
struct CharsReport {
    q: u64,
    count: usize,
    characters: Vec<CharRow>,
}

fn chars(ctx: &Ctx, q: u64) -> Result<Outcome, CliError> {
    let format = ctx.format(Format::Json, true, "chars")?;
    ctx.no_plot("chars")?;
    let all = enumerate_characters(q).map_err(|e| usage("--q", e))?;
    let mut rows = Vec::with_capacity(all.len());
    for chi in &all {
        let n_chi = if chi.is_principal() { None } else { Some(least_nonresidue(chi).map_err(failed)?) };
        rows.push(CharRow {
            label: chi.label(),
            order: chi.order(),
            parity: chi.parity_kappa(),
            conductor: chi.conductor(),
            primitive: chi.is_primitive(),
            real: chi.is_real(),
            n_chi,
        });
    }
    let report = match format {
        Format::Json => json(&CharsReport { q, count: rows.len(), characters: rows }),
        Format::Csv => {
            let mut s = String::from("label,order,parity,conductor,primitive,real,n_chi\n");
            for r in &rows {
                let n = r.n_chi.map(|n| n.to_string()).unwrap_or_default();
                let _ =
                    writeln!(s, "{},{},{},{},{},{},{n}", r.label, r.order, r.parity, r.conductor, r.primitive, r.real);
            }
            s
        }
    };
    Ok(Outcome::ok(report))
}

#[derive(Serialize)]
struct NonresRow {
    q: u64,
    character: CharacterLabel,
    n_chi: u64,
}

#[derive(Serialize)]
struct NonresReport {
    rows: Vec<NonresRow>,
    all_prime: bool,
}

fn nonres(ctx: &Ctx, args: &ModuliArgs) -> Result<Outcome, CliError> {
    let format = ctx.format(Format::Csv, true, "nonres")?;
    let qs = moduli(args.q, args.q_range, args.select)?;
    let mut rows = Vec::new();
    for q in qs {
        for chi in args.select.pick(q)? {
            if chi.is_principal() {
                continue;
            }
            rows.push(NonresRow { q, character: chi.label(), n_chi: least_nonresidue(&chi).map_err(failed)? });
        }
    }
    let all_prime = rows.iter().all(|r| is_prime(r.n_chi));
    let plot = ctx.plot.then(|| plot_csv("q,n_chi", rows.iter().map(|r| (r.q as f64, r.n_chi as f64))));
    let report = match format {
        Format::Json => json(&NonresReport { rows, all_prime }),
        Format::Csv => {
            let mut s = String::from("q,character,n_chi\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{}", r.q, r.character, r.n_chi);
            }
            s
        }
    };
    Ok(Outcome { plot, ..Outcome::ok(report) }.check(all_prime, || "a least non-residue is not prime".into()))
}

#[derive(Serialize)]
struct ZerosReport {
    height: f64,
    archive: Option<String>,
    total_zeros: usize,
    characters: Vec<ArchiveBuildReport>,
}

fn zeros(
    ctx: &Ctx,
    args: &ModuliArgs,
    height: Option<f64>,
    step: Option<f64>,
    archive: Option<&Path>,
) -> Result<Outcome, CliError> {
    let format = ctx.format(Format::Json, true, "zeros")?;
    let height = check_height("--height", height.or(ctx.file.height).unwrap_or(DEFAULT_HEIGHT))?;
    let scan = ctx.scan(step)?;
    let qs = moduli(args.q, args.q_range, args.select)?;
    let targets = primitive_targets(args, &qs)?;
    let path = archive.or(ctx.file.archive.as_deref());
    let (arch, reports) = ensure_archive(path, &targets, height, &scan)?;

    let plot = ctx.plot.then(|| {
        let mut gammas: Vec<f64> = targets
            .iter()
            .flat_map(|c| arch.records(c.label()).iter().map(|z| z.gamma))
            .filter(|g| *g >= 0.0 && *g <= height)
            .collect();
        gammas.sort_by(f64::total_cmp);
        plot_csv("gamma,count", gammas.into_iter().enumerate().map(|(i, g)| (g, (i + 1) as f64)))
    });
    let complete = reports.iter().all(|r| r.complete);
    let report = match format {
        Format::Json => json(&ZerosReport {
            height,
            archive: path.map(|p| p.display().to_string()),
            total_zeros: reports.iter().map(|r| r.zeros).sum(),
            characters: reports.clone(),
        }),
        Format::Csv => arch.to_csv_string(),
    };
    let missing: Vec<String> = reports.iter().filter(|r| !r.complete).map(|r| r.character.to_string()).collect();
    Ok(Outcome { plot, ..Outcome::ok(report) }
        .check(complete, || format!("archive incomplete for {}", missing.join(", "))))
}

#[derive(Serialize)]
struct KernelReport {
    #[serde(flatten)]
    check: KernelCheckReport,
    tolerance: f64,
    passes: bool,
}

fn kernel(ctx: &Ctx, samples: usize, seed: Option<u64>, tolerance: f64) -> Result<Outcome, CliError> {
    let format = ctx.format(Format::Json, true, "kernel-check")?;
    if samples == 0 {
        return Err(usage("--samples", "must be at least 1"));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(usage("--tolerance", "must be positive"));
    }
    let seed = seed.or(ctx.file.seed).unwrap_or(0);
    let points = kernel_sample_points(samples, seed);

    let per_sample = if format == Format::Csv || ctx.plot {
        let errs = par::map(ctx.exec, &points, |(s, p)| kernel_relative_error(*s, p));
        Some(errs.into_iter().collect::<Result<Vec<f64>, _>>().map_err(failed)?)
    } else {
        None
    };
    let plot = per_sample
        .as_ref()
        .filter(|_| ctx.plot)
        .map(|e| plot_csv("sample,relative_error", e.iter().enumerate().map(|(i, e)| (i as f64, *e))));
    let (report, max) = match (format, &per_sample) {
        (Format::Csv, Some(errs)) => {
            let mut s = String::from("sample,s_re,s_im,x,y,t0,relative_error\n");
            for (i, ((z, p), e)) in points.iter().zip(errs).enumerate() {
                let _ = writeln!(s, "{i},{},{},{},{},{},{e}", z.re, z.im, p.x(), p.y(), p.t0());
            }
            (s, errs.iter().copied().fold(0.0, f64::max))
        }
        _ => {
            let check = kernel_check(&points, seed, ctx.exec).map_err(failed)?;
            let max = check.max_relative_error;
            (json(&KernelReport { check, tolerance, passes: max < tolerance }), max)
        }
    };
    Ok(Outcome { plot, ..Outcome::ok(report) }
        .check(max < tolerance, || format!("max relative error {max:e} >= {tolerance:e}")))
}

struct ExplicitArgs {
    label: CharacterLabel,
    variant: CliVariant,
    x: f64,
    t0: Option<f64>,
    k: Option<u32>,
    y: Option<f64>,
    height: f64,
    max_residual: f64,
}

#[derive(Serialize)]
struct ExplicitReport {
    #[serde(flatten)]
    report: FormulaReport,
    max_residual: f64,
    passes: bool,
}

fn explicit(ctx: &Ctx, a: ExplicitArgs, archive: Option<&Path>) -> Result<Outcome, CliError> {
    ctx.format(Format::Json, false, "explicit")?;
    let chi = Character::from_label(a.label).map_err(|e| usage("--label", e))?;
    if chi.is_principal() || !chi.is_primitive() {
        return Err(usage("--label", format!("{} must be primitive and non-principal", a.label)));
    }
    let height = check_height("--height", a.height)?;
    let (variant, need) = match a.variant {
        CliVariant::Theorem1 => {
            if !(a.x.is_finite() && a.x > 1.0) {
                return Err(usage("--x", "must exceed 1"));
            }
            (FormulaVariant::Theorem1 { x: a.x }, a.x)
        }
        CliVariant::Theorem2 => {
            let t0 = a.t0.ok_or_else(|| usage("--t0", "required for theorem2"))?;
            let y = resolve_y(t0, a.k, a.y, false)?;
            let p = KernelParams::new(a.x, y, t0).map_err(|e| usage("--x/--y/--t0", e))?;
            (FormulaVariant::windowed(&p), a.x * y * y)
        }
    };
    let tables = tables(ctx, need)?;
    let scan = ctx.scan(None)?;
    let (arch, _) = ensure_archive(archive.or(ctx.file.archive.as_deref()), std::slice::from_ref(&chi), height, &scan)?;
    let report = residual_report(&chi, variant, &arch, height, &tables).map_err(failed)?;

    let plot = if ctx.plot {
        let mut rows = Vec::with_capacity(10);
        for i in 1..=10 {
            let h = height * f64::from(i) / 10.0;
            rows.push((h, residual_report(&chi, variant, &arch, h, &tables).map_err(failed)?.residual_scale));
        }
        Some(plot_csv("height,residual_scale", rows))
    } else {
        None
    };
    let scale = report.residual_scale;
    let passes = scale < a.max_residual;
    let out = json(&ExplicitReport { report, max_residual: a.max_residual, passes });
    Ok(Outcome { plot, ..Outcome::ok(out) }.check(passes, || format!("residual_scale {scale} >= {}", a.max_residual)))
}

fn resolve_y(t0: f64, k: Option<u32>, y: Option<f64>, off_resonance: bool) -> Result<f64, CliError> {
    if !(t0.is_finite() && t0.abs() > 1.0) {
        return Err(usage("--t0", format!("|t0| = {} must exceed 1", t0.abs())));
    }
    match (k, y) {
        (Some(k), None) if off_resonance => Ok((PI * f64::from(k + 1) / t0.abs()).exp()),
        (Some(k), None) => Ok(select_yk(t0, k)),
        (None, Some(y)) => Ok(y),
        _ => Err(usage("--k/--y", "exactly one of --k or --y is required")),
    }
}

#[derive(Serialize)]
struct CharacterFit {
    character: CharacterLabel,
    zeros: usize,
    c_fit_windows: f64,
    c_fit_discs: f64,
}

#[derive(Serialize)]
struct DensityReport {
    t_max: u32,
    tau_convention: &'static str,
    c_fit_windows: f64,
    c_fit_discs: f64,
    characters: Vec<CharacterFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tables: Option<Vec<DensityTable>>,
}

fn density(
    ctx: &Ctx,
    args: &ModuliArgs,
    t_max: u32,
    archive: Option<&Path>,
    detail: bool,
) -> Result<Outcome, CliError> {
    let format = ctx.format(Format::Json, true, "density")?;
    let height = check_height("--t-max", f64::from(t_max) + 1.0)?;
    let qs = moduli(args.q, args.q_range, args.select)?;
    let targets = primitive_targets(args, &qs)?;
    if targets.is_empty() {
        return Err(usage("--select", "no primitive non-principal characters selected"));
    }
    let scan = ctx.scan(None)?;
    let (arch, _) = ensure_archive(archive.or(ctx.file.archive.as_deref()), &targets, height, &scan)?;
    let tables =
        targets.iter().map(|c| zero_density_ratios(c, &arch, t_max).map_err(failed)).collect::<Result<Vec<_>, _>>()?;

    let fits: Vec<CharacterFit> = tables
        .iter()
        .map(|t| CharacterFit {
            character: t.character,
            zeros: arch.records(t.character).len(),
            c_fit_windows: t.c_fit_windows,
            c_fit_discs: t.c_fit_discs,
        })
        .collect();
    let c_fit_windows = fits.iter().map(|f| f.c_fit_windows).fold(0.0, f64::max);
    let c_fit_discs = fits.iter().map(|f| f.c_fit_discs).fold(0.0, f64::max);
    let finite = fits.iter().all(|f| f.c_fit_windows.is_finite() && f.c_fit_discs.is_finite());
    let plot = ctx.plot.then(|| {
        plot_csv(
            "t,max_window_ratio",
            (0..=t_max as usize).map(|i| (i as f64, tables.iter().map(|t| t.windows[i].ratio).fold(0.0, f64::max))),
        )
    });
    let report = match format {
        Format::Json => json(&DensityReport {
            t_max,
            tau_convention: tables[0].tau_convention,
            c_fit_windows,
            c_fit_discs,
            characters: fits,
            tables: detail.then_some(tables),
        }),
        Format::Csv => {
            let mut s = String::from("character,t,count,ratio\n");
            for t in &tables {
                for w in &t.windows {
                    let _ = writeln!(s, "{},{},{},{}", t.character, w.t, w.count, w.ratio);
                }
            }
            s
        }
    };
    Ok(Outcome { plot, ..Outcome::ok(report) }.check(finite, || "a fitted constant is not finite".into()))
}

#[derive(Serialize)]
struct AuditReport {
    config: AuditConfig,
    moduli: Vec<u64>,
    results: Vec<AuditResult>,
    passes: bool,
}

fn audit(
    ctx: &Ctx,
    args: &ModuliArgs,
    primes_only: bool,
    cfg: AuditConfig,
    height: Option<f64>,
    archive: Option<&Path>,
) -> Result<Outcome, CliError> {
    let format = ctx.format(Format::Json, true, "audit")?;
    cfg.validate().map_err(|e| usage("--delta/--t0/--C/--K1/--K2/--theta", e))?;
    let mut qs = moduli(args.q, args.q_range, args.select)?;
    if primes_only {
        qs.retain(|&q| q > 2 && is_prime(q));
    }
    let scan = ctx.scan(None)?;
    let path = archive.or(ctx.file.archive.as_deref());
    let mut arch = match path {
        Some(p) if p.exists() => ZeroArchive::load(p).map_err(|e| usage("--archive", e))?,
        _ => ZeroArchive::new(),
    };
    let mut results = Vec::new();
    for &q in &qs {
        let chars: Vec<Character> = args.select.pick(q)?.into_iter().filter(|c| !c.is_principal()).collect();
        if chars.is_empty() {
            continue;
        }
        let region = cfg.k1 * cfg.t0 * cfg.t0 * (q as f64).ln();
        let h = match (height, cfg.mode) {
            (Some(h), _) => h,
            (None, AuditMode::Theorem12) => ctx.file.height.unwrap_or(DEFAULT_HEIGHT),
            (None, AuditMode::Theorem13) => region,
            (None, AuditMode::Theorem13Centered) => cfg.t0.abs() + region,
        };
        let h = check_height("--height", h.min(MAX_HEIGHT))?;
        let mut targets: BTreeMap<CharacterLabel, Character> = BTreeMap::new();
        for c in &chars {
            let p = c.primitive();
            targets.insert(p.label(), p);
        }
        let targets: Vec<Character> = targets.into_values().collect();
        extend_archive(&mut arch, &targets, h, &scan).map_err(failed)?;
        results.extend(audit_bound(q, &cfg, &arch, &chars).map_err(failed)?);
    }
    if let Some(p) = path {
        arch.save(p).map_err(failed)?;
    }
    let passes = results
        .iter()
        .all(|r| r.passes != Some(false) && !matches!(r.hypothesis_status, HypothesisStatus::Violated { .. }));
    let plot = ctx.plot.then(|| {
        plot_csv("log_n_chi,bound_log", results.iter().map(|r| ((r.observed_n_chi as f64).ln(), r.bound_value_log)))
    });
    let report = match format {
        Format::Json => json(&AuditReport { config: cfg, moduli: qs, results, passes }),
        Format::Csv => audit_csv(&results),
    };
    Ok(Outcome { plot, ..Outcome::ok(report) }.check(passes, || "a character fails the audit".into()))
}

#[derive(Serialize)]
struct MainTermReport {
    #[serde(flatten)]
    check: MainTermCheck,
    x: f64,
    y: f64,
    t0: f64,
    regime: &'static str,
    passes: Option<bool>,
}

#[allow(clippy::too_many_arguments)]
fn main_term(
    ctx: &Ctx,
    q: u64,
    t0: f64,
    k: Option<u32>,
    y: Option<f64>,
    x: f64,
    off_resonance: bool,
    max_gap: f64,
) -> Result<Outcome, CliError> {
    ctx.format(Format::Json, false, "main-term")?;
    ctx.no_plot("main-term")?;
    if q == 0 {
        return Err(usage("--q", "must be positive"));
    }
    let y = resolve_y(t0, k, y, off_resonance)?;
    let p = KernelParams::new(x, y, t0).map_err(|e| usage("--x/--y/--t0", e))?;
    let tables = tables(ctx, x * y * y)?;
    let check = principal_main_term_check(q, &p, &tables).map_err(failed)?;
    let (regime, passes) = if check.sin_squared > 1.0 - 1e-9 {
        ("resonant", Some(check.relative_gap < max_gap))
    } else if check.sin_squared < 1e-9 {
        ("off_resonance", Some(check.observed.norm() < 0.5 * check.predicted))
    } else {
        ("generic", None)
    };
    let out = json(&MainTermReport { check, x, y, t0, regime, passes });
    Ok(Outcome::ok(out).check(passes != Some(false), || format!("{regime} main-term check failed")))
}
