//! Persistent store of located zeros, one sorted list per character.
//!
//! CSV layout:
//! ```text
//! character,beta,gamma,method,tolerance
//! #complete character=3.2 T=20 count=6
//! 3.2,0.5,-17.1144908301,critical_line_scan,1e-8
//! ...
//! ```
//! β and γ are stored rounded to 12 significant digits and written in
//! shortest round-trip form. Rows are sorted by (character, gamma). The metadata line, when present,
//! precedes the rows of its character and records that every zero with
//! 0 ≤ β ≤ 1 and |γ| ≤ T is stored.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use super::LfuncError;
use crate::characters::CharacterLabel;

pub const CSV_HEADER: &str = "character,beta,gamma,method,tolerance";
const SIGNIFICANT_DIGITS: i32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroMethod {
    CriticalLineScan,
    RectangleRefinement,
}

impl fmt::Display for ZeroMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZeroMethod::CriticalLineScan => "critical_line_scan",
            ZeroMethod::RectangleRefinement => "rectangle_refinement",
        })
    }
}

impl FromStr for ZeroMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "critical_line_scan" => Ok(ZeroMethod::CriticalLineScan),
            "rectangle_refinement" => Ok(ZeroMethod::RectangleRefinement),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

/// ρ = β + iγ with the uncertainty in γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub character: CharacterLabel,
    pub beta: f64,
    pub gamma: f64,
    pub method: ZeroMethod,
    pub tolerance: f64,
}

impl ZeroRecord {
    pub fn critical(character: CharacterLabel, gamma: f64, tolerance: f64) -> Self {
        Self { character, beta: 0.5, gamma, method: ZeroMethod::CriticalLineScan, tolerance }
    }

    pub fn rho(&self) -> Complex64 {
        Complex64::new(self.beta, self.gamma)
    }

    fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(format!("beta {} outside [0, 1]", self.beta));
        }
        if !self.gamma.is_finite() {
            return Err(format!("gamma {} not finite", self.gamma));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(format!("tolerance {} must be positive", self.tolerance));
        }
        if self.method == ZeroMethod::CriticalLineScan && self.beta != 0.5 {
            return Err(format!("critical_line_scan record with beta {}", self.beta));
        }
        Ok(())
    }

    fn normalized(mut self) -> Self {
        self.gamma = round_significant(self.gamma);
        self.beta = round_significant(self.beta);
        self
    }

    fn duplicates(&self, other: &ZeroRecord) -> bool {
        let tol = self.tolerance.max(other.tolerance);
        (self.gamma - other.gamma).abs() <= tol && (self.beta - other.beta).abs() <= tol
    }
}

fn format_significant(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (SIGNIFICANT_DIGITS - 1 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

fn round_significant(v: f64) -> f64 {
    format_significant(v).parse().expect("formatted float parses")
}

/// All zeros with |γ| ≤ height are stored; `count` of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArchiveCompleteness {
    pub height: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Entry {
    zeros: Vec<ZeroRecord>,
    complete: Option<ArchiveCompleteness>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ZeroArchive {
    entries: BTreeMap<CharacterLabel, Entry>,
}

impl ZeroArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.values().all(|e| e.zeros.is_empty() && e.complete.is_none())
    }

    pub fn labels(&self) -> impl Iterator<Item = CharacterLabel> + '_ {
        self.entries.keys().copied()
    }

    pub fn records(&self, label: CharacterLabel) -> &[ZeroRecord] {
        self.entries.get(&label).map_or(&[], |e| &e.zeros)
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(|e| e.zeros.len()).sum()
    }

    pub fn completeness(&self, label: CharacterLabel) -> Option<ArchiveCompleteness> {
        self.entries.get(&label).and_then(|e| e.complete)
    }

    /// Inserts after rounding β and γ to 12 significant digits. Returns false
    /// when an equal zero (within tolerance) is already present.
    pub fn insert(&mut self, record: ZeroRecord) -> Result<bool, LfuncError> {
        record.validate().map_err(|msg| LfuncError::BadRegion(format!("invalid zero record: {msg}")))?;
        let record = record.normalized();
        let entry = self.entries.entry(record.character).or_default();
        if entry.zeros.iter().any(|z| z.duplicates(&record)) {
            return Ok(false);
        }
        let pos = entry.zeros.partition_point(|z| (z.gamma, z.beta) < (record.gamma, record.beta));
        entry.zeros.insert(pos, record);
        if let Some(c) = entry.complete.as_mut() {
            if record.gamma.abs() <= c.height {
                c.count += 1;
            }
        }
        Ok(true)
    }

    /// Marks every zero with |γ| ≤ height as present.
    pub fn mark_complete(&mut self, label: CharacterLabel, height: f64) {
        let entry = self.entries.entry(label).or_default();
        let count = entry.zeros.iter().filter(|z| z.gamma.abs() <= height).count();
        entry.complete = Some(ArchiveCompleteness { height, count });
    }

    /// Zeros with |γ| ≤ height, provided the archive is complete that far.
    pub fn zeros_up_to(&self, label: CharacterLabel, height: f64) -> Result<Vec<ZeroRecord>, LfuncError> {
        let have = self.completeness(label).map_or(0.0, |c| c.height);
        if have < height {
            return Err(LfuncError::ArchiveIncomplete { label, have, need: height });
        }
        Ok(self.records(label).iter().filter(|z| z.gamma.abs() <= height).copied().collect())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for (label, entry) in &self.entries {
            if let Some(c) = entry.complete {
                writeln!(w, "#complete character={label} T={} count={}", c.height, c.count)?;
            }
            for z in &entry.zeros {
                writeln!(w, "{},{},{},{},{:e}", z.character, z.beta, z.gamma, z.method, z.tolerance)?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the CSV layout, rejecting unsorted rows, duplicates and
    /// metadata whose count disagrees with the rows.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, LfuncError> {
        let mut archive = ZeroArchive::new();
        let mut last: Option<(CharacterLabel, f64, f64)> = None;
        let mut pending_meta: Vec<(usize, CharacterLabel, f64, usize)> = Vec::new();
        let mut saw_header = false;
        for (i, line) in r.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let err = |msg: String| LfuncError::ArchiveParse { line: line_no, msg };
            let trimmed = line.trim_end_matches('\r');
            if !saw_header {
                if trimmed != CSV_HEADER {
                    return Err(err(format!("expected header {CSV_HEADER:?}")));
                }
                saw_header = true;
                continue;
            }
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("#complete ") {
                let (label, height, count) = parse_meta(rest).map_err(err)?;
                pending_meta.push((line_no, label, height, count));
                continue;
            }
            if trimmed.starts_with('#') {
                continue;
            }
            let record = parse_row(trimmed).map_err(err)?;
            let key = (record.character, record.gamma, record.beta);
            if let Some(prev) = last {
                let order = prev.0.cmp(&key.0).then(prev.1.total_cmp(&key.1)).then(prev.2.total_cmp(&key.2));
                if order.is_gt() {
                    return Err(err("rows not sorted by (character, gamma)".into()));
                }
            }
            last = Some(key);
            let stored = record.normalized();
            if stored != record {
                return Err(err("value carries more than 12 significant digits".into()));
            }
            if !archive.insert(record)? {
                return Err(err("duplicate zero".into()));
            }
        }
        if !saw_header {
            return Err(LfuncError::ArchiveParse { line: 1, msg: "missing header".into() });
        }
        for (line, label, height, count) in pending_meta {
            archive.mark_complete(label, height);
            let have = archive.completeness(label).map_or(0, |c| c.count);
            if have != count {
                return Err(LfuncError::ArchiveParse {
                    line,
                    msg: format!("metadata count {count} but {have} rows with |gamma| <= {height}"),
                });
            }
        }
        Ok(archive)
    }

    pub fn save(&self, path: &Path) -> Result<(), LfuncError> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, LfuncError> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}

fn parse_meta(rest: &str) -> Result<(CharacterLabel, f64, usize), String> {
    let mut label = None;
    let mut height = None;
    let mut count = None;
    for part in rest.split_whitespace() {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("bad metadata field {part:?}"))?;
        match k {
            "character" => label = Some(v.parse::<CharacterLabel>().map_err(|e| e.to_string())?),
            "T" => height = Some(v.parse::<f64>().map_err(|e| format!("T: {e}"))?),
            "count" => count = Some(v.parse::<usize>().map_err(|e| format!("count: {e}"))?),
            other => return Err(format!("unknown metadata key {other:?}")),
        }
    }
    match (label, height, count) {
        (Some(l), Some(h), Some(c)) if h.is_finite() && h >= 0.0 => Ok((l, h, c)),
        _ => Err("metadata needs character, T >= 0 and count".into()),
    }
}

fn parse_row(line: &str) -> Result<ZeroRecord, String> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 5 {
        return Err(format!("expected 5 fields, got {}", fields.len()));
    }
    let num = |name: &str, v: &str| v.parse::<f64>().map_err(|e| format!("{name}: {e}"));
    let record = ZeroRecord {
        character: fields[0].parse().map_err(|e: crate::characters::CharacterError| e.to_string())?,
        beta: num("beta", fields[1])?,
        gamma: num("gamma", fields[2])?,
        method: fields[3].parse()?,
        tolerance: num("tolerance", fields[4])?,
    };
    record.validate()?;
    Ok(record)
}
