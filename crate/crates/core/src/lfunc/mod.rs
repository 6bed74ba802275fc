//! Dirichlet L-functions: evaluation, zero location and zero archives.

mod archive;
mod hurwitz;
mod lvalue;
mod scan;
mod winding;

use num_complex::Complex64;
use thiserror::Error;

use crate::characters::{CharacterError, CharacterLabel};

pub use archive::{ArchiveCompleteness, ZeroArchive, ZeroMethod, ZeroRecord, CSV_HEADER};
pub use hurwitz::hurwitz_zeta;
pub use lvalue::{completed_l, hardy_z, l_log_derivative, l_value, LFunction, NEAR_ZERO};
pub use scan::{
    build_archive, extend_archive, scan_critical_zeros, ArchiveBuildReport, ScanConfig, ScanOutcome, MAX_HEIGHT,
    MAX_STEP,
};
pub use winding::{
    count_zeros_rectangle, localize_zeros, winding_number, winding_strict, LocalizedZero, Rectangle, WindingResult,
};

#[derive(Debug, Error)]
pub enum LfuncError {
    #[error("pole of the Hurwitz zeta function at s = {0}")]
    Pole(Complex64),
    #[error("Hurwitz shift {0} outside (0, 1]")]
    BadShift(f64),
    #[error("s = {0} outside the supported half-plane Re s > -2")]
    OutsideStrip(Complex64),
    #[error("|L(s)| = {modulus:e} at s = {s}, too close to a zero")]
    NearZero { s: Complex64, modulus: f64 },
    #[error("Z({t}) has imaginary part {im:e} (real part {re:e})")]
    PhaseInconsistency { t: f64, re: f64, im: f64 },
    #[error("boundary too close to a zero: winding stays non-integral after nudging")]
    BoundaryTooClose,
    #[error("invalid rectangle or height: {0}")]
    BadRegion(String),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error("archive line {line}: {msg}")]
    ArchiveParse { line: usize, msg: String },
    #[error("archive for {label} is complete only to height {have}, {need} requested")]
    ArchiveIncomplete { label: CharacterLabel, have: f64, need: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
