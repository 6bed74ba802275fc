//! Explicit-formula checks, zero-sum estimates, density ratios and bound
//! audits built on the character, kernel and L-function layers.

mod audit;
mod density;
mod formula;

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arithmetic::ArithError;
use crate::characters::CharacterError;
use crate::kernel::KernelError;
use crate::lfunc::LfuncError;

pub use audit::{
    audit_bound, audit_csv, principal_main_term_check, AuditConfig, AuditMode, AuditResult, HypothesisStatus,
    MainTermCheck, AUDIT_CSV_HEADER,
};
pub use density::{
    inverse_square_zero_sum, zero_density_ratios, DensityTable, DiscRow, InverseSquareMode, InverseSquareSum, WindowRow,
};
pub use formula::{
    residual_report, theorem1_summand, theorem1_trivial_term, windowed_weighted_sum, zero_side_theorem1,
    zero_side_theorem2, FormulaReport, FormulaVariant,
};

#[derive(Debug, Error)]
pub enum ExplicitError {
    #[error(transparent)]
    Lfunc(#[from] LfuncError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error("{0}")]
    BadInput(String),
}

/// Serializes a complex number as `{"re": .., "im": ..}`.
pub fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Parts {
        re: f64,
        im: f64,
    }
    Parts { re: z.re, im: z.im }.serialize(s)
}
