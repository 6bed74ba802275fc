//! Dirichlet characters, numerical L-functions and explicit-formula checks
//! for conditional bounds on the least character non-residue.

pub mod arithmetic;
pub mod characters;
pub mod explicit;
pub mod kernel;
pub mod lfunc;
pub mod numeric;
pub mod par;

pub use characters::{Character, CharacterLabel};
pub use num_complex::Complex64;
