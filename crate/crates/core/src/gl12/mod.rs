//! Spectrum machinery specialized to the (1|2) local space: scalar fusion
//! towers over candidate node values, spectrum solvers (direct
//! diagonalization, closure-equation Newton hunts, the cubic system of the
//! distinguished singular twist), functional Q-equations, Bethe-root
//! extraction, and the companion three-boson chain carrying the same
//! spectrum.

pub mod bethe;
pub mod gl3;
pub mod qsc;
pub mod reference;
pub mod solver;
pub mod tower;

use crate::graded::Signature;
use crate::{Error, Result};

/// The (1|2) signature.
pub fn sig() -> Signature {
    Signature::new(1, 2).expect("(1|2) is a valid signature")
}

/// Guard helper: many routines below are specific to the (1|2) local space.
pub(crate) fn require_gl12(s: Signature) -> Result<()> {
    if s != sig() {
        return Err(Error::Argument(format!(
            "this routine is specific to the (1|2) chain, got ({}|{})",
            s.m, s.n
        )));
    }
    Ok(())
}
