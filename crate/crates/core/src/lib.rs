//! Complex Clifford algebras of even signature, their spinor modules and
//! Krein products, real structures and Wick rotation, charge conjugation and
//! KO signs, flat lattice Dirac operators and algebraic spinors.

pub mod clifford;
pub mod detect;
pub mod error;
pub mod ideals;
pub mod lattice;
pub mod linalg;
pub mod sample;
pub mod spinor;
pub mod verify;

pub use clifford::{AdmissibleRealStructure, BladeIndex, Multivector, Signature};
pub use error::{Error, Result};
