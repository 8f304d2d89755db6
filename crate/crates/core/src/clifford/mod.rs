//! Blade-basis arithmetic in the complexified Clifford algebra of an even
//! signature, together with admissible real structures.

pub mod blade;
pub mod format;
pub mod multivector;
pub mod real_structure;
mod signature;

pub use blade::{blade_product, BladeIndex};
pub use multivector::{geometric_product, volume_element, Multivector};
pub use real_structure::AdmissibleRealStructure;
pub use signature::{Signature, MAX_DIM};
