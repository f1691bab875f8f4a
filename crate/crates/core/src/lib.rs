//! Strict ω-categories of pasting diagrams, cubical ω-categories with
//! connections, and the functors between them, on finite instances.

pub mod analysis;
pub mod cubical_core;
pub mod equivalence;
pub mod folding;
pub mod gamma;
pub mod nerve;
pub mod omega_pasting;
pub mod path_complex;
pub mod report;
pub mod standard_morphisms;
pub mod tensor_hom;

pub use path_complex::{Cell, CellSet, PathProduct, Sign};
pub use report::{Check, Report};
