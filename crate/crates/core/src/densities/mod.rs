//! Probability densities on the half-line and λ-indexed families.

mod density;
mod diagnostics;
mod family;
mod generator;

pub use density::{log_variation_grid, Density, LogVariation, Tabulated, QUAD_TOL, QUANTILE_TOL};
pub use diagnostics::{
    escape_diagnostic, flatness_diagnostic, regularity_diagnostic, DiagnosticRow, EscapeReport, FlatnessReport,
    RegularityReport, ESCAPE_TOL, FLAT_TOL, REGULARITY_CAP,
};
pub use family::{Decomposition, DensityFamily, FamilyClaims, FamilyKind, DECOMPOSITION_TOL};
pub use generator::{Generator, GeneratorTable};
