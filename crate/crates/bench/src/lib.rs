//! Fixtures shared by the benchmarks.

use tauberlab_core::densities::{DensityFamily, Generator};
use tauberlab_core::games::{bundled, GameModel};

/// Bundled models plus a few seeded random ones.
pub fn models() -> Vec<GameModel> {
    let mut v = bundled::all_bundled();
    v.extend([3, 11, 42].map(bundled::random));
    v
}

pub fn families() -> Vec<DensityFamily> {
    vec![
        DensityFamily::cesaro(),
        DensityFamily::exponential(),
        DensityFamily::generated("gen:affine:1:1", Generator::Affine { intercept: 1.0, slope: 1.0 }).unwrap(),
        DensityFamily::generated("gen:sinsq:1:1", Generator::SinSquared { amp: 1.0, freq: 1.0 }).unwrap(),
    ]
}

pub const LAMBDAS: [f64; 3] = [1e-2, 1e-3, 1e-4];
