//! Maps between manifolds sampled on chart grids, with their Sobolev
//! energies and distances.

pub mod checks;
pub mod distance;
pub mod grid;
pub mod io;
pub mod map;

pub use distance::{measure_distance, sobolev_distance, sobolev_energy, DistanceKind, DistanceValue};
pub use grid::Grid;
pub use map::{DerivativeField, SampledMap};
