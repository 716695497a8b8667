//! Relaxed Delaunay complexes computed through per-simplex pyramids.

mod algo;
pub mod pyramid;
pub mod relaxed;

pub use algo::{resolve_targets, run_algorithm2, RdcConfig, RdcEvents};
pub use pyramid::{enclosing_box, is_full_cell, pyramid_full_cells, scan_full_leaves, FullCellResult, Pyramid, PyramidCell};
pub use relaxed::{build_rdc0, check_vertex, is_alpha_witness, is_protected_point, RdcParams, RdcStats, RelaxedBuilder};

#[cfg(test)]
mod tests;
