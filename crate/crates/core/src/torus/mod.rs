//! Fixed-point geometry of the flat torus.

pub mod bucket;
pub mod cell;
pub mod grid;
pub mod io;
pub mod net;
pub mod point;
pub mod predicates;

pub use grid::WitnessGrid;
pub use net::{estimate_net_params, generate_net, sample_in_ball, LandmarkSet, NetEstimate};
pub use point::{FixedOffset, PrecisionConfig, TorusPoint};
pub use predicates::{cmp_dist, cmp_dist_offset, sq_dist, torus_diff};
