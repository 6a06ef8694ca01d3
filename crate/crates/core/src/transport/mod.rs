//! Kantorovich–Rubinstein distances and the sliced Wasserstein kernel.

mod flow;
mod kr;
mod sliced;

pub use flow::{solve_transport, TransportPlan};
pub use kr::{brute_force_kr, kr_distance, kr_distance_1d, kr_norm, GroundNorm, BRUTE_FORCE_LIMIT};
pub use sliced::{push_forward, sliced_wasserstein, sw_distance_matrix, sw_gram, GramMatrix, SwConfig};
