//! Signed-measure descriptors for multiparameter persistent homology.
//!
//! The pipeline turns a filtered simplicial complex into a Hilbert (or
//! Euler) decomposition signed measure on a finite grid, and then into
//! vectors that are Lipschitz-stable with respect to the
//! Kantorovich–Rubinstein distance:
//!
//! ```text
//! point cloud / graph ─► FilteredComplex ─► HilbertFunction ─► SignedMeasure
//!                                                                 │
//!                        sliced Wasserstein Gram ◄────────────────┤
//!                        Gaussian convolution image ◄─────────────┘
//! ```
//!
//! * [`simplicial`] builds Rips, function-Rips and lower-star filtrations.
//! * [`homology`] runs one-parameter column reduction over ℤ/pℤ along grid
//!   fibers to assemble Hilbert functions.
//! * [`measure`] extracts signed measures by Möbius inversion.
//! * [`transport`] computes exact Kantorovich–Rubinstein distances and the
//!   sliced Wasserstein kernel.
//! * [`vectorize`] convolves measures with Gaussian or tent kernels.
//! * [`io`] reads and writes the on-disk formats.

pub mod error;
pub mod homology;
pub mod io;
pub mod measure;
pub mod simplicial;
pub mod transport;
pub mod vectorize;

pub use error::{Error, Result};
pub use homology::{
    fiber_barcode, hilbert_function, hilbert_function_along, make_grid, Bar, Barcode, FieldSpec,
    GridSpec, HilbertFunction,
};
pub use measure::{
    barcode_to_signed_measure, cumulative_at, euler_signed_measure, hilbert_signed_measure,
    SignedMeasure,
};
pub use simplicial::{
    build_function_rips, build_rips, lower_star_multifiltration, validate_complex,
    vertex_descriptor, AttributedGraph, AxisSource, Descriptor, FilteredComplex, FiltrationValue,
    PointCloud, Simplex,
};
pub use transport::{
    brute_force_kr, kr_distance, kr_distance_1d, push_forward, sliced_wasserstein, sw_gram,
    GramMatrix, GroundNorm, SwConfig,
};
pub use vectorize::{assemble_features, gaussian_convolution, ConvolutionImage, KernelSpec};
