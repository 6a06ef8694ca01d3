//! Persistence barcodes and Hilbert functions.
//!
//! Multiparameter Hilbert functions are assembled from one-parameter
//! persistence: for each grid line parallel to the sweep axis the complex is
//! restricted to that line and reduced as an ordinary filtration. The fibers
//! are independent and run in parallel on the current rayon pool.

mod field;
mod grid;
mod hilbert;
mod reduction;

pub use field::FieldSpec;
pub use grid::{make_grid, percentile, GridSpec, PercentileSource};
pub use hilbert::{fiber_barcode, hilbert_function, hilbert_function_along, HilbertFunction};
pub use reduction::{Bar, Barcode};
