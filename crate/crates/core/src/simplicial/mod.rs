//! Filtered simplicial complexes and the constructors that produce them.

mod complex;
mod descriptors;
mod graph;
mod rips;
mod validate;

pub use complex::{AxisSource, FilteredComplex, FiltrationValue, Simplex};
pub use descriptors::{vertex_descriptor, Descriptor, DescriptorInput, DescriptorValues};
pub use graph::{lower_star_from_values, lower_star_multifiltration, AttributedGraph};
pub use rips::{build_function_rips, build_rips, PointCloud};
pub use validate::{validate_complex, ValidationReport, Violation};
