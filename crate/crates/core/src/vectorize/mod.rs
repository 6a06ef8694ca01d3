//! Kernel convolutions of signed measures evaluated on grids.

mod convolution;
mod kernel;

pub use convolution::{
    assemble_features, default_bandwidths, gaussian_convolution, gaussian_convolution_scaled,
    ConvolutionImage,
};
pub use kernel::{ball_volume, KernelSpec};
