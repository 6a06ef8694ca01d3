use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use crate::error::{Error, Result};
use crate::homology::GridSpec;
use crate::measure::SignedMeasure;

/// K ∗ μ evaluated at every point of a grid, padding included, stored
/// row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionImage {
    grid: GridSpec,
    values: Vec<f64>,
    kernel: KernelSpec,
    scales: Vec<f64>,
}

impl ConvolutionImage {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn shape(&self) -> Vec<usize> {
        self.grid.shape()
    }

    pub fn value_at(&self, index: &[usize]) -> f64 {
        self.values[self.grid.flat_index(index)]
    }

    /// Rectangle-rule L² distance between two images on the same grid.
    pub fn l2_distance(&self, other: &ConvolutionImage) -> Result<f64> {
        if self.grid != other.grid || self.scales != other.scales {
            return Err(Error::param("images live on different grids"));
        }
        let weights = quadrature_weights(&self.grid, &self.scales);
        let sum: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .zip(&weights)
            .map(|((a, b), w)| (a - b) * (a - b) * w)
            .sum();
        Ok(sum.sqrt())
    }

    pub fn l2_norm(&self) -> f64 {
        let weights = quadrature_weights(&self.grid, &self.scales);
        self.values
            .iter()
            .zip(&weights)
            .map(|(a, w)| a * a * w)
            .sum::<f64>()
            .sqrt()
    }
}

/// Per-axis cell widths: each grid value owns half of each neighbouring
/// gap.
fn axis_weights(axis: &[f64], scale: f64) -> Vec<f64> {
    let k = axis.len();
    if k == 1 {
        return vec![scale];
    }
    (0..k)
        .map(|i| {
            let lo = axis[i.saturating_sub(1)];
            let hi = axis[(i + 1).min(k - 1)];
            scale * (hi - lo) / 2.0
        })
        .collect()
}

fn quadrature_weights(grid: &GridSpec, scales: &[f64]) -> Vec<f64> {
    let per_axis: Vec<Vec<f64>> = (0..grid.n())
        .map(|j| axis_weights(grid.axis(j), scales[j]))
        .collect();
    grid.indices()
        .map(|idx| idx.iter().enumerate().map(|(j, &i)| per_axis[j][i]).product())
        .collect()
}

/// K ∗ μ on `grid` with unit axis scales.
///
/// Works for every [`KernelSpec`]; the name reflects the default kernel.
pub fn gaussian_convolution(
    mu: &SignedMeasure,
    grid: &GridSpec,
    kernel: &KernelSpec,
) -> Result<ConvolutionImage> {
    gaussian_convolution_scaled(mu, grid, kernel, &vec![1.0; grid.n()])
}

/// K ∗ μ with axis `j` multiplied by `scales[j]` on both the atoms and the
/// evaluation points before the kernel is applied.
pub fn gaussian_convolution_scaled(
    mu: &SignedMeasure,
    grid: &GridSpec,
    kernel: &KernelSpec,
    scales: &[f64],
) -> Result<ConvolutionImage> {
    let n = grid.n();
    for found in [mu.n(), kernel.n(), scales.len()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    if scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::param("axis scales must be positive"));
    }
    let atoms: Vec<(Vec<f64>, f64)> = mu
        .atoms()
        .iter()
        .map(|(x, w)| (x.iter().zip(scales).map(|(a, s)| a * s).collect(), *w as f64))
        .collect();
    let strides = grid.strides();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map_init(
            || (vec![0.0; n], vec![0.0; n]),
            |(point, diff), flat| {
                let mut rest = flat;
                for j in 0..n {
                    let i = rest / strides[j];
                    rest %= strides[j];
                    point[j] = grid.axis(j)[i] * scales[j];
                }
                let mut acc = 0.0;
                for (z, w) in &atoms {
                    for j in 0..n {
                        diff[j] = point[j] - z[j];
                    }
                    acc += w * kernel.eval(diff);
                }
                acc
            },
        )
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("convolution produced a non-finite value".into()));
    }
    Ok(ConvolutionImage {
        grid: grid.clone(),
        values,
        kernel: kernel.clone(),
        scales: scales.to_vec(),
    })
}

/// Per-axis grid spacing times five, the default Gaussian bandwidth.
pub fn default_bandwidths(grid: &GridSpec) -> Vec<f64> {
    (0..grid.n())
        .map(|j| {
            let v = grid.values(j);
            let spacing = if v.len() >= 2 {
                (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64
            } else {
                grid.padding(j) - v[0]
            };
            5.0 * spacing
        })
        .collect()
}

/// Concatenates row-major flattenings of the images in the given order.
pub fn assemble_features(images: &[ConvolutionImage]) -> Result<Vec<f64>> {
    let Some(first) = images.first() else {
        return Ok(Vec::new());
    };
    let shape = first.shape();
    let mut out = Vec::with_capacity(images.len() * first.values.len());
    for (index, image) in images.iter().enumerate() {
        if image.shape() != shape {
            return Err(Error::IncompatibleMeasure {
                index,
                reason: format!("image shape {:?} differs from {:?}", image.shape(), shape),
            });
        }
        out.extend_from_slice(&image.values);
    }
    Ok(out)
}
