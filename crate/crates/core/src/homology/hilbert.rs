use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::FieldSpec;
use super::grid::GridSpec;
use super::reduction::{barcodes, BoundaryData, Barcode};
use crate::error::{Error, Result};
use crate::simplicial::FilteredComplex;

/// Pointwise dimension of homology modules sampled on a padded grid, one
/// row-major array per homology degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HilbertFunction {
    grid: GridSpec,
    degrees: Vec<usize>,
    values: Vec<Vec<i64>>,
}

impl HilbertFunction {
    /// Wraps precomputed arrays. Entries must be non-negative and zero on
    /// every padding slice.
    pub fn from_values(grid: GridSpec, degrees: Vec<usize>, values: Vec<Vec<i64>>) -> Result<Self> {
        if degrees.len() != values.len() {
            return Err(Error::LengthMismatch {
                what: "hilbert arrays",
                expected: degrees.len(),
                found: values.len(),
            });
        }
        for arr in &values {
            if arr.len() != grid.len() {
                return Err(Error::LengthMismatch {
                    what: "hilbert array",
                    expected: grid.len(),
                    found: arr.len(),
                });
            }
            for (f, &v) in arr.iter().enumerate() {
                if v < 0 {
                    return Err(Error::param("hilbert function entries must be non-negative"));
                }
                if v != 0 && grid.is_padding(&grid.unflatten(f)) {
                    return Err(Error::param("hilbert function must vanish on padding"));
                }
            }
        }
        Ok(HilbertFunction {
            grid,
            degrees,
            values,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn get(&self, degree: usize) -> Result<&[i64]> {
        self.degrees
            .iter()
            .position(|&d| d == degree)
            .map(|k| self.values[k].as_slice())
            .ok_or(Error::MissingDegree(degree))
    }

    pub fn value_at(&self, degree: usize, index: &[usize]) -> Result<i64> {
        Ok(self.get(degree)?[self.grid.flat_index(index)])
    }
}

fn fiber_entries(
    c: &FilteredComplex,
    grid: &GridSpec,
    sweep: usize,
    fiber: &[usize],
) -> Vec<Option<f64>> {
    let thresholds: Vec<(usize, f64)> = (0..c.n_parameters())
        .filter(|&j| j != sweep)
        .zip(fiber)
        .map(|(j, &a)| (j, grid.axis(j)[a]))
        .collect();
    c.values()
        .iter()
        .map(|v| {
            let x = v.coords();
            thresholds
                .iter()
                .all(|&(j, r)| x[j] <= r)
                .then_some(x[sweep])
        })
        .collect()
}

fn check_grid(c: &FilteredComplex, grid: &GridSpec) -> Result<()> {
    if grid.n() != c.n_parameters() {
        return Err(Error::DimensionMismatch {
            expected: c.n_parameters(),
            found: grid.n(),
        });
    }
    Ok(())
}

/// Barcode of the module restricted to the line through the grid fiber
/// `fiber`, swept along the last axis. A simplex enters the fiber at its
/// last coordinate if every other coordinate is below the fiber's grid
/// value; otherwise it is omitted.
pub fn fiber_barcode(
    c: &FilteredComplex,
    grid: &GridSpec,
    fiber: &[usize],
    degree: usize,
    field: FieldSpec,
) -> Result<Barcode> {
    check_grid(c, grid)?;
    let sweep = c.n_parameters() - 1;
    if fiber.len() != sweep {
        return Err(Error::DimensionMismatch {
            expected: sweep,
            found: fiber.len(),
        });
    }
    for (j, &a) in fiber.iter().enumerate() {
        if a >= grid.axis(j).len() {
            return Err(Error::param(format!("fiber index {a} out of range on axis {j}")));
        }
    }
    let data = BoundaryData::new(c);
    let entry = fiber_entries(c, grid, sweep, fiber);
    Ok(barcodes(&data, &entry, &[degree], field).remove(0))
}

/// Hilbert function of `H_i` for each requested degree, by one-parameter
/// reduction along every fiber parallel to the last axis.
pub fn hilbert_function(
    c: &FilteredComplex,
    degrees: &[usize],
    grid: &GridSpec,
    field: FieldSpec,
) -> Result<HilbertFunction> {
    hilbert_function_along(c, degrees, grid, field, c.n_parameters() - 1)
}

/// As [`hilbert_function`], sweeping along `sweep_axis`. The result does
/// not depend on the axis.
pub fn hilbert_function_along(
    c: &FilteredComplex,
    degrees: &[usize],
    grid: &GridSpec,
    field: FieldSpec,
    sweep_axis: usize,
) -> Result<HilbertFunction> {
    check_grid(c, grid)?;
    let n = c.n_parameters();
    if sweep_axis >= n {
        return Err(Error::param(format!("sweep axis {sweep_axis} out of range")));
    }
    let mut degrees = degrees.to_vec();
    degrees.sort_unstable();
    degrees.dedup();

    let other_axes: Vec<usize> = (0..n).filter(|&j| j != sweep_axis).collect();
    let fiber_shape: Vec<usize> = other_axes.iter().map(|&j| grid.resolution(j)).collect();
    let fiber_count: usize = fiber_shape.iter().product();
    let k_sweep = grid.resolution(sweep_axis);
    let sweep_values = grid.values(sweep_axis);
    let data = BoundaryData::new(c);

    let fiber_index = |mut f: usize| -> Vec<usize> {
        let mut idx = vec![0; fiber_shape.len()];
        for j in (0..fiber_shape.len()).rev() {
            idx[j] = f % fiber_shape[j];
            f /= fiber_shape[j];
        }
        idx
    };

    // counts[degree][b] along each fiber line
    let lines: Vec<Vec<Vec<i64>>> = (0..fiber_count)
        .into_par_iter()
        .map(|f| {
            let fiber = fiber_index(f);
            let entry = fiber_entries(c, grid, sweep_axis, &fiber);
            barcodes(&data, &entry, &degrees, field)
                .into_iter()
                .map(|bc| {
                    let mut diff = vec![0i64; k_sweep + 1];
                    for bar in &bc.bars {
                        let start = sweep_values.partition_point(|&r| r < bar.birth);
                        let end = sweep_values.partition_point(|&r| r < bar.death);
                        if start < end {
                            diff[start] += 1;
                            diff[end] -= 1;
                        }
                    }
                    let mut acc = 0;
                    diff[..k_sweep]
                        .iter()
                        .map(|d| {
                            acc += d;
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let strides = grid.strides();
    let mut values = vec![vec![0i64; grid.len()]; degrees.len()];
    for (f, line) in lines.into_iter().enumerate() {
        let fiber = fiber_index(f);
        let base: usize = other_axes
            .iter()
            .zip(&fiber)
            .map(|(&j, &a)| a * strides[j])
            .sum();
        for (k, counts) in line.into_iter().enumerate() {
            for (b, v) in counts.into_iter().enumerate() {
                values[k][base + b * strides[sweep_axis]] = v;
            }
        }
    }
    Ok(HilbertFunction {
        grid: grid.clone(),
        degrees,
        values,
    })
}
