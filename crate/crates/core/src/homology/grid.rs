use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplicial::{AxisSource, FilteredComplex};

/// Which simplices fed the percentile computation of an axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PercentileSource {
    Vertices,
    AllSimplices,
    Explicit,
}

/// A finite product grid. Each axis lists its strictly increasing grid
/// values followed by one padding value; the Hilbert function is forced to
/// zero on every padding slice so signed measures have total mass zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    axes: Vec<Vec<f64>>,
    beta: Option<f64>,
    sources: Vec<PercentileSource>,
}

impl GridSpec {
    /// Grid from explicit axis values; the last value of each axis is the
    /// padding coordinate.
    pub fn from_axes(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::param("grid needs at least one axis"));
        }
        for (j, axis) in axes.iter().enumerate() {
            if axis.len() < 2 {
                return Err(Error::param(format!(
                    "grid axis {j} needs at least one value plus padding"
                )));
            }
            if axis.iter().any(|x| !x.is_finite()) || axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::param(format!(
                    "grid axis {j} must be finite and strictly increasing"
                )));
            }
        }
        let sources = vec![PercentileSource::Explicit; axes.len()];
        Ok(GridSpec {
            axes,
            beta: None,
            sources,
        })
    }

    /// Grid whose axes are the given values (deduplicated and sorted) with
    /// padding placed by the usual `1.1 · span` rule. Every value lands
    /// exactly on a grid point, so nothing is snapped.
    pub fn exact(values_per_axis: Vec<Vec<f64>>) -> Result<Self> {
        let axes = values_per_axis
            .into_iter()
            .map(|mut v| {
                v.retain(|x| x.is_finite());
                v.sort_by(f64::total_cmp);
                v.dedup();
                if v.is_empty() {
                    v.push(0.0);
                }
                let lo = v[0];
                let hi = *v.last().unwrap();
                let pad = if hi > lo {
                    padding_value(lo, hi)
                } else {
                    lo + 1.0
                };
                v.push(pad);
                v
            })
            .collect();
        GridSpec::from_axes(axes)
    }

    pub fn n(&self) -> usize {
        self.axes.len()
    }

    /// All values of axis `j`, padding included.
    pub fn axis(&self, j: usize) -> &[f64] {
        &self.axes[j]
    }

    /// Non-padding values of axis `j`.
    pub fn values(&self, j: usize) -> &[f64] {
        let a = &self.axes[j];
        &a[..a.len() - 1]
    }

    pub fn padding(&self, j: usize) -> f64 {
        *self.axes[j].last().unwrap()
    }

    /// Index of the padding coordinate on axis `j` (= its resolution k).
    pub fn resolution(&self, j: usize) -> usize {
        self.axes[j].len() - 1
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn sources(&self) -> &[PercentileSource] {
        &self.sources
    }

    /// Shape of the padded array, `(k_j + 1)` per axis.
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major strides of the padded array.
    pub fn strides(&self) -> Vec<usize> {
        let shape = self.shape();
        let mut strides = vec![1; shape.len()];
        for j in (0..shape.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * shape[j + 1];
        }
        strides
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(self.strides())
            .map(|(&i, s)| i * s)
            .sum()
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let shape = self.shape();
        let mut idx = vec![0; shape.len()];
        for j in (0..shape.len()).rev() {
            idx[j] = flat % shape[j];
            flat /= shape[j];
        }
        idx
    }

    pub fn point(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .enumerate()
            .map(|(j, &i)| self.axes[j][i])
            .collect()
    }

    pub fn is_padding(&self, index: &[usize]) -> bool {
        index
            .iter()
            .enumerate()
            .any(|(j, &i)| i == self.resolution(j))
    }

    /// Smallest non-padding index whose value is `>= x`, or the padding
    /// index when `x` exceeds every grid value.
    pub fn snap_index(&self, j: usize, x: f64) -> usize {
        self.values(j).partition_point(|&r| r < x)
    }

    pub fn snap_point(&self, x: &[f64]) -> Vec<usize> {
        x.iter().enumerate().map(|(j, &v)| self.snap_index(j, v)).collect()
    }

    /// Iterator over all multi-indices in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(move |f| self.unflatten(f))
    }
}

fn padding_value(lo: f64, hi: f64) -> f64 {
    1.1 * (hi - lo) + lo
}

/// Percentile with linear interpolation between order statistics.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Uniform grid with `k` values per axis between the `beta` and `1 - beta`
/// percentiles, plus padding.
///
/// Lower-star style axes take percentiles over vertex values. Rips
/// diameter axes take them over all simplices, since every vertex sits at 0
/// there.
pub fn make_grid(c: &FilteredComplex, k: usize, beta: f64) -> Result<GridSpec> {
    if k < 2 {
        return Err(Error::param("grid resolution must be at least 2"));
    }
    if !(0.0..0.5).contains(&beta) {
        return Err(Error::param("beta must lie in [0, 0.5)"));
    }
    if c.vertex_count() == 0 || c.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut axes = Vec::with_capacity(c.n_parameters());
    let mut sources = Vec::with_capacity(c.n_parameters());
    for j in 0..c.n_parameters() {
        let (source, mut vals): (PercentileSource, Vec<f64>) = match c.axes()[j] {
            AxisSource::VertexFunction => (
                PercentileSource::Vertices,
                c.iter()
                    .filter(|(s, _)| s.dim() == 0)
                    .map(|(_, v)| v.coords()[j])
                    .collect(),
            ),
            AxisSource::SimplexDiameter => (
                PercentileSource::AllSimplices,
                c.values().iter().map(|v| v.coords()[j]).collect(),
            ),
        };
        vals.sort_by(f64::total_cmp);
        let mut lo = percentile(&vals, beta);
        let mut hi = percentile(&vals, 1.0 - beta);
        if hi <= lo {
            let mid = lo;
            lo = mid - 0.5;
            hi = mid + 0.5;
        }
        let mut axis: Vec<f64> = (0..k)
            .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
            .collect();
        axis[k - 1] = hi;
        axis.push(padding_value(lo, hi));
        axes.push(axis);
        sources.push(source);
    }
    let mut g = GridSpec::from_axes(axes)?;
    g.beta = Some(beta);
    g.sources = sources;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{FiltrationValue, Simplex};

    fn vertices_only(vals: &[f64]) -> FilteredComplex {
        FilteredComplex::new(
            1,
            vals.len(),
            vals.iter()
                .enumerate()
                .map(|(i, &x)| (Simplex::vertex(i as u32), FiltrationValue(vec![x])))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn percentile_clipping() {
        let vals: Vec<f64> = (0..=100).map(f64::from).collect();
        let g = make_grid(&vertices_only(&vals), 2, 0.01).unwrap();
        let axis = g.axis(0);
        assert_eq!(axis.len(), 3);
        assert!((axis[0] - 1.0).abs() < 1e-12);
        assert!((axis[1] - 99.0).abs() < 1e-12);
        assert!((axis[2] - 108.8).abs() < 1e-12);
    }

    #[test]
    fn degenerate_axis_widens() {
        let g = make_grid(&vertices_only(&[5.0, 5.0, 5.0]), 3, 0.1).unwrap();
        assert_eq!(g.values(0), &[4.5, 5.0, 5.5]);
        assert!((g.padding(0) - (1.1 * 1.0 + 4.5)).abs() < 1e-12);
    }

    #[test]
    fn beta_zero_spans_min_max() {
        let g = make_grid(&vertices_only(&[3.0, -1.0, 7.0, 2.0]), 5, 0.0).unwrap();
        assert_eq!(g.values(0)[0], -1.0);
        assert_eq!(g.values(0)[4], 7.0);
    }

    #[test]
    fn preconditions() {
        let c = vertices_only(&[0.0, 1.0]);
        assert!(make_grid(&c, 1, 0.0).is_err());
        assert!(make_grid(&c, 2, 0.5).is_err());
        assert!(make_grid(&FilteredComplex::empty(1), 2, 0.0).is_err());
    }

    #[test]
    fn snapping_is_a_ceiling() {
        let g = GridSpec::from_axes(vec![vec![0.0, 1.0, 2.0, 9.0]]).unwrap();
        assert_eq!(g.snap_index(0, -5.0), 0);
        assert_eq!(g.snap_index(0, 0.0), 0);
        assert_eq!(g.snap_index(0, 0.5), 1);
        assert_eq!(g.snap_index(0, 2.0), 2);
        assert_eq!(g.snap_index(0, 2.5), 3);
    }

    #[test]
    fn flat_indexing_round_trips() {
        let g = GridSpec::from_axes(vec![vec![0.0, 1.0, 2.0], vec![0.0, 5.0]]).unwrap();
        assert_eq!(g.shape(), vec![3, 2]);
        for f in 0..g.len() {
            assert_eq!(g.flat_index(&g.unflatten(f)), f);
        }
        assert!(g.is_padding(&[0, 1]));
        assert!(!g.is_padding(&[1, 0]));
    }
}
