use rayon::prelude::*;

use super::complex::{AxisSource, FilteredComplex, FiltrationValue, Simplex};
use crate::error::{Error, Result};

/// A finite set of points in ℝᵈ with the Euclidean metric.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if !points.is_empty() && dim == 0 {
            return Err(Error::param("points must have at least one coordinate"));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|x| x.is_nan()) {
                return Err(Error::param("point cloud contains NaN"));
            }
        }
        Ok(PointCloud { dim, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(&self.points[i], &self.points[j])
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Edges of the threshold graph as upper-neighbor lists with lengths.
fn threshold_graph(cloud: &PointCloud, max_edge_length: f64) -> Vec<Vec<(u32, f64)>> {
    let n = cloud.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .filter_map(|j| {
                    let d = cloud.distance(i, j);
                    (d <= max_edge_length).then_some((j as u32, d))
                })
                .collect()
        })
        .collect()
}

fn check_params(cloud: &PointCloud, max_edge_length: f64) -> Result<()> {
    if cloud.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(max_edge_length > 0.0) {
        return Err(Error::param("max_edge_length must be positive"));
    }
    Ok(())
}

/// Cliques of the threshold graph up to `max_dim`, each with its diameter.
fn clique_expansion(
    cloud: &PointCloud,
    max_edge_length: f64,
    max_dim: usize,
) -> Vec<(Vec<u32>, f64)> {
    let upper = threshold_graph(cloud, max_edge_length);
    let n = cloud.len();
    let adjacent = |a: u32, b: u32| -> Option<f64> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let row = &upper[lo as usize];
        row.binary_search_by_key(&hi, |&(v, _)| v)
            .ok()
            .map(|k| row[k].1)
    };

    // Each clique is grown from its smallest vertex by adding larger common
    // neighbours, so every clique is produced exactly once.
    let per_vertex: Vec<Vec<(Vec<u32>, f64)>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut out = vec![(vec![v as u32], 0.0)];
            if max_dim == 0 {
                return out;
            }
            let mut stack: Vec<(Vec<u32>, f64, Vec<u32>)> = vec![(
                vec![v as u32],
                0.0,
                upper[v].iter().map(|&(u, _)| u).collect(),
            )];
            while let Some((clique, diam, candidates)) = stack.pop() {
                for (ci, &u) in candidates.iter().enumerate() {
                    let mut new_diam = diam;
                    for &w in &clique {
                        new_diam = new_diam.max(adjacent(w, u).expect("candidate is a common neighbour"));
                    }
                    let mut next = clique.clone();
                    next.push(u);
                    if next.len() <= max_dim {
                        let rest: Vec<u32> = candidates[ci + 1..]
                            .iter()
                            .copied()
                            .filter(|&x| adjacent(u, x).is_some())
                            .collect();
                        stack.push((next.clone(), new_diam, rest));
                    }
                    out.push((next, new_diam));
                }
            }
            out
        })
        .collect();
    per_vertex.into_iter().flatten().collect()
}

/// Vietoris–Rips complex: every clique of the `max_edge_length` threshold
/// graph up to dimension `max_dim`, filtered by diameter.
pub fn build_rips(
    cloud: &PointCloud,
    max_edge_length: f64,
    max_dim: usize,
) -> Result<FilteredComplex> {
    check_params(cloud, max_edge_length)?;
    let entries = clique_expansion(cloud, max_edge_length, max_dim)
        .into_iter()
        .map(|(v, d)| (Simplex::from_sorted(v), FiltrationValue(vec![d])))
        .collect();
    FilteredComplex::from_parts_unchecked(1, cloud.len(), entries)?
        .with_axes(vec![AxisSource::SimplexDiameter])
}

/// Function-Rips bifiltration: `(diameter, -min vertex value)`.
pub fn build_function_rips(
    cloud: &PointCloud,
    vertex_values: &[f64],
    max_edge_length: f64,
    max_dim: usize,
) -> Result<FilteredComplex> {
    if vertex_values.len() != cloud.len() {
        return Err(Error::LengthMismatch {
            what: "vertex_values",
            expected: cloud.len(),
            found: vertex_values.len(),
        });
    }
    check_params(cloud, max_edge_length)?;
    if vertex_values.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("vertex values must be finite"));
    }
    let entries = clique_expansion(cloud, max_edge_length, max_dim)
        .into_iter()
        .map(|(v, d)| {
            let lowest = v
                .iter()
                .map(|&i| vertex_values[i as usize])
                .fold(f64::INFINITY, f64::min);
            (Simplex::from_sorted(v), FiltrationValue(vec![d, -lowest]))
        })
        .collect();
    FilteredComplex::from_parts_unchecked(2, cloud.len(), entries)?
        .with_axes(vec![AxisSource::SimplexDiameter, AxisSource::VertexFunction])
}
