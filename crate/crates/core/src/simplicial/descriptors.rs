use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::graph::{bfs, AttributedGraph};
use super::rips::{euclidean, PointCloud};
use crate::error::{Error, Result};

/// Per-vertex functions used as filtration axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Descriptor {
    /// Graph degree.
    Degree,
    /// Closeness centrality; harmonic closeness on disconnected graphs.
    Closeness,
    /// Heat kernel signature at time `t` of the unnormalized Laplacian.
    Hks { t: f64 },
    /// Negated Gaussian kernel density estimate.
    KdeCodensity { bandwidth: f64 },
    /// Distance to measure: mean distance to the ⌈mass·N⌉ nearest points.
    Dtm { mass: f64 },
}

#[derive(Clone, Copy, Debug)]
pub enum DescriptorInput<'a> {
    Cloud(&'a PointCloud),
    Graph(&'a AttributedGraph),
}

/// Descriptor values plus the convention that produced them, when the
/// descriptor has more than one.
#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorValues {
    pub values: Vec<f64>,
    pub convention: Option<&'static str>,
}

impl DescriptorValues {
    fn plain(values: Vec<f64>) -> Self {
        DescriptorValues {
            values,
            convention: None,
        }
    }
}

pub fn vertex_descriptor(input: DescriptorInput<'_>, kind: Descriptor) -> Result<DescriptorValues> {
    match (kind, input) {
        (Descriptor::Degree, DescriptorInput::Graph(g)) => Ok(DescriptorValues::plain(
            g.adjacency().iter().map(|a| a.len() as f64).collect(),
        )),
        (Descriptor::Closeness, DescriptorInput::Graph(g)) => Ok(closeness(g)),
        (Descriptor::Hks { t }, DescriptorInput::Graph(g)) => {
            if !(t > 0.0) {
                return Err(Error::param("heat kernel time must be positive"));
            }
            heat_kernel_signature(g, t)
        }
        (Descriptor::KdeCodensity { bandwidth }, DescriptorInput::Cloud(c)) => {
            if !(bandwidth > 0.0) {
                return Err(Error::param("bandwidth must be positive"));
            }
            Ok(DescriptorValues::plain(kde_codensity(c, bandwidth)))
        }
        (Descriptor::Dtm { mass }, DescriptorInput::Cloud(c)) => {
            if !(mass > 0.0 && mass <= 1.0) {
                return Err(Error::param("dtm mass must lie in (0, 1]"));
            }
            Ok(DescriptorValues::plain(dtm(c, mass)))
        }
        (kind, DescriptorInput::Cloud(_)) => Err(Error::param(format!(
            "{kind:?} needs a graph; build a neighbourhood graph first"
        ))),
        (kind, DescriptorInput::Graph(_)) => {
            Err(Error::param(format!("{kind:?} needs a point cloud")))
        }
    }
}

fn closeness(g: &AttributedGraph) -> DescriptorValues {
    let adj = g.adjacency();
    let n = adj.len();
    let all: Vec<Vec<Option<usize>>> = (0..n).map(|v| bfs(&adj, v)).collect();
    let connected = all
        .first()
        .is_none_or(|row| row.iter().all(Option::is_some));
    if connected {
        let values = all
            .iter()
            .map(|row| {
                let total: usize = row.iter().map(|d| d.unwrap()).sum();
                if total == 0 {
                    0.0
                } else {
                    (n - 1) as f64 / total as f64
                }
            })
            .collect();
        DescriptorValues {
            values,
            convention: Some("closeness"),
        }
    } else {
        let values = all
            .iter()
            .map(|row| {
                row.iter()
                    .filter_map(|d| d.filter(|&d| d > 0).map(|d| 1.0 / d as f64))
                    .sum()
            })
            .collect();
        DescriptorValues {
            values,
            convention: Some("harmonic closeness"),
        }
    }
}

fn heat_kernel_signature(g: &AttributedGraph, t: f64) -> Result<DescriptorValues> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(DescriptorValues::plain(Vec::new()));
    }
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in g.edges() {
        let (u, v) = (u as usize, v as usize);
        lap[(u, v)] -= 1.0;
        lap[(v, u)] -= 1.0;
        lap[(u, u)] += 1.0;
        lap[(v, v)] += 1.0;
    }
    let eig = SymmetricEigen::new(lap);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, &l| m.max(l.abs()));
    let mut values = vec![0.0; n];
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        // Null-space eigenvectors (one per component) are dropped.
        if lambda.abs() <= 1e-9 * scale {
            continue;
        }
        let weight = (-lambda * t).exp();
        let phi = eig.eigenvectors.column(k);
        for (v, out) in values.iter_mut().enumerate() {
            *out += weight * phi[v] * phi[v];
        }
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("heat kernel signature is not finite".into()));
    }
    Ok(DescriptorValues {
        values,
        convention: Some("null space of the Laplacian excluded"),
    })
}

fn kde_codensity(c: &PointCloud, h: f64) -> Vec<f64> {
    let n = c.len() as f64;
    let d = c.dim() as i32;
    let norm = (2.0 * std::f64::consts::PI * h * h).powi(d).sqrt();
    c.points()
        .iter()
        .map(|p| {
            let density: f64 = c
                .points()
                .iter()
                .map(|q| {
                    let r = euclidean(p, q);
                    (-(r * r) / (2.0 * h * h)).exp()
                })
                .sum::<f64>()
                / (n * norm);
            -density
        })
        .collect()
}

fn dtm(c: &PointCloud, mass: f64) -> Vec<f64> {
    let n = c.len();
    let k = ((mass * n as f64).ceil() as usize).clamp(1, n.max(1));
    c.points()
        .iter()
        .map(|p| {
            let mut d: Vec<f64> = c.points().iter().map(|q| euclidean(p, q)).collect();
            d.sort_by(f64::total_cmp);
            d[..k].iter().sum::<f64>() / k as f64
        })
        .collect()
}

impl PointCloud {
    /// Graph joining points at distance at most `radius`.
    pub fn neighborhood_graph(&self, radius: f64) -> Result<AttributedGraph> {
        let mut edges = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.distance(i, j) <= radius {
                    edges.push((i as u32, j as u32));
                }
            }
        }
        AttributedGraph::new(self.len(), edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> AttributedGraph {
        AttributedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn degree_on_path() {
        let d = vertex_descriptor(DescriptorInput::Graph(&path3()), Descriptor::Degree).unwrap();
        assert_eq!(d.values, vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn dtm_two_points() {
        let c = PointCloud::new(vec![vec![0.0], vec![3.0]]).unwrap();
        let d = vertex_descriptor(DescriptorInput::Cloud(&c), Descriptor::Dtm { mass: 1.0 }).unwrap();
        assert_eq!(d.values, vec![1.5, 1.5]);
        // mass 0.5 keeps only the point itself
        let d = vertex_descriptor(DescriptorInput::Cloud(&c), Descriptor::Dtm { mass: 0.5 }).unwrap();
        assert_eq!(d.values, vec![0.0, 0.0]);
    }

    #[test]
    fn hks_single_vertex_is_zero() {
        let g = AttributedGraph::new(1, vec![]).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let d = vertex_descriptor(DescriptorInput::Graph(&g), Descriptor::Hks { t }).unwrap();
            assert_eq!(d.values, vec![0.0]);
        }
    }

    #[test]
    fn hks_single_edge_closed_form() {
        // Laplacian [[1,-1],[-1,1]]: eigenpair (2, (1,-1)/√2) survives.
        let g = AttributedGraph::new(2, vec![(0, 1)]).unwrap();
        let d = vertex_descriptor(DescriptorInput::Graph(&g), Descriptor::Hks { t: 0.5 }).unwrap();
        let expected = 0.5 * (-1.0f64).exp();
        for v in d.values {
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn closeness_conventions() {
        let d = vertex_descriptor(DescriptorInput::Graph(&path3()), Descriptor::Closeness).unwrap();
        assert_eq!(d.convention, Some("closeness"));
        assert_eq!(d.values, vec![2.0 / 3.0, 1.0, 2.0 / 3.0]);

        let g = AttributedGraph::new(3, vec![(0, 1)]).unwrap();
        let d = vertex_descriptor(DescriptorInput::Graph(&g), Descriptor::Closeness).unwrap();
        assert_eq!(d.convention, Some("harmonic closeness"));
        assert_eq!(d.values, vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn kde_codensity_is_negative_and_peaks_in_clusters() {
        let c = PointCloud::new(vec![vec![0.0], vec![0.1], vec![5.0]]).unwrap();
        let d = vertex_descriptor(
            DescriptorInput::Cloud(&c),
            Descriptor::KdeCodensity { bandwidth: 0.5 },
        )
        .unwrap();
        assert!(d.values.iter().all(|&x| x < 0.0));
        assert!(d.values[0] < d.values[2]);
    }

    #[test]
    fn wrong_input_kind_and_bad_params() {
        let c = PointCloud::new(vec![vec![0.0]]).unwrap();
        assert!(vertex_descriptor(DescriptorInput::Cloud(&c), Descriptor::Degree).is_err());
        assert!(vertex_descriptor(
            DescriptorInput::Cloud(&c),
            Descriptor::Dtm { mass: 0.0 }
        )
        .is_err());
        assert!(vertex_descriptor(
            DescriptorInput::Graph(&path3()),
            Descriptor::Hks { t: -1.0 }
        )
        .is_err());
    }
}
