use std::collections::{BTreeMap, HashSet, VecDeque};

use super::complex::{FilteredComplex, FiltrationValue, Simplex};
use crate::error::{Error, Result};

/// Undirected simple graph with named real-valued vertex attributes.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributedGraph {
    vertex_count: usize,
    edges: Vec<(u32, u32)>,
    attributes: BTreeMap<String, Vec<f64>>,
}

impl AttributedGraph {
    /// Edges are normalized to `(min, max)` and sorted.
    pub fn new(vertex_count: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(Error::param(format!("self-loop at vertex {u}")));
            }
            if u as usize >= vertex_count || v as usize >= vertex_count {
                return Err(Error::param(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{vertex_count}"
                )));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::param(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            normalized.push(e);
        }
        normalized.sort_unstable();
        Ok(AttributedGraph {
            vertex_count,
            edges: normalized,
            attributes: BTreeMap::new(),
        })
    }

    pub fn with_attribute(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        self.set_attribute(name, values)?;
        Ok(self)
    }

    pub fn set_attribute(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.vertex_count {
            return Err(Error::LengthMismatch {
                what: "vertex attribute",
                expected: self.vertex_count,
                found: values.len(),
            });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("vertex attributes must be finite"));
        }
        self.attributes.insert(name.into(), values);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn attribute(&self, name: &str) -> Result<&[f64]> {
        self.attributes
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownAttribute {
                name: name.to_string(),
                available: self.attributes.keys().cloned().collect(),
            })
    }

    pub fn attribute_names(&self) -> impl Iterator<Item = &str> {
        self.attributes.keys().map(String::as_str)
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Unweighted shortest-path distances from `source` (`None` when
    /// unreachable).
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        bfs(&adj, source)
    }
}

pub(crate) fn bfs(adj: &[Vec<u32>], source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &w in &adj[u] {
            if dist[w as usize].is_none() {
                dist[w as usize] = Some(du + 1);
                queue.push_back(w as usize);
            }
        }
    }
    dist
}

/// Lower-star filtration of a graph by the named attributes: vertices take
/// their attribute vector and each edge the componentwise max of its ends.
pub fn lower_star_multifiltration(
    graph: &AttributedGraph,
    attribute_names: &[&str],
) -> Result<FilteredComplex> {
    if attribute_names.is_empty() {
        return Err(Error::param("at least one attribute is required"));
    }
    let columns = attribute_names
        .iter()
        .map(|name| graph.attribute(name))
        .collect::<Result<Vec<_>>>()?;
    let vertex_value =
        |v: usize| FiltrationValue(columns.iter().map(|col| col[v]).collect::<Vec<f64>>());
    let mut entries = Vec::with_capacity(graph.vertex_count() + graph.edges().len());
    for v in 0..graph.vertex_count() {
        entries.push((Simplex::vertex(v as u32), vertex_value(v)));
    }
    for &(u, v) in graph.edges() {
        let value = vertex_value(u as usize).join(&vertex_value(v as usize));
        entries.push((Simplex::from_sorted(vec![u, v]), value));
    }
    FilteredComplex::from_parts_unchecked(attribute_names.len(), graph.vertex_count(), entries)
}

/// Lower-star filtration from explicit per-vertex values (`values[v]` has
/// one coordinate per parameter). Used by the stability experiment, where
/// the vertex function changes while the graph stays fixed.
pub fn lower_star_from_values(
    graph: &AttributedGraph,
    values: &[Vec<f64>],
) -> Result<FilteredComplex> {
    if values.len() != graph.vertex_count() {
        return Err(Error::LengthMismatch {
            what: "vertex values",
            expected: graph.vertex_count(),
            found: values.len(),
        });
    }
    let n = values.first().map_or(1, Vec::len);
    let mut entries = Vec::with_capacity(values.len() + graph.edges().len());
    for (v, x) in values.iter().enumerate() {
        entries.push((Simplex::vertex(v as u32), FiltrationValue(x.clone())));
    }
    for &(u, v) in graph.edges() {
        let value =
            FiltrationValue(values[u as usize].clone()).join(&FiltrationValue(values[v as usize].clone()));
        entries.push((Simplex::from_sorted(vec![u, v]), value));
    }
    FilteredComplex::from_parts_unchecked(n, graph.vertex_count(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::validate_complex;

    #[test]
    fn path_single_axis() {
        let g = AttributedGraph::new(2, vec![(0, 1)])
            .unwrap()
            .with_attribute("a", vec![0.0, 1.0])
            .unwrap();
        let c = lower_star_multifiltration(&g, &["a"]).unwrap();
        let vals: Vec<f64> = c.values().iter().map(|v| v.0[0]).collect();
        assert_eq!(vals, vec![0.0, 1.0, 1.0]);
    }

    #[test]
    fn triangle_two_attributes() {
        let g = AttributedGraph::new(3, vec![(0, 1), (1, 2), (0, 2)])
            .unwrap()
            .with_attribute("a", vec![0.0, 2.0, 1.0])
            .unwrap()
            .with_attribute("b", vec![3.0, 0.0, 1.0])
            .unwrap();
        let c = lower_star_multifiltration(&g, &["a", "b"]).unwrap();
        assert!(validate_complex(&c).is_ok());
        let e = |u, v| c.value_of(&Simplex::new(vec![u, v]).unwrap()).unwrap().0.clone();
        assert_eq!(e(0, 1), vec![2.0, 3.0]);
        assert_eq!(e(1, 2), vec![2.0, 1.0]);
        assert_eq!(e(0, 2), vec![1.0, 3.0]);
    }

    #[test]
    fn no_edges() {
        let g = AttributedGraph::new(3, vec![])
            .unwrap()
            .with_attribute("a", vec![1.0, 2.0, 3.0])
            .unwrap();
        let c = lower_star_multifiltration(&g, &["a"]).unwrap();
        assert_eq!(c.counts_by_dim(), vec![3]);
    }

    #[test]
    fn unknown_attribute_lists_available() {
        let g = AttributedGraph::new(1, vec![])
            .unwrap()
            .with_attribute("degree", vec![0.0])
            .unwrap()
            .with_attribute("hks", vec![0.0])
            .unwrap();
        let e = lower_star_multifiltration(&g, &["density"]).unwrap_err();
        assert_eq!(
            e.to_string(),
            "unknown attribute `density` (available: degree, hks)"
        );
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(AttributedGraph::new(2, vec![(0, 0)]).is_err());
        assert!(AttributedGraph::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(AttributedGraph::new(2, vec![(0, 2)]).is_err());
    }
}
