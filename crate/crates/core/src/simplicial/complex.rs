use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simplex stored as a strictly increasing list of vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Simplex(Vec<u32>);

impl Simplex {
    /// Builds a simplex from arbitrary vertex ids, sorting them.
    /// Fails on an empty list or repeated vertices.
    pub fn new(mut vertices: Vec<u32>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidComplex("simplex with no vertices".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidComplex(format!(
                "simplex {vertices:?} repeats a vertex"
            )));
        }
        Ok(Simplex(vertices))
    }

    pub(crate) fn from_sorted(vertices: Vec<u32>) -> Self {
        debug_assert!(!vertices.is_empty() && vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices)
    }

    pub fn vertex(v: u32) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces, in the order of the removed vertex. The i-th
    /// face carries the sign (-1)^i in the simplicial boundary.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let len = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..len).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }

    /// All non-empty proper faces.
    pub fn proper_faces(&self) -> Vec<Simplex> {
        let k = self.0.len();
        let mut out = Vec::new();
        for mask in 1..(1u64 << k) - 1 {
            let face: Vec<u32> = (0..k)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| self.0[i])
                .collect();
            out.push(Simplex(face));
        }
        out
    }
}

impl TryFrom<Vec<u32>> for Simplex {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Simplex::new(v)
    }
}

impl From<Simplex> for Vec<u32> {
    fn from(s: Simplex) -> Self {
        s.0
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// An ℝⁿ-valued filtration value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiltrationValue(pub Vec<f64>);

impl FiltrationValue {
    pub fn new(coords: Vec<f64>) -> Self {
        FiltrationValue(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &FiltrationValue) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn join(&self, other: &FiltrationValue) -> FiltrationValue {
        FiltrationValue(self.0.iter().zip(&other.0).map(|(a, b)| a.max(*b)).collect())
    }

    pub fn l1_distance(&self, other: &FiltrationValue) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }

    fn total_cmp(&self, other: &FiltrationValue) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl From<Vec<f64>> for FiltrationValue {
    fn from(v: Vec<f64>) -> Self {
        FiltrationValue(v)
    }
}

/// How a filtration axis was produced. Grid construction uses this to pick
/// which simplices feed the percentile computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisSource {
    /// Values are determined by vertex values (lower-star, codensity).
    VertexFunction,
    /// Rips diameter: vertices sit at 0 and the information lives on edges.
    SimplexDiameter,
}

/// A finite simplicial complex with a monotone ℝⁿ-valued filtration.
///
/// Simplices are kept in canonical order: by dimension, then filtration
/// value (lexicographic on coordinates), then vertex list.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredComplex {
    n: usize,
    vertex_count: usize,
    axes: Vec<AxisSource>,
    simplices: Vec<Simplex>,
    values: Vec<FiltrationValue>,
}

impl FilteredComplex {
    /// Builds and validates a complex. Every face of every listed simplex
    /// must be listed, and values must be monotone.
    pub fn new(
        n: usize,
        vertex_count: usize,
        entries: Vec<(Simplex, FiltrationValue)>,
    ) -> Result<Self> {
        let c = Self::from_parts_unchecked(n, vertex_count, entries)?;
        let report = super::validate::validate_complex(&c);
        if !report.is_ok() {
            return Err(Error::InvalidComplex(report.to_string()));
        }
        Ok(c)
    }

    /// Builds a complex while checking only the per-entry shape (value
    /// length, finiteness, vertex range). Face closure and monotonicity are
    /// left to [`validate_complex`](super::validate_complex).
    pub fn from_parts_unchecked(
        n: usize,
        vertex_count: usize,
        mut entries: Vec<(Simplex, FiltrationValue)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("parameter count must be at least 1"));
        }
        for (s, v) in &entries {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            if v.0.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidComplex(format!(
                    "simplex {s} has a non-finite filtration value"
                )));
            }
            if let Some(&v) = s.vertices().iter().find(|&&v| v as usize >= vertex_count) {
                return Err(Error::InvalidComplex(format!(
                    "simplex {s} references vertex {v} >= vertex_count {vertex_count}"
                )));
            }
        }
        entries.sort_by(|(sa, va), (sb, vb)| {
            sa.dim()
                .cmp(&sb.dim())
                .then_with(|| va.total_cmp(vb))
                .then_with(|| sa.cmp(sb))
        });
        let (simplices, values) = entries.into_iter().unzip();
        Ok(FilteredComplex {
            n,
            vertex_count,
            axes: vec![AxisSource::VertexFunction; n],
            simplices,
            values,
        })
    }

    /// An empty complex with `n` parameters.
    pub fn empty(n: usize) -> Self {
        FilteredComplex {
            n,
            vertex_count: 0,
            axes: vec![AxisSource::VertexFunction; n],
            simplices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn with_axes(mut self, axes: Vec<AxisSource>) -> Result<Self> {
        if axes.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: axes.len(),
            });
        }
        self.axes = axes;
        Ok(self)
    }

    pub fn n_parameters(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn axes(&self) -> &[AxisSource] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn values(&self) -> &[FiltrationValue] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, &FiltrationValue)> {
        self.simplices.iter().zip(&self.values)
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.simplices.last().map(Simplex::dim)
    }

    /// Number of simplices in each dimension `0..=max_dim`.
    pub fn counts_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_dim().map_or(0, |d| d + 1)];
        for s in &self.simplices {
            counts[s.dim()] += 1;
        }
        counts
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .map(|s| if s.dim() % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    /// Value of the simplex with the given vertex list, if present.
    pub fn value_of(&self, simplex: &Simplex) -> Option<&FiltrationValue> {
        self.simplices
            .iter()
            .position(|s| s == simplex)
            .map(|i| &self.values[i])
    }

    pub(crate) fn index_map(&self) -> HashMap<&Simplex, usize> {
        self.simplices.iter().enumerate().map(|(i, s)| (s, i)).collect()
    }

    /// Keeps only the listed axes, in the given order.
    pub fn project(&self, keep: &[usize]) -> Result<FilteredComplex> {
        if keep.is_empty() || keep.iter().any(|&a| a >= self.n) {
            return Err(Error::param(format!(
                "cannot project {}-parameter complex onto axes {keep:?}",
                self.n
            )));
        }
        let entries = self
            .iter()
            .map(|(s, v)| {
                (
                    s.clone(),
                    FiltrationValue(keep.iter().map(|&a| v.0[a]).collect()),
                )
            })
            .collect();
        let c = FilteredComplex::from_parts_unchecked(keep.len(), self.vertex_count, entries)?;
        c.with_axes(keep.iter().map(|&a| self.axes[a]).collect())
    }

    /// Sum over simplices of the ℓ¹ distance between filtration values.
    /// Both complexes must contain the same simplices.
    pub fn l1_distance(&self, other: &FilteredComplex) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.len() != other.len() {
            return Err(Error::InvalidComplex(
                "complexes have different simplex sets".into(),
            ));
        }
        let idx = other.index_map();
        let mut total = 0.0;
        for (s, v) in self.iter() {
            let j = idx.get(s).ok_or_else(|| {
                Error::InvalidComplex(format!("simplex {s} missing from second complex"))
            })?;
            total += v.l1_distance(&other.values[*j]);
        }
        Ok(total)
    }
}
