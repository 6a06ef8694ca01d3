//! Finite signed point measures and their extraction from persistence data.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::homology::{Barcode, GridSpec, HilbertFunction};
use crate::simplicial::FilteredComplex;

/// A finite signed point measure on ℝⁿ with integer weights.
///
/// Atoms are coalesced (pairwise distinct points), carry non-zero weights,
/// and are sorted lexicographically by coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedMeasure {
    n: usize,
    atoms: Vec<(Vec<f64>, i64)>,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

impl SignedMeasure {
    /// Coalesces atoms at equal points and drops zero weights.
    pub fn new(n: usize, atoms: impl IntoIterator<Item = (Vec<f64>, i64)>) -> Result<Self> {
        let mut list: Vec<(Vec<f64>, i64)> = Vec::new();
        for (mut x, w) in atoms {
            if x.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: x.len(),
                });
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::param("measure atoms must have finite coordinates"));
            }
            // fold -0.0 into 0.0 so equal points coalesce
            for v in &mut x {
                *v += 0.0;
            }
            list.push((x, w));
        }
        list.sort_by(|a, b| lex_cmp(&a.0, &b.0));
        let mut atoms: Vec<(Vec<f64>, i64)> = Vec::with_capacity(list.len());
        for (x, w) in list {
            match atoms.last_mut() {
                Some((y, acc)) if *y == x => *acc += w,
                _ => atoms.push((x, w)),
            }
        }
        atoms.retain(|(_, w)| *w != 0);
        Ok(SignedMeasure { n, atoms })
    }

    pub fn zero(n: usize) -> Self {
        SignedMeasure {
            n,
            atoms: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[(Vec<f64>, i64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> i64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// Total variation |μ|(ℝⁿ).
    pub fn total_variation(&self) -> i64 {
        self.atoms.iter().map(|(_, w)| w.abs()).sum()
    }

    /// Weight of the atom at `x` (0 if absent).
    pub fn weight_at(&self, x: &[f64]) -> i64 {
        self.atoms
            .binary_search_by(|(y, _)| lex_cmp(y, x))
            .map_or(0, |k| self.atoms[k].1)
    }

    fn check_n(&self, other: &SignedMeasure) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &SignedMeasure) -> Result<SignedMeasure> {
        self.check_n(other)?;
        SignedMeasure::new(
            self.n,
            self.atoms.iter().chain(&other.atoms).cloned(),
        )
    }

    pub fn sub(&self, other: &SignedMeasure) -> Result<SignedMeasure> {
        self.check_n(other)?;
        SignedMeasure::new(
            self.n,
            self.atoms
                .iter()
                .cloned()
                .chain(other.atoms.iter().map(|(x, w)| (x.clone(), -w))),
        )
    }

    pub fn scale(&self, factor: i64) -> SignedMeasure {
        if factor == 0 {
            return SignedMeasure::zero(self.n);
        }
        SignedMeasure {
            n: self.n,
            atoms: self.atoms.iter().map(|(x, w)| (x.clone(), w * factor)).collect(),
        }
    }

    /// Jordan decomposition: atoms of the positive and negative parts, both
    /// with positive weights.
    pub fn jordan(&self) -> (Vec<(&[f64], i64)>, Vec<(&[f64], i64)>) {
        let pos = self
            .atoms
            .iter()
            .filter(|(_, w)| *w > 0)
            .map(|(x, w)| (x.as_slice(), *w))
            .collect();
        let neg = self
            .atoms
            .iter()
            .filter(|(_, w)| *w < 0)
            .map(|(x, w)| (x.as_slice(), -*w))
            .collect();
        (pos, neg)
    }

    /// Multiplies coordinate `j` of every atom by `scales[j]`.
    pub fn rescaled(&self, scales: &[f64]) -> Result<SignedMeasure> {
        if scales.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: scales.len(),
            });
        }
        SignedMeasure::new(
            self.n,
            self.atoms.iter().map(|(x, w)| {
                (x.iter().zip(scales).map(|(a, s)| a * s).collect(), *w)
            }),
        )
    }
}

/// Σ of the weights of atoms `y <= x` (componentwise).
pub fn cumulative_at(mu: &SignedMeasure, x: &[f64]) -> i64 {
    mu.atoms
        .iter()
        .filter(|(y, _)| y.iter().zip(x).all(|(a, b)| a <= b))
        .map(|(_, w)| w)
        .sum()
}

/// In-place Möbius inversion on a row-major padded grid array: the result
/// at `x` is Σ_{ε ∈ {0,1}ⁿ} (-1)^{|ε|} · input(x − ε), with out-of-grid
/// entries read as 0. Implemented as a backward difference along each axis.
pub fn mobius_inversion(grid: &GridSpec, values: &mut [i64]) {
    let shape = grid.shape();
    let strides = grid.strides();
    for (&len, &stride) in shape.iter().zip(&strides) {
        for f in (0..values.len()).rev() {
            if (f / stride) % len != 0 {
                values[f] -= values[f - stride];
            }
        }
    }
}

/// Inverse of [`mobius_inversion`]: cumulative sums along each axis.
pub fn cumulative_sums(grid: &GridSpec, values: &mut [i64]) {
    let shape = grid.shape();
    let strides = grid.strides();
    for (&len, &stride) in shape.iter().zip(&strides) {
        for f in 0..values.len() {
            if (f / stride) % len != 0 {
                values[f] += values[f - stride];
            }
        }
    }
}

fn measure_from_grid(grid: &GridSpec, weights: &[i64]) -> Result<SignedMeasure> {
    let atoms = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0)
        .map(|(f, &w)| (grid.point(&grid.unflatten(f)), w));
    let mu = SignedMeasure::new(grid.n(), atoms)?;
    if mu.total_mass() != 0 {
        return Err(Error::Numeric(format!(
            "signed measure has total mass {} instead of 0",
            mu.total_mass()
        )));
    }
    Ok(mu)
}

/// Hilbert decomposition signed measure of degree `degree`: the unique
/// measure on the grid whose down-set cumulative reproduces the Hilbert
/// function at every grid point.
pub fn hilbert_signed_measure(h: &HilbertFunction, degree: usize) -> Result<SignedMeasure> {
    let mut w = h.get(degree)?.to_vec();
    mobius_inversion(h.grid(), &mut w);
    measure_from_grid(h.grid(), &w)
}

/// Euler decomposition signed measure on the grid.
///
/// Each simplex contributes (-1)^dim at its value snapped up to the grid
/// (coordinates above the last grid value snap to padding). One atom of
/// weight −χ at the all-padding corner brings the total mass to 0.
///
/// Inside the grid this agrees atom for atom with the alternating sum of
/// the per-degree Hilbert measures. For n ≥ 2 that sum also carries atoms
/// on the padding hyperplanes, which this measure does not.
pub fn euler_signed_measure(c: &FilteredComplex, grid: &GridSpec) -> Result<SignedMeasure> {
    if grid.n() != c.n_parameters() {
        return Err(Error::DimensionMismatch {
            expected: c.n_parameters(),
            found: grid.n(),
        });
    }
    let mut weights = vec![0i64; grid.len()];
    let mut chi = 0i64;
    for (s, v) in c.iter() {
        let sign = if s.dim() % 2 == 0 { 1 } else { -1 };
        let idx = grid.snap_point(v.coords());
        weights[grid.flat_index(&idx)] += sign;
        chi += sign;
    }
    let corner: Vec<usize> = grid.shape().iter().map(|k| k - 1).collect();
    weights[grid.flat_index(&corner)] -= chi;
    measure_from_grid(grid, &weights)
}

/// Σ_τ (-1)^{dim τ} δ_{f(τ)} at the raw filtration values, without grid
/// snapping or padding. Its total mass is the Euler characteristic.
pub fn euler_simplex_measure(c: &FilteredComplex) -> Result<SignedMeasure> {
    SignedMeasure::new(
        c.n_parameters(),
        c.iter()
            .map(|(s, v)| (v.coords().to_vec(), if s.dim() % 2 == 0 { 1 } else { -1 })),
    )
}

/// Measure of a one-parameter barcode: +1 at each birth, −1 at each
/// finite death, and −1 at `horizon` for every infinite bar.
pub fn barcode_to_signed_measure(b: &Barcode, horizon: f64) -> Result<SignedMeasure> {
    for bar in &b.bars {
        let last = if bar.is_infinite() { bar.birth } else { bar.death };
        if !(horizon > last) {
            return Err(Error::param(format!(
                "horizon {horizon} must exceed every finite endpoint (found {last})"
            )));
        }
    }
    SignedMeasure::new(
        1,
        b.bars.iter().flat_map(|bar| {
            let end = if bar.is_infinite() { horizon } else { bar.death };
            [(vec![bar.birth], 1), (vec![end], -1)]
        }),
    )
}
