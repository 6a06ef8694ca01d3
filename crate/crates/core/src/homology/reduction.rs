//! One-parameter persistence by column reduction over ℤ/pℤ.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::field::FieldSpec;
use crate::simplicial::FilteredComplex;

/// A half-open interval `[birth, death)`; `death` may be `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn new(birth: f64, death: f64) -> Self {
        Bar { birth, death }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.birth <= x && x < self.death
    }

    pub fn is_infinite(&self) -> bool {
        self.death == f64::INFINITY
    }
}

/// Bars of one homology degree, sorted by `(birth, death)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Barcode {
    pub degree: usize,
    pub bars: Vec<Bar>,
}

impl Barcode {
    /// Drops empty bars and sorts.
    pub fn new(degree: usize, mut bars: Vec<Bar>) -> Self {
        bars.retain(|b| b.birth < b.death);
        bars.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then_with(|| a.death.total_cmp(&b.death))
        });
        Barcode { degree, bars }
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Number of bars alive at `x`.
    pub fn count_at(&self, x: f64) -> usize {
        self.bars.iter().filter(|b| b.contains(x)).count()
    }
}

/// Boundary structure of a complex, computed once and shared by every
/// fiber.
pub(crate) struct BoundaryData {
    dims: Vec<u8>,
    facet_offsets: Vec<usize>,
    facets: Vec<u32>,
    lex_rank: Vec<u32>,
    max_dim: usize,
}

impl BoundaryData {
    pub(crate) fn new(c: &FilteredComplex) -> Self {
        let index = c.index_map();
        let mut dims = Vec::with_capacity(c.len());
        let mut facet_offsets = Vec::with_capacity(c.len() + 1);
        let mut facets = Vec::new();
        facet_offsets.push(0);
        for s in c.simplices() {
            dims.push(s.dim() as u8);
            for f in s.facets() {
                facets.push(index[&f] as u32);
            }
            facet_offsets.push(facets.len());
        }
        let mut order: Vec<usize> = (0..c.len()).collect();
        order.sort_by(|&a, &b| {
            let (sa, sb) = (&c.simplices()[a], &c.simplices()[b]);
            sa.dim().cmp(&sb.dim()).then_with(|| sa.cmp(sb))
        });
        let mut lex_rank = vec![0u32; c.len()];
        for (r, &i) in order.iter().enumerate() {
            lex_rank[i] = r as u32;
        }
        BoundaryData {
            dims,
            facet_offsets,
            facets,
            lex_rank,
            max_dim: c.max_dim().unwrap_or(0),
        }
    }

    fn facets_of(&self, i: usize) -> &[u32] {
        &self.facets[self.facet_offsets[i]..self.facet_offsets[i + 1]]
    }
}

type Column = Vec<(u32, u32)>;

/// `target += factor * source`, both sorted by row.
fn axpy(field: FieldSpec, target: &Column, factor: u32, source: &Column, out: &mut Column) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < source.len() {
        let take = match (target.get(i), source.get(j)) {
            (Some(a), Some(b)) => a.0.cmp(&b.0),
            (Some(_), None) => Ordering::Less,
            (None, _) => Ordering::Greater,
        };
        match take {
            Ordering::Less => {
                out.push(target[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push((source[j].0, field.mul(factor, source[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let v = field.add(target[i].1, field.mul(factor, source[j].1));
                if v != 0 {
                    out.push((target[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
}

/// Barcodes of the sub-filtration given by `entry` (`None` = simplex
/// absent), for each requested degree.
///
/// Columns are reduced from the highest needed dimension downwards with
/// clearing: a simplex that is the pivot of a reduced higher-dimensional
/// column is known to be positive and its own column is skipped.
pub(crate) fn barcodes(
    data: &BoundaryData,
    entry: &[Option<f64>],
    degrees: &[usize],
    field: FieldSpec,
) -> Vec<Barcode> {
    let Some(&top_degree) = degrees.iter().max() else {
        return Vec::new();
    };
    let mut order: Vec<usize> = (0..entry.len()).filter(|&i| entry[i].is_some()).collect();
    order.sort_unstable_by(|&a, &b| {
        entry[a]
            .unwrap()
            .total_cmp(&entry[b].unwrap())
            .then_with(|| data.dims[a].cmp(&data.dims[b]))
            .then_with(|| data.lex_rank[a].cmp(&data.lex_rank[b]))
    });
    let mut position = vec![u32::MAX; entry.len()];
    for (pos, &i) in order.iter().enumerate() {
        position[i] = pos as u32;
    }
    let time = |pos: u32| entry[order[pos as usize]].unwrap();
    let m = order.len();

    // pivot_of_row[r] = column that owns pivot r after reduction
    let mut pivot_of_row = vec![u32::MAX; m];
    let mut reduced: Vec<Column> = vec![Vec::new(); m];
    let mut positive = vec![false; m];

    let top_dim = (top_degree + 1).min(data.max_dim);
    let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); data.max_dim + 1];
    for (pos, &i) in order.iter().enumerate() {
        by_dim[data.dims[i] as usize].push(pos as u32);
    }
    for &pos in &by_dim[0] {
        positive[pos as usize] = true;
    }

    let mut work: Column = Vec::new();
    let mut scratch: Column = Vec::new();
    for d in (1..=top_dim).rev() {
        let cleared = d < top_dim;
        for &col in &by_dim[d] {
            if cleared && pivot_of_row[col as usize] != u32::MAX {
                // A pivot of a (d+1)-column: reduces to zero.
                positive[col as usize] = true;
                continue;
            }
            let i = order[col as usize];
            work.clear();
            for (k, &f) in data.facets_of(i).iter().enumerate() {
                work.push((position[f as usize], field.sign(k % 2 == 1)));
            }
            work.sort_unstable_by_key(|e| e.0);
            loop {
                let Some(&(piv, coef)) = work.last() else {
                    positive[col as usize] = true;
                    break;
                };
                let owner = pivot_of_row[piv as usize];
                if owner == u32::MAX {
                    let scale = field.inv(coef);
                    for e in work.iter_mut() {
                        e.1 = field.mul(e.1, scale);
                    }
                    pivot_of_row[piv as usize] = col;
                    reduced[col as usize] = std::mem::take(&mut work);
                    break;
                }
                // stored columns have pivot coefficient 1
                axpy(field, &work, field.neg(coef), &reduced[owner as usize], &mut scratch);
                std::mem::swap(&mut work, &mut scratch);
            }
        }
    }

    degrees
        .iter()
        .map(|&deg| {
            let mut bars = Vec::new();
            if deg <= data.max_dim {
                for &pos in &by_dim[deg] {
                    if !positive[pos as usize] {
                        continue;
                    }
                    let birth = time(pos);
                    let killer = pivot_of_row[pos as usize];
                    let death = if killer == u32::MAX || deg + 1 > top_dim {
                        f64::INFINITY
                    } else {
                        time(killer)
                    };
                    bars.push(Bar::new(birth, death));
                }
            }
            Barcode::new(deg, bars)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{FiltrationValue, Simplex};

    fn complex(entries: &[(&[u32], f64)]) -> FilteredComplex {
        let vc = entries
            .iter()
            .flat_map(|(s, _)| s.iter())
            .max()
            .map_or(0, |&v| v as usize + 1);
        FilteredComplex::new(
            1,
            vc,
            entries
                .iter()
                .map(|(s, t)| (Simplex::new(s.to_vec()).unwrap(), FiltrationValue(vec![*t])))
                .collect(),
        )
        .unwrap()
    }

    fn run(c: &FilteredComplex, degrees: &[usize], p: u32) -> Vec<Barcode> {
        let data = BoundaryData::new(c);
        let entry: Vec<Option<f64>> = c.values().iter().map(|v| Some(v.0[0])).collect();
        barcodes(&data, &entry, degrees, FieldSpec::new(p).unwrap())
    }

    #[test]
    fn two_vertices_one_edge() {
        let c = complex(&[(&[0], 0.0), (&[1], 1.0), (&[0, 1], 2.0)]);
        let b = run(&c, &[0], 11);
        assert_eq!(
            b[0].bars,
            vec![Bar::new(0.0, f64::INFINITY), Bar::new(1.0, 2.0)]
        );
    }

    #[test]
    fn filled_triangle_at_zero() {
        let c = complex(&[
            (&[0], 0.0),
            (&[1], 0.0),
            (&[2], 0.0),
            (&[0, 1], 0.0),
            (&[0, 2], 0.0),
            (&[1, 2], 0.0),
            (&[0, 1, 2], 0.0),
        ]);
        for p in [2, 3, 11] {
            let b = run(&c, &[0, 1], p);
            assert_eq!(b[0].bars, vec![Bar::new(0.0, f64::INFINITY)]);
            assert!(b[1].is_empty());
        }
    }

    #[test]
    fn hollow_triangle_then_filled() {
        let c = complex(&[
            (&[0], 0.0),
            (&[1], 0.0),
            (&[2], 0.0),
            (&[0, 1], 1.0),
            (&[0, 2], 1.0),
            (&[1, 2], 2.0),
            (&[0, 1, 2], 5.0),
        ]);
        let b = run(&c, &[0, 1], 11);
        assert_eq!(
            b[0].bars,
            vec![
                Bar::new(0.0, 1.0),
                Bar::new(0.0, 1.0),
                Bar::new(0.0, f64::INFINITY)
            ]
        );
        assert_eq!(b[1].bars, vec![Bar::new(2.0, 5.0)]);
    }

    #[test]
    fn absent_simplices_are_ignored() {
        let c = complex(&[(&[0], 0.0), (&[1], 1.0), (&[0, 1], 2.0)]);
        let data = BoundaryData::new(&c);
        let b = barcodes(&data, &[None, None, None], &[0, 1], FieldSpec::default());
        assert!(b.iter().all(Barcode::is_empty));
    }

    #[test]
    fn degree_above_complex_dimension_is_empty() {
        let c = complex(&[(&[0], 0.0)]);
        let b = run(&c, &[0, 3], 2);
        assert_eq!(b[0].len(), 1);
        assert!(b[1].is_empty());
    }
}
