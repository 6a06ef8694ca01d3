use serde::{Deserialize, Serialize};

use super::flow::solve_transport;
use crate::error::{Error, Result};
use crate::measure::SignedMeasure;

/// Ground norm ‖x − y‖_p used as transport cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroundNorm {
    #[serde(rename = "1")]
    L1,
    #[serde(rename = "2")]
    L2,
    /// Not used by any experiment; offered for completeness of the p range.
    #[serde(rename = "inf")]
    LInf,
}

impl GroundNorm {
    pub fn distance(self, x: &[f64], y: &[f64]) -> f64 {
        let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
        match self {
            GroundNorm::L1 => diffs.sum(),
            GroundNorm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            GroundNorm::LInf => diffs.fold(0.0, f64::max),
        }
    }
}

impl std::str::FromStr for GroundNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(GroundNorm::L1),
            "2" => Ok(GroundNorm::L2),
            "inf" | "infinity" => Ok(GroundNorm::LInf),
            other => Err(Error::param(format!("unknown norm `{other}` (use 1, 2 or inf)"))),
        }
    }
}

pub(crate) fn difference(mu: &SignedMeasure, nu: &SignedMeasure) -> Result<SignedMeasure> {
    if mu.n() != nu.n() {
        return Err(Error::DimensionMismatch {
            expected: mu.n(),
            found: nu.n(),
        });
    }
    if mu.total_mass() != nu.total_mass() {
        return Err(Error::MassMismatch {
            left: mu.total_mass(),
            right: nu.total_mass(),
        });
    }
    mu.sub(nu)
}

/// Kantorovich–Rubinstein norm of a zero-mass measure.
pub fn kr_norm(lambda: &SignedMeasure, norm: GroundNorm) -> Result<f64> {
    if lambda.total_mass() != 0 {
        return Err(Error::MassMismatch {
            left: lambda.total_mass(),
            right: 0,
        });
    }
    let (pos, neg) = lambda.jordan();
    let supplies: Vec<i64> = pos.iter().map(|a| a.1).collect();
    let demands: Vec<i64> = neg.iter().map(|a| a.1).collect();
    let plan = solve_transport(&supplies, &demands, |i, j| norm.distance(pos[i].0, neg[j].0));
    Ok(plan.cost)
}

/// ‖μ − ν‖^KR_p: the optimal transport cost between the positive and
/// negative parts of μ − ν, after cancellation of shared atoms.
pub fn kr_distance(mu: &SignedMeasure, nu: &SignedMeasure, norm: GroundNorm) -> Result<f64> {
    kr_norm(&difference(mu, nu)?, norm)
}

/// Largest number of unit masses per side accepted by [`brute_force_kr`].
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Reference implementation: expands weights into unit masses and takes
/// the best of all matchings.
pub fn brute_force_kr(mu: &SignedMeasure, nu: &SignedMeasure, norm: GroundNorm) -> Result<f64> {
    let lambda = difference(mu, nu)?;
    let (pos, neg) = lambda.jordan();
    let expand = |part: &[(&[f64], i64)]| -> Vec<Vec<f64>> {
        part.iter()
            .flat_map(|(x, w)| std::iter::repeat_n(x.to_vec(), *w as usize))
            .collect()
    };
    let xs = expand(&pos);
    let ys = expand(&neg);
    if xs.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::param(format!(
            "brute force limited to {BRUTE_FORCE_LIMIT} unit masses, got {}",
            xs.len()
        )));
    }
    let k = xs.len();
    let cost: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| ys.iter().map(|y| norm.distance(x, y)).collect())
        .collect();
    let mut perm: Vec<usize> = (0..k).collect();
    let eval = |p: &[usize]| -> f64 { p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum() };
    let mut best = eval(&perm);
    // Heap's algorithm
    let mut counter = vec![0usize; k];
    let mut i = 1;
    while i < k {
        if counter[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counter[i], i);
            }
            best = best.min(eval(&perm));
            counter[i] += 1;
            i = 1;
        } else {
            counter[i] = 0;
            i += 1;
        }
    }
    Ok(best)
}

/// Kantorovich–Rubinstein norm of a zero-mass measure on the line: sorted
/// positive and negative masses are matched rank to rank.
pub(crate) fn kr_norm_1d(lambda: &SignedMeasure) -> f64 {
    let (pos, neg) = lambda.jordan();
    // atoms are already sorted by coordinate
    let (mut i, mut j) = (0, 0);
    let (mut left_i, mut left_j) = (pos.first().map_or(0, |a| a.1), neg.first().map_or(0, |a| a.1));
    let mut total = 0.0;
    while i < pos.len() && j < neg.len() {
        let m = left_i.min(left_j);
        total += m as f64 * (pos[i].0[0] - neg[j].0[0]).abs();
        left_i -= m;
        left_j -= m;
        if left_i == 0 {
            i += 1;
            left_i = pos.get(i).map_or(0, |a| a.1);
        }
        if left_j == 0 {
            j += 1;
            left_j = neg.get(j).map_or(0, |a| a.1);
        }
    }
    total
}

/// One-dimensional KR distance (independent of the ground norm).
pub fn kr_distance_1d(mu: &SignedMeasure, nu: &SignedMeasure) -> Result<f64> {
    if mu.n() != 1 || nu.n() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: if mu.n() != 1 { mu.n() } else { nu.n() },
        });
    }
    Ok(kr_norm_1d(&difference(mu, nu)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, atoms: &[(&[f64], i64)]) -> SignedMeasure {
        SignedMeasure::new(n, atoms.iter().map(|(x, w)| (x.to_vec(), *w))).unwrap()
    }

    #[test]
    fn single_pair_euclidean() {
        let mu = m(2, &[(&[0.0, 0.0], 1)]);
        let nu = m(2, &[(&[3.0, 4.0], 1)]);
        assert_eq!(kr_distance(&mu, &nu, GroundNorm::L2).unwrap(), 5.0);
        assert_eq!(kr_distance(&mu, &nu, GroundNorm::L1).unwrap(), 7.0);
        assert_eq!(kr_distance(&mu, &nu, GroundNorm::LInf).unwrap(), 4.0);
        assert_eq!(kr_distance(&mu, &mu, GroundNorm::L2).unwrap(), 0.0);
    }

    #[test]
    fn two_unit_moves() {
        let mu = m(2, &[(&[0.0, 0.0], 1), (&[1.0, 1.0], 1)]);
        let nu = m(2, &[(&[1.0, 0.0], 1), (&[0.0, 1.0], 1)]);
        assert_eq!(kr_distance(&mu, &nu, GroundNorm::L1).unwrap(), 2.0);
        assert_eq!(brute_force_kr(&mu, &nu, GroundNorm::L1).unwrap(), 2.0);
    }

    #[test]
    fn one_dimensional_examples() {
        let mu = m(1, &[(&[0.0], 1), (&[1.0], 1)]);
        let nu = m(1, &[(&[2.0], 1), (&[3.0], 1)]);
        assert_eq!(kr_distance_1d(&mu, &nu).unwrap(), 4.0);
        assert_eq!(kr_distance_1d(&mu, &mu).unwrap(), 0.0);
        let mu = m(1, &[(&[0.0], 2)]);
        let nu = m(1, &[(&[1.0], 1), (&[2.0], 1)]);
        assert_eq!(kr_distance_1d(&mu, &nu).unwrap(), 3.0);
        assert_eq!(kr_distance(&mu, &nu, GroundNorm::L2).unwrap(), 3.0);
    }

    #[test]
    fn mass_mismatch_is_an_error() {
        let mu = m(1, &[(&[0.0], 2)]);
        let nu = m(1, &[(&[0.0], 1)]);
        let e = kr_distance(&mu, &nu, GroundNorm::L1).unwrap_err();
        assert!(e.to_string().starts_with("mass mismatch"));
        assert!(kr_distance_1d(&mu, &nu).is_err());
        assert!(kr_distance(&mu, &m(2, &[(&[0.0, 0.0], 2)]), GroundNorm::L1).is_err());
    }

    #[test]
    fn shared_atoms_cancel_first() {
        // μ and ν share the atom at 5; only the rest is transported.
        let mu = m(1, &[(&[0.0], 1), (&[5.0], 1)]);
        let nu = m(1, &[(&[1.0], 1), (&[5.0], 1)]);
        assert_eq!(kr_distance(&mu, &nu, GroundNorm::L1).unwrap(), 1.0);
    }

    #[test]
    fn brute_force_limit() {
        let mu = m(1, &[(&[0.0], 9)]);
        let nu = m(1, &[(&[1.0], 9)]);
        assert!(brute_force_kr(&mu, &nu, GroundNorm::L1).is_err());
    }
}
