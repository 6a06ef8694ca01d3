use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kr::{difference, kr_norm_1d};
use crate::error::{Error, Result};
use crate::measure::SignedMeasure;

const UNIT_TOLERANCE: f64 = 1e-12;

/// Slicing directions and bandwidth of the sliced Wasserstein kernel.
///
/// The directions carry the uniform probability measure scaled by `1/σ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwConfig {
    directions: Vec<Vec<f64>>,
    sigma: f64,
    seed: Option<u64>,
}

fn is_unit(theta: &[f64]) -> bool {
    let norm = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
    (norm - 1.0).abs() <= UNIT_TOLERANCE
}

impl SwConfig {
    pub fn new(directions: Vec<Vec<f64>>, sigma: f64) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::param("at least one slicing direction is required"));
        }
        let n = directions[0].len();
        for (k, d) in directions.iter().enumerate() {
            if d.len() != n || n == 0 {
                return Err(Error::param(format!("direction {k} has the wrong dimension")));
            }
            if !is_unit(d) {
                return Err(Error::param(format!("direction {k} is not a unit vector")));
            }
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma must be positive"));
        }
        Ok(SwConfig {
            directions,
            sigma,
            seed: None,
        })
    }

    /// `count` directions drawn uniformly on the sphere S^{n-1} by
    /// normalizing standard Gaussian vectors.
    pub fn sample(n: usize, count: usize, sigma: f64, seed: u64) -> Result<Self> {
        if n == 0 || count == 0 {
            return Err(Error::param("need n >= 1 and at least one direction"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut directions = Vec::with_capacity(count);
        while directions.len() < count {
            let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                continue;
            }
            directions.push(v.iter().map(|x| x / norm).collect());
        }
        let mut cfg = SwConfig::new(directions, sigma)?;
        cfg.seed = Some(seed);
        Ok(cfg)
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.directions[0].len()
    }

    /// Total mass of the direction measure, 1/σ.
    pub fn total_weight(&self) -> f64 {
        1.0 / self.sigma
    }
}

/// Pushforward along x ↦ ⟨x, θ⟩.
pub fn push_forward(mu: &SignedMeasure, theta: &[f64]) -> Result<SignedMeasure> {
    if theta.len() != mu.n() {
        return Err(Error::DimensionMismatch {
            expected: mu.n(),
            found: theta.len(),
        });
    }
    if !is_unit(theta) {
        return Err(Error::param("projection direction must have unit norm"));
    }
    Ok(project(mu, theta))
}

fn project(mu: &SignedMeasure, theta: &[f64]) -> SignedMeasure {
    SignedMeasure::new(
        1,
        mu.atoms()
            .iter()
            .map(|(x, w)| (vec![x.iter().zip(theta).map(|(a, b)| a * b).sum()], *w)),
    )
    .expect("projections of finite atoms are finite")
}

fn check_cfg(mu: &SignedMeasure, cfg: &SwConfig) -> Result<()> {
    if cfg.n() != mu.n() {
        return Err(Error::DimensionMismatch {
            expected: mu.n(),
            found: cfg.n(),
        });
    }
    Ok(())
}

fn sw_of_difference(lambda: &SignedMeasure, cfg: &SwConfig) -> f64 {
    let sum: f64 = cfg
        .directions
        .iter()
        .map(|theta| kr_norm_1d(&project(lambda, theta)))
        .sum();
    sum / (cfg.sigma * cfg.directions.len() as f64)
}

/// SW(μ, ν) = (1/(σ d)) Σ_θ ‖π^θ_* μ − π^θ_* ν‖^KR.
pub fn sliced_wasserstein(mu: &SignedMeasure, nu: &SignedMeasure, cfg: &SwConfig) -> Result<f64> {
    let lambda = difference(mu, nu)?;
    check_cfg(&lambda, cfg)?;
    Ok(sw_of_difference(&lambda, cfg))
}

/// Symmetric matrix of reals, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.size.max(1))
    }
}

fn check_family(measures: &[SignedMeasure], cfg: &SwConfig) -> Result<()> {
    let Some(first) = measures.first() else {
        return Ok(());
    };
    for (index, m) in measures.iter().enumerate() {
        if m.n() != cfg.n() {
            return Err(Error::IncompatibleMeasure {
                index,
                reason: format!("dimension {} differs from directions ({})", m.n(), cfg.n()),
            });
        }
        if m.total_mass() != first.total_mass() {
            return Err(Error::IncompatibleMeasure {
                index,
                reason: format!(
                    "total mass {} differs from measure #0 ({})",
                    m.total_mass(),
                    first.total_mass()
                ),
            });
        }
    }
    Ok(())
}

/// Pairwise sliced Wasserstein distances; every pair uses the same
/// direction sample.
pub fn sw_distance_matrix(measures: &[SignedMeasure], cfg: &SwConfig) -> Result<GramMatrix> {
    check_family(measures, cfg)?;
    let m = measures.len();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let lambda = measures[i].sub(&measures[j]).expect("dimensions checked");
            sw_of_difference(&lambda, cfg)
        })
        .collect();
    let mut entries = vec![0.0; m * m];
    for (&(i, j), v) in pairs.iter().zip(values) {
        entries[i * m + j] = v;
        entries[j * m + i] = v;
    }
    Ok(GramMatrix { size: m, entries })
}

/// Gram matrix of the sliced Wasserstein kernel exp(−SW).
pub fn sw_gram(measures: &[SignedMeasure], cfg: &SwConfig) -> Result<GramMatrix> {
    let d = sw_distance_matrix(measures, cfg)?;
    Ok(GramMatrix {
        size: d.size,
        entries: d.entries.iter().map(|s| (-s).exp()).collect(),
    })
}
