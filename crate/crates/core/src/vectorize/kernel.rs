use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum KernelDef {
    Gaussian { covariance: Vec<Vec<f64>> },
    Tent { n: usize, radius: f64, slope: f64 },
}

#[derive(Clone, Debug, PartialEq)]
enum Compiled {
    Gaussian {
        inverse: Vec<f64>,
        det: f64,
        min_eigenvalue: f64,
    },
    Tent,
}

/// Convolution kernel on ℝⁿ.
///
/// `Gaussian` is the normalized density of N(0, Σ). `Tent` is the compactly
/// supported cone `u ↦ slope · max(0, radius − ‖u‖₂)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelDef", into = "KernelDef")]
pub struct KernelSpec {
    def: KernelDef,
    compiled: Compiled,
}

impl TryFrom<KernelDef> for KernelSpec {
    type Error = Error;
    fn try_from(def: KernelDef) -> Result<Self> {
        match def {
            KernelDef::Gaussian { covariance } => KernelSpec::gaussian(covariance),
            KernelDef::Tent { n, radius, slope } => KernelSpec::tent(n, radius, slope),
        }
    }
}

impl From<KernelSpec> for KernelDef {
    fn from(k: KernelSpec) -> Self {
        k.def
    }
}

impl KernelSpec {
    /// Gaussian kernel with covariance Σ, which must be symmetric positive
    /// definite.
    pub fn gaussian(covariance: Vec<Vec<f64>>) -> Result<Self> {
        let n = covariance.len();
        if n == 0 || covariance.iter().any(|row| row.len() != n) {
            return Err(Error::param("covariance must be a non-empty square matrix"));
        }
        if covariance.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::param("covariance entries must be finite"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| covariance[i][j]);
        let scale = m.abs().max().max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::param("covariance must be symmetric"));
                }
            }
        }
        let eig = m.clone().symmetric_eigen();
        let min_eigenvalue = eig.eigenvalues.min();
        if min_eigenvalue <= 0.0 {
            return Err(Error::param(format!(
                "covariance is not positive definite (smallest eigenvalue {min_eigenvalue:e})"
            )));
        }
        let chol = m
            .cholesky()
            .ok_or_else(|| Error::param("covariance is not positive definite"))?;
        let det = chol.determinant();
        let inv = chol.inverse();
        let inverse = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| inv[(i, j)])
            .collect();
        Ok(KernelSpec {
            def: KernelDef::Gaussian { covariance },
            compiled: Compiled::Gaussian {
                inverse,
                det,
                min_eigenvalue,
            },
        })
    }

    /// Gaussian kernel with Σ = diag(bandwidth²).
    pub fn diagonal(bandwidths: &[f64]) -> Result<Self> {
        if bandwidths.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return Err(Error::param("bandwidths must be positive"));
        }
        let n = bandwidths.len();
        let cov = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { bandwidths[i] * bandwidths[i] } else { 0.0 })
                    .collect()
            })
            .collect();
        KernelSpec::gaussian(cov)
    }

    pub fn tent(n: usize, radius: f64, slope: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("tent kernel needs n >= 1"));
        }
        if !(radius > 0.0 && radius.is_finite() && slope > 0.0 && slope.is_finite()) {
            return Err(Error::param("tent radius and slope must be positive"));
        }
        Ok(KernelSpec {
            def: KernelDef::Tent { n, radius, slope },
            compiled: Compiled::Tent,
        })
    }

    pub fn n(&self) -> usize {
        match &self.def {
            KernelDef::Gaussian { covariance } => covariance.len(),
            KernelDef::Tent { n, .. } => *n,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.def, KernelDef::Gaussian { .. })
    }

    pub fn covariance(&self) -> Option<&[Vec<f64>]> {
        match &self.def {
            KernelDef::Gaussian { covariance } => Some(covariance),
            KernelDef::Tent { .. } => None,
        }
    }

    /// Squared Mahalanobis norm ‖u‖²_{Σ⁻¹} (Gaussian only).
    fn mahalanobis2(inverse: &[f64], u: &[f64]) -> f64 {
        let n = u.len();
        let mut s = 0.0;
        for i in 0..n {
            let row = &inverse[i * n..(i + 1) * n];
            s += u[i] * row.iter().zip(u).map(|(a, b)| a * b).sum::<f64>();
        }
        s
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        match (&self.def, &self.compiled) {
            (KernelDef::Gaussian { .. }, Compiled::Gaussian { inverse, det, .. }) => {
                let n = u.len() as f64;
                (-0.5 * Self::mahalanobis2(inverse, u)).exp() / ((2.0 * PI).powf(n) * det).sqrt()
            }
            (KernelDef::Tent { radius, slope, .. }, _) => {
                let r = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                slope * (radius - r).max(0.0)
            }
            _ => unreachable!("kernel definition and compiled form disagree"),
        }
    }

    /// Radius outside of which the kernel is negligible (Gaussian: 9 standard
    /// deviations along the widest direction) or exactly zero (tent).
    pub fn effective_radius(&self) -> f64 {
        match &self.def {
            KernelDef::Gaussian { covariance } => {
                let widest = (0..covariance.len())
                    .map(|i| covariance[i][i])
                    .fold(0.0, f64::max);
                9.0 * widest.sqrt()
            }
            KernelDef::Tent { radius, .. } => *radius,
        }
    }

    /// Constant c with ‖K_y − K_z‖₂ ≤ c‖y − z‖₂ for all y, z.
    ///
    /// Gaussian: ‖Σ⁻¹‖₂^{1/2} / (√2 π^{n/4} det(Σ)^{1/4}).
    /// Tent: a · √(2 · vol(supp K)).
    pub fn lipschitz_constant(&self) -> f64 {
        match (&self.def, &self.compiled) {
            (
                KernelDef::Gaussian { covariance },
                Compiled::Gaussian {
                    det,
                    min_eigenvalue,
                    ..
                },
            ) => {
                let n = covariance.len() as f64;
                (1.0 / min_eigenvalue).sqrt() / (2f64.sqrt() * PI.powf(n / 4.0) * det.powf(0.25))
            }
            (KernelDef::Tent { n, radius, slope }, _) => {
                slope * (2.0 * ball_volume(*n, *radius)).sqrt()
            }
            _ => unreachable!("kernel definition and compiled form disagree"),
        }
    }

    /// Exact ‖K(· − y) − K(· − z)‖₂ for the Gaussian kernel.
    ///
    /// ‖K‖₂² = 1/(2ⁿ π^{n/2} √det Σ) and ⟨K_y, K_z⟩ = ‖K‖₂² exp(−‖(y−z)/2‖²_{Σ⁻¹}),
    /// so the squared distance is 2(1 − exp(−‖(y−z)/2‖²_{Σ⁻¹})) / (2ⁿ π^{n/2} √det Σ).
    pub fn closed_form_distance(&self, y: &[f64], z: &[f64]) -> Option<f64> {
        let Compiled::Gaussian { inverse, det, .. } = &self.compiled else {
            return None;
        };
        let n = y.len() as f64;
        let half: Vec<f64> = y.iter().zip(z).map(|(a, b)| 0.5 * (a - b)).collect();
        let m = Self::mahalanobis2(inverse, &half);
        // 1 − e^{−m} without cancellation for small m
        let sq = -2.0 * (-m).exp_m1() / (2f64.powf(n) * PI.powf(n / 2.0) * det.sqrt());
        Some(sq.sqrt())
    }
}

/// Volume of the Euclidean ball of the given radius in ℝⁿ.
pub fn ball_volume(n: usize, radius: f64) -> f64 {
    // V_0 = 1, V_1 = 2r, V_n = V_{n-2} · 2πr²/n
    let (mut even, mut odd) = (1.0, 2.0 * radius);
    if n == 0 {
        return 1.0;
    }
    let mut k = 1;
    while k < n {
        k += 1;
        let next = if k % 2 == 0 { &mut even } else { &mut odd };
        *next *= 2.0 * PI * radius * radius / k as f64;
    }
    if n % 2 == 0 {
        even
    } else {
        odd
    }
}
