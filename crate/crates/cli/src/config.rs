//! Pipeline configuration, stored as TOML.
//!
//! ```toml
//! seed = 7
//!
//! [filtration]
//! kind = "function-rips"
//! max_edge_length = 2.0
//! max_dim = 2
//! descriptor = { kind = "kde_codensity", bandwidth = 0.5 }
//!
//! [homology]
//! degrees = [0, 1]
//! field = 11
//! measure = "hilbert"
//!
//! [grid]
//! resolution = 50
//! beta = 0.01
//!
//! [vectorization]
//! kind = "convolution"
//! ```

use std::path::Path;

use mpsig_core::simplicial::Descriptor;
use mpsig_core::FieldSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    /// Per-axis factors applied to atom coordinates before convolution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
    pub filtration: FiltrationConfig,
    #[serde(default)]
    pub homology: HomologyConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub vectorization: VectorizationConfig,
}

fn infinite() -> f64 {
    f64::INFINITY
}

fn two() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FiltrationConfig {
    Rips {
        #[serde(default = "infinite")]
        max_edge_length: f64,
        #[serde(default = "two")]
        max_dim: usize,
    },
    /// `(diameter, −min f)` for a vertex descriptor f. Graph descriptors
    /// (degree, closeness, hks) are evaluated on the neighbourhood graph of
    /// radius `neighborhood_radius`, which defaults to `max_edge_length`.
    FunctionRips {
        #[serde(default = "infinite")]
        max_edge_length: f64,
        #[serde(default = "two")]
        max_dim: usize,
        descriptor: Descriptor,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        neighborhood_radius: Option<f64>,
    },
    LowerStar {
        attributes: Vec<String>,
    },
}

impl FiltrationConfig {
    pub fn n_parameters(&self) -> usize {
        match self {
            FiltrationConfig::Rips { .. } => 1,
            FiltrationConfig::FunctionRips { .. } => 2,
            FiltrationConfig::LowerStar { attributes } => attributes.len(),
        }
    }

    pub fn takes_graph(&self) -> bool {
        matches!(self, FiltrationConfig::LowerStar { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Hilbert,
    Euler,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomologyConfig {
    pub degrees: Vec<usize>,
    pub field: u32,
    pub measure: MeasureKind,
}

impl Default for HomologyConfig {
    fn default() -> Self {
        HomologyConfig {
            degrees: vec![0, 1],
            field: 11,
            measure: MeasureKind::Hilbert,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub resolution: usize,
    pub beta: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            resolution: 50,
            beta: 0.01,
        }
    }
}

fn fifty() -> usize {
    50
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VectorizationConfig {
    /// Signed measures are written as they are.
    None,
    /// Gaussian convolution on the sample grid; bandwidths default to five
    /// grid spacings per axis.
    Convolution {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bandwidths: Option<Vec<f64>>,
    },
    /// Sliced Wasserstein Gram matrix over all samples, one per measure.
    SlicedWasserstein {
        #[serde(default = "fifty")]
        directions: usize,
        #[serde(default = "one")]
        sigma: f64,
    },
}

impl Default for VectorizationConfig {
    fn default() -> Self {
        VectorizationConfig::Convolution { bandwidths: None }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::usage(format!("invalid config: {}", msg.into()))
}

fn positive(x: f64) -> bool {
    x > 0.0 && !x.is_nan()
}

fn check_descriptor(d: &Descriptor) -> CliResult<()> {
    match *d {
        Descriptor::Hks { t } if !(positive(t) && t.is_finite()) => {
            Err(bad("hks time must be positive"))
        }
        Descriptor::KdeCodensity { bandwidth } if !(positive(bandwidth) && bandwidth.is_finite()) => {
            Err(bad("kde bandwidth must be positive"))
        }
        Descriptor::Dtm { mass } if !(mass > 0.0 && mass <= 1.0) => {
            Err(bad("dtm mass must lie in (0, 1]"))
        }
        _ => Ok(()),
    }
}

pub(crate) fn needs_graph(d: &Descriptor) -> bool {
    matches!(
        d,
        Descriptor::Degree | Descriptor::Closeness | Descriptor::Hks { .. }
    )
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let cfg = Self::from_toml(&text).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn n_parameters(&self) -> usize {
        self.filtration.n_parameters()
    }

    pub fn field(&self) -> CliResult<FieldSpec> {
        FieldSpec::new(self.homology.field).map_err(|e| bad(e.to_string()))
    }

    /// Checks every parameter up front so no sample starts with a bad
    /// configuration.
    pub fn validate(&self) -> CliResult<()> {
        let n = self.n_parameters();
        match &self.filtration {
            FiltrationConfig::Rips {
                max_edge_length,
                max_dim,
            }
            | FiltrationConfig::FunctionRips {
                max_edge_length,
                max_dim,
                ..
            } => {
                if !positive(*max_edge_length) {
                    return Err(bad("max_edge_length must be positive"));
                }
                let top = self.homology.degrees.iter().max().copied().unwrap_or(0);
                if self.homology.measure == MeasureKind::Hilbert && *max_dim < top + 1 {
                    return Err(bad(format!(
                        "max_dim {max_dim} is too small for homology in degree {top}"
                    )));
                }
            }
            FiltrationConfig::LowerStar { attributes } => {
                if attributes.is_empty() {
                    return Err(bad("lower-star filtration needs at least one attribute"));
                }
            }
        }
        if let FiltrationConfig::FunctionRips {
            max_edge_length,
            descriptor,
            neighborhood_radius,
            ..
        } = &self.filtration
        {
            check_descriptor(descriptor)?;
            if needs_graph(descriptor) {
                let r = neighborhood_radius.unwrap_or(*max_edge_length);
                if !(positive(r) && r.is_finite()) {
                    return Err(bad(
                        "graph descriptors need a finite neighborhood_radius or max_edge_length",
                    ));
                }
            }
        }
        if self.homology.degrees.is_empty() {
            return Err(bad("at least one homology degree is required"));
        }
        let mut sorted = self.homology.degrees.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.homology.degrees.len() {
            return Err(bad("homology degrees must be distinct"));
        }
        self.field()?;
        if self.grid.resolution < 2 {
            return Err(bad("grid resolution must be at least 2"));
        }
        if !(0.0..0.5).contains(&self.grid.beta) {
            return Err(bad("grid beta must lie in [0, 0.5)"));
        }
        if let Some(scales) = &self.scales {
            if scales.len() != n {
                return Err(bad(format!("expected {n} scales, found {}", scales.len())));
            }
            if !scales.iter().all(|s| positive(*s) && s.is_finite()) {
                return Err(bad("scales must be positive"));
            }
        }
        match &self.vectorization {
            VectorizationConfig::None => {}
            VectorizationConfig::Convolution { bandwidths } => {
                if let Some(b) = bandwidths {
                    if b.len() != n {
                        return Err(bad(format!("expected {n} bandwidths, found {}", b.len())));
                    }
                    if !b.iter().all(|x| positive(*x) && x.is_finite()) {
                        return Err(bad("bandwidths must be positive"));
                    }
                }
            }
            VectorizationConfig::SlicedWasserstein { directions, sigma } => {
                if *directions == 0 {
                    return Err(bad("at least one slicing direction is required"));
                }
                if !(positive(*sigma) && sigma.is_finite()) {
                    return Err(bad("sigma must be positive"));
                }
            }
        }
        Ok(())
    }
}
