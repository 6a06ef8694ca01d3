use std::collections::HashSet;
use std::path::{Path, PathBuf};

use mpsig_core::io;
use mpsig_core::simplicial::{
    build_function_rips, build_rips, lower_star_multifiltration, vertex_descriptor,
    DescriptorInput,
};
use mpsig_core::vectorize::{default_bandwidths, gaussian_convolution_scaled};
use mpsig_core::{
    assemble_features, euler_signed_measure, hilbert_function, hilbert_signed_measure, make_grid,
    sw_gram, FilteredComplex, GridSpec, KernelSpec, SignedMeasure, SwConfig,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{needs_graph, FiltrationConfig, MeasureKind, PipelineConfig, VectorizationConfig};
use crate::error::{CliError, CliResult};

/// splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index`; depends only on the master seed and the index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

#[derive(Clone, Debug, PartialEq)]
pub enum SampleInput {
    Cloud(PathBuf),
    Graph {
        edges: PathBuf,
        attributes: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub id: String,
    pub spec: String,
    pub input: SampleInput,
}

/// Graph samples are written `EDGES` or `EDGES:ATTRIBUTES`.
pub fn parse_samples(inputs: &[String], graphs: bool) -> Vec<Sample> {
    let mut seen = HashSet::new();
    inputs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let input = if graphs {
                match spec.split_once(':') {
                    Some((e, a)) => SampleInput::Graph {
                        edges: e.into(),
                        attributes: Some(a.into()),
                    },
                    None => SampleInput::Graph {
                        edges: spec.into(),
                        attributes: None,
                    },
                }
            } else {
                SampleInput::Cloud(spec.into())
            };
            let main = match &input {
                SampleInput::Cloud(p) | SampleInput::Graph { edges: p, .. } => p,
            };
            let stem = main
                .file_stem()
                .map_or_else(|| format!("sample{i}"), |s| s.to_string_lossy().into_owned());
            let id = if seen.insert(stem.clone()) {
                stem
            } else {
                format!("{stem}-{i}")
            };
            seen.insert(id.clone());
            Sample {
                id,
                spec: spec.clone(),
                input,
            }
        })
        .collect()
}

pub fn build_complex(input: &SampleInput, filtration: &FiltrationConfig) -> mpsig_core::Result<FilteredComplex> {
    match (filtration, input) {
        (
            FiltrationConfig::Rips {
                max_edge_length,
                max_dim,
            },
            SampleInput::Cloud(p),
        ) => build_rips(&io::read_point_cloud(p)?, *max_edge_length, *max_dim),
        (
            FiltrationConfig::FunctionRips {
                max_edge_length,
                max_dim,
                descriptor,
                neighborhood_radius,
            },
            SampleInput::Cloud(p),
        ) => {
            let cloud = io::read_point_cloud(p)?;
            let values = if needs_graph(descriptor) {
                let g = cloud.neighborhood_graph(neighborhood_radius.unwrap_or(*max_edge_length))?;
                vertex_descriptor(DescriptorInput::Graph(&g), *descriptor)?
            } else {
                vertex_descriptor(DescriptorInput::Cloud(&cloud), *descriptor)?
            };
            build_function_rips(&cloud, &values.values, *max_edge_length, *max_dim)
        }
        (FiltrationConfig::LowerStar { attributes }, SampleInput::Graph { edges, attributes: attr_path }) => {
            let g = io::read_graph(edges, attr_path.as_deref())?;
            let names: Vec<&str> = attributes.iter().map(String::as_str).collect();
            lower_star_multifiltration(&g, &names)
        }
        _ => Err(mpsig_core::Error::InvalidParameter(
            "input kind does not match the filtration".into(),
        )),
    }
}

/// Labelled signed measures of one complex on one grid: `h<d>` per degree,
/// or `euler`.
pub fn compute_measures(
    c: &FilteredComplex,
    grid: &GridSpec,
    cfg: &PipelineConfig,
) -> mpsig_core::Result<Vec<(String, SignedMeasure)>> {
    match cfg.homology.measure {
        MeasureKind::Hilbert => {
            let field = mpsig_core::FieldSpec::new(cfg.homology.field)?;
            let h = hilbert_function(c, &cfg.homology.degrees, grid, field)?;
            cfg.homology
                .degrees
                .iter()
                .map(|&d| Ok((format!("h{d}"), hilbert_signed_measure(&h, d)?)))
                .collect()
        }
        MeasureKind::Euler => Ok(vec![("euler".into(), euler_signed_measure(c, grid)?)]),
    }
}

struct SampleOutput {
    grid: GridSpec,
    measures: Vec<(String, SignedMeasure)>,
    features: Option<(Vec<f64>, Vec<f64>)>,
}

fn process(sample: &Sample, cfg: &PipelineConfig) -> mpsig_core::Result<SampleOutput> {
    let c = build_complex(&sample.input, &cfg.filtration)?;
    let grid = make_grid(&c, cfg.grid.resolution, cfg.grid.beta)?;
    let measures = compute_measures(&c, &grid, cfg)?;
    let features = match &cfg.vectorization {
        VectorizationConfig::Convolution { bandwidths } => {
            let bw = bandwidths.clone().unwrap_or_else(|| default_bandwidths(&grid));
            let kernel = KernelSpec::diagonal(&bw)?;
            let scales = cfg.scales.clone().unwrap_or_else(|| vec![1.0; grid.n()]);
            let images = measures
                .iter()
                .map(|(_, m)| gaussian_convolution_scaled(m, &grid, &kernel, &scales))
                .collect::<mpsig_core::Result<Vec<_>>>()?;
            Some((assemble_features(&images)?, bw))
        }
        _ => None,
    };
    Ok(SampleOutput {
        grid,
        measures,
        features,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub id: String,
    pub input: String,
    pub seed: u64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub outputs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub config: String,
    pub samples: Vec<ManifestEntry>,
    pub outputs: Vec<String>,
}

#[derive(Serialize)]
struct SampleMeta<'a> {
    id: &'a str,
    grid: &'a GridSpec,
    bandwidths: &'a [f64],
    length: usize,
}

#[derive(Serialize)]
struct FeatureMeta<'a> {
    kernel: &'static str,
    scales: Vec<f64>,
    seed: u64,
    measures: Vec<String>,
    samples: Vec<SampleMeta<'a>>,
}

#[derive(Debug)]
pub struct RunReport {
    pub manifest: Manifest,
    /// Samples that failed, when `keep_going` was set.
    pub failures: Vec<CliError>,
}

/// Runs the whole pipeline over `inputs` and writes into `out`:
///
/// * `features.csv` and `features.meta.json` for convolution,
/// * `measures/<id>.<label>.json` otherwise, plus `gram_<label>.csv` for
///   the sliced Wasserstein kernel,
/// * `manifest.json`, written once after all samples finish.
pub fn run_pipeline(
    inputs: &[String],
    cfg: &PipelineConfig,
    out: &Path,
    keep_going: bool,
) -> CliResult<RunReport> {
    cfg.validate()?;
    if inputs.is_empty() {
        return Err(CliError::usage("no input files"));
    }
    let samples = parse_samples(inputs, cfg.filtration.takes_graph());
    let results: Vec<mpsig_core::Result<SampleOutput>> =
        samples.par_iter().map(|s| process(s, cfg)).collect();

    let mut failures = Vec::new();
    let mut done: Vec<Option<SampleOutput>> = Vec::with_capacity(samples.len());
    let mut entries: Vec<ManifestEntry> = Vec::with_capacity(samples.len());
    for (i, (s, r)) in samples.iter().zip(results).enumerate() {
        let mut entry = ManifestEntry {
            id: s.id.clone(),
            input: s.spec.clone(),
            seed: derive_seed(cfg.seed, i as u64),
            status: "ok".into(),
            error: None,
            outputs: Vec::new(),
        };
        match r {
            Ok(o) => done.push(Some(o)),
            Err(e) => {
                entry.status = "failed".into();
                entry.error = Some(e.to_string());
                let err = CliError::Sample {
                    sample: s.spec.clone(),
                    source: e,
                };
                if !keep_going {
                    return Err(err);
                }
                failures.push(err);
                done.push(None);
            }
        }
        entries.push(entry);
    }
    std::fs::create_dir_all(out)?;
    let ok: Vec<(usize, &SampleOutput)> = done
        .iter()
        .enumerate()
        .filter_map(|(i, o)| o.as_ref().map(|o| (i, o)))
        .collect();

    let mut outputs = Vec::new();
    match &cfg.vectorization {
        VectorizationConfig::Convolution { .. } => {
            let rows: Vec<(String, Vec<f64>)> = ok
                .iter()
                .map(|(i, o)| (samples[*i].id.clone(), o.features.as_ref().unwrap().0.clone()))
                .collect();
            io::write_atomic(&out.join("features.csv"), &io::features_to_csv(&rows))?;
            let meta = FeatureMeta {
                kernel: "gaussian",
                scales: cfg.scales.clone().unwrap_or_else(|| vec![1.0; cfg.n_parameters()]),
                seed: cfg.seed,
                measures: ok
                    .first()
                    .map(|(_, o)| o.measures.iter().map(|m| m.0.clone()).collect())
                    .unwrap_or_default(),
                samples: ok
                    .iter()
                    .map(|(i, o)| {
                        let (f, bw) = o.features.as_ref().unwrap();
                        SampleMeta {
                            id: &samples[*i].id,
                            grid: &o.grid,
                            bandwidths: bw,
                            length: f.len(),
                        }
                    })
                    .collect(),
            };
            let text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
            io::write_atomic(&out.join("features.meta.json"), text.as_bytes())?;
            for (i, _) in &ok {
                entries[*i].outputs.push("features.csv".into());
            }
            outputs.push("features.csv".to_string());
            outputs.push("features.meta.json".to_string());
        }
        VectorizationConfig::None | VectorizationConfig::SlicedWasserstein { .. } => {
            for (i, o) in &ok {
                for (label, m) in &o.measures {
                    let name = format!("measures/{}.{label}.json", samples[*i].id);
                    io::write_measure(&out.join(&name), m)?;
                    entries[*i].outputs.push(name);
                }
            }
        }
    }
    if let VectorizationConfig::SlicedWasserstein { directions, sigma } = &cfg.vectorization {
        let sw = SwConfig::sample(cfg.n_parameters(), *directions, *sigma, cfg.seed)?;
        let ids: Vec<String> = ok.iter().map(|(i, _)| samples[*i].id.clone()).collect();
        let labels: Vec<String> = ok
            .first()
            .map(|(_, o)| o.measures.iter().map(|m| m.0.clone()).collect())
            .unwrap_or_default();
        for (k, label) in labels.iter().enumerate() {
            let family: Vec<SignedMeasure> = ok.iter().map(|(_, o)| o.measures[k].1.clone()).collect();
            let gram = sw_gram(&family, &sw)?;
            let name = format!("gram_{label}.csv");
            io::write_atomic(&out.join(&name), &io::gram_to_csv(&gram, &ids)?)?;
            outputs.push(name);
        }
    }

    let manifest = Manifest {
        tool: "mpsig".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        config: cfg.to_toml(),
        samples: entries,
        outputs,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    io::write_atomic(&out.join("manifest.json"), text.as_bytes())?;
    Ok(RunReport { manifest, failures })
}
