use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use mpsig_core::io;
use mpsig_core::simplicial::{lower_star_multifiltration, vertex_descriptor, DescriptorInput};
use mpsig_core::{
    build_function_rips, build_rips, kr_distance, make_grid, sliced_wasserstein, sw_gram,
    Descriptor, FilteredComplex, GroundNorm, SwConfig,
};

use crate::bench::{bench_hsm, random_cloud};
use crate::config::{GridConfig, HomologyConfig, MeasureKind, PipelineConfig, FiltrationConfig, VectorizationConfig};
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_USAGE};
use crate::pipeline::{compute_measures, run_pipeline};
use crate::stability::{rows_to_csv, stability_experiment, StabilityOptions};

#[derive(Debug, Parser)]
#[command(name = "mpsig", version, about = "Signed-measure descriptors for multiparameter persistence")]
pub struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Skip samples that fail instead of aborting.
    #[arg(long, global = true)]
    pub keep_going: bool,
    /// Output file or directory; stdout when omitted and the command has a
    /// single output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Metric {
    Kr,
    Sw,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rips complex of a point cloud, written as complex JSON.
    Rips {
        input: PathBuf,
        #[arg(long, default_value_t = f64::INFINITY)]
        max_edge_length: f64,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
    },
    /// Function-Rips bifiltration of a point cloud.
    FunctionRips {
        input: PathBuf,
        /// degree | closeness | hks:T | kde:BANDWIDTH | dtm:MASS
        #[arg(long)]
        descriptor: String,
        #[arg(long, default_value_t = f64::INFINITY)]
        max_edge_length: f64,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        /// Neighbourhood radius for graph descriptors (default: max edge length).
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Lower-star multifiltration of an attributed graph.
    Graph {
        edges: PathBuf,
        #[arg(long)]
        attributes: PathBuf,
        /// Attribute columns, one per parameter.
        #[arg(long = "use", value_delimiter = ',', required = true)]
        columns: Vec<String>,
    },
    /// Hilbert (or Euler) signed measures of a complex file.
    Measure {
        complex: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        degrees: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        resolution: usize,
        #[arg(long, default_value_t = 0.01)]
        beta: f64,
        #[arg(long, default_value_t = 11)]
        field: u32,
        #[arg(long)]
        euler: bool,
    },
    /// Full pipeline over many samples, driven by --config.
    Featurize {
        #[arg(required = true)]
        inputs: Vec<String>,
    },
    /// Distance between two signed-measure files.
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "kr")]
        metric: Metric,
        /// Ground norm: 1, 2 or inf.
        #[arg(long, default_value = "1")]
        p: String,
        #[arg(long, default_value_t = 50)]
        directions: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
    /// Sliced Wasserstein Gram matrix of signed-measure files.
    Gram {
        #[arg(required = true)]
        measures: Vec<PathBuf>,
        #[arg(long, default_value_t = 50)]
        directions: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
    /// Random-walk stability table for a graph.
    Stability {
        edges: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 5)]
        walks: usize,
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[arg(long)]
        euler: bool,
        #[arg(long, default_value_t = 50)]
        directions: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Convolution bandwidth (default: the noise level).
        #[arg(long)]
        bandwidth: Option<f64>,
    },
    /// Time the function-Rips Hilbert pipeline at several thread counts.
    Bench {
        /// Point cloud; a seeded uniform cloud is generated when omitted.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Neighbourhood radius of the degree function.
        #[arg(long, default_value_t = 0.2)]
        radius: f64,
        #[arg(long, default_value_t = f64::INFINITY)]
        max_edge_length: f64,
        #[arg(long, default_value_t = 50)]
        resolution: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        degrees: Vec<usize>,
        /// Thread counts to compare.
        #[arg(long, value_delimiter = ',', default_value = "1,4")]
        compare: Vec<usize>,
    },
}

pub fn parse_descriptor(spec: &str) -> CliResult<Descriptor> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let number = |what: &str| -> CliResult<f64> {
        arg.ok_or_else(|| CliError::usage(format!("descriptor `{name}` needs {what}")))?
            .parse()
            .map_err(|_| CliError::usage(format!("bad {what} in descriptor `{spec}`")))
    };
    match name {
        "degree" => Ok(Descriptor::Degree),
        "closeness" => Ok(Descriptor::Closeness),
        "hks" => Ok(Descriptor::Hks { t: number("a time")? }),
        "kde" => Ok(Descriptor::KdeCodensity {
            bandwidth: number("a bandwidth")?,
        }),
        "dtm" => Ok(Descriptor::Dtm { mass: number("a mass")? }),
        other => Err(CliError::usage(format!("unknown descriptor `{other}`"))),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(p) => Ok(io::write_atomic(p, bytes)?),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn emit_complex(out: Option<&Path>, c: &FilteredComplex) -> CliResult<()> {
    emit(out, io::complex_to_json(c).as_bytes())
}

fn require_out(out: Option<&Path>, command: &str) -> CliResult<PathBuf> {
    out.map(Path::to_path_buf)
        .ok_or_else(|| CliError::usage(format!("`{command}` needs --out")))
}

pub fn execute(cli: Cli) -> CliResult<()> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Rips {
            input,
            max_edge_length,
            max_dim,
        } => {
            let cloud = io::read_point_cloud(&input)?;
            emit_complex(out, &build_rips(&cloud, max_edge_length, max_dim)?)
        }
        Command::FunctionRips {
            input,
            descriptor,
            max_edge_length,
            max_dim,
            radius,
        } => {
            let d = parse_descriptor(&descriptor)?;
            let cloud = io::read_point_cloud(&input)?;
            let values = if crate::config::needs_graph(&d) {
                let r = radius.unwrap_or(max_edge_length);
                if !r.is_finite() {
                    return Err(CliError::usage("graph descriptors need --radius"));
                }
                let g = cloud.neighborhood_graph(r)?;
                vertex_descriptor(DescriptorInput::Graph(&g), d)?
            } else {
                vertex_descriptor(DescriptorInput::Cloud(&cloud), d)?
            };
            if let Some(conv) = values.convention {
                eprintln!("descriptor convention: {conv}");
            }
            emit_complex(
                out,
                &build_function_rips(&cloud, &values.values, max_edge_length, max_dim)?,
            )
        }
        Command::Graph {
            edges,
            attributes,
            columns,
        } => {
            let g = io::read_graph(&edges, Some(&attributes))?;
            let names: Vec<&str> = columns.iter().map(String::as_str).collect();
            emit_complex(out, &lower_star_multifiltration(&g, &names)?)
        }
        Command::Measure {
            complex,
            degrees,
            resolution,
            beta,
            field,
            euler,
        } => {
            let dir = require_out(out, "measure")?;
            let c = io::read_complex(&complex)?;
            let cfg = PipelineConfig {
                seed: 0,
                scales: None,
                filtration: FiltrationConfig::Rips {
                    max_edge_length: f64::INFINITY,
                    max_dim: c.max_dim().unwrap_or(0),
                },
                homology: HomologyConfig {
                    degrees,
                    field,
                    measure: if euler { MeasureKind::Euler } else { MeasureKind::Hilbert },
                },
                grid: GridConfig { resolution, beta },
                vectorization: VectorizationConfig::None,
            };
            cfg.field()?;
            let grid = make_grid(&c, resolution, beta)?;
            for (label, m) in compute_measures(&c, &grid, &cfg)? {
                io::write_measure(&dir.join(format!("{label}.json")), &m)?;
            }
            Ok(())
        }
        Command::Featurize { inputs } => {
            let path = cli
                .config
                .as_deref()
                .ok_or_else(|| CliError::usage("`featurize` needs --config"))?;
            let mut cfg = PipelineConfig::load(path)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let dir = require_out(out, "featurize")?;
            let report = run_pipeline(&inputs, &cfg, &dir, cli.keep_going)?;
            match report.failures.into_iter().next() {
                None => Ok(()),
                Some(first) => Err(first),
            }
        }
        Command::Distance {
            a,
            b,
            metric,
            p,
            directions,
            sigma,
        } => {
            let mu = io::read_measure(&a)?;
            let nu = io::read_measure(&b)?;
            let value = match metric {
                Metric::Kr => kr_distance(&mu, &nu, p.parse::<GroundNorm>()?)?,
                Metric::Sw => {
                    let cfg = SwConfig::sample(mu.n(), directions, sigma, cli.seed.unwrap_or(0))?;
                    sliced_wasserstein(&mu, &nu, &cfg)?
                }
            };
            emit(out, format!("{value}\n").as_bytes())
        }
        Command::Gram {
            measures,
            directions,
            sigma,
        } => {
            let family = measures
                .iter()
                .map(|p| io::read_measure(p))
                .collect::<mpsig_core::Result<Vec<_>>>()?;
            let cfg = SwConfig::sample(family[0].n(), directions, sigma, cli.seed.unwrap_or(0))?;
            let gram = sw_gram(&family, &cfg)?;
            let ids: Vec<String> = measures
                .iter()
                .map(|p| p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned()))
                .collect();
            emit(out, &io::gram_to_csv(&gram, &ids)?)
        }
        Command::Stability {
            edges,
            steps,
            walks,
            noise,
            euler,
            directions,
            sigma,
            bandwidth,
        } => {
            let g = io::read_graph(&edges, None)?;
            let opts = StabilityOptions {
                steps,
                walks,
                noise,
                seed: cli.seed.unwrap_or(0),
                euler,
                directions,
                sigma,
                bandwidth,
                ..Default::default()
            };
            let rows = stability_experiment(&g, &opts)?;
            emit(out, &rows_to_csv(&rows, euler))
        }
        Command::Bench {
            input,
            points,
            radius,
            max_edge_length,
            resolution,
            degrees,
            compare,
        } => {
            let cloud = match input {
                Some(p) => io::read_point_cloud(&p)?,
                None => random_cloud(points, 2, cli.seed.unwrap_or(0)),
            };
            let mut report = String::from("threads,seconds,simplices,atoms\n");
            for threads in compare {
                let run = bench_hsm(&cloud, radius, max_edge_length, resolution, &degrees, threads)?;
                let atoms: usize = run.measures.iter().map(|m| m.len()).sum();
                report.push_str(&format!(
                    "{},{:.4},{},{}\n",
                    run.threads,
                    run.elapsed.as_secs_f64(),
                    run.simplices,
                    atoms
                ));
            }
            emit(out, report.as_bytes())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        // only fails if the global pool already exists, e.g. in tests
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
