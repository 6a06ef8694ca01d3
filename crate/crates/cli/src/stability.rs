//! Random-walk stability experiment.
//!
//! Each walk starts from the constant function 0 on the vertices of a fixed
//! graph and adds independent uniform noise in `[-noise, noise]` to every
//! coordinate at every step. Every pair of steps within a walk yields one
//! row comparing the filtration distance with distances between the H₀
//! Hilbert signed measures of the lower-star bifiltrations.

use mpsig_core::simplicial::lower_star_from_values;
use mpsig_core::transport::sw_distance_matrix;
use mpsig_core::vectorize::gaussian_convolution;
use mpsig_core::{
    euler_signed_measure, hilbert_function, hilbert_signed_measure, kr_distance, AttributedGraph,
    FieldSpec, FilteredComplex, GridSpec, GroundNorm, KernelSpec, SignedMeasure, SwConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::pipeline::derive_seed;

/// Values per vertex per step: `walk[step][vertex] = [x, y]`.
pub type Walk = Vec<Vec<Vec<f64>>>;

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityOptions {
    pub steps: usize,
    pub walks: usize,
    pub noise: f64,
    pub seed: u64,
    pub euler: bool,
    pub directions: usize,
    pub sigma: f64,
    /// Gaussian bandwidth of the convolution column; defaults to `noise`.
    pub bandwidth: Option<f64>,
    /// Points per axis of the convolution quadrature grid.
    pub conv_resolution: usize,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            steps: 10,
            walks: 5,
            noise: 0.1,
            seed: 0,
            euler: false,
            directions: 50,
            sigma: 1.0,
            bandwidth: None,
            conv_resolution: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityRow {
    pub walk: usize,
    pub i: usize,
    pub j: usize,
    /// Σ over simplices of ‖f(τ) − g(τ)‖₁.
    pub l1: f64,
    pub kr1: f64,
    pub kr1_euler: Option<f64>,
    /// √(2 − 2 k_SW), the feature-space distance of the sliced Wasserstein kernel.
    pub sw_dist: f64,
    pub conv_l2: f64,
}

pub const N_PARAMETERS: usize = 2;

pub fn random_walk(vertex_count: usize, steps: usize, noise: f64, seed: u64) -> Walk {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = vec![vec![0.0; N_PARAMETERS]; vertex_count];
    let mut walk = Vec::with_capacity(steps);
    walk.push(current.clone());
    for _ in 1..steps {
        for x in current.iter_mut().flatten() {
            *x += rng.random_range(-noise..=noise);
        }
        walk.push(current.clone());
    }
    walk
}

fn check(opts: &StabilityOptions) -> CliResult<()> {
    if opts.steps < 2 {
        return Err(CliError::usage("steps must be at least 2"));
    }
    if opts.walks < 1 {
        return Err(CliError::usage("walks must be at least 1"));
    }
    if !(opts.noise > 0.0 && opts.noise.is_finite()) {
        return Err(CliError::usage("noise must be positive"));
    }
    if opts.directions == 0 || !(opts.sigma > 0.0) {
        return Err(CliError::usage("need at least one direction and sigma > 0"));
    }
    if opts.conv_resolution < 2 {
        return Err(CliError::usage("convolution resolution must be at least 2"));
    }
    if let Some(b) = opts.bandwidth {
        if !(b > 0.0 && b.is_finite()) {
            return Err(CliError::usage("bandwidth must be positive"));
        }
    }
    Ok(())
}

/// Grid containing every value taken along the walk, so that no filtration
/// value is snapped.
fn exact_grid(complexes: &[FilteredComplex]) -> mpsig_core::Result<GridSpec> {
    let axes = (0..N_PARAMETERS)
        .map(|j| {
            complexes
                .iter()
                .flat_map(|c| c.values().iter().map(move |v| v.coords()[j]))
                .collect()
        })
        .collect();
    GridSpec::exact(axes)
}

/// Regular grid covering the walk values with a margin of four bandwidths
/// for the convolution quadrature.
fn conv_grid(exact: &GridSpec, h: f64, k: usize) -> mpsig_core::Result<GridSpec> {
    let axes = (0..exact.n())
        .map(|j| {
            let v = exact.values(j);
            let lo = v[0] - 4.0 * h;
            let hi = v[v.len() - 1] + 4.0 * h;
            let step = (hi - lo) / (k - 1) as f64;
            let mut axis: Vec<f64> = (0..k).map(|i| lo + step * i as f64).collect();
            axis.push(hi + step);
            axis
        })
        .collect();
    GridSpec::from_axes(axes)
}

fn walk_rows(
    graph: &AttributedGraph,
    walk_index: usize,
    walk: &Walk,
    opts: &StabilityOptions,
    sw: &SwConfig,
) -> mpsig_core::Result<Vec<StabilityRow>> {
    let field = FieldSpec::default();
    let complexes = walk
        .iter()
        .map(|values| lower_star_from_values(graph, values))
        .collect::<mpsig_core::Result<Vec<_>>>()?;
    let grid = exact_grid(&complexes)?;
    let hsm = complexes
        .par_iter()
        .map(|c| hilbert_signed_measure(&hilbert_function(c, &[0], &grid, field)?, 0))
        .collect::<mpsig_core::Result<Vec<SignedMeasure>>>()?;
    let esm = if opts.euler {
        Some(
            complexes
                .iter()
                .map(|c| euler_signed_measure(c, &grid))
                .collect::<mpsig_core::Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let h = opts.bandwidth.unwrap_or(opts.noise);
    let kernel = KernelSpec::diagonal(&[h; N_PARAMETERS])?;
    let cgrid = conv_grid(&grid, h, opts.conv_resolution)?;
    let images = hsm
        .iter()
        .map(|m| gaussian_convolution(m, &cgrid, &kernel))
        .collect::<mpsig_core::Result<Vec<_>>>()?;
    let sw_matrix = sw_distance_matrix(&hsm, sw)?;

    let pairs: Vec<(usize, usize)> = (0..walk.len())
        .flat_map(|i| (i + 1..walk.len()).map(move |j| (i, j)))
        .collect();
    pairs
        .par_iter()
        .map(|&(i, j)| {
            let s = sw_matrix.get(i, j);
            Ok(StabilityRow {
                walk: walk_index,
                i,
                j,
                l1: complexes[i].l1_distance(&complexes[j])?,
                kr1: kr_distance(&hsm[i], &hsm[j], GroundNorm::L1)?,
                kr1_euler: esm
                    .as_ref()
                    .map(|e| kr_distance(&e[i], &e[j], GroundNorm::L1))
                    .transpose()?,
                sw_dist: (2.0 - 2.0 * (-s).exp()).max(0.0).sqrt(),
                conv_l2: images[i].l2_distance(&images[j])?,
            })
        })
        .collect()
}

/// Rows for explicitly given walks.
pub fn stability_rows(
    graph: &AttributedGraph,
    walks: &[Walk],
    opts: &StabilityOptions,
) -> CliResult<Vec<StabilityRow>> {
    let sw = SwConfig::sample(N_PARAMETERS, opts.directions, opts.sigma, opts.seed)?;
    let mut rows = Vec::new();
    for (w, walk) in walks.iter().enumerate() {
        rows.extend(walk_rows(graph, w, walk, opts, &sw)?);
    }
    Ok(rows)
}

pub fn stability_experiment(
    graph: &AttributedGraph,
    opts: &StabilityOptions,
) -> CliResult<Vec<StabilityRow>> {
    check(opts)?;
    let walks: Vec<Walk> = (0..opts.walks)
        .map(|w| {
            random_walk(
                graph.vertex_count(),
                opts.steps,
                opts.noise,
                derive_seed(opts.seed, w as u64),
            )
        })
        .collect();
    stability_rows(graph, &walks, opts)
}

pub fn rows_to_csv(rows: &[StabilityRow], euler: bool) -> Vec<u8> {
    let mut out = String::from("walk,i,j,l1,kr1");
    if euler {
        out.push_str(",kr1_euler");
    }
    out.push_str(",sw_dist,conv_l2\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}", r.walk, r.i, r.j, r.l1, r.kr1));
        if euler {
            out.push_str(&format!(",{}", r.kr1_euler.unwrap_or(f64::NAN)));
        }
        out.push_str(&format!(",{},{}\n", r.sw_dist, r.conv_l2));
    }
    out.into_bytes()
}
