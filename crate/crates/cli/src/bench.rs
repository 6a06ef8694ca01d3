//! Timing of the function-Rips → Hilbert signed measure path.

use std::time::{Duration, Instant};

use mpsig_core::simplicial::{build_function_rips, vertex_descriptor, DescriptorInput};
use mpsig_core::{
    hilbert_function, hilbert_signed_measure, make_grid, Descriptor, FieldSpec, PointCloud,
    SignedMeasure,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

/// Uniform points in the unit cube.
pub fn random_cloud(points: usize, dim: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..points)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();
    PointCloud::new(pts).expect("random points are finite")
}

#[derive(Clone, Debug)]
pub struct BenchRun {
    pub threads: usize,
    pub elapsed: Duration,
    pub simplices: usize,
    pub measures: Vec<SignedMeasure>,
}

/// Function-Rips with the degree in the `radius` neighbourhood graph as
/// vertex function and Rips threshold `max_edge_length`, on a `k × k` grid,
/// computed on a dedicated pool of `threads` workers.
pub fn bench_hsm(
    cloud: &PointCloud,
    radius: f64,
    max_edge_length: f64,
    k: usize,
    degrees: &[usize],
    threads: usize,
) -> CliResult<BenchRun> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(e.to_string()))?;
    let max_dim = degrees.iter().max().map_or(1, |d| d + 1);
    pool.install(|| {
        let start = Instant::now();
        let graph = cloud.neighborhood_graph(radius)?;
        let degree = vertex_descriptor(DescriptorInput::Graph(&graph), Descriptor::Degree)?;
        let c = build_function_rips(cloud, &degree.values, max_edge_length, max_dim)?;
        let grid = make_grid(&c, k, 0.01)?;
        let h = hilbert_function(&c, degrees, &grid, FieldSpec::default())?;
        let measures = degrees
            .iter()
            .map(|&d| hilbert_signed_measure(&h, d))
            .collect::<mpsig_core::Result<Vec<_>>>()?;
        Ok(BenchRun {
            threads,
            elapsed: start.elapsed(),
            simplices: c.len(),
            measures,
        })
    })
}
