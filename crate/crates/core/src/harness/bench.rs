//! Wall-clock scaling of the Chebyshev recurrence with edge count.

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{anonymous_nodes, build_graph, ReasoningGraph};
use crate::laplacian::combinatorial_laplacian;
use crate::spectral::{chebyshev_filter, gershgorin_bound, ChebyshevFilter, GraphSignal};

/// Average degree of the generated graphs.
pub const MEAN_DEGREE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchOptions {
    pub samples: usize,
    /// Each sample repeats the filter until at least this long.
    pub min_sample_ms: f64,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            samples: 7,
            min_sample_ms: 20.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub edges: usize,
    pub nodes: usize,
    pub order: usize,
    pub median_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of log time against log edges; needs two sizes.
    pub slope: Option<f64>,
}

impl ScalingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("edges,nodes,order,median_ms\n");
        for r in &self.rows {
            out += &format!("{},{},{},{}\n", r.edges, r.nodes, r.order, r.median_ms);
        }
        out
    }
}

/// Uniform random simple graph with exactly `edges` edges.
pub fn random_sparse_graph(edges: usize, seed: u64) -> Result<ReasoningGraph> {
    let n = (2 * edges / MEAN_DEGREE).max(16);
    let possible = n * (n - 1) / 2;
    if edges > possible {
        return Err(Error::BadParams(format!("{edges} edges do not fit on {n} nodes")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(edges);
    let mut list = Vec::with_capacity(edges);
    while list.len() < edges {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j {
            continue;
        }
        let key = (i.min(j), i.max(j));
        if seen.insert(key) {
            list.push((key.0, key.1, rng.random_range(0.5..1.5)));
        }
    }
    build_graph(anonymous_nodes(n), &list)
}

/// Median per-call time of an order-`order` filter on one graph.
pub fn time_filter(g: &ReasoningGraph, order: usize, opts: &BenchOptions) -> Result<f64> {
    let l = combinatorial_laplacian(g);
    let lambda_max = gershgorin_bound(&l).max(1.0);
    let theta: Vec<f64> = (0..=order).map(|k| 1.0 / (k as f64 + 1.0)).collect();
    let filter = ChebyshevFilter::new(theta, lambda_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5151);
    let x = GraphSignal::vertex((0..g.node_count()).map(|_| rng.random_range(-1.0..1.0)).collect())?;

    let start = Instant::now();
    std::hint::black_box(chebyshev_filter(&l, &filter, &x)?);
    let once = start.elapsed().as_secs_f64() * 1e3;
    let inner = ((opts.min_sample_ms / once.max(1e-6)).ceil() as usize).clamp(1, 100_000);

    let mut samples = Vec::with_capacity(opts.samples.max(1));
    for _ in 0..opts.samples.max(1) {
        let start = Instant::now();
        for _ in 0..inner {
            std::hint::black_box(chebyshev_filter(&l, &filter, std::hint::black_box(&x))?);
        }
        samples.push(start.elapsed().as_secs_f64() * 1e3 / inner as f64);
    }
    samples.sort_by(f64::total_cmp);
    Ok(samples[samples.len() / 2])
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn scaling_benchmark(sizes: &[usize], order: usize, opts: &BenchOptions) -> Result<ScalingReport> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadParams("sizes must be strictly ascending".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for (i, &edges) in sizes.iter().enumerate() {
        let g = random_sparse_graph(edges, opts.seed.wrapping_add(i as u64))?;
        rows.push(ScalingRow {
            edges: g.edge_count(),
            nodes: g.node_count(),
            order,
            median_ms: time_filter(&g, order, opts)?,
        });
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.edges as f64, r.median_ms)).collect();
    Ok(ScalingReport {
        slope: log_log_slope(&points),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_edge_count() {
        let g = random_sparse_graph(500, 1).unwrap();
        assert_eq!(g.edge_count(), 500);
        assert_eq!(g.node_count(), 100);
    }

    #[test]
    fn single_size_has_no_slope() {
        let opts = BenchOptions {
            samples: 1,
            min_sample_ms: 0.0,
            seed: 0,
        };
        let r = scaling_benchmark(&[200], 3, &opts).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.slope.is_none());
        assert!(r.to_csv().starts_with("edges,nodes,order,median_ms\n200,"));
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = [1e3, 1e4, 1e5].iter().map(|&x| (x, 3.0 * x)).collect();
        assert!((log_log_slope(&pts).unwrap() - 1.0).abs() < 1e-12);
    }
}
