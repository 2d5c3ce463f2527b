//! Independent reference implementations used as oracles by the
//! integration tests. Nothing here calls into the library's numerics.
#![allow(dead_code)]

pub mod gradcheck;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_nsr::graph::{anonymous_nodes, build_graph, ReasoningGraph};

pub type Dense = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi edges with weights in `[0.1, 2)`. `connected` threads a
/// random spanning path through the nodes first.
pub fn random_edges(n: usize, p: f64, connected: bool, rng: &mut ChaCha8Rng) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    let mut seen = BTreeSet::new();
    if connected {
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
        for w in order.windows(2) {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            seen.insert((a, b));
            edges.push((a, b, rng.random_range(0.1..2.0)));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !seen.contains(&(i, j)) && rng.random::<f64>() < p {
                edges.push((i, j, rng.random_range(0.1..2.0)));
            }
        }
    }
    edges
}

pub fn graph_from(n: usize, edges: &[(usize, usize, f64)]) -> ReasoningGraph {
    build_graph(anonymous_nodes(n), edges).unwrap()
}

pub fn random_graph(n: usize, p: f64, connected: bool, rng: &mut ChaCha8Rng) -> (ReasoningGraph, Vec<(usize, usize, f64)>) {
    let edges = random_edges(n, p, connected, rng);
    (graph_from(n, &edges), edges)
}

pub fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn dense_adjacency(n: usize, edges: &[(usize, usize, f64)]) -> Dense {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        a[i][j] += w;
        a[j][i] += w;
    }
    a
}

/// `D - A` accumulated entry by entry.
pub fn dense_laplacian(n: usize, edges: &[(usize, usize, f64)]) -> Dense {
    let a = dense_adjacency(n, edges);
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            l[i][j] = if i == j { a[i].iter().sum() } else { -a[i][j] };
        }
    }
    l
}

/// `I - D^-1/2 A D^-1/2`, isolated nodes keep a unit diagonal.
pub fn dense_normalized_laplacian(n: usize, edges: &[(usize, usize, f64)]) -> Dense {
    let a = dense_adjacency(n, edges);
    let d: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        l[i][i] = 1.0;
        for j in 0..n {
            if i != j && a[i][j] != 0.0 {
                l[i][j] = -a[i][j] / (d[i] * d[j]).sqrt();
            }
        }
    }
    l
}

pub fn matvec(m: &Dense, x: &[f64]) -> Vec<f64> {
    m.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn rel_err(got: &[f64], want: &[f64]) -> f64 {
    let scale = norm(want).max(1e-300);
    norm(&sub(got, want)) / scale
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Cyclic Jacobi rotations. Returns ascending eigenvalues and the matching
/// eigenvectors as columns (`vecs[row][col]`).
pub fn jacobi_eigen(m: &Dense) -> (Vec<f64>, Dense) {
    let n = m.len();
    let mut a = m.clone();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let vals = idx.iter().map(|&i| a[i][i]).collect();
    let vecs = (0..n).map(|r| idx.iter().map(|&c| v[r][c]).collect()).collect();
    (vals, vecs)
}

/// `U diag(g(lambda)) U^T x` from a Jacobi decomposition.
pub fn spectral_apply(vals: &[f64], vecs: &Dense, g: impl Fn(f64) -> f64, x: &[f64]) -> Vec<f64> {
    let n = vals.len();
    let coeffs: Vec<f64> = (0..n)
        .map(|c| (0..n).map(|r| vecs[r][c] * x[r]).sum::<f64>() * g(vals[c]))
        .collect();
    (0..n).map(|r| (0..n).map(|c| vecs[r][c] * coeffs[c]).sum()).collect()
}

/// Chebyshev series in trigonometric form: `sum theta_k cos(k acos(t))`
/// with `t = 2 lambda / lambda_max - 1`, clamped into `[-1, 1]`.
pub fn chebyshev_cos(theta: &[f64], lambda_max: f64, lambda: f64) -> f64 {
    let t = (2.0 * lambda / lambda_max - 1.0).clamp(-1.0, 1.0);
    let phi = t.acos();
    theta.iter().enumerate().map(|(k, c)| c * (k as f64 * phi).cos()).sum()
}

/// Small random Horn KB: `(atoms, facts, clauses as (head, body))`.
pub type RawKb = (usize, Vec<usize>, Vec<(usize, Vec<usize>)>);

pub fn random_raw_kb(rng: &mut ChaCha8Rng, max_atoms: usize, max_clauses: usize) -> RawKb {
    let n = rng.random_range(1..=max_atoms);
    let facts: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < 0.25).collect();
    let m = rng.random_range(0..=max_clauses);
    let clauses = (0..m)
        .map(|_| {
            let head = rng.random_range(0..n);
            let k = rng.random_range(0..=3usize.min(n));
            let mut body: Vec<usize> = (0..k).map(|_| rng.random_range(0..n)).collect();
            body.sort_unstable();
            body.dedup();
            (head, body)
        })
        .collect();
    (n, facts, clauses)
}

/// Least Herbrand model by enumerating every truth assignment and keeping
/// the intersection of all models.
pub fn brute_force_minimal_model(kb: &RawKb) -> BTreeSet<usize> {
    let (n, facts, clauses) = kb;
    assert!(*n <= 16);
    let mut meet: u32 = (1u32 << n) - 1;
    for assignment in 0u32..(1u32 << n) {
        let holds = |a: usize| assignment & (1 << a) != 0;
        let is_model = facts.iter().all(|&f| holds(f))
            && clauses
                .iter()
                .all(|(h, body)| !body.iter().all(|&b| holds(b)) || holds(*h));
        if is_model {
            meet &= assignment;
        }
    }
    (0..*n).filter(|a| meet & (1 << a) != 0).collect()
}

/// Naive fixpoint: sweep all clauses until nothing changes.
pub fn naive_closure(facts: &BTreeSet<usize>, clauses: &[(usize, Vec<usize>)]) -> BTreeSet<usize> {
    let mut known = facts.clone();
    loop {
        let before = known.len();
        for (h, body) in clauses {
            if body.iter().all(|b| known.contains(b)) {
                known.insert(*h);
            }
        }
        if known.len() == before {
            return known;
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Relative error between two gradient vectors, guarded for tiny norms.
pub fn grad_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff = norm(&sub(analytic, numeric));
    let scale = norm(analytic).max(norm(numeric)).max(1e-8);
    diff / scale
}
