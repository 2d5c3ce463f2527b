//! Chebyshev polynomial filters on the rescaled Laplacian
//! `L~ = (2 / lambda_max) L - I`, evaluated by the three-term recurrence.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::response::FrequencyResponse;
use super::signal::GraphSignal;
use crate::error::{check_len, Error, Result};
use crate::laplacian::{Laplacian, LaplacianKind};

/// Number of Chebyshev nodes used by [`fit_chebyshev`].
pub const FIT_NODES: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevFilter {
    lambda_max: f64,
    coefficients: Vec<f64>,
}

impl ChebyshevFilter {
    pub fn new(coefficients: Vec<f64>, lambda_max: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::BadParams("filter needs at least one coefficient".into()));
        }
        if !(lambda_max > 0.0) || !lambda_max.is_finite() {
            return Err(Error::BadParams(format!("lambda_max must be positive, got {lambda_max}")));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                what: "filter coefficients".into(),
            });
        }
        Ok(Self {
            lambda_max,
            coefficients,
        })
    }

    pub fn identity(lambda_max: f64) -> Result<Self> {
        Self::new(vec![1.0], lambda_max)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coefficients
    }

    pub fn rescale(&self, lambda: f64) -> f64 {
        2.0 * lambda / self.lambda_max - 1.0
    }

    /// `h(lambda) = sum_k theta_k T_k(lambda~)`, no range check.
    pub fn response(&self, lambda: f64) -> f64 {
        let x = self.rescale(lambda);
        let mut prev = 1.0;
        let mut acc = self.coefficients[0];
        if self.coefficients.len() == 1 {
            return acc;
        }
        let mut cur = x;
        acc += self.coefficients[1] * cur;
        for &theta in &self.coefficients[2..] {
            let next = 2.0 * x * cur - prev;
            prev = cur;
            cur = next;
            acc += theta * cur;
        }
        acc
    }

    pub fn as_response(&self) -> FrequencyResponse {
        FrequencyResponse::Chebyshev(self.clone())
    }
}

/// `T_k(x)` for `k = 0..=order` at a scalar point.
pub fn chebyshev_values(x: f64, order: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(order + 1);
    t.push(1.0);
    if order >= 1 {
        t.push(x);
    }
    for k in 2..=order {
        let next = 2.0 * x * t[k - 1] - t[k - 2];
        t.push(next);
    }
    t
}

/// Sample `h(lambda)` on a grid inside `[0, lambda_max]`.
pub fn sample_response(f: &ChebyshevFilter, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&lambda| {
            if !(0.0..=f.lambda_max).contains(&lambda) {
                Err(Error::OutOfRange {
                    lambda,
                    lambda_max: f.lambda_max,
                })
            } else {
                Ok(f.response(lambda))
            }
        })
        .collect()
}

/// `n` evenly spaced points covering `[0, lambda_max]`, endpoints included.
pub fn uniform_grid(lambda_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| if i == n - 1 { lambda_max } else { lambda_max * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// `out = L~ v` using one sparse matrix-vector product.
fn rescaled_apply(l: &Laplacian, scale: f64, v: &[f64], out: &mut [f64]) {
    l.matrix().mul_vec_into(v, out);
    for (o, &vi) in out.iter_mut().zip(v) {
        *o = scale * *o - vi;
    }
}

/// `y = sum_k theta_k T_k(L~) x`, exactly `K` sparse products and three
/// work vectors.
pub fn chebyshev_filter(l: &Laplacian, f: &ChebyshevFilter, x: &GraphSignal) -> Result<GraphSignal> {
    check_len(l.dim(), x.len())?;
    let n = x.len();
    let theta = f.coefficients();
    let scale = 2.0 / f.lambda_max();
    let mut y: Vec<f64> = x.values().iter().map(|v| theta[0] * v).collect();
    if theta.len() > 1 {
        let mut prev = x.values().to_vec();
        let mut cur = vec![0.0; n];
        rescaled_apply(l, scale, &prev, &mut cur);
        axpy(theta[1], &cur, &mut y);
        let mut next = vec![0.0; n];
        for &t in &theta[2..] {
            rescaled_apply(l, scale, &cur, &mut next);
            for (nx, &pv) in next.iter_mut().zip(&prev) {
                *nx = 2.0 * *nx - pv;
            }
            axpy(t, &next, &mut y);
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
    }
    Ok(GraphSignal::from_raw(y, x.domain()))
}

/// All recurrence terms `T_k(L~) x` for `k = 0..=order`.
pub fn chebyshev_terms(l: &Laplacian, lambda_max: f64, order: usize, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_len(l.dim(), x.len())?;
    let scale = 2.0 / lambda_max;
    let mut terms = Vec::with_capacity(order + 1);
    terms.push(x.to_vec());
    if order >= 1 {
        let mut t1 = vec![0.0; x.len()];
        rescaled_apply(l, scale, x, &mut t1);
        terms.push(t1);
    }
    for k in 2..=order {
        let mut next = vec![0.0; x.len()];
        rescaled_apply(l, scale, &terms[k - 1], &mut next);
        for (nx, &pv) in next.iter_mut().zip(&terms[k - 2]) {
            *nx = 2.0 * *nx - pv;
        }
        terms.push(next);
    }
    Ok(terms)
}

/// Linear combination `sum_k theta_k terms[k]`.
pub fn combine_terms(theta: &[f64], terms: &[Vec<f64>]) -> Vec<f64> {
    let mut y = vec![0.0; terms.first().map_or(0, Vec::len)];
    for (t, term) in theta.iter().zip(terms) {
        axpy(*t, term, &mut y);
    }
    y
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Least-squares fit of a degree-`order` Chebyshev series to `g` at
/// Chebyshev nodes mapped onto `[0, lambda_max]`.
///
/// With `M > order` nodes the discrete orthogonality of `T_k` makes the
/// normal equations diagonal, so the fit reduces to a discrete cosine sum.
/// Polynomials of degree `<= order` are reproduced exactly.
pub fn fit_chebyshev(g: &FrequencyResponse, order: usize, lambda_max: f64) -> Result<ChebyshevFilter> {
    if !(lambda_max > 0.0) {
        return Err(Error::BadParams(format!("lambda_max must be positive, got {lambda_max}")));
    }
    let m = FIT_NODES.max(order + 1);
    let mut samples = Vec::with_capacity(m);
    for j in 0..m {
        let angle = PI * (j as f64 + 0.5) / m as f64;
        let lambda = (angle.cos() + 1.0) * lambda_max / 2.0;
        let v = g.eval(lambda);
        if !v.is_finite() {
            return Err(Error::NonFiniteResponse { lambda });
        }
        samples.push((angle, v));
    }
    let coefficients = (0..=order)
        .map(|k| {
            let sum: f64 = samples
                .iter()
                .map(|&(angle, v)| v * (k as f64 * angle).cos())
                .sum();
            if k == 0 {
                sum / m as f64
            } else {
                2.0 * sum / m as f64
            }
        })
        .collect();
    ChebyshevFilter::new(coefficients, lambda_max)
}

/// Power-iteration options for [`estimate_lambda_max_with`].
#[derive(Debug, Clone, Copy)]
pub struct PowerIteration {
    pub tol: f64,
    pub max_iter: usize,
    pub safety: f64,
    pub seed: u64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_iter: 200,
            safety: 1.01,
            seed: 0x5eed,
        }
    }
}

/// Gershgorin bound `max_i sum_j |L_ij|`, always `>= lambda_max`.
pub fn gershgorin_bound(l: &Laplacian) -> f64 {
    (0..l.dim())
        .map(|i| l.matrix().row(i).map(|(_, v)| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn estimate_lambda_max(l: &Laplacian) -> Result<f64> {
    estimate_lambda_max_with(l, PowerIteration::default())
}

/// Power iteration on `L`, scaled by the safety factor and capped by the
/// Gershgorin bound (and by 2 for normalized Laplacians).
pub fn estimate_lambda_max_with(l: &Laplacian, opts: PowerIteration) -> Result<f64> {
    let n = l.dim();
    let mut cap = gershgorin_bound(l);
    if l.kind() == LaplacianKind::Normalized {
        cap = cap.min(2.0);
    }
    if cap == 0.0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    normalize(&mut v);
    let mut w = vec![0.0; n];
    let mut rayleigh = 0.0;
    for _ in 0..opts.max_iter {
        l.matrix().mul_vec_into(&v, &mut w);
        let next: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        let residual = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - next * b).powi(2))
            .sum::<f64>()
            .sqrt();
        let converged = next > 0.0
            && (next - rayleigh).abs() <= opts.tol * next
            && residual <= opts.tol.sqrt() * next;
        rayleigh = next;
        if converged {
            return Ok((rayleigh * opts.safety).min(cap));
        }
        if normalize_into(&w, &mut v) == 0.0 {
            // v landed in the null space; restart from a fresh direction
            v.iter_mut().for_each(|x| *x = rng.random::<f64>() - 0.5);
            normalize(&mut v);
        }
    }
    Err(Error::ConvergenceFailure {
        iterations: opts.max_iter,
    })
}

/// Spectral upper bound used for rescaling: 2 for normalized Laplacians,
/// the power-iteration estimate otherwise (Gershgorin bound if that fails).
pub fn lambda_max_for(l: &Laplacian) -> f64 {
    let bound = match l.kind() {
        LaplacianKind::Normalized => 2.0,
        LaplacianKind::Combinatorial => {
            estimate_lambda_max(l).unwrap_or_else(|_| gershgorin_bound(l))
        }
    };
    if bound > 0.0 {
        bound
    } else {
        1.0
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn normalize_into(src: &[f64], dst: &mut [f64]) -> f64 {
    let norm = src.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (d, s) in dst.iter_mut().zip(src) {
            *d = s / norm;
        }
    }
    norm
}
