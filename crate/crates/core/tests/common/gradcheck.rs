//! Random training instances, plus a loss rebuilt from scratch on a Jacobi
//! eigenbasis for finite-difference checks.

use rand::Rng;
use spectral_nsr::laplacian::LaplacianKind;
use spectral_nsr::pipeline::PipelineConfig;
use spectral_nsr::rules::{SpectralRule, TemplateKind, TemplateParams, TemplateSpec};
use spectral_nsr::spectral::GraphSignal;
use spectral_nsr::symbolic::Tau;
use spectral_nsr::trainer::{prepare_task, task_loss_and_grad, Labels, PreparedTask, TrainableParams};

use super::*;

pub const FD_STEP: f64 = 1e-5;
pub const CLIP: f64 = 1e-7;

pub struct Instance {
    pub task: PreparedTask,
    pub params: TrainableParams,
    vals: Vec<f64>,
    vecs: Dense,
}

/// Parameter groups checked separately.
pub const GROUPS: [&str; 5] = ["theta", "rule_weights", "gate", "tau", "alpha"];

fn group_of(slot: &str) -> &'static str {
    if slot.starts_with("theta") {
        "theta"
    } else if slot == "rule_weights" {
        "rule_weights"
    } else if slot == "query" || slot.starts_with("signature") {
        "gate"
    } else if slot == "tau" {
        "tau"
    } else {
        "alpha"
    }
}

pub fn random_instance(seed: u64) -> Instance {
    let mut r = rng(seed);
    let n = r.random_range(8..20);
    let (g, edges) = random_graph(n, 0.25, true, &mut r);
    let bands = r.random_range(2..=3);
    let order = r.random_range(1..=6);
    let cfg = PipelineConfig {
        laplacian: LaplacianKind::Combinatorial,
        order,
        bands,
        gate_width: 4,
        seed,
        ..PipelineConfig::default()
    };
    let rules: Vec<SpectralRule> = (0..r.random_range(1..=3))
        .map(|i| {
            let (kind, params) = if r.random::<bool>() {
                (TemplateKind::LowPass, TemplateParams { beta: Some(r.random_range(0.3..2.0)), ..Default::default() })
            } else {
                (TemplateKind::Heat, TemplateParams { t: Some(r.random_range(0.1..1.0)), ..Default::default() })
            };
            SpectralRule::new(format!("r{i}"), TemplateSpec::builtin(kind, params), 1.0).unwrap()
        })
        .collect();
    let x0 = GraphSignal::vertex(random_vec(n, &mut r)).unwrap();
    let labels: Labels = (0..n)
        .filter_map(|i| {
            let keep = r.random::<f64>() < 0.6;
            let label = r.random::<bool>();
            keep.then_some((i, label))
        })
        .collect();
    let labels = if labels.is_empty() { [(0, true)].into_iter().collect() } else { labels };
    let task = prepare_task(&cfg, &rules, &g, &x0, &labels).unwrap();

    let mut params = TrainableParams::init(&cfg, &rules).unwrap();
    for band in params.bands.iter_mut() {
        band.iter_mut().for_each(|c| *c = r.random_range(-0.6..0.6));
    }
    params.query = random_vec(4, &mut r);
    for s in params.signatures.iter_mut() {
        *s = random_vec(4, &mut r);
    }
    params.rule_weights = (0..rules.len()).map(|_| r.random_range(0.2..1.5)).collect();
    params.tau = Tau::PerNode((0..n).map(|_| r.random_range(-0.3..0.3)).collect());
    params.alpha = r.random_range(1.0..4.0);

    let (vals, vecs) = jacobi_eigen(&dense_laplacian(n, &edges));
    Instance {
        task,
        params,
        vals,
        vecs,
    }
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

fn recurrence(theta: &[f64], t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, t);
    let mut acc = theta[0];
    for (k, c) in theta.iter().enumerate().skip(1) {
        if k > 1 {
            let next = 2.0 * t * cur - prev;
            prev = cur;
            cur = next;
        }
        acc += c * cur;
    }
    acc
}

/// BCE over labeled nodes, probabilities clipped to `[CLIP, 1 - CLIP]`.
pub fn scalar_bce(p: &[f64], labels: &Labels) -> f64 {
    let mut total = 0.0;
    for (&i, &l) in labels {
        let q = p[i].clamp(CLIP, 1.0 - CLIP);
        total -= if l { q.ln() } else { (1.0 - q).ln() };
    }
    total / labels.len() as f64
}

impl Instance {
    /// Loss recomputed without the library's numerics.
    pub fn oracle_loss(&self, params: &TrainableParams) -> f64 {
        let task = &self.task;
        let mut b = task.offset.clone();
        for (w, s) in params.rule_weights.iter().zip(&task.rule_signals) {
            for (bi, si) in b.iter_mut().zip(s) {
                *bi += w * si;
            }
        }
        let logits: Vec<f64> = params.signatures.iter().map(|s| dot(s, &params.query)).collect();
        let gate = softmax(&logits);
        let order = params.bands[0].len();
        let theta: Vec<f64> = (0..order)
            .map(|k| gate.iter().zip(&params.bands).map(|(a, band)| a * band[k]).sum())
            .collect();
        let lmax = task.ctx.lambda_max();
        let y = spectral_apply(&self.vals, &self.vecs, |l| recurrence(&theta, 2.0 * l / lmax - 1.0), &b);
        let tau = |i: usize| match &params.tau {
            Tau::Global(t) => *t,
            Tau::PerNode(t) => t[i],
        };
        let p: Vec<f64> = y.iter().enumerate().map(|(i, &v)| sigmoid(params.alpha * (v - tau(i)))).collect();
        scalar_bce(&p, &task.labels)
    }

    /// Per-group relative error between the analytic gradient and central
    /// differences of [`oracle_loss`](Self::oracle_loss).
    pub fn group_errors(&self) -> Vec<(&'static str, f64)> {
        let (_, analytic) = task_loss_and_grad(&self.params, &self.task).unwrap();
        let analytic = analytic.flatten();
        let base = self.params.flatten();
        let mut owner = Vec::new();
        for (name, _, values) in self.params.slots() {
            owner.extend(std::iter::repeat_n(group_of(&name), values.len()));
        }
        let mut numeric = vec![0.0; base.len()];
        let mut probe = self.params.clone();
        for i in 0..base.len() {
            let mut plus = base.clone();
            plus[i] += FD_STEP;
            probe.unflatten(&plus).unwrap();
            let up = self.oracle_loss(&probe);
            let mut minus = base.clone();
            minus[i] -= FD_STEP;
            probe.unflatten(&minus).unwrap();
            let down = self.oracle_loss(&probe);
            numeric[i] = (up - down) / (2.0 * FD_STEP);
        }
        GROUPS
            .iter()
            .map(|&g| {
                let idx: Vec<usize> = (0..base.len()).filter(|&i| owner[i] == g).collect();
                let a: Vec<f64> = idx.iter().map(|&i| analytic[i]).collect();
                let n: Vec<f64> = idx.iter().map(|&i| numeric[i]).collect();
                (g, grad_rel_err(&a, &n))
            })
            .collect()
    }
}
