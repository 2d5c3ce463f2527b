//! `spectral-nsr` command-line interface.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use spectral_nsr::harness::{
    evaluate, generate_dataset, read_dataset, scaling_benchmark, write_dataset, BenchOptions, DatasetSpec,
    EvalOptions, Family,
};
use spectral_nsr::io::{format_signal, parse_filter_json, parse_signal, read_graph, read_text};
use spectral_nsr::laplacian::{laplacian, LaplacianKind};
use spectral_nsr::pipeline::{Pipeline, PipelineConfig, ResponseSample, RESPONSE_SAMPLES};
use spectral_nsr::rules::load_rules;
use spectral_nsr::spectral::{
    chebyshev_filter, eigendecompose, exact_filter, gft, uniform_grid, ChebyshevFilter, FrequencyResponse,
    DEFAULT_DENSE_LIMIT,
};
use spectral_nsr::symbolic::{format_traces, forward_chain, KnowledgeBase};
use spectral_nsr::trainer::{train, AdamConfig, Checkpoint, TrainRun};
use spectral_nsr::{Error, Result};

#[derive(Parser)]
#[command(name = "spectral-nsr", version, about = "Spectral neuro-symbolic reasoning toolkit")]
struct Cli {
    /// Print errors as JSON on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Exact,
    Chebyshev,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Combinatorial,
    Normalized,
}

impl From<KindArg> for LaplacianKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Combinatorial => LaplacianKind::Combinatorial,
            KindArg::Normalized => LaplacianKind::Normalized,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset with train/val/test splits.
    Gen {
        #[arg(long, default_value = "transitive")]
        family: String,
        /// Maximum depth (chain length for kinship).
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        width: usize,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        distractors: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train every learnable parameter of the pipeline.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Metrics CSV (defaults to `<out>.metrics.csv`).
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        #[arg(long, default_value_t = 5)]
        patience: usize,
        #[arg(long, default_value_t = 32)]
        batch_size: usize,
        #[arg(long, default_value_t = 5e-4)]
        lr_spectral: f64,
        #[arg(long, default_value_t = 1e-5)]
        lr_embedding: f64,
        /// Time validation passes and break accuracy ties by latency.
        #[arg(long)]
        latency: bool,
    },
    /// Evaluate a checkpoint (or an untrained pipeline) on a dataset split.
    Eval {
        #[arg(long)]
        ckpt: Option<PathBuf>,
        /// Config for an untrained pipeline when no checkpoint is given.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "test")]
        split: String,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        no_latency: bool,
    },
    /// Filter a graph signal with a Chebyshev filter.
    Filter {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        /// Filter JSON; otherwise the checkpoint's learned filter.
        #[arg(long, conflicts_with = "ckpt")]
        filter: Option<PathBuf>,
        #[arg(long)]
        ckpt: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "chebyshev")]
        path: PathArg,
        #[arg(long, value_enum, default_value = "normalized")]
        laplacian: KindArg,
        #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
        dense_limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exact path only: also write the input's graph Fourier coefficients.
        #[arg(long)]
        spectrum: Option<PathBuf>,
    },
    /// Export frequency-response samples as CSV.
    Response {
        #[arg(long, conflicts_with = "ckpt")]
        filter: Option<PathBuf>,
        #[arg(long)]
        ckpt: Option<PathBuf>,
        #[arg(long, default_value_t = 2.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = RESPONSE_SAMPLES)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline on one graph, signal and knowledge base.
    Run {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        kb: PathBuf,
        #[arg(long, conflicts_with = "config")]
        ckpt: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        trace: bool,
    },
    /// Forward-chain a knowledge base and print its closure.
    Chain {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        trace: bool,
    },
    /// Time the Chebyshev filter on random graphs of growing size.
    BenchScaling {
        /// Edge counts, e.g. `1e3,1e4,1e5`.
        #[arg(long, value_delimiter = ',', default_value = "1e3,1e4,1e5")]
        sizes: Vec<String>,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Summarise a checkpoint.
    InspectCkpt {
        #[arg(long)]
        ckpt: PathBuf,
    },
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Config file (seed override applied) and its rules, resolved relative to
/// the config's directory; `fallback_rules` is used when the config names none.
fn load_config(path: Option<&Path>, fallback_rules: Option<&Path>) -> Result<(PipelineConfig, Vec<spectral_nsr::rules::SpectralRule>)> {
    let cfg = match path {
        Some(p) => PipelineConfig::parse(&read_text(&p)?)?,
        None => PipelineConfig::default(),
    }
    .with_env_seed()?;
    let rules_path = match (&cfg.rules, path) {
        (Some(r), Some(p)) => Some(p.parent().unwrap_or(Path::new(".")).join(r)),
        (Some(r), None) => Some(PathBuf::from(r)),
        (None, _) => fallback_rules.filter(|p| p.exists()).map(Path::to_path_buf),
    };
    let rules = match rules_path {
        Some(p) => load_rules(&p)?,
        None => Vec::new(),
    };
    Ok((cfg, rules))
}

fn parse_size(s: &str) -> Result<usize> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::BadParams(format!("bad size `{s}`")))?;
    if !(v >= 1.0) || v.fract() != 0.0 {
        return Err(Error::BadParams(format!("bad size `{s}`")));
    }
    Ok(v as usize)
}

fn response_csv(rows: &[ResponseSample]) -> String {
    let mut out = String::from("lambda,filter,rules,combined\n");
    for r in rows {
        out += &format!("{},{},{},{}\n", r.lambda, r.filter, r.rules, r.combined);
    }
    out
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            family,
            depth,
            width,
            n,
            seed,
            distractors,
            out,
        } => {
            let spec = DatasetSpec {
                family: family.parse::<Family>()?,
                max_depth: depth,
                width,
                count: n,
                seed,
                distractor_ratio: distractors,
            };
            let data = generate_dataset(&spec)?;
            write_dataset(&out, &data)?;
            let [a, b, c] = spec.split_sizes();
            println!("wrote {a} train / {b} val / {c} test tasks to {}", out.display());
        }
        Command::Train {
            config,
            data,
            out,
            metrics,
            epochs,
            patience,
            batch_size,
            lr_spectral,
            lr_embedding,
            latency,
        } => {
            let (cfg, rules) = load_config(config.as_deref(), Some(&data.join("rules.txt")))?;
            let dataset = read_dataset(&data)?;
            let run = TrainRun {
                max_epochs: epochs,
                batch_size,
                patience,
                adam: AdamConfig {
                    lr_spectral,
                    lr_embedding,
                    ..AdamConfig::default()
                },
                measure_latency: latency,
                seed: cfg.seed,
            };
            let pipeline = Pipeline::new(cfg, rules)?;
            let outcome = train(&pipeline, &dataset, &run)?;
            outcome.best.save(&out)?;
            let metrics = metrics.unwrap_or_else(|| {
                let mut p = out.clone().into_os_string();
                p.push(".metrics.csv");
                PathBuf::from(p)
            });
            fs::write(&metrics, outcome.metrics_csv())?;
            println!(
                "best epoch {} of {}: val accuracy {:.4}; checkpoint {}, metrics {}",
                outcome.best.meta.epoch,
                outcome.history.len(),
                outcome.best.meta.val_accuracy,
                out.display(),
                metrics.display()
            );
        }
        Command::Eval {
            ckpt,
            config,
            data,
            split,
            report,
            no_latency,
        } => {
            let dataset = read_dataset(&data)?;
            let pipeline = match ckpt {
                Some(p) => Checkpoint::load(&p)?.pipeline()?,
                None => {
                    let (cfg, rules) = load_config(config.as_deref(), Some(&data.join("rules.txt")))?;
                    Pipeline::new(cfg, rules)?
                }
            };
            let tasks = match split.as_str() {
                "train" => &dataset.train,
                "val" => &dataset.validation,
                "test" => &dataset.test,
                other => return Err(Error::BadParams(format!("unknown split `{other}`"))),
            };
            let opts = if no_latency { EvalOptions::untimed() } else { EvalOptions::default() };
            let r = evaluate(&pipeline, tasks, &opts)?;
            write_or_print(report.as_deref(), &(serde_json::to_string_pretty(&r)? + "\n"))?;
        }
        Command::Filter {
            graph,
            signal,
            filter,
            ckpt,
            path,
            laplacian: kind,
            dense_limit,
            out,
            spectrum,
        } => {
            let g = read_graph(&graph)?;
            let x = parse_signal(&read_text(&signal)?)?;
            let l = laplacian(&g, kind.into());
            let f: ChebyshevFilter = match (filter, ckpt) {
                (Some(p), _) => parse_filter_json(&read_text(&p)?)?,
                (None, Some(p)) => {
                    let pipeline = Checkpoint::load(&p)?.pipeline()?;
                    pipeline.params().filter(spectral_nsr::spectral::lambda_max_for(&l))?
                }
                (None, None) => return Err(Error::BadParams("give --filter or --ckpt".into())),
            };
            if spectrum.is_some() && matches!(path, PathArg::Chebyshev) {
                return Err(Error::BadParams(
                    "--spectrum needs --path exact; the recurrence never forms the spectrum".into(),
                ));
            }
            let y = match path {
                PathArg::Chebyshev => chebyshev_filter(&l, &f, &x)?,
                PathArg::Exact => {
                    let basis = eigendecompose(&l, dense_limit)?;
                    if let Some(sp) = &spectrum {
                        fs::write(sp, format_signal(gft(&basis, &x)?.values()))?;
                    }
                    exact_filter(&basis, &FrequencyResponse::Chebyshev(f), &x)?
                }
            };
            write_or_print(out.as_deref(), &format_signal(y.values()))?;
        }
        Command::Response {
            filter,
            ckpt,
            lambda_max,
            samples,
            out,
        } => {
            let rows = match (filter, ckpt) {
                (Some(p), _) => {
                    let f = parse_filter_json(&read_text(&p)?)?;
                    uniform_grid(f.lambda_max(), samples)
                        .into_iter()
                        .map(|lambda| {
                            let h = f.response(lambda);
                            ResponseSample {
                                lambda,
                                filter: h,
                                rules: 1.0,
                                combined: h,
                            }
                        })
                        .collect()
                }
                (None, Some(p)) => {
                    Checkpoint::load(&p)?.pipeline()?.response_samples(lambda_max, samples)?
                }
                (None, None) => return Err(Error::BadParams("give --filter or --ckpt".into())),
            };
            write_or_print(out.as_deref(), &response_csv(&rows))?;
        }
        Command::Run {
            graph,
            signal,
            kb,
            ckpt,
            config,
            trace,
        } => {
            let g = read_graph(&graph)?;
            let x = parse_signal(&read_text(&signal)?)?;
            let kb = KnowledgeBase::parse(&read_text(&kb)?)?;
            let pipeline = match ckpt {
                Some(p) => Checkpoint::load(&p)?.pipeline()?,
                None => {
                    let (cfg, rules) = load_config(config.as_deref(), None)?;
                    Pipeline::new(cfg, rules)?
                }
            };
            let out = pipeline.run(&g, &x, &kb)?;
            for &a in out.answers() {
                println!("{}", kb.name(a));
            }
            for (a, b) in &out.conflicts {
                println!("conflict {} {}", kb.name(*a), kb.name(*b));
            }
            if trace {
                print!("{}", format_traces(&kb, &out.closure));
            }
        }
        Command::Chain { kb, trace } => {
            let kb = KnowledgeBase::parse(&read_text(&kb)?)?;
            let closure = forward_chain(&kb);
            if trace {
                print!("{}", format_traces(&kb, &closure));
            } else {
                for &a in &closure.atoms {
                    println!("{}", kb.name(a));
                }
            }
        }
        Command::BenchScaling { sizes, k, seed, json } => {
            let sizes = sizes.iter().map(|s| parse_size(s)).collect::<Result<Vec<_>>>()?;
            let opts = BenchOptions {
                seed,
                ..BenchOptions::default()
            };
            let report = scaling_benchmark(&sizes, k, &opts)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.to_csv());
                match report.slope {
                    Some(s) => println!("# log-log slope {s:.3}"),
                    None => println!("# log-log slope undefined (one size)"),
                }
            }
        }
        Command::InspectCkpt { ckpt } => {
            let c = Checkpoint::load(&ckpt)?;
            let p = &c.params;
            println!("epoch: {} of {}", c.meta.epoch, c.meta.epochs_run);
            println!("val_accuracy: {}", c.meta.val_accuracy);
            if let Some(l) = c.meta.latency_ms {
                println!("latency_ms: {l}");
            }
            println!("laplacian: {}", c.config.laplacian);
            println!("order: {}", p.order());
            println!("bands: {}", p.band_count());
            println!("gate_weights: {:?}", p.gate_weights());
            println!("theta: {:?}", p.combined_theta());
            for (rule, w) in c.rules.iter().zip(&p.rule_weights) {
                println!("rule {} ({:?}): w = {w}", rule.id, rule.kind());
            }
            println!("tau: {:?}", p.tau);
            println!("alpha: {}", p.alpha);
            println!("optimizer_steps: {}", c.optimizer.step);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let json_errors = cli.json_errors;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code: u8 = if e.is_numerical() { 2 } else { 1 };
            if json_errors {
                let payload = serde_json::json!({
                    "error": e.kind(),
                    "message": e.to_string(),
                    "exit_code": code,
                });
                eprintln!("{payload}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}
