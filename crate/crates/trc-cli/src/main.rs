//! Command-line front end: mask sampling, synthetic ground truth, completion
//! runs, and quality reports. Tensors travel as TNS1 files; color images as
//! binary PPM (P6), picked by file extension.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trc::error::{Error, Result};
use trc::io;
use trc::metrics::{self, METRICS_HEADER};
use trc::rng::make_mask;
use trc::solver::{solve, PenaltyRule, SolverConfig, HISTORY_HEADER};
use trc::tensor::{Mask, Tensor};
use trc::tr::{random_chain, tr_reconstruct};

#[derive(Parser)]
#[command(
    name = "trc",
    version,
    about = "Tensor-ring completion of dense N-order tensors with tubal-spectrum \
             shrinkage and weighted total variation"
)]
struct Cli {
    /// Worker threads for slice-parallel kernels (0 = library default).
    /// Results are identical at any setting.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a random observation mask and write it as a TNS1 file.
    Mask(MaskArgs),
    /// Generate a unit-norm random tensor-ring tensor.
    Synth(SynthArgs),
    /// Recover the missing entries of a masked tensor.
    Complete(Box<CompleteArgs>),
    /// Compare an estimate against a reference and print a metrics row.
    Eval(EvalArgs),
}

#[derive(Args)]
struct MaskArgs {
    /// Tensor dimensions, e.g. 8,8,8,8.
    #[arg(long, value_delimiter = ',', conflicts_with = "input", required_unless_present = "input")]
    dims: Option<Vec<usize>>,
    /// Take the dimensions from this tensor or image file instead.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Sampling ratio in [0, 1].
    #[arg(long)]
    sr: f64,
    /// Mask seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output mask file.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Tensor dimensions, e.g. 8,8,8,8.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    /// Bond ranks: a single value for every bond, or one per bond.
    #[arg(long, value_delimiter = ',')]
    rank: Vec<usize>,
    /// Chain seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output tensor file.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct CompleteArgs {
    /// Input tensor (.tns) or image (.ppm); doubles as the metric reference
    /// when --ref is absent.
    #[arg(long)]
    input: PathBuf,
    /// Observation mask file (TNS1 with 0/1 entries).
    #[arg(long, conflicts_with = "sr")]
    mask: Option<PathBuf>,
    /// Sample a mask on the fly with this ratio instead of --mask.
    #[arg(long)]
    sr: Option<f64>,
    /// Seed for the on-the-fly mask.
    #[arg(long, default_value_t = 0)]
    mask_seed: u64,
    /// Where to write the recovered tensor (.tns or .ppm).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Where to write the per-iteration history CSV.
    #[arg(long)]
    history: Option<PathBuf>,
    /// Where to write the metrics CSV.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Ground truth for metrics (defaults to --input).
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    /// Peak for PSNR-type metrics (default: 255 for .ppm, max |ref| otherwise).
    #[arg(long)]
    peak: Option<f64>,
    /// Flat key=value config file; command-line flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rescale observed entries to [0,1] before solving, undo afterwards.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    normalize: Option<bool>,
    /// Drop the TV block entirely (forces lambda = 0 and zero weights).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    beta2_off: Option<bool>,
    #[command(flatten)]
    flags: SolverFlags,
}

#[derive(Args, Default)]
struct SolverFlags {
    /// TV trade-off lambda >= 0.
    #[arg(long)]
    lambda: Option<f64>,
    /// Penalty parameters b1,b2,b3.
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// TV weights w1,...,wN (0 disables a mode; default 4,4,0 for 3-order input).
    #[arg(long, value_delimiter = ',')]
    w: Option<Vec<f64>>,
    /// Initial bond ranks: a single value for every bond, or one per bond.
    #[arg(long, value_delimiter = ',')]
    rank: Option<Vec<usize>>,
    /// Iteration cap.
    #[arg(long)]
    maxiter: Option<usize>,
    /// Relative-change stopping bound.
    #[arg(long)]
    eps: Option<f64>,
    /// Multiplicative penalty growth factor >= 1.
    #[arg(long)]
    kappa: Option<f64>,
    /// Upper bound for every penalty.
    #[arg(long)]
    beta_cap: Option<f64>,
    /// Penalty schedule: multiplicative or residual-driven.
    #[arg(long, value_parser = parse_rule)]
    penalty_rule: Option<PenaltyRule>,
    /// Residual-driven schedule parameters e1,e2.
    #[arg(long, value_delimiter = ',')]
    eta: Option<Vec<f64>>,
    /// Drop near-zero bond slices as the run progresses.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    prune: Option<bool>,
    /// Relative energy threshold for pruning.
    #[arg(long)]
    prune_tol: Option<f64>,
    /// Prune every this many iterations.
    #[arg(long)]
    prune_interval: Option<usize>,
    /// Seed for the random core initialization.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EvalArgs {
    /// Reference tensor or image.
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Estimate tensor or image.
    #[arg(long)]
    est: PathBuf,
    /// Peak for PSNR-type metrics (default: 255 for .ppm, max |ref| otherwise).
    #[arg(long)]
    peak: Option<f64>,
    /// Also write the metrics CSV to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_rule(s: &str) -> std::result::Result<PenaltyRule, String> {
    s.parse::<PenaltyRule>().map_err(|e| e.to_string())
}

/// Per-field solver overrides; flags win over the config file, the config
/// file wins over the built-in defaults.
#[derive(Default)]
struct Overrides {
    lambda: Option<f64>,
    beta: Option<[f64; 3]>,
    w: Option<Vec<f64>>,
    rank: Option<Vec<usize>>,
    maxiter: Option<usize>,
    eps: Option<f64>,
    kappa: Option<f64>,
    beta_cap: Option<f64>,
    penalty_rule: Option<PenaltyRule>,
    eta: Option<[f64; 2]>,
    prune: Option<bool>,
    prune_tol: Option<f64>,
    prune_interval: Option<usize>,
    seed: Option<u64>,
    normalize: Option<bool>,
    beta2_off: Option<bool>,
}

impl Overrides {
    fn from_flags(a: &CompleteArgs) -> Result<Overrides> {
        let f = &a.flags;
        Ok(Overrides {
            lambda: f.lambda,
            beta: f.beta.as_deref().map(fixed::<3>).transpose()?,
            w: f.w.clone(),
            rank: f.rank.clone(),
            maxiter: f.maxiter,
            eps: f.eps,
            kappa: f.kappa,
            beta_cap: f.beta_cap,
            penalty_rule: f.penalty_rule,
            eta: f.eta.as_deref().map(fixed::<2>).transpose()?,
            prune: f.prune,
            prune_tol: f.prune_tol,
            prune_interval: f.prune_interval,
            seed: f.seed,
            normalize: a.normalize,
            beta2_off: a.beta2_off,
        })
    }

    fn from_file(path: &Path) -> Result<Overrides> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        let fail = |line: usize, msg: String| Error::Parse {
            path: path.display().to_string(),
            msg: format!("line {}: {msg}", line + 1),
        };
        let mut ov = Overrides::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| fail(no, "expected key=value".into()))?;
            let key = k.trim().replace('_', "-");
            let val = v.trim();
            let bad = |e: String| fail(no, format!("{key}: {e}"));
            match key.as_str() {
                "lambda" => ov.lambda = Some(num(val).map_err(bad)?),
                "beta" => ov.beta = Some(fixed::<3>(&list_f64(val).map_err(bad)?)?),
                "w" | "weights" => ov.w = Some(list_f64(val).map_err(bad)?),
                "rank" | "ranks" => ov.rank = Some(list_usize(val).map_err(bad)?),
                "maxiter" => ov.maxiter = Some(int(val).map_err(bad)?),
                "eps" | "epsilon" => ov.eps = Some(num(val).map_err(bad)?),
                "kappa" => ov.kappa = Some(num(val).map_err(bad)?),
                "beta-cap" => ov.beta_cap = Some(num(val).map_err(bad)?),
                "penalty-rule" => ov.penalty_rule = Some(parse_rule(val).map_err(bad)?),
                "eta" => ov.eta = Some(fixed::<2>(&list_f64(val).map_err(bad)?)?),
                "prune" => ov.prune = Some(boolean(val).map_err(bad)?),
                "prune-tol" => ov.prune_tol = Some(num(val).map_err(bad)?),
                "prune-interval" => ov.prune_interval = Some(int(val).map_err(bad)?),
                "seed" => ov.seed = Some(int(val).map_err(bad)?),
                "normalize" => ov.normalize = Some(boolean(val).map_err(bad)?),
                "beta2-off" => ov.beta2_off = Some(boolean(val).map_err(bad)?),
                other => return Err(fail(no, format!("unknown key '{other}'"))),
            }
        }
        Ok(ov)
    }

    /// Keep every field already set, fall back to `base` otherwise.
    fn or(mut self, base: Overrides) -> Overrides {
        self.lambda = self.lambda.or(base.lambda);
        self.beta = self.beta.or(base.beta);
        self.w = self.w.or(base.w);
        self.rank = self.rank.or(base.rank);
        self.maxiter = self.maxiter.or(base.maxiter);
        self.eps = self.eps.or(base.eps);
        self.kappa = self.kappa.or(base.kappa);
        self.beta_cap = self.beta_cap.or(base.beta_cap);
        self.penalty_rule = self.penalty_rule.or(base.penalty_rule);
        self.eta = self.eta.or(base.eta);
        self.prune = self.prune.or(base.prune);
        self.prune_tol = self.prune_tol.or(base.prune_tol);
        self.prune_interval = self.prune_interval.or(base.prune_interval);
        self.seed = self.seed.or(base.seed);
        self.normalize = self.normalize.or(base.normalize);
        self.beta2_off = self.beta2_off.or(base.beta2_off);
        self
    }

    fn into_config(self, order: usize) -> Result<(SolverConfig, bool)> {
        let mut cfg = SolverConfig::default();
        if let Some(v) = self.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = self.beta {
            cfg.beta = v;
        }
        cfg.weights = match self.w {
            Some(w) if w.len() == order => w,
            Some(w) => {
                return Err(Error::InvalidArgument(format!(
                    "expected {order} weights, got {}",
                    w.len()
                )))
            }
            None if order == 3 => vec![4.0, 4.0, 0.0],
            None => vec![0.0; order],
        };
        cfg.tr_ranks = broadcast(self.rank.unwrap_or_else(|| vec![15]), order)?;
        if let Some(v) = self.maxiter {
            cfg.maxiter = v;
        }
        if let Some(v) = self.eps {
            cfg.epsilon = v;
        }
        if let Some(v) = self.kappa {
            cfg.kappa = v;
        }
        if let Some(v) = self.beta_cap {
            cfg.beta_cap = v;
        }
        if let Some(v) = self.penalty_rule {
            cfg.penalty_rule = v;
        }
        if let Some(v) = self.eta {
            cfg.eta = v;
        }
        if let Some(v) = self.prune {
            cfg.prune = v;
        }
        if let Some(v) = self.prune_tol {
            cfg.prune_tol = v;
        }
        if let Some(v) = self.prune_interval {
            cfg.prune_interval = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if self.beta2_off.unwrap_or(false) {
            cfg.lambda = 0.0;
            cfg.weights = vec![0.0; order];
        }
        Ok((cfg, self.normalize.unwrap_or(false)))
    }
}

fn num(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|e| e.to_string())
}

fn int<T: std::str::FromStr<Err = std::num::ParseIntError>>(
    s: &str,
) -> std::result::Result<T, String> {
    s.parse::<T>().map_err(|e| e.to_string())
}

fn boolean(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        other => Err(format!("expected true/false, got '{other}'")),
    }
}

fn list_f64(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|p| num(p.trim())).collect()
}

fn list_usize(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',').map(|p| int(p.trim())).collect()
}

fn fixed<const K: usize>(v: &[f64]) -> Result<[f64; K]> {
    v.try_into().map_err(|_| {
        Error::InvalidArgument(format!("expected {K} comma-separated values, got {}", v.len()))
    })
}

fn broadcast(ranks: Vec<usize>, order: usize) -> Result<Vec<usize>> {
    match ranks.len() {
        1 => Ok(vec![ranks[0]; order]),
        n if n == order => Ok(ranks),
        n => Err(Error::InvalidArgument(format!(
            "expected 1 or {order} ranks, got {n}"
        ))),
    }
}

fn is_ppm(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("ppm"))
}

fn load_any(path: &Path) -> Result<Tensor> {
    if is_ppm(path) {
        io::load_image(path)
    } else {
        io::load_tensor(path)
    }
}

fn save_any(path: &Path, t: &Tensor) -> Result<()> {
    if is_ppm(path) {
        io::save_image(path, t)
    } else {
        io::save_tensor(path, t)
    }
}

fn default_peak(source: &Path, reference: &Tensor) -> f64 {
    if is_ppm(source) {
        return 255.0;
    }
    let m = reference.data().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

fn dims_label(dims: &[usize]) -> String {
    dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x")
}

fn cmd_mask(a: MaskArgs) -> Result<()> {
    let dims = match (a.dims, &a.input) {
        (Some(d), _) => d,
        (None, Some(path)) => load_any(path)?.dims().to_vec(),
        (None, None) => {
            return Err(Error::InvalidArgument("give --dims or --input".into()))
        }
    };
    let mask = make_mask(&dims, a.sr, a.seed)?;
    io::save_mask(&a.out, &mask)?;
    println!(
        "observed {} of {} entries ({}) -> {}",
        mask.count(),
        mask.flags().len(),
        dims_label(&dims),
        a.out.display()
    );
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let ranks = broadcast(a.rank, a.dims.len())?;
    let chain = random_chain(&a.dims, &ranks, a.seed)?;
    let mut t = tr_reconstruct(&chain)?;
    let norm = t.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("degenerate all-zero draw".into()));
    }
    t.scale(1.0 / norm);
    io::save_tensor(&a.out, &t)?;
    println!(
        "wrote {} ({}, ranks {}, unit norm)",
        a.out.display(),
        dims_label(&a.dims),
        ranks.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("-")
    );
    Ok(())
}

fn cmd_complete(a: CompleteArgs) -> Result<u8> {
    let input = load_any(&a.input)?;
    let dims = input.dims().to_vec();
    let mask = match (&a.mask, a.sr) {
        (Some(path), _) => io::load_mask(path)?,
        (None, Some(sr)) => make_mask(&dims, sr, a.mask_seed)?,
        (None, None) => Mask::new(dims.clone(), vec![true; input.numel()])?,
    };
    if mask.dims() != dims.as_slice() {
        return Err(Error::DimMismatch(format!(
            "mask is {}, input is {}",
            dims_label(mask.dims()),
            dims_label(&dims)
        )));
    }
    let obs = mask.zero_fill(&input)?;

    let mut ov = Overrides::from_flags(&a)?;
    if let Some(path) = &a.config {
        ov = ov.or(Overrides::from_file(path)?);
    }
    let (cfg, normalize) = ov.into_config(dims.len())?;

    // Optional solve in [0,1] units: divide by the largest observed magnitude,
    // undo afterwards, and keep observed entries bit-exact.
    let mut scale = 1.0;
    let work = if normalize {
        let mut peak = 0.0f64;
        for (lin, v) in obs.data().iter().enumerate() {
            if mask.is_observed(lin) {
                peak = peak.max(v.abs());
            }
        }
        if peak > 0.0 {
            scale = peak;
        }
        let mut w = obs.clone();
        w.scale(1.0 / scale);
        w
    } else {
        obs.clone()
    };

    let out = solve(&work, &mask, &cfg)?;
    let mut x = out.x;
    if scale != 1.0 {
        x.scale(scale);
        for (lin, v) in x.data_mut().iter_mut().enumerate() {
            if mask.is_observed(lin) {
                *v = obs.data()[lin];
            }
        }
    }

    if let Some(path) = &a.out {
        save_any(path, &x)?;
    }
    if let Some(path) = &a.history {
        let rows: Vec<String> = out.history.iter().map(|r| r.csv_row()).collect();
        io::write_csv(path, HISTORY_HEADER, &rows)?;
    }

    let reference = match &a.reference {
        Some(path) => load_any(path)?,
        None => input,
    };
    let source = a.reference.as_deref().unwrap_or(&a.input);
    let peak = a.peak.unwrap_or_else(|| default_peak(source, &reference));
    let report = metrics::evaluate(&reference, &x, peak)?;
    if let Some(path) = &a.metrics {
        io::write_csv(path, METRICS_HEADER, &[report.csv_row()])?;
    }

    let ranks = out
        .history
        .last()
        .map(|r| r.ranks.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-"))
        .unwrap_or_else(|| "-".into());
    let status = if out.converged { "converged" } else { "max iterations" };
    println!(
        "{status} after {} iterations; ranks {ranks}; rse {:.3e}; psnr {:.2} dB",
        out.iterations, report.rse, report.psnr
    );
    Ok(if out.converged { 0 } else { 2 })
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let reference = load_any(&a.reference)?;
    let est = load_any(&a.est)?;
    let peak = a.peak.unwrap_or_else(|| default_peak(&a.reference, &reference));
    let report = metrics::evaluate(&reference, &est, peak)?;
    println!("{METRICS_HEADER}");
    println!("{}", report.csv_row());
    if !report.flags.is_empty() {
        eprintln!("flags: {}", report.flags.join(";"));
    }
    if let Some(path) = &a.out {
        io::write_csv(path, METRICS_HEADER, &[report.csv_row()])?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    }
    match cli.cmd {
        Cmd::Mask(a) => cmd_mask(a).map(|_| 0),
        Cmd::Synth(a) => cmd_synth(a).map(|_| 0),
        Cmd::Complete(a) => cmd_complete(*a),
        Cmd::Eval(a) => cmd_eval(a).map(|_| 0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version exit clean; genuine usage errors exit 1
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
