//! Monte Carlo experiments: empirical size and power, record-count laws and
//! power sweeps over the FAR(1) operator norm.
//!
//! Replicate `r` of a cell draws from the ChaCha stream `cell_key ^ r` of
//! the base seed, where `cell_key` hashes the cell parameters. Results are
//! collected in replicate order, so they do not depend on the worker count.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::asymptotics::{cdf, pdf, LimitLaw};
use crate::depth::DepthKind;
use crate::error::{FrecError, Result};
use crate::grid::{uniform_grid, Grid};
use crate::records::{detect_records_rows, RecordAlgorithm, RecordTrajectory};
use crate::simulate::{
    validate_pair, ModelGenerator, ModelKind, ModelSpec, NoiseSampler, NoiseSpec, Seed,
};
use crate::urtest::test_from_trajectory;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "FREC_THREADS";

/// Desk-scale replicate count.
pub const DEFAULT_REPLICATES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    /// Model template; its `n` is replaced by each entry of `n_values`.
    pub model: ModelSpec,
    pub noise: NoiseSpec,
    pub n_values: Vec<usize>,
    pub replicates: usize,
    pub alpha: f64,
    pub depth: DepthKind,
    pub algo: RecordAlgorithm,
    pub base_seed: u64,
    /// Values of `psi1_norm` for [`run_power_sweep`].
    pub sweep: Option<Vec<f64>>,
    pub grid_points: usize,
    /// Worker threads; `None` reads [`THREADS_ENV`] or uses all cores.
    pub threads: Option<usize>,
}

impl McConfig {
    pub fn new(model: ModelKind, noise: NoiseSpec, n: usize) -> Self {
        McConfig {
            model: ModelSpec::new(model, n),
            noise,
            n_values: vec![n],
            replicates: DEFAULT_REPLICATES,
            alpha: 0.05,
            depth: DepthKind::Mbd,
            algo: RecordAlgorithm::ExactPrefix,
            base_seed: 20_240_101,
            sweep: None,
            grid_points: 50,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(FrecError::invalid("replicates must be at least 1"));
        }
        if self.n_values.is_empty() {
            return Err(FrecError::invalid("n_values must not be empty"));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 3) {
            return Err(FrecError::invalid(format!("sample size {n} is below 3")));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(FrecError::invalid(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.is_empty() {
                return Err(FrecError::invalid("sweep must not be empty"));
            }
            if let Some(v) = sweep.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
                return Err(FrecError::invalid(format!(
                    "sweep value {v} outside (0, 1]"
                )));
            }
        }
        if self.grid_points < 2 {
            return Err(FrecError::invalid("grid_points must be at least 2"));
        }
        validate_pair(&self.model, &self.noise)
    }
}

/// Outcome of one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replicate {
    pub n_total: usize,
    pub n_upper: usize,
    pub n_lower: usize,
    pub statistic: f64,
    pub reject: bool,
}

/// Aggregate over the replicates of one (model, noise, n) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct McCell {
    pub model: ModelKind,
    pub noise: NoiseSpec,
    pub n: usize,
    pub psi1_norm: f64,
    pub alpha: f64,
    pub replicates: Vec<Replicate>,
    pub rejections: usize,
    pub rejection_rate: f64,
    pub mean_statistic: f64,
    pub wall_time: f64,
}

impl McCell {
    pub fn statistics(&self) -> Vec<f64> {
        self.replicates.iter().map(|r| r.statistic).collect()
    }

    /// `N^u_n / sqrt(n)` per replicate.
    pub fn scaled_upper(&self) -> Vec<f64> {
        let s = (self.n as f64).sqrt();
        self.replicates
            .iter()
            .map(|r| r.n_upper as f64 / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub cells: Vec<McCell>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable key of a cell, independent of the other cells in a run.
pub fn cell_key(model: &ModelSpec, noise: &NoiseSpec, grid_points: usize) -> u64 {
    let fields = [
        model.kind as u64,
        noise.kind as u64,
        model.n as u64,
        model.break_point() as u64,
        model.psi1_norm.to_bits(),
        model.psi2_norm.to_bits(),
        noise.gp_scale.to_bits(),
        noise.gp_range.to_bits(),
        grid_points as u64,
    ];
    fields
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |h, &f| splitmix64(h ^ f))
}

fn thread_count(cfg_threads: Option<usize>) -> Option<usize> {
    cfg_threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&t| t > 0)
    })
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match thread_count(threads) {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| FrecError::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn with_context(e: FrecError, n: usize, r: usize) -> FrecError {
    let ctx = |m: String| format!("n = {n}, replicate = {r}: {m}");
    match e {
        FrecError::InvalidArgument(m) => FrecError::InvalidArgument(ctx(m)),
        FrecError::Format(m) => FrecError::Format(ctx(m)),
        FrecError::Io(m) => FrecError::Io(ctx(m)),
        FrecError::Internal(m) => FrecError::Internal(ctx(m)),
    }
}

/// Shared state for generating and analyzing the replicates of one cell.
struct CellRunner {
    model: ModelSpec,
    noise: NoiseSpec,
    grid: Grid,
    generator: ModelGenerator,
    sampler: NoiseSampler,
    key: u64,
    base_seed: u64,
    depth: DepthKind,
    algo: RecordAlgorithm,
}

impl CellRunner {
    fn new(cfg: &McConfig, model: ModelSpec) -> Result<Self> {
        validate_pair(&model, &cfg.noise)?;
        let grid = uniform_grid(cfg.grid_points)?;
        Ok(CellRunner {
            generator: ModelGenerator::new(model, &grid)?,
            sampler: NoiseSampler::new(&cfg.noise, &grid)?,
            key: cell_key(&model, &cfg.noise, cfg.grid_points),
            model,
            noise: cfg.noise,
            grid,
            base_seed: cfg.base_seed,
            depth: cfg.depth,
            algo: cfg.algo,
        })
    }

    fn seed(&self, r: usize) -> Seed {
        Seed::with_stream(self.base_seed, self.key ^ r as u64)
    }

    fn trajectory(&self, r: usize) -> Result<RecordTrajectory> {
        let m = self.grid.len();
        let flat = self.generator.generate_seeded(&self.sampler, self.seed(r));
        let rows: Vec<&[f64]> = flat.chunks_exact(m).collect();
        detect_records_rows(&rows, &self.grid, self.depth, self.algo, None)
            .map_err(|e| with_context(e, self.model.n, r))
    }

    fn replicate(&self, r: usize, alpha: f64) -> Result<Replicate> {
        let traj = self.trajectory(r)?;
        let t = test_from_trajectory(&traj, alpha).map_err(|e| with_context(e, self.model.n, r))?;
        Ok(Replicate {
            n_total: t.n_total,
            n_upper: t.n_upper,
            n_lower: t.n_lower,
            statistic: t.statistic,
            reject: t.reject,
        })
    }
}

fn run_cell(cfg: &McConfig, model: ModelSpec) -> Result<McCell> {
    let start = Instant::now();
    let runner = CellRunner::new(cfg, model)?;
    let replicates = with_pool(cfg.threads, || {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|r| runner.replicate(r, cfg.alpha))
            .collect::<Result<Vec<_>>>()
    })??;
    let rejections = replicates.iter().filter(|r| r.reject).count();
    let mean_statistic =
        replicates.iter().map(|r| r.statistic).sum::<f64>() / replicates.len() as f64;
    Ok(McCell {
        model: model.kind,
        noise: runner.noise,
        n: model.n,
        psi1_norm: model.psi1_norm,
        alpha: cfg.alpha,
        rejections,
        rejection_rate: rejections as f64 / replicates.len() as f64,
        mean_statistic,
        replicates,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Rejection rates of the record-based test for every sample size in `cfg`.
pub fn run_size_power(cfg: &McConfig) -> Result<McResult> {
    cfg.validate()?;
    let cells = cfg
        .n_values
        .iter()
        .map(|&n| run_cell(cfg, ModelSpec { n, ..cfg.model }))
        .collect::<Result<Vec<_>>>()?;
    Ok(McResult { cells })
}

/// Rejection rate at each `psi1_norm` of the sweep (first sample size of `cfg`).
pub fn run_power_sweep(cfg: &McConfig) -> Result<Vec<(f64, McCell)>> {
    cfg.validate()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| FrecError::invalid("power sweep needs a list of operator norms"))?;
    if cfg.model.kind != ModelKind::M4Far1 {
        return Err(FrecError::invalid("power sweep runs on model m4"));
    }
    let n = cfg.n_values[0];
    sweep
        .iter()
        .map(|&norm| {
            let model = ModelSpec {
                n,
                psi1_norm: norm,
                ..cfg.model
            };
            run_cell(cfg, model).map(|c| (norm, c))
        })
        .collect()
}

/// Simulated record-count behaviour for one sample size.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordLaw {
    /// Random walk: `N^u_n / sqrt(n)` per replicate with the `g1` density on a plotting grid.
    RandomWalk {
        n: usize,
        scaled_upper: Vec<f64>,
        scaled_total: Vec<f64>,
        density: Vec<(f64, f64)>,
    },
    /// Stationary: `N_j` and `N^u_j` trajectories with the `log j` reference.
    Stationary {
        n: usize,
        totals: Vec<Vec<usize>>,
        uppers: Vec<Vec<usize>>,
        log_reference: Vec<f64>,
    },
}

/// Records-only simulation for model m1 (law of `N^u_n / sqrt n`) or m3
/// (trajectories of `N_j`).
pub fn run_record_law(cfg: &McConfig, n: usize) -> Result<RecordLaw> {
    let cfg = McConfig {
        n_values: vec![n],
        ..cfg.clone()
    };
    cfg.validate()?;
    let model = ModelSpec { n, ..cfg.model };
    if !matches!(model.kind, ModelKind::M1RandomWalk | ModelKind::M3Iid) {
        return Err(FrecError::invalid("record law runs on model m1 or m3"));
    }
    let runner = CellRunner::new(&cfg, model)?;
    let trajectories = with_pool(cfg.threads, || {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|r| runner.trajectory(r))
            .collect::<Result<Vec<_>>>()
    })??;
    let sqrt_n = (n as f64).sqrt();
    Ok(match model.kind {
        ModelKind::M1RandomWalk => {
            let scaled_upper: Vec<f64> = trajectories
                .iter()
                .map(|t| t.total_upper() as f64 / sqrt_n)
                .collect();
            let scaled_total = trajectories
                .iter()
                .map(|t| t.total() as f64 / sqrt_n)
                .collect();
            let hi = scaled_upper.iter().cloned().fold(4.0, f64::max);
            let density = (0..=200)
                .map(|k| {
                    let x = hi * k as f64 / 200.0;
                    (x, pdf(LimitLaw::G1, x))
                })
                .collect();
            RecordLaw::RandomWalk {
                n,
                scaled_upper,
                scaled_total,
                density,
            }
        }
        _ => RecordLaw::Stationary {
            n,
            totals: trajectories.iter().map(|t| t.counts().to_vec()).collect(),
            uppers: trajectories
                .iter()
                .map(|t| t.upper_counts().to_vec())
                .collect(),
            log_reference: (1..=n).map(|j| (j as f64).ln()).collect(),
        },
    })
}

/// One-sample Kolmogorov–Smirnov distance `sup |F_n - F|`, evaluated on both
/// sides of every jump so that discrete samples are handled exactly.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j < xs.len() && xs[j] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d
            .max((f - i as f64 / n).abs())
            .max((j as f64 / n - f).abs());
        i = j;
    }
    d
}

/// Survival function of the Kolmogorov distribution, `P(K > x)`.
fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Asymptotic critical value of the KS distance at level `alpha` for `n` samples.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.2f64, 5.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) / (n as f64).sqrt()
}

/// KS distance of a sample against one of the limit laws.
pub fn ks_against(samples: &[f64], law: LimitLaw) -> f64 {
    ks_distance(samples, |x| cdf(law, x))
}

/// Aligned text table of rejection rates: one row per noise, one column per `n`,
/// followed by the unavailable comparison-norm row.
pub fn format_rejection_table(result: &McResult) -> String {
    let mut ns: Vec<usize> = result.cells.iter().map(|c| c.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut groups: Vec<(ModelKind, NoiseSpec)> = Vec::new();
    for c in &result.cells {
        if !groups.iter().any(|(m, z)| *m == c.model && z == &c.noise) {
            groups.push((c.model, c.noise));
        }
    }
    let mut out = String::new();
    for (model, noise) in groups {
        let _ = write!(out, "{:<12}", format!("Model {}", model.as_str()));
        for n in &ns {
            let _ = write!(out, "{:>10}", format!("n={n}"));
        }
        out.push('\n');
        let _ = write!(out, "{:<12}", noise.kind.as_str());
        for n in &ns {
            let cell = result
                .cells
                .iter()
                .find(|c| c.model == model && c.noise == noise && c.n == *n);
            match cell {
                Some(c) => {
                    let _ = write!(out, "{:>10.3}", c.rejection_rate);
                }
                None => {
                    let _ = write!(out, "{:>10}", "-");
                }
            }
        }
        out.push('\n');
        let _ = write!(out, "{:<12}", "");
        for _ in &ns {
            let _ = write!(out, "{:>10}", "(n/a)");
        }
        out.push('\n');
    }
    out
}

/// Raw per-replicate values as CSV.
pub fn format_replicates_csv(result: &McResult) -> String {
    let mut out =
        String::from("model,noise,n,psi1_norm,replicate,N_total,N_upper,N_lower,T_n,reject\n");
    for c in &result.cells {
        for (r, rep) in c.replicates.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                c.model.as_str(),
                c.noise.kind.as_str(),
                c.n,
                c.psi1_norm,
                r,
                rep.n_total,
                rep.n_upper,
                rep.n_lower,
                rep.statistic,
                rep.reject as u8
            );
        }
    }
    out
}

/// Histogram `x, count, density` of samples with the given bin width, paired
/// with the limit density at each bin center.
pub fn histogram(samples: &[f64], width: f64, law: LimitLaw) -> Vec<(f64, usize, f64)> {
    let hi = samples.iter().cloned().fold(0.0, f64::max);
    let bins = (hi / width).floor() as usize + 1;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let b = ((x / width).floor().max(0.0) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(b, c)| {
            let x = (b as f64 + 0.5) * width;
            (x, c, pdf(law, x))
        })
        .collect()
}

pub fn format_histogram_csv(rows: &[(f64, usize, f64)]) -> String {
    let mut out = String::from("x,count,density\n");
    for (x, c, d) in rows {
        let _ = writeln!(out, "{x},{c},{d}");
    }
    out
}

/// Trajectory ensemble in long format `replicate, j, N_j, N^u_j, log_j`.
pub fn format_trajectories_csv(totals: &[Vec<usize>], uppers: &[Vec<usize>]) -> String {
    let mut out = String::from("replicate,j,N_j,N_u_j,log_j\n");
    for (r, (tot, up)) in totals.iter().zip(uppers).enumerate() {
        for (k, (t, u)) in tot.iter().zip(up).enumerate() {
            let j = k + 1;
            let _ = writeln!(out, "{r},{j},{t},{u},{}", (j as f64).ln());
        }
    }
    out
}
