use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frec::harness::{
    format_histogram_csv, format_rejection_table, format_replicates_csv, format_trajectories_csv,
    histogram,
};
use frec::io::{
    mc_cell_section, parse_config, parse_csv, records_section, test_section, write_csv,
    ResultDocument, Section, Table,
};
use frec::{
    depth, detect_records, gen_model, quantile, rb_unit_root_test, run_power_sweep, run_record_law,
    run_size_power, uniform_grid, DepthKind, FrecError, LimitLaw, McConfig, McResult, ModelKind,
    ModelSpec, NoiseSpec, RecordAlgorithm, RecordLaw, Seed,
};

const DEFAULT_SEED: u64 = 20_240_101;

#[derive(Parser)]
#[command(
    name = "frec",
    version,
    about = "Functional records and the record-based unit root test"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a functional time series and write it as CSV.
    Simulate(SimulateArgs),
    /// Depth of every curve in a CSV sample.
    Depth(DepthArgs),
    /// List the functional records of a CSV sample.
    Records(RecordsArgs),
    /// Record-based unit root test on a CSV sample.
    Test(TestArgs),
    /// Monte Carlo size and power study.
    Mc(Box<McArgs>),
    /// Quantile of a limit law.
    Quantile(QuantileArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value = "m1")]
    model: ModelKind,
    #[arg(long, default_value = "bm")]
    noise: NoiseSpec,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    grid_points: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DepthArgs {
    path: PathBuf,
    #[arg(long, default_value = "mbd")]
    depth: DepthKind,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecordsArgs {
    path: PathBuf,
    #[arg(long, default_value = "mbd")]
    depth: DepthKind,
    #[arg(long, default_value = "exact")]
    algo: RecordAlgorithm,
    /// Seed for breaking depth ties; ties keep input order without it.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    path: PathBuf,
    #[arg(long, default_value = "mbd")]
    depth: DepthKind,
    #[arg(long, default_value = "exact")]
    algo: RecordAlgorithm,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Every value is optional so that `--config` can supply it; flags win.
#[derive(Args)]
struct McArgs {
    /// Flat `key = value` file using the flag names as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    noise: Option<NoiseSpec>,
    /// One or more sample sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    depth: Option<DepthKind>,
    #[arg(long)]
    algo: Option<RecordAlgorithm>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    psi1_norm: Option<f64>,
    /// Operator norms for a power sweep (model m4), comma separated.
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<f64>,
    /// Worker threads; overrides FREC_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    /// Also write the aligned rejection table here.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Also write per-replicate values as CSV here.
    #[arg(long)]
    raw: Option<PathBuf>,
    /// Also write histogram (m1) or trajectory (m3) data for the first n here.
    #[arg(long)]
    law: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Law {
    G1,
    G2,
}

#[derive(Args)]
struct QuantileArgs {
    #[arg(long, value_enum, default_value = "g2")]
    law: Law,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

type Result<T> = std::result::Result<T, FrecError>;

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| FrecError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn args(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let grid = uniform_grid(a.grid_points)?;
    let sample = gen_model(
        &ModelSpec::new(a.model, a.n),
        &a.noise,
        &grid,
        Seed::new(a.seed),
    )?;
    let header = format!(
        "# frec simulate --model {} --noise {} --n {} --grid-points {} --seed {}\n",
        a.model.as_str(),
        a.noise.kind.as_str(),
        a.n,
        a.grid_points,
        a.seed
    );
    emit(a.out.as_deref(), &(header + &write_csv(&sample)))
}

fn depth_cmd(a: DepthArgs) -> Result<()> {
    let sample = parse_csv(&a.path)?;
    let dv = depth(&sample, a.depth)?;
    let mut doc = ResultDocument::new(
        "depth",
        args(&[
            ("path", a.path.display().to_string()),
            ("depth", a.depth.to_string()),
        ]),
        None,
    );
    let mut s = Section::new("depth")
        .field("kind", a.depth)
        .field("n", dv.len())
        .field("denominator", dv.denominator());
    s.table = Some(Table {
        columns: vec!["i".into(), "score".into(), "depth".into()],
        rows: (0..dv.len())
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    dv.scores()[i].to_string(),
                    dv.value(i).to_string(),
                ]
            })
            .collect(),
    });
    doc.sections.push(s);
    emit(a.out.as_deref(), &doc.render())
}

fn records(a: RecordsArgs) -> Result<()> {
    let sample = parse_csv(&a.path)?;
    let traj = detect_records(&sample, a.depth, a.algo, a.seed)?;
    let mut doc = ResultDocument::new(
        "records",
        args(&[
            ("path", a.path.display().to_string()),
            ("depth", a.depth.to_string()),
            ("algo", a.algo.to_string()),
        ]),
        a.seed,
    );
    doc.sections.push(records_section(&traj));
    emit(a.out.as_deref(), &doc.render())
}

fn test_cmd(a: TestArgs) -> Result<()> {
    let sample = parse_csv(&a.path)?;
    let t = rb_unit_root_test(&sample, a.depth, a.algo, a.alpha)?;
    let mut doc = ResultDocument::new(
        "test",
        args(&[
            ("path", a.path.display().to_string()),
            ("depth", a.depth.to_string()),
            ("algo", a.algo.to_string()),
            ("alpha", a.alpha.to_string()),
        ]),
        None,
    );
    doc.sections.push(test_section(&t));
    emit(a.out.as_deref(), &doc.render())
}

fn quantile_cmd(a: QuantileArgs) -> Result<()> {
    let (law, name) = match a.law {
        Law::G1 => (LimitLaw::G1, "g1"),
        Law::G2 => (LimitLaw::G2, "g2"),
    };
    let q = quantile(law, a.alpha)?;
    let mut doc = ResultDocument::new(
        "quantile",
        args(&[("law", name.to_string()), ("alpha", a.alpha.to_string())]),
        None,
    );
    doc.sections.push(
        Section::new("quantile")
            .field("law", name)
            .field("alpha", a.alpha)
            .field("q", q),
    );
    emit(a.out.as_deref(), &doc.render())
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| FrecError::InvalidArgument(format!("config: bad value '{value}' for '{key}'")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|v| parse_value(key, v.trim()))
        .collect()
}

/// Fills unset flags from the config file.
fn merge_config(a: &mut McArgs) -> Result<()> {
    let Some(path) = &a.config else { return Ok(()) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| FrecError::Io(format!("{}: {e}", path.display())))?;
    for (key, value) in parse_config(&text)? {
        let v = value.as_str();
        match key.replace('_', "-").as_str() {
            "model" => a.model = a.model.or(Some(v.parse()?)),
            "noise" => a.noise = a.noise.or(Some(v.parse()?)),
            "n" if a.n.is_empty() => a.n = parse_list(&key, v)?,
            "n" => {}
            "replicates" => a.replicates = a.replicates.or(Some(parse_value(&key, v)?)),
            "alpha" => a.alpha = a.alpha.or(Some(parse_value(&key, v)?)),
            "depth" => a.depth = a.depth.or(Some(v.parse()?)),
            "algo" => a.algo = a.algo.or(Some(v.parse()?)),
            "seed" => a.seed = a.seed.or(Some(parse_value(&key, v)?)),
            "grid-points" => a.grid_points = a.grid_points.or(Some(parse_value(&key, v)?)),
            "psi1-norm" => a.psi1_norm = a.psi1_norm.or(Some(parse_value(&key, v)?)),
            "sweep" if a.sweep.is_empty() => a.sweep = parse_list(&key, v)?,
            "sweep" => {}
            "threads" => a.threads = a.threads.or(Some(parse_value(&key, v)?)),
            other => {
                return Err(FrecError::InvalidArgument(format!(
                    "config: unknown key '{other}'"
                )))
            }
        }
    }
    Ok(())
}

fn mc(mut a: McArgs) -> Result<()> {
    merge_config(&mut a)?;
    let model = a.model.unwrap_or(ModelKind::M1RandomWalk);
    let noise = a.noise.unwrap_or_else(NoiseSpec::brownian_motion);
    let n_values = if a.n.is_empty() {
        vec![200]
    } else {
        a.n.clone()
    };
    let mut cfg = McConfig::new(model, noise, n_values[0]);
    cfg.n_values = n_values;
    if let Some(v) = a.replicates {
        cfg.replicates = v;
    }
    if let Some(v) = a.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = a.depth {
        cfg.depth = v;
    }
    if let Some(v) = a.algo {
        cfg.algo = v;
    }
    if let Some(v) = a.seed {
        cfg.base_seed = v;
    }
    if let Some(v) = a.grid_points {
        cfg.grid_points = v;
    }
    if let Some(v) = a.psi1_norm {
        cfg.model = cfg.model.with_psi1_norm(v);
    }
    if !a.sweep.is_empty() {
        cfg.sweep = Some(a.sweep.clone());
    }
    cfg.threads = a.threads;

    let join = |v: &[String]| v.join(",");
    let mut flags = vec![
        ("model", model.as_str().to_string()),
        ("noise", noise.kind.as_str().to_string()),
        (
            "n",
            join(
                &cfg.n_values
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>(),
            ),
        ),
        ("replicates", cfg.replicates.to_string()),
        ("alpha", cfg.alpha.to_string()),
        ("depth", cfg.depth.to_string()),
        ("algo", cfg.algo.to_string()),
        ("grid-points", cfg.grid_points.to_string()),
        ("psi1-norm", cfg.model.psi1_norm.to_string()),
    ];
    if let Some(s) = &cfg.sweep {
        flags.push((
            "sweep",
            join(&s.iter().map(|v| v.to_string()).collect::<Vec<_>>()),
        ));
    }
    let mut doc = ResultDocument::new("mc", args(&flags), Some(cfg.base_seed));

    let result = if cfg.sweep.is_some() {
        McResult {
            cells: run_power_sweep(&cfg)?.into_iter().map(|(_, c)| c).collect(),
        }
    } else {
        run_size_power(&cfg)?
    };
    for (k, cell) in result.cells.iter().enumerate() {
        doc.sections
            .push(mc_cell_section(&format!("cell.{}", k + 1), cell));
    }
    if let Some(p) = &a.table {
        emit(Some(p), &format_rejection_table(&result))?;
    }
    if let Some(p) = &a.raw {
        emit(Some(p), &format_replicates_csv(&result))?;
    }
    if let Some(p) = &a.law {
        let text = match run_record_law(&cfg, cfg.n_values[0])? {
            RecordLaw::RandomWalk { scaled_upper, .. } => {
                format_histogram_csv(&histogram(&scaled_upper, 0.1, LimitLaw::G1))
            }
            RecordLaw::Stationary { totals, uppers, .. } => {
                format_trajectories_csv(&totals, &uppers)
            }
        };
        emit(Some(p), &text)?;
    }
    emit(a.out.as_deref(), &doc.render())
}

fn exit_code(e: &FrecError) -> u8 {
    match e {
        FrecError::InvalidArgument(_) => 1,
        FrecError::Format(_) | FrecError::Io(_) => 2,
        FrecError::Internal(_) => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Depth(a) => depth_cmd(a),
        Command::Records(a) => records(a),
        Command::Test(a) => test_cmd(a),
        Command::Mc(a) => mc(*a),
        Command::Quantile(a) => quantile_cmd(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
