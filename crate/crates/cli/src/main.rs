mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use inar_core::asymptotics::{self, TheorySummary};
use inar_core::montecarlo::{self, mdp_required_reps, ValidationReport, MDP_MIN_TAIL};
use inar_core::num::json_real;
use inar_core::recursions::{f_sequence, gbar_tables, mdp_mgf_curve};
use inar_core::simulator::{simulate_batch_with, simulate_with};
use inar_core::{Error, MdpSchedule, Model, RandomStream};

use config::{Check, ConfigError, Format, RunConfig, Table};

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ASSUMPTION: u8 = 3;

#[derive(Parser)]
#[command(name = "inar", version, about = "INAR(∞) simulation, limit theory and validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Limit constants and rate functions on an x-grid.
    Theory(Common),
    /// Simulate one trajectory, or a batch of replication summaries.
    Simulate(Common),
    /// Run validation checks; exit status 1 if any fails.
    Validate(Common),
    /// Dump f_k, Ḡ tables or the MDP log-MGF curve.
    Recursion(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Run configuration (JSON); flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model specification (JSON).
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed; drawn from system entropy when omitted.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Comma-separated θ values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
    /// Comma-separated x values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x_grid: Option<Vec<f64>>,
    /// Deviation level of the MDP check.
    #[arg(long)]
    x: Option<f64>,
    /// Checks to run (validate).
    #[arg(long, value_enum, value_delimiter = ',')]
    checks: Option<Vec<Check>>,
    /// Table to dump (recursion).
    #[arg(long, value_enum)]
    table: Option<Table>,
    /// Comma-separated horizons of the MDP curve (recursion).
    #[arg(long, value_delimiter = ',')]
    horizons: Option<Vec<usize>>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

enum Failure {
    Config(ConfigError),
    Usage(String),
    Core(Error),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::AssumptionViolated { .. } | Error::DivergentSeries(_) | Error::Degenerate(_) => EXIT_ASSUMPTION,
        Error::Overflow { .. } | Error::BoundViolation { .. } | Error::DivergentMgf => EXIT_VALIDATION,
        _ => EXIT_USAGE,
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

struct Run {
    cfg: RunConfig,
    model: Model,
}

impl Run {
    fn load(common: Common) -> Outcome<Self> {
        let flags = RunConfig {
            model: common.model.as_deref().map(config::read_json).transpose()?,
            n: common.n,
            reps: common.reps,
            seed: common.seed,
            beta: common.beta,
            theta: common.theta,
            x_grid: common.x_grid,
            x: common.x,
            checks: common.checks,
            table: common.table,
            horizons: common.horizons,
            sampling: None,
            out: common.out,
            format: common.format,
        };
        let cfg = match &common.config {
            Some(path) => flags.or(RunConfig::load(path)?),
            None => flags,
        };
        let model = cfg.model.clone().ok_or_else(|| Failure::Usage("no model given (use --model or a config with \"model\")".into()))?;
        model.check_structure()?;
        Ok(Self { cfg, model })
    }

    fn format(&self) -> Format {
        self.cfg.format.unwrap_or_default()
    }

    fn seed(&self) -> u64 {
        let seed = self.cfg.seed.unwrap_or_else(|| RandomStream::from_entropy().seed);
        eprintln!("seed: {seed}");
        seed
    }

    fn output(&self) -> Outcome<Box<dyn Write>> {
        Ok(match &self.cfg.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn write_json(&self, value: &Value) -> Outcome<()> {
        let mut out = self.output()?;
        serde_json::to_writer_pretty(&mut out, value).map_err(Error::from)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }

    fn write_csv(&self, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Outcome<()> {
        let mut w = csv::Writer::from_writer(self.output()?);
        w.write_record(header).map_err(Error::from)?;
        for row in rows {
            w.write_record(&row).map_err(Error::from)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn cmd_theory(run: Run) -> Outcome<()> {
    let summary = TheorySummary::new(&run.model)?;
    let grid = run
        .cfg
        .x_grid
        .clone()
        .unwrap_or_else(|| (1..=12).map(|i| summary.mu * i as f64 / 4.0).collect());
    let mut rates = Vec::with_capacity(grid.len());
    for &x in &grid {
        let j = match summary.mdp_rate(x) {
            Ok(v) => Some(v),
            Err(Error::Degenerate(_)) => None,
            Err(e) => return Err(e.into()),
        };
        rates.push((x, summary.ldp_rate(x)?, j));
    }
    match run.format() {
        Format::Json => {
            let mut doc = serde_json::to_value(&summary).map_err(Error::from)?;
            let obj = doc.as_object_mut().expect("summary is an object");
            obj.insert("model_fingerprint".into(), json!(run.model.fingerprint()));
            obj.insert("assumptions".into(), serde_json::to_value(run.model.validate()).map_err(Error::from)?);
            obj.insert("I".into(), rates.iter().map(|&(x, i, _)| json!({"x": x, "value": json_real(i)})).collect());
            obj.insert(
                "J".into(),
                rates.iter().map(|&(x, _, j)| json!({"x": x, "value": j.map(json_real)})).collect(),
            );
            run.write_json(&doc)
        }
        Format::Csv => run.write_csv(
            &["x", "I", "J"],
            rates.iter().map(|&(x, i, j)| vec![x.to_string(), i.to_string(), j.map_or(String::new(), |v| v.to_string())]),
        ),
    }
}

fn cmd_simulate(run: Run) -> Outcome<()> {
    let n = run.cfg.n.unwrap_or(1000);
    let seed = run.seed();
    let sampling = run.cfg.sampling.unwrap_or_default();
    match run.cfg.reps {
        None => {
            let t = simulate_with(&run.model, n, RandomStream::new(seed), sampling)?;
            match run.format() {
                Format::Json => run.write_json(&json!({"seed": seed, "trajectory": t})),
                Format::Csv => run.write_csv(
                    &["t", "x"],
                    t.counts.iter().enumerate().map(|(i, x)| vec![(i + 1).to_string(), x.to_string()]),
                ),
            }
        }
        Some(reps) => {
            let rows = simulate_batch_with(&run.model, n, reps, RandomStream::new(seed), sampling)?;
            let mean = rows.iter().map(|r| r.s_n as f64 / n as f64).sum::<f64>() / rows.len() as f64;
            eprintln!("mean s_n/n: {mean}");
            match run.format() {
                Format::Json => run.write_json(&json!({"seed": seed, "n": n, "replications": rows})),
                Format::Csv => run.write_csv(
                    &["rep", "s_n", "x_n", "m_n"],
                    rows.iter().map(|r| vec![r.rep.to_string(), r.s_n.to_string(), r.x_n.to_string(), r.m_n.to_string()]),
                ),
            }
        }
    }
}

/// `θ` values for the Γ check: within `θ_c / 2` and small enough that
/// `θ² n σ² <= 16`, beyond which the sample mean of `exp(θ S_n)` is
/// dominated by a handful of replications.
fn gamma_theta_grid(model: &Model, n: usize) -> Outcome<Vec<f64>> {
    let sigma2 = asymptotics::clt_sigma2(model)?;
    let mut top = 0.5 * asymptotics::theta_c(model)?.value;
    if sigma2 > 0.0 {
        top = top.min(4.0 / (n as f64 * sigma2).sqrt());
    }
    Ok(vec![-top, 0.0, 0.5 * top, top])
}

fn cmd_validate(run: Run) -> Outcome<()> {
    asymptotics::lln_mu(&run.model)?;
    let checks = run.cfg.checks.clone().unwrap_or_else(|| vec![Check::Lln, Check::Clt]);
    let needs_seed = checks.iter().any(|c| matches!(c, Check::Lln | Check::Clt | Check::Mdp | Check::Gamma));
    let seed = if needs_seed { run.seed() } else { 0 };
    let n = run.cfg.n;
    let reps = run.cfg.reps;
    let mut reports: Vec<ValidationReport> = Vec::with_capacity(checks.len());
    for check in checks {
        let report = match check {
            Check::Lln => montecarlo::validate_lln(&run.model, n.unwrap_or(2000), reps.unwrap_or(1000), seed)?,
            Check::Clt => montecarlo::validate_clt(&run.model, n.unwrap_or(2000), reps.unwrap_or(1000), seed)?,
            Check::Mdp => {
                let (beta, x, n) = (run.cfg.beta.unwrap_or(0.6), run.cfg.x.unwrap_or(1.0), n.unwrap_or(10_000));
                let reps = match reps {
                    Some(r) => r,
                    None => mdp_required_reps(&run.model, beta, n, x, MDP_MIN_TAIL)?,
                };
                montecarlo::validate_mdp(&run.model, beta, n, reps, x, seed)?
            }
            Check::Gamma => {
                let n = n.unwrap_or(2000);
                let grid = match &run.cfg.theta {
                    Some(t) => t.clone(),
                    None => gamma_theta_grid(&run.model, n)?,
                };
                montecarlo::validate_gamma(&run.model, &grid, n, reps.unwrap_or(1000), seed)?
            }
            Check::Cesaro => montecarlo::cesaro_report(&run.model, n.unwrap_or(100_000))?,
            Check::Oracle => {
                let grid = run.cfg.theta.clone().unwrap_or_else(|| vec![-1.0, -0.3, 0.0, 0.4, 2f64.ln()]);
                montecarlo::oracle_report(&run.model, n.unwrap_or(4), &grid)?
            }
        };
        eprintln!("{}: {}", report.theorem.id(), if report.pass { "pass" } else { "FAIL" });
        reports.push(report);
    }
    match run.format() {
        Format::Json => run.write_json(&serde_json::to_value(&reports).map_err(Error::from)?)?,
        Format::Csv => run.write_csv(
            &["theorem", "n", "reps", "seed", "pass", "checks_passed", "checks_total", "runtime_secs"],
            reports.iter().map(|r| {
                vec![
                    r.theorem.id().to_string(),
                    r.n.to_string(),
                    r.reps.to_string(),
                    r.seed.map_or(String::new(), |s| s.to_string()),
                    r.pass.to_string(),
                    r.checks.iter().filter(|c| c.pass).count().to_string(),
                    r.checks.len().to_string(),
                    r.runtime_secs.to_string(),
                ]
            }),
        )?,
    }
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn cmd_recursion(run: Run) -> Outcome<()> {
    let theta = match run.cfg.theta.as_deref() {
        Some([t, ..]) => *t,
        Some([]) => return Err(Failure::Usage("--theta needs a value".into())),
        None => match run.cfg.table.unwrap_or_default() {
            Table::Mdp => 1.0,
            _ => 0.5 * asymptotics::theta_c(&run.model)?.value.min(1.0),
        },
    };
    match run.cfg.table.unwrap_or_default() {
        Table::F => {
            let n = run.cfg.n.unwrap_or(1000);
            let rec = f_sequence(&run.model, theta, n);
            let mut partial = 0.0;
            let rows: Vec<(usize, f64, f64)> = rec
                .f_values
                .iter()
                .enumerate()
                .map(|(k, &f)| {
                    partial += run.model.immigration.log_mgf(f);
                    (k + 1, f, partial)
                })
                .collect();
            match run.format() {
                Format::Json => run.write_json(&json!({
                    "theta": theta,
                    "f": rec.f_values.iter().map(|&f| json_real(f)).collect::<Vec<_>>(),
                    "log_mgf": json_real(rec.log_mgf_total),
                    "diverged": rec.diverged(),
                })),
                Format::Csv => run.write_csv(
                    &["k", "f_k", "log_mgf_partial"],
                    rows.iter().map(|(k, f, p)| vec![k.to_string(), f.to_string(), p.to_string()]),
                ),
            }
        }
        Table::Gbar => {
            let t = gbar_tables(&run.model, run.cfg.n.unwrap_or(1000))?;
            match run.format() {
                Format::Json => run.write_json(&serde_json::to_value(&t).map_err(Error::from)?),
                Format::Csv => run.write_csv(
                    &["k", "g1", "g2"],
                    t.g1.iter().zip(&t.g2).enumerate().map(|(k, (a, b))| vec![(k + 1).to_string(), a.to_string(), b.to_string()]),
                ),
            }
        }
        Table::Mdp => {
            let horizons = run.cfg.horizons.clone().unwrap_or_else(|| vec![1000, 10_000, 100_000]);
            let sched = MdpSchedule::new(run.cfg.beta.unwrap_or(0.75), horizons)?;
            let pts = mdp_mgf_curve(&run.model, theta, &sched)?;
            match run.format() {
                Format::Json => run.write_json(&json!({
                    "theta": theta,
                    "beta": sched.beta,
                    "points": pts.iter().map(|p| json!({"n": p.n, "value": json_real(p.value), "limit": p.limit})).collect::<Vec<_>>(),
                })),
                Format::Csv => run.write_csv(
                    &["n", "value", "limit"],
                    pts.iter().map(|p| vec![p.n.to_string(), p.value.to_string(), p.limit.to_string()]),
                ),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, handler): (Common, fn(Run) -> Outcome<()>) = match cli.command {
        Command::Theory(c) => (c, cmd_theory),
        Command::Simulate(c) => (c, cmd_simulate),
        Command::Validate(c) => (c, cmd_validate),
        Command::Recursion(c) => (c, cmd_recursion),
    };
    match Run::load(common).and_then(handler) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(EXIT_VALIDATION),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
