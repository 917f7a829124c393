//! `qecbound` command-line front end.
//!
//! Every command takes its parameters from flags, from a JSON object given
//! with `--config` whose keys are the flag names without dashes (`N-min`,
//! `q-list`, `o`), or both. Flags win.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use qecbound::capacity::{rate_grid, NoiseSpec};
use qecbound::dataset::ScenarioDataset;
use qecbound::entropy::{hmax_cond, SolverConfig};
use qecbound::quantum::{choi_from_channel, tensor_channel};
use qecbound::scenarios::{
    baseline_dataset, chaos_error_curve, rqc_noisy_sweep, rqc_region_dataset, uniform_t_grid, BaselineCase, ChaosConfig,
};
use qecbound::verify::{self, Suite, VerifyOptions};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNCONVERGED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qecbound", version, about = "One-shot error bounds for hybrid classical and quantum error correction")]
struct Cli {
    /// JSON run configuration; keys mirror the flag names.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conditional max-entropy of a channel's Choi state.
    Hmax(HmaxArgs),
    /// Error bound over a grid of rate pairs.
    Region(RegionArgs),
    /// Storage vs. noiseless vs. noisy random-circuit encoders over a range of N.
    NoisySweep(NoisySweepArgs),
    /// Error bound of a qubit chain coupled to a thermal bath, against time.
    Chaos(ChaosArgs),
    /// Error of storing without any encoding.
    Baseline(BaselineArgs),
    /// Run the built-in checks.
    Verify(VerifyArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Hmax(_) => "hmax",
            Command::Region(_) => "region",
            Command::NoisySweep(_) => "noisy-sweep",
            Command::Chaos(_) => "chaos",
            Command::Baseline(_) => "baseline",
            Command::Verify(_) => "verify",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "hmax" => Command::Hmax(HmaxArgs::default()),
            "region" => Command::Region(RegionArgs::default()),
            "noisy-sweep" => Command::NoisySweep(NoisySweepArgs::default()),
            "chaos" => Command::Chaos(ChaosArgs::default()),
            "baseline" => Command::Baseline(BaselineArgs::default()),
            "verify" => Command::Verify(VerifyArgs::default()),
            _ => return None,
        })
    }
}

#[derive(Args, Debug, Default)]
struct HmaxArgs {
    /// `dephasing` or `amp_damp`.
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    param: Option<f64>,
    /// Number of qubits the channel acts on, one copy of the noise per qubit.
    #[arg(long)]
    m: Option<u32>,
}

#[derive(Args, Debug, Default)]
struct RegionArgs {
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    param: Option<f64>,
    #[arg(long = "N")]
    n: Option<u32>,
    /// Points along c and q, e.g. `41x41`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(short = 'o', value_name = "CSV")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct NoisySweepArgs {
    /// Dephasing parameter.
    #[arg(long)]
    p: Option<f64>,
    /// Gate fidelity.
    #[arg(long)]
    f: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Comma-separated quantum rates.
    #[arg(long = "q-list")]
    q_list: Option<String>,
    #[arg(long = "N-min")]
    n_min: Option<u32>,
    #[arg(long = "N-max")]
    n_max: Option<u32>,
    #[arg(short = 'o', value_name = "CSV")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct ChaosArgs {
    /// Boltzmann factor of the bath qubit, in [0.5, 1].
    #[arg(long)]
    p: Option<f64>,
    /// Number of qubit pairs.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    samples: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[arg(long = "t-step")]
    t_step: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(short = 'o', value_name = "CSV")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct BaselineArgs {
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    param: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long = "N")]
    n: Option<u32>,
    /// Also compute the error by explicit simulation.
    #[arg(long)]
    bruteforce: bool,
    #[arg(short = 'o', value_name = "CSV")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct VerifyArgs {
    /// Run one suite only.
    #[arg(long)]
    only: Option<String>,
    /// Shift a reference value so the checks must fail.
    #[arg(long, hide = true)]
    perturb_closed_form: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Other(anyhow::Error),
}

impl From<qecbound::Error> for Failure {
    fn from(e: qecbound::Error) -> Self {
        match e {
            qecbound::Error::Argument(_) => Failure::Usage(e.to_string()),
            other => Failure::Other(other.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.into())
    }
}

type Outcome = Result<u8, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Merges flags over the config file and records what was used.
struct Params {
    config: Map<String, Value>,
    used: Map<String, Value>,
}

impl Params {
    fn get<T: DeserializeOwned + Into<Value> + Clone>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, Failure> {
        let v = match flag {
            Some(v) => Some(v),
            None => match self.config.get(key) {
                None | Some(Value::Null) => None,
                Some(raw) => Some(
                    serde_json::from_value(raw.clone())
                        .map_err(|e| usage(format!("config key {:?}: {}", key, e)))?,
                ),
            },
        };
        if let Some(v) = &v {
            self.used.insert(key.to_string(), v.clone().into());
        }
        Ok(v)
    }

    fn require<T: DeserializeOwned + Into<Value> + Clone>(&mut self, key: &str, flag: Option<T>) -> Result<T, Failure> {
        self.get(key, flag)?.ok_or_else(|| usage(format!("missing --{} (flag or config key {:?})", key, key)))
    }

    fn or<T: DeserializeOwned + Into<Value> + Clone>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, Failure> {
        let v = self.get(key, flag)?.unwrap_or(default);
        self.used.insert(key.to_string(), v.clone().into());
        Ok(v)
    }

    fn flag(&mut self, key: &str, flag: bool) -> Result<bool, Failure> {
        let v = flag || self.get::<bool>(key, None)?.unwrap_or(false);
        self.used.insert(key.to_string(), v.into());
        Ok(v)
    }

    fn output(&mut self, flag: Option<PathBuf>) -> Result<PathBuf, Failure> {
        let path = match flag {
            Some(p) => p,
            None => {
                let key = ["o", "output", "output_path"].into_iter().find(|k| self.config.contains_key(*k));
                match key.and_then(|k| self.config[k].as_str()) {
                    Some(s) => PathBuf::from(s),
                    None => return Err(usage("missing -o (flag or config key \"o\")")),
                }
            }
        };
        self.used.insert("o".into(), path.display().to_string().into());
        Ok(path)
    }

    fn noise(&mut self, kind: Option<String>, param: Option<f64>) -> Result<NoiseSpec, Failure> {
        let kind = self.require("noise", kind)?;
        let param = self.require("param", param)?;
        Ok(NoiseSpec::parse(&kind, param)?)
    }

    fn seed(&mut self, flag: Option<u64>) -> Result<u64, Failure> {
        self.or("seed", flag, 0)
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || usage(format!("grid {:?} is not of the form <nc>x<nq>", s));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_list(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("q-list entry {:?} is not a number", t))))
        .collect()
}

fn q_list(params: &mut Params, flag: Option<String>) -> Result<Vec<f64>, Failure> {
    let list = match flag {
        Some(s) => parse_list(&s)?,
        None => match params.config.get("q-list") {
            Some(Value::String(s)) => parse_list(s)?,
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| usage(format!("config key \"q-list\": {}", e)))?,
            None => return Err(usage("missing --q-list (flag or config key \"q-list\")")),
        },
    };
    params.used.insert("q-list".into(), json!(list));
    Ok(list)
}

struct Written {
    dataset: ScenarioDataset,
    output: PathBuf,
    converged: bool,
}

fn write_outputs(command: &str, params: &Params, seed: u64, started: SystemTime, clock: Instant, w: &Written) -> Result<(), Failure> {
    if let Some(dir) = w.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    w.dataset.write_csv(&w.output)?;
    let manifest = json!({
        "command": command,
        "params": params.used,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
        "started_unix": started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
        "wall_clock_seconds": clock.elapsed().as_secs_f64(),
        "output": w.output.display().to_string(),
        "rows": w.dataset.rows.len(),
        "converged": w.converged,
        "dataset": w.dataset.meta,
    });
    let path = manifest_path(&w.output);
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")?;
    Ok(())
}

fn manifest_path(output: &Path) -> PathBuf {
    output.parent().map(|d| d.join("manifest.json")).unwrap_or_else(|| PathBuf::from("manifest.json"))
}

fn meta_converged(ds: &ScenarioDataset) -> bool {
    ds.meta.get("solver_converged").and_then(Value::as_bool).unwrap_or(true)
}

fn run(command: Command, config: Map<String, Value>) -> Outcome {
    let started = SystemTime::now();
    let clock = Instant::now();
    let name = command.name();
    let mut params = Params { config, used: Map::new() };
    let solver = SolverConfig::default();

    let written = match command {
        Command::Hmax(a) => {
            let noise = params.noise(a.noise, a.param)?;
            let m = params.or("m", a.m, 1)?;
            if m == 0 || m > 4 {
                return Err(usage(format!("--m {} outside 1..=4", m)));
            }
            let ch = tensor_channel(&vec![noise.channel()?; m as usize])?;
            let res = hmax_cond(&choi_from_channel(&ch), &["A"], &["B"], &solver)?;
            let out = json!({
                "noise": noise.name(),
                "param": noise.param(),
                "m": m,
                "value": res.value,
                "iterations": res.iterations,
                "converged": res.converged,
                "upper_bound": res.upper_bound,
            });
            println!("{}", out);
            return Ok(if res.converged { 0 } else { EXIT_UNCONVERGED });
        }
        Command::Region(a) => {
            let noise = params.noise(a.noise, a.param)?;
            let n = params.require("N", a.n)?;
            let grid = params.or("grid", a.grid, "41x41".to_string())?;
            let (nc, nq) = parse_grid(&grid)?;
            let output = params.output(a.output)?;
            let dataset = rqc_region_dataset(noise, n, &rate_grid(nc, nq)?, &solver)?;
            Written { converged: meta_converged(&dataset), dataset, output }
        }
        Command::NoisySweep(a) => {
            let p = params.require("p", a.p)?;
            let f = params.require("f", a.f)?;
            let c = params.require("c", a.c)?;
            let qs = q_list(&mut params, a.q_list)?;
            let n_min = params.require("N-min", a.n_min)?;
            let n_max = params.require("N-max", a.n_max)?;
            let output = params.output(a.output)?;
            let dataset = rqc_noisy_sweep(p, f, c, &qs, n_min, n_max, &solver)?;
            Written { converged: meta_converged(&dataset), dataset, output }
        }
        Command::Chaos(a) => {
            let d = ChaosConfig::default();
            let p = params.require("p", a.p)?;
            let n_pairs = params.or("n", a.n, d.n_pairs)?;
            let samples = params.or("samples", a.samples, d.samples)?;
            let seed = params.seed(a.seed)?;
            let t_max = params.or("t-max", a.t_max, 10.0)?;
            let t_step = params.or("t-step", a.t_step, 0.1)?;
            let c = params.or("c", a.c, d.c)?;
            let q = params.or("q", a.q, d.q)?;
            let output = params.output(a.output)?;
            let cfg = ChaosConfig { p, t_grid: uniform_t_grid(t_max, t_step)?, n_pairs, samples, seed, c, q, ..d };
            let run = chaos_error_curve(&cfg)?;
            Written { converged: run.flagged == 0, dataset: run.dataset, output }
        }
        Command::Baseline(a) => {
            let noise = params.noise(a.noise, a.param)?;
            let c = params.require("c", a.c)?;
            let q = params.require("q", a.q)?;
            let n = params.require("N", a.n)?;
            let bruteforce = params.flag("bruteforce", a.bruteforce)?;
            let output = params.output(a.output)?;
            let dataset = baseline_dataset(&[BaselineCase::new(noise, c, q, n)?], bruteforce)?;
            Written { converged: true, dataset, output }
        }
        Command::Verify(a) => {
            let only = match params.get("only", a.only)? {
                Some(s) => Some(s.parse::<Suite>().map_err(usage)?),
                None => None,
            };
            let perturb = params.flag("perturb-closed-form", a.perturb_closed_form)?;
            let outcomes = verify::run(&VerifyOptions { only, perturb_closed_form: perturb }, |o| println!("{}", o));
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} checks, {} failed", outcomes.len(), failed);
            return Ok(if failed == 0 { 0 } else { EXIT_FAILURE });
        }
    };

    let seed = match params.used.get("seed").and_then(Value::as_u64) {
        Some(s) => s,
        None => params.seed(None)?,
    };
    write_outputs(name, &params, seed, started, clock, &written)?;
    if written.converged {
        Ok(0)
    } else {
        eprintln!("warning: solver did not converge; see flagged rows in {}", written.output.display());
        Ok(EXIT_UNCONVERGED)
    }
}

fn load_config(path: &Path) -> Result<Map<String, Value>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {}", path.display(), e)))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(usage(format!("{} must hold a single JSON object", path.display()))),
        Err(e) => Err(usage(format!("{}: {}", path.display(), e))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        let config = match &cli.config {
            Some(p) => load_config(p)?,
            None => Map::new(),
        };
        let command = match cli.command {
            Some(c) => c,
            None => {
                let name = config.get("command").and_then(Value::as_str).unwrap_or_default().to_string();
                Command::from_name(&name).ok_or_else(|| usage(format!("unknown or missing command {:?}", name)))?
            }
        };
        run(command, config)
    })();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}\n", msg);
            eprintln!("{}", Cli::command().render_usage());
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
