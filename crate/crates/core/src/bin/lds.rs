//! `lds` command-line harness.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use lds_core::bench::{
    parse_algorithms, parse_kv, read_csv, run_sweep, summarize, ExperimentConfig, SweepParam,
    SweepSpec,
};
use lds_core::sim::{run_trial_observed, Scheduler};
use lds_core::topology::{build_topology, deploy_connected};
use lds_core::Error;

#[derive(Parser)]
#[command(name = "lds", about = "Lifetime-maximizing data-gathering schedules for sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one trial and print its result as JSON.
    Run {
        #[command(flatten)]
        common: Common,
        /// Write per-round CSV rows (round,node,drained_j,residual_j) here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a paired sweep and write long-format CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary: `n` or `range`.
        #[arg(long, default_value = "n")]
        vary: String,
        /// Comma-separated values; defaults to 40..200 step 20 for n and
        /// 40..100 step 10 for range.
        #[arg(long)]
        values: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a sweep CSV.
    Stats { csv: PathBuf },
    /// Print a connected deployment as JSON.
    Topo {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Flat key=value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Maximum transmission range.
    #[arg(long)]
    range: Option<f64>,
    /// lds, wrt, mst, spt (comma-separated or `all` for sweeps).
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(r) = self.range {
            cfg.r_max = r;
        }
        if let Some(a) = &self.algo {
            cfg.algorithms = parse_algorithms(a)?;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Config(_)) {
                eprintln!("{}", Cli::command().render_usage());
            }
            match e {
                Error::Disconnected { .. } | Error::ConnectivityFailure { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run { common, trace } => {
            let cfg = common.resolve()?;
            cfg.validate()?;
            let [algo] = cfg.algorithms[..] else {
                return Err(Error::Config("run takes exactly one --algo".into()));
            };
            let dep = deploy_connected(cfg.n, cfg.region, cfg.bs, cfg.seed, cfg.r_max, cfg.max_attempts)?;
            let topology = build_topology(&dep, cfg.r_max);
            let sim = cfg.sim_config(algo);
            let result = match trace {
                Some(path) => {
                    let mut w = BufWriter::new(File::create(path)?);
                    writeln!(w, "round,node,drained_j,residual_j")?;
                    let mut io_err = None;
                    let result = run_trial_observed(&topology, &sim, |report, ledger| {
                        for (node, &c) in report.charged.iter().enumerate() {
                            if let Err(e) =
                                writeln!(w, "{},{},{},{}", report.round, node, c, ledger.residual(node))
                            {
                                io_err.get_or_insert(e);
                            }
                        }
                    })?;
                    if let Some(e) = io_err {
                        return Err(e.into());
                    }
                    w.flush()?;
                    result
                }
                None => run_trial_observed(&topology, &sim, |_, _| {})?,
            };
            println!("{}", result.to_json()?);
        }
        Command::Sweep {
            common,
            vary,
            values,
            trials,
            out,
        } => {
            let vary: SweepParam = vary.parse()?;
            let mut base = common.resolve()?;
            if common.algo.is_none() && !config_sets_algo(&common)? {
                base.algorithms = Scheduler::ALL.to_vec();
            }
            if let Some(t) = trials {
                base.trials = t;
            }
            let defaults = match vary {
                SweepParam::N => SweepSpec::vary_n_default().values,
                SweepParam::RMax => SweepSpec::vary_range_default().values,
            };
            let values = match values {
                Some(v) => parse_values(&v)?,
                None => defaults,
            };
            let spec = SweepSpec { vary, values, base };
            let output = run_sweep(&spec)?;
            output.write_csv(BufWriter::new(File::create(&out)?))?;
            eprintln!(
                "wrote {} rows to {} ({} seeds skipped)",
                output.rows.len(),
                out.display(),
                output.skipped.len()
            );
        }
        Command::Stats { csv } => {
            let rows = read_csv(File::open(csv)?)?;
            print!("{}", summarize(&rows).render());
        }
        Command::Topo { common, out } => {
            let cfg = common.resolve()?;
            cfg.validate()?;
            let dep = deploy_connected(cfg.n, cfg.region, cfg.bs, cfg.seed, cfg.r_max, cfg.max_attempts)?;
            let json = dep.to_json()?;
            match out {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => {
                    let mut stdout = io::stdout().lock();
                    writeln!(stdout, "{json}")?;
                }
            }
        }
    }
    Ok(())
}

fn config_sets_algo(common: &Common) -> Result<bool, Error> {
    match &common.config {
        Some(path) => Ok(parse_kv(&std::fs::read_to_string(path)?)?.contains_key("algo")),
        None => Ok(false),
    }
}

fn parse_values(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad sweep value `{p}`")))
        })
        .collect()
}
