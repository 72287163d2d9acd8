mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(
    name = "wiretap-ldpc",
    version,
    about = "Secret key agreement over the BPSK Gaussian wiretap channel"
)]
struct Cli {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relaxed secret-key capacities over an SNR grid.
    Capacity {
        #[arg(long, allow_hyphen_values = true)]
        snr_db_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        snr_db_max: Option<f64>,
        #[arg(long)]
        snr_db_step: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        alpha_db: Option<f64>,
        /// Leakage rates, comma separated.
        #[arg(long, value_delimiter = ',')]
        r_l: Option<Vec<f64>>,
    },
    /// Build (or load) a code and write it as a bundle and alist.
    Code {
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Monte Carlo error rates at one operating point.
    Simulate {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        code: CodeArgs,
        /// Key length.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Achievable (R_k, R_l) trajectory over key lengths and beta_tilde.
    Sweep {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        refine_trials: Option<u64>,
        #[arg(long)]
        eps_cap: Option<f64>,
    },
    /// Degree-distribution design by density evolution and linear programming.
    Design {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Initial degree distribution (JSON).
        #[arg(long)]
        initial: Option<PathBuf>,
        #[arg(long)]
        r_k: Option<f64>,
        #[arg(long)]
        max_rounds: Option<usize>,
    },
    /// Ensemble bounds on leakage and ML error probability.
    Bounds {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        dv: Option<u32>,
        #[arg(long)]
        dc: Option<u32>,
        #[arg(long)]
        r_c: Option<f64>,
        #[arg(long)]
        r_k: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u64>>,
        /// Choose degrees by the asymptotic parameter selection.
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

#[derive(Args)]
struct ChannelArgs {
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_db: Option<f64>,
    #[arg(long)]
    beta_tilde: Option<f64>,
}

#[derive(Args)]
struct CodeArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dv: Option<usize>,
    #[arg(long)]
    dc: Option<usize>,
    /// Irregular degree distribution (JSON).
    #[arg(long)]
    distribution: Option<PathBuf>,
    /// Load a code bundle instead of sampling.
    #[arg(long)]
    load: Option<PathBuf>,
}

impl ChannelArgs {
    fn apply(self, cfg: &mut ExperimentConfig) {
        let c = &mut cfg.channel;
        set(&mut c.snr_db, self.snr_db);
        set(&mut c.alpha_db, self.alpha_db);
        if self.beta_tilde.is_some() {
            c.beta_tilde = self.beta_tilde;
        }
    }
}

impl CodeArgs {
    fn apply(self, cfg: &mut ExperimentConfig) {
        let c = &mut cfg.code;
        set(&mut c.n, self.n);
        set(&mut c.dv, self.dv);
        set(&mut c.dc, self.dc);
        if self.distribution.is_some() {
            c.distribution = self.distribution;
        }
        if let Some(p) = self.load {
            c.source = config::CodeSource::Load;
            c.path = Some(p);
        }
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    set(&mut cfg.seed, cli.seed);
    set(&mut cfg.out, cli.out);
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    match cli.command {
        Command::Capacity {
            snr_db_min,
            snr_db_max,
            snr_db_step,
            alpha_db,
            r_l,
        } => {
            set(&mut cfg.capacity.snr_db_min, snr_db_min);
            set(&mut cfg.capacity.snr_db_max, snr_db_max);
            set(&mut cfg.capacity.snr_db_step, snr_db_step);
            set(&mut cfg.channel.alpha_db, alpha_db);
            set(&mut cfg.capacity.r_l, r_l);
            start(&cfg)?;
            commands::cmd_capacity(&cfg)
        }
        Command::Code { code } => {
            code.apply(&mut cfg);
            start(&cfg)?;
            commands::cmd_code(&cfg)
        }
        Command::Simulate {
            channel,
            code,
            k,
            trials,
            max_iter,
        } => {
            channel.apply(&mut cfg);
            code.apply(&mut cfg);
            set(&mut cfg.simulate.k, k);
            set(&mut cfg.simulate.trials, trials);
            set(&mut cfg.simulate.max_iter, max_iter);
            start(&cfg)?;
            commands::cmd_simulate(&cfg)
        }
        Command::Sweep {
            channel,
            code,
            k,
            trials,
            refine_trials,
            eps_cap,
        } => {
            channel.apply(&mut cfg);
            code.apply(&mut cfg);
            set(&mut cfg.sweep.k, k);
            set(&mut cfg.sweep.trials, trials);
            set(&mut cfg.sweep.refine_trials, refine_trials);
            set(&mut cfg.sweep.eps_cap, eps_cap);
            start(&cfg)?;
            commands::cmd_sweep(&cfg)
        }
        Command::Design {
            channel,
            initial,
            r_k,
            max_rounds,
        } => {
            channel.apply(&mut cfg);
            if initial.is_some() {
                cfg.design.initial = initial;
            }
            set(&mut cfg.design.r_k, r_k);
            set(&mut cfg.design.max_rounds, max_rounds);
            start(&cfg)?;
            commands::cmd_design(&cfg)
        }
        Command::Bounds {
            channel,
            dv,
            dc,
            r_c,
            r_k,
            n,
            epsilon,
        } => {
            channel.apply(&mut cfg);
            set(&mut cfg.bounds.dv, dv);
            set(&mut cfg.bounds.dc, dc);
            if r_c.is_some() {
                cfg.bounds.r_c = r_c;
            }
            set(&mut cfg.bounds.r_k, r_k);
            set(&mut cfg.bounds.n, n);
            if epsilon.is_some() {
                cfg.bounds.epsilon = epsilon;
            }
            start(&cfg)?;
            commands::cmd_bounds(&cfg)
        }
    }
}

fn start(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    if let Some(t) = cfg.threads {
        wiretap_ldpc::exec::configure_threads(t);
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
