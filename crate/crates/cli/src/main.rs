mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use config::RunConfig;
use error::CliError;
use output::Output;

/// Experiments on orthogonal complements of sums of three squares, class group
/// twists of CM periods, and the exact certificates behind them.
#[derive(Parser)]
#[command(name = "orthlab", version)]
struct Cli {
    /// File of `key = value` lines, `#` starts a comment.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one key; repeatable and applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(
        long,
        global = true,
        env = "ORTHLAB_OUT",
        default_value = "orthlab-out"
    )]
    out: PathBuf,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Do not echo outputs to stdout.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Orbits of the representations of d by a ternary form (CSV).
    Represent,
    /// Orthogonal complement classes of every orbit (JSON).
    Orth {
        /// Check d = 770 for the sum of three squares against the golden table;
        /// the same as `--set gauss770=true`.
        #[arg(long)]
        gauss770: bool,
    },
    /// Class group of -D (JSON).
    Classgroup,
    /// Joint Weyl sums for one d, or their dyadic trend (CSV and JSON).
    Weyl,
    /// Twisted Eisenstein moments over discriminants (CSV and JSON).
    Moment,
    /// Mollifier schedule or the exact mollifier identity (JSON).
    Mollify,
    /// Split-prime ratio and smooth character sums (JSON).
    Charsum,
    /// Exact polynomial certificates (JSON); exits 1 on any failure.
    Polycert,
    /// Hecke relations and eigenvalues of an eta-product source (CSV and JSON).
    Hecke,
    /// Eigenvalue densities, harmonic sums, pigeonhole chain or off-speed moments (JSON).
    Report,
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Represent => "represent",
            Cmd::Orth { .. } => "orth",
            Cmd::Classgroup => "classgroup",
            Cmd::Weyl => "weyl",
            Cmd::Moment => "moment",
            Cmd::Mollify => "mollify",
            Cmd::Charsum => "charsum",
            Cmd::Polycert => "polycert",
            Cmd::Hecke => "hecke",
            Cmd::Report => "report",
        }
    }
}

fn key_help(name: &str) -> String {
    let keys = commands::keys_for(name);
    if keys.is_empty() {
        return "Keys: none".into();
    }
    let mut s = String::from("Keys (set with --set or --config):\n");
    for k in keys {
        s.push_str(&format!(
            "  {:<10} {} [default: {}]\n",
            k.name, k.help, k.default
        ));
    }
    s
}

fn command() -> clap::Command {
    let mut cmd = Cli::command();
    let names: Vec<String> = cmd
        .get_subcommands()
        .map(|s| s.get_name().to_string())
        .collect();
    for n in names {
        let help = key_help(&n);
        cmd = cmd.mut_subcommand(n, |s| s.after_help(help));
    }
    cmd
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
    }
    let name = cli.cmd.name();
    let mut overrides = cli.set.clone();
    if let Cmd::Orth { gauss770: true } = cli.cmd {
        overrides.push("gauss770=true".into());
    }
    let cfg = RunConfig::resolve(
        name,
        commands::keys_for(name),
        cli.config.as_deref(),
        &overrides,
    )?;
    let mut out = Output::new(cli.out, cfg, cli.quiet)?;
    let result = match cli.cmd {
        Cmd::Represent => commands::represent_cmd(&mut out),
        Cmd::Orth { .. } => commands::orth_cmd(&mut out),
        Cmd::Classgroup => commands::classgroup_cmd(&mut out),
        Cmd::Weyl => commands::weyl_cmd(&mut out),
        Cmd::Moment => commands::moment_cmd(&mut out),
        Cmd::Mollify => commands::mollify_cmd(&mut out),
        Cmd::Charsum => commands::charsum_cmd(&mut out),
        Cmd::Polycert => commands::polycert_cmd(&mut out),
        Cmd::Hecke => commands::hecke_cmd(&mut out),
        Cmd::Report => commands::report_cmd(&mut out),
    };
    // certificate failures still leave their report and manifest behind
    match result {
        Ok(()) => out.finish(),
        Err(e @ CliError::Failed(_)) => {
            out.finish()?;
            Err(e)
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let matches = match command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("orthlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
