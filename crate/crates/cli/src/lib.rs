//! Command-line front end: `termtpl <file|-> -s '<strategy>' [--timeout <sec>] [--recheck]`.
//!
//! Prints `YES` or `MAYBE`, a blank line and the proof (or the reason), and
//! exits with 0, 1 or 2 for YES, MAYBE and errors respectively.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{Context, bail};
use clap::Parser;
use termtpl_core::strategy::recheck;
use termtpl_core::{Outcome, parse_strategy, parse_trs, prove, render};

pub const EXIT_YES: i32 = 0;
pub const EXIT_MAYBE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "termtpl",
    version,
    about = "Termination proofs with template-restricted parameter search"
)]
struct Args {
    /// Problem file in TPDB format, or `-` for standard input.
    problem: PathBuf,
    /// Strategy, e.g. `kbo -prec "+ > s > 0" -w0 1`.
    #[arg(short = 's', long = "strategy", allow_hyphen_values = true)]
    strategy: String,
    /// Give up after this many seconds (MAYBE with reason Timeout).
    #[arg(long, value_parser = parse_seconds)]
    timeout: Option<Duration>,
    /// Re-derive every YES from a template that fixes the printed parameters.
    #[arg(long)]
    recheck: bool,
}

fn parse_seconds(s: &str) -> Result<Duration, String> {
    let secs: f64 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a number of seconds"))?;
    Duration::try_from_secs_f64(secs).map_err(|e| e.to_string())
}

fn execute(args: &Args, stdin: &mut dyn Read) -> anyhow::Result<(String, Outcome)> {
    let text = if args.problem.as_os_str() == "-" {
        let mut buf = String::new();
        stdin
            .read_to_string(&mut buf)
            .context("reading problem from standard input")?;
        buf
    } else {
        std::fs::read_to_string(&args.problem)
            .with_context(|| format!("reading {}", args.problem.display()))?
    };
    let trs = parse_trs(&text).context("parsing problem")?;
    let strategy = parse_strategy(&args.strategy)?;
    let (mut cfg, tmpl) = strategy.compile(&trs)?;
    cfg.time_limit = args.timeout;
    let outcome = prove(&trs, strategy.method, &cfg, tmpl.as_ref())?;
    if args.recheck
        && let Outcome::Yes(cert) = &outcome
        && !recheck(&trs, cert).context("recheck")?
    {
        bail!("recheck failed: the fixing template does not reproduce the proof");
    }
    Ok((render(&trs, strategy.method, &outcome), outcome))
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(
    argv: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_YES };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&args, stdin) {
        Ok((text, outcome)) => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return EXIT_ERROR;
            }
            match outcome {
                Outcome::Yes(_) => EXIT_YES,
                Outcome::Maybe(_) => EXIT_MAYBE,
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_ERROR
        }
    }
}
