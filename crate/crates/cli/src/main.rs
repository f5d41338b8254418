//! `entropic-packet`: entropies, sweeps and oracle checks for power-law
//! wave packets.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 numerical non-convergence.

mod config;
mod format;
mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use entropic_core::{
    make_packet, run_all, total_uncertainty, CrosscheckReport, EntropyError, MomentValue, PacketError, PowerLawPacket,
    QuadratureConfig,
};

use crate::format::sig;
use crate::sweep::{SweepFormat, SweepSpec};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

const DEFAULT_VERIFY_ALPHAS: [f64; 6] = [0.75, 1.0, 1.5, 2.0, 5.0, 10.0];

#[derive(Parser, Debug)]
#[command(name = "entropic-packet", version, about = "Entropic uncertainty relation for power-law wave packets")]
struct Cli {
    #[command(flatten)]
    tolerances: ToleranceArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ToleranceArgs {
    /// Relative quadrature tolerance (overrides the config file).
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Absolute quadrature tolerance (overrides the config file).
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// key = value file with rel_tol, abs_tol, max_levels, max_subdivisions.
    #[arg(long = "config", env = config::CONFIG_ENV, global = true, hide_env_values = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropies, uncertainty gap and second moments for one exponent.
    Compute {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
    /// Tabulate S_x, S_p, U and the gap over an alpha grid.
    ///
    /// The default grid runs from 0.6 to 10 in steps of 0.1 (95 rows).
    Sweep {
        #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
        alpha_min: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        alpha_max: f64,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        step: f64,
        #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
        format: SweepFormat,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare every closed form with its independent oracle.
    Verify {
        /// Exponents to check (repeat or comma-separate); defaults to 0.75,1,1.5,2,5,10.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        alpha: Vec<f64>,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TextOrJson {
    Text,
    Json,
}

/// A failure that carries its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn domain(error: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_DOMAIN, error: error.into() }
    }
}

impl From<EntropyError> for Failure {
    fn from(e: EntropyError) -> Self {
        let code = match e {
            EntropyError::Packet(PacketError::NotNormalizable(_)) => EXIT_DOMAIN,
            _ => EXIT_NUMERIC,
        };
        Self { code, error: e.into() }
    }
}

fn packet(alpha: f64) -> Result<PowerLawPacket, Failure> {
    make_packet(alpha).map_err(Failure::domain)
}

fn moment_text(m: MomentValue) -> String {
    match m {
        MomentValue::Finite(v) => sig(v, 6),
        MomentValue::Divergent => "divergent".to_string(),
    }
}

fn compute(alpha: f64, format: TextOrJson, cfg: &QuadratureConfig) -> Result<String, Failure> {
    let p = packet(alpha)?;
    let report = total_uncertainty(&p, cfg)?;
    let moments = p.variance_report();
    Ok(match format {
        TextOrJson::Json => {
            let value = serde_json::json!({ "entropy": report, "variance": moments });
            serde_json::to_string_pretty(&value).expect("report serializes") + "\n"
        }
        TextOrJson::Text => {
            let mut lines = vec![
                ("alpha", sig(report.alpha, 6)),
                ("S_x", sig(report.s_x, 6)),
                ("S_p", sig(report.s_p, 6)),
                ("U = S_x + S_p", sig(report.u_total, 6)),
                ("bound 1 + ln pi", sig(report.bound, 6)),
                ("gap", sig(report.gap, 6)),
                ("<X^2>", moment_text(moments.position_second_moment)),
                ("<P^2>", sig(moments.momentum_second_moment, 6)),
                ("dX*dP", moment_text(moments.heisenberg_product)),
            ];
            if report.near_edge {
                lines.push(("warning", "alpha is close to 1/2; tolerances relaxed 100x".into()));
            }
            lines.iter().map(|(k, v)| format!("{k:<16} {v}\n")).collect()
        }
    })
}

fn run_sweep(spec: SweepSpec, out: Option<PathBuf>, cfg: &QuadratureConfig) -> Result<String, Failure> {
    spec.validate().map_err(Failure::domain)?;
    let rows = match sweep::run(&spec, cfg) {
        Ok(rows) => rows,
        Err(e) => {
            if let Some(path) = &out {
                // never leave a stale or partial table behind
                let _ = std::fs::remove_file(path);
            }
            return Err(e.into());
        }
    };
    let text = sweep::render(&rows, spec.format);
    match out {
        Some(path) => {
            std::fs::write(&path, &text)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(|error| Failure { code: EXIT_NUMERIC, error })?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn render_report(report: &CrosscheckReport) -> String {
    let mut out = format!("alpha = {}\n", sig(report.alpha, 6));
    for e in &report.entries {
        out.push_str(&format!(
            "  {:<36} ref {:>14}  oracle {:>14}  diff {:>10}  tol {:>10}  {}\n",
            e.name,
            sig(e.reference, 10),
            sig(e.oracle, 10),
            sig(e.abs_diff, 3),
            sig(e.tolerance, 3),
            if e.pass { "PASS" } else { "FAIL" }
        ));
    }
    out.push_str(if report.all_pass { "  all checks passed\n" } else { "  SOME CHECKS FAILED\n" });
    out
}

fn verify(alphas: Vec<f64>, format: TextOrJson, cfg: &QuadratureConfig) -> Result<(String, bool), Failure> {
    let alphas = if alphas.is_empty() { DEFAULT_VERIFY_ALPHAS.to_vec() } else { alphas };
    let packets = alphas.iter().map(|&a| packet(a)).collect::<Result<Vec<_>, _>>()?;
    let reports: Vec<CrosscheckReport> = packets.iter().map(|p| run_all(p, cfg)).collect();
    let all_pass = reports.iter().all(|r| r.all_pass);
    let text = match format {
        TextOrJson::Json => serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n",
        TextOrJson::Text => reports.iter().map(render_report).collect(),
    };
    Ok((text, all_pass))
}

fn dispatch(cli: Cli) -> Result<(String, u8), Failure> {
    let cfg = config::resolve(cli.tolerances.config.as_deref(), cli.tolerances.rel_tol, cli.tolerances.abs_tol)
        .map_err(Failure::domain)?;
    match cli.command {
        Command::Compute { alpha, format } => Ok((compute(alpha, format, &cfg)?, 0)),
        Command::Sweep { alpha_min, alpha_max, step, format, out } => {
            let spec = SweepSpec { alpha_min, alpha_max, step, format };
            Ok((run_sweep(spec, out, &cfg)?, 0))
        }
        Command::Verify { alpha, format } => {
            let (text, pass) = verify(alpha, format, &cfg)?;
            Ok((text, if pass { 0 } else { EXIT_VERIFY_FAILED }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok((text, code)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_NUMERIC);
            }
            ExitCode::from(code)
        }
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
