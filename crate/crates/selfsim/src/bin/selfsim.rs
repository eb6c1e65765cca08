//! Command-line surface: graph generation, solving, certificate
//! verification, the scaling benchmark, the union-bound evaluator, and the
//! exact oracle.
//!
//! Exit codes: 0 ok, 2 parse error, 3 verification failure, 4 cap/refusal,
//! 5 I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use selfsim::driver::{drive, union_bound_log, DriveMode};
use selfsim::gen::gnp;
use selfsim::graph::{verify_certificate, Graph};
use selfsim::greedy::GreedyConfig;
use selfsim::io::{parse_edge_list, write_edge_list, CertificateJson};
use selfsim::oracle::{iso_exact, OracleError, DEFAULT_ORACLE_CAP};
use selfsim::prng::PRNG_ID;

#[derive(Parser)]
#[command(name = "selfsim", about = "Certified lower bounds on graph self-similarity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Follow the theoretical branch logic exactly.
    Theory,
    /// Additionally evaluate every bound at every step; keep the maximum.
    Best,
}

impl Mode {
    fn to_drive(self) -> DriveMode {
        match self {
            Mode::Theory => DriveMode::Theory,
            Mode::Best => DriveMode::BestOfAll,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PRule {
    /// p = sqrt(ln n / n).
    SqrtLognOverN,
    /// Fixed p from --p.
    Fixed,
    /// p = c / n with c from --c.
    COverN,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded G(n, p) edge-list file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lower-bound ISO(G) for a graph file; write the certificate as JSON.
    Solve {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "best")]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[arg(long, default_value_t = 0.04)]
        alpha: f64,
        #[arg(long)]
        out_cert: PathBuf,
    },
    /// Verify a certificate JSON against a graph file.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Random-graph scaling benchmark; one CSV row per (n, seed).
    Bench {
        /// Comma-separated list of vertex counts.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, value_enum, default_value = "sqrt-logn-over-n")]
        p_rule: PRule,
        /// Edge probability for --p-rule fixed.
        #[arg(long)]
        p: Option<f64>,
        /// Numerator for --p-rule c-over-n.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seeds_per_point: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "best")]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[arg(long, default_value_t = 0.04)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the union-bound logs for (n, p, t).
    Bound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        t: u64,
    },
    /// Exact ISO(G) for a small graph file.
    Oracle {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: usize,
        #[arg(long)]
        out_cert: Option<PathBuf>,
    },
}

enum CliError {
    Parse(String),
    Verify(String),
    Cap(String),
    Io(String),
}

impl CliError {
    fn exit(&self) -> ExitCode {
        let (code, label, msg) = match self {
            CliError::Parse(m) => (2, "parse error", m),
            CliError::Verify(m) => (3, "verification failure", m),
            CliError::Cap(m) => (4, "refused", m),
            CliError::Io(m) => (5, "i/o error", m),
        };
        eprintln!("selfsim: {label}: {msg}");
        ExitCode::from(code)
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let text = read_file(path)?;
    parse_edge_list(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn greedy_config(seed: u64, restarts: usize, alpha: f64) -> Result<GreedyConfig, CliError> {
    let cfg = GreedyConfig { seed, restarts, alpha, ..Default::default() };
    cfg.validate().map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(cfg)
}

fn cert_json(path: &Path) -> Result<CertificateJson, CliError> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { n, p, seed, out } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Parse(format!("p = {p} outside [0, 1]")));
            }
            let g = gnp(n, p, seed);
            let comment = format!("selfsim gen n={n} p={p} seed={seed} prng={PRNG_ID}");
            write_file(&out, &write_edge_list(&g, &[comment]))?;
            println!("wrote n={n} m={} to {}", g.edge_count(), out.display());
            Ok(())
        }
        Command::Solve { input, mode, seed, restarts, alpha, out_cert } => {
            let g = load_graph(&input)?;
            let cfg = greedy_config(seed, restarts, alpha)?;
            let start = Instant::now();
            let report = drive(&g, &cfg, mode.to_drive());
            let runtime_ms = start.elapsed().as_millis() as u64;
            for w in &report.warnings {
                eprintln!("selfsim: warning: {w}");
            }
            verify_certificate(&g, &report.best)
                .map_err(|v| CliError::Verify(format!("internal: produced certificate invalid: {v}")))?;
            let js = CertificateJson::from_certificate(&report.best, g.vertex_count(), runtime_ms);
            let body = serde_json::to_string_pretty(&js)
                .map_err(|e| CliError::Io(e.to_string()))?;
            write_file(&out_cert, &body)?;
            println!(
                "n={} m={} s={} method={} runtime_ms={runtime_ms}",
                g.vertex_count(),
                g.edge_count(),
                report.best.s,
                report.best.method
            );
            Ok(())
        }
        Command::Verify { graph, cert } => {
            let g = load_graph(&graph)?;
            let js = cert_json(&cert)?;
            let c = js.to_certificate().map_err(|e| CliError::Parse(e.to_string()))?;
            verify_certificate(&g, &c).map_err(|v| CliError::Verify(v.to_string()))?;
            println!("certificate verifies: s = {}", c.s);
            Ok(())
        }
        Command::Bench {
            n_list,
            p_rule,
            p,
            c,
            seeds_per_point,
            seed,
            mode,
            restarts,
            alpha,
            out,
        } => {
            let p_of = |n: usize| -> Result<f64, CliError> {
                let nf = n as f64;
                let val = match p_rule {
                    PRule::SqrtLognOverN => (nf.ln() / nf).sqrt(),
                    PRule::Fixed => p.ok_or_else(|| {
                        CliError::Parse("--p required with --p-rule fixed".into())
                    })?,
                    PRule::COverN => {
                        c.ok_or_else(|| {
                            CliError::Parse("--c required with --p-rule c-over-n".into())
                        })? / nf
                    }
                };
                if !(0.0..=1.0).contains(&val) {
                    return Err(CliError::Parse(format!("derived p = {val} outside [0, 1]")));
                }
                Ok(val)
            };
            let mut points = Vec::new();
            for &n in &n_list {
                let pv = p_of(n)?;
                for s in 0..seeds_per_point {
                    points.push((n, pv, seed + s));
                }
            }
            // Workers are independent; rayon's indexed collect keeps rows in
            // input order.
            let rows: Vec<Result<String, CliError>> = points
                .par_iter()
                .map(|&(n, pv, sd)| {
                    let g = gnp(n, pv, sd);
                    let cfg = greedy_config(sd, restarts, alpha)?;
                    let start = Instant::now();
                    let report = drive(&g, &cfg, mode.to_drive());
                    let runtime_ms = start.elapsed().as_millis() as u64;
                    verify_certificate(&g, &report.best).map_err(|v| {
                        CliError::Verify(format!("internal: bench certificate invalid: {v}"))
                    })?;
                    let nf = n as f64;
                    let normalized = report.best.s as f64 / (nf * nf.ln());
                    Ok(format!(
                        "{n},{pv},{sd},{m},{method},{s},{normalized},{runtime_ms}",
                        m = g.edge_count(),
                        method = report.best.method,
                        s = report.best.s,
                    ))
                })
                .collect();
            let mut csv = String::from("n,p,seed,m,method,s_found,normalized,runtime_ms\n");
            for row in rows {
                csv.push_str(&row?);
                csv.push('\n');
            }
            write_file(&out, &csv)?;
            println!("wrote {} rows to {}", points.len(), out.display());
            Ok(())
        }
        Command::Bound { n, p, t } => {
            let (exact, simplified) =
                union_bound_log(n, p, t).map_err(|e| CliError::Parse(e.to_string()))?;
            println!("exact_log = {exact:.6}");
            println!("simplified_log = {simplified:.6}");
            Ok(())
        }
        Command::Oracle { input, oracle_cap, out_cert } => {
            let g = load_graph(&input)?;
            let (value, cert) = iso_exact(&g, oracle_cap).map_err(|e| match e {
                OracleError::CapExceeded { .. } => CliError::Cap(e.to_string()),
                other => CliError::Parse(other.to_string()),
            })?;
            verify_certificate(&g, &cert)
                .map_err(|v| CliError::Verify(format!("internal: oracle certificate invalid: {v}")))?;
            if let Some(path) = out_cert {
                let js = CertificateJson::from_certificate(&cert, g.vertex_count(), 0);
                let body = serde_json::to_string_pretty(&js)
                    .map_err(|e| CliError::Io(e.to_string()))?;
                write_file(&path, &body)?;
            }
            println!("iso_exact = {value}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.exit(),
    }
}
