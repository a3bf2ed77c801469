use std::path::PathBuf;
use std::process::ExitCode;

use bt_torsion::report::{run, ConfigOverrides, OutputFormat, RunConfig, Suite};
use bt_torsion::Error;
use clap::Parser;

/// Run a verification suite and write its report as CSV or JSON.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on
/// usage or configuration errors.
#[derive(Debug, Parser)]
#[command(name = "bt-torsion", version)]
struct Cli {
    suite: Suite,
    /// Tensor powers, strictly increasing (e.g. 8,16,32,64).
    #[arg(long = "p", value_delimiter = ',')]
    p_list: Option<Vec<usize>>,
    /// Toeplitz symbol: 1, u, z, u2, x, y, equatorial, or <c>+u (e.g. 2+u).
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long)]
    a_max: Option<u32>,
    /// Sphere grid order for the nondegeneracy scan.
    #[arg(long)]
    grid_order: Option<usize>,
    /// Largest dimension for the Clifford word checks (1..=3).
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long)]
    chains: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sphere_order: Option<usize>,
    #[arg(long)]
    n_phi: Option<usize>,
    #[arg(long)]
    t_nodes: Option<usize>,
    /// Tolerance override NAME=VALUE; repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    tolerances: Vec<(String, f64)>,
    /// JSON file with the same settings; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Add a timestamp to JSON output.
    #[arg(long)]
    timestamp: bool,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let v: f64 = v.parse().map_err(|e| format!("{v:?}: {e}"))?;
    Ok((k.to_string(), v))
}

impl Cli {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            p_list: self.p_list.clone(),
            symbol: self.symbol.clone(),
            a_max: self.a_max,
            grid_order: self.grid_order,
            m_max: self.m_max,
            chains: self.chains,
            seed: self.seed,
            sphere_order: self.sphere_order,
            n_phi: self.n_phi,
            t_nodes: self.t_nodes,
            tolerances: self.tolerances.iter().cloned().collect(),
            output: self.output.clone(),
            format: self.format,
            timestamp: self.timestamp.then_some(true),
        }
    }
}

fn config(cli: &Cli) -> bt_torsion::Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => ConfigOverrides::from_json(&std::fs::read_to_string(path)?)?,
        None => ConfigOverrides::default(),
    };
    RunConfig::new(cli.suite, cli.overrides().over(file))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e @ (Error::InvalidArgument(_) | Error::Config(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let text = match report.render(cfg.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        for r in report.failures() {
            eprintln!("FAIL {} {}: measured {} expected {} tol {}", r.suite, r.params, r.measured, r.expected, r.tol);
        }
        ExitCode::from(1)
    }
}
