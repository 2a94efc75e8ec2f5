//! Command-line front end: `series`, `thermal-map`, `oracle-check`,
//! `relation` and `preset boson-mode`.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 config error,
//! 3 resource cap (truncation or quadrature budget exhausted).

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;
pub use commands::SeriesOptions;
pub use config::{ConfigError, Overrides, RunConfig};
pub use report::{RunReport, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(
                Error::DimensionCap { .. } | Error::QuadratureNonConvergence { .. } | Error::ThermalNonConvergence { .. },
            ) => EXIT_RESOURCE,
            _ => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dephasim",
    version,
    about = "Pure-dephasing decoherence factors for N-level systems in boson baths",
    long_about = "Pure-dephasing decoherence factors for N-level systems in boson baths.\n\n\
        All quantities use natural units hbar = k_B = 1: temperatures are energies, so the\n\
        low-temperature exponent gamma t^2 k_B^2 T^2 / hbar^2 is written gamma t^2 T^2.\n\n\
        Set DEPHASIM_THREADS to cap the worker count."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides run.output).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Level pairs as a flat list n,m[,n,m...].
    #[arg(long, global = true, value_delimiter = ',')]
    pub pairs: Option<Vec<usize>>,
    /// Relative tolerance for spectral quadrature.
    #[arg(long, global = true)]
    pub quad_tol: Option<f64>,
    /// Fock dimension per bath mode for the oracle.
    #[arg(long, global = true)]
    pub trunc_dim: Option<usize>,
    /// Also evaluate Ohmic integrals by quadrature and report the largest relative gap.
    #[arg(long, global = true)]
    pub verify_quadrature: bool,
    /// Write |excitation|, |total| and |gaussian| instead of signed values.
    #[arg(long, global = true)]
    pub magnitude_only: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decoherence factor, its parts and the phase over a time grid.
    Series,
    /// Thermal decoherence factor on a (T, t) grid.
    ThermalMap,
    /// Compare analytic results with the truncated-Fock oracle
    /// (built-in benchmark suite when no --config is given).
    OracleCheck,
    /// Bath-excitation fluctuation against the vacuum factor.
    Relation,
    /// Emit a ready-made config.
    #[command(subcommand)]
    Preset(Preset),
}

#[derive(Debug, Subcommand)]
pub enum Preset {
    /// Single boson mode with levels n*omega0 and couplings g_n = n.
    BosonMode {
        #[arg(long, default_value_t = 1.0)]
        omega0: f64,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        cutoff: f64,
    },
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            output: self.output.clone(),
            pairs: self.pairs.clone(),
            quad_tol: self.quad_tol,
            trunc_dim: self.trunc_dim,
        }
    }

    fn load(&self) -> Result<RunConfig, CliError> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| ConfigError::new("--config", "this subcommand needs a config file"))?;
        Ok(config::load_config(path, &self.overrides())?)
    }
}

/// Run a parsed command line; the report is also written as `report.json`.
pub fn run(cli: &Cli) -> Result<RunReport, CliError> {
    let (mut report, dir) = match &cli.command {
        Command::Series => {
            let cfg = cli.load()?;
            let opts = SeriesOptions { magnitude_only: cli.magnitude_only, verify_quadrature: cli.verify_quadrature };
            (commands::cmd_series(&cfg, opts)?, cfg.output)
        }
        Command::ThermalMap => {
            let cfg = cli.load()?;
            (commands::cmd_thermal_map(&cfg)?, cfg.output)
        }
        Command::Relation => {
            let cfg = cli.load()?;
            (commands::cmd_relation(&cfg)?, cfg.output)
        }
        Command::OracleCheck => {
            if cli.config.is_some() {
                let cfg = cli.load()?;
                let cases = vec![("config".to_string(), cfg.model.clone())];
                let report = commands::cmd_oracle_check(&cases, &cfg.times, cfg.truncation.as_deref(), &cfg.quad)?;
                (report, cfg.output)
            } else {
                let dims = cli.trunc_dim.map(|d| vec![d]);
                let report = commands::cmd_oracle_check(
                    &crate::benchmarks::oracle_suite(),
                    &commands::default_oracle_times(),
                    dims.as_deref(),
                    &crate::kernels::QuadratureSpec::default(),
                )?;
                (report, cli.output.clone().unwrap_or_else(|| PathBuf::from("out")))
            }
        }
        Command::Preset(Preset::BosonMode { omega0, n_max, gamma, cutoff }) => {
            let text = commands::preset_boson_mode_config(*omega0, *n_max, *gamma, *cutoff)?;
            return commands::write_preset(cli.output.as_deref(), &text);
        }
    };
    report.write(&dir)?;
    Ok(report)
}

fn init_threads() {
    if let Ok(value) = std::env::var("DEPHASIM_THREADS") {
        match value.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size thread pool: {e}");
                }
            }
            _ => log::warn!("ignoring DEPHASIM_THREADS={value:?}"),
        }
    }
}

/// Process entry point; returns the exit code.
pub fn main_entry() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    init_threads();
    match run(&cli) {
        Ok(report) => {
            for v in &report.verdicts {
                println!("{}", v.line());
            }
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from(["dephasim", "series", "--config", "c.json", "--pairs", "1,0,2,0", "--magnitude-only"]).unwrap();
        assert!(matches!(cli.command, Command::Series));
        assert_eq!(cli.pairs, Some(vec![1, 0, 2, 0]));
        assert!(cli.magnitude_only);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(Error::DimensionCap { dim: 1, cap: 0 }).exit_code(), EXIT_RESOURCE);
        assert_eq!(CliError::from(Error::ZeroPopulationVariance).exit_code(), EXIT_CONFIG);
        assert_eq!(CliError::from(ConfigError::new("a", "b")).exit_code(), EXIT_CONFIG);
    }
}
