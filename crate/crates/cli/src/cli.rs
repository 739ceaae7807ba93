use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

/// Every global flag can also be set through the environment variable
/// `GBEAM_<FLAG>` (for example `GBEAM_THREADS=4`); flags win over the
/// environment and both win over the config file.
#[derive(Debug, Clone, Parser)]
#[command(name = "gevrey-beam", version, about = "Beam-equation analyticity experiments")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, env = "GBEAM_CONFIG")]
    pub config: Option<PathBuf>,

    /// Run directory (overrides `output.dir`).
    #[arg(long, global = true, env = "GBEAM_OUT")]
    pub out: Option<PathBuf>,

    /// Base seed (overrides `seeds.base`).
    #[arg(long, global = true, env = "GBEAM_SEED")]
    pub seed: Option<u64>,

    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "GBEAM_THREADS")]
    pub threads: Option<usize>,

    /// Sample count for randomized checks and constant fits; accepts `1e6`.
    #[arg(long, global = true, env = "GBEAM_SAMPLES", value_parser = parse_count)]
    pub samples: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Integrate and write the energy history.
    Simulate,
    /// Follow the estimated analyticity radius and compare with the lower bound.
    TrackRadius,
    /// Lifted-energy drift over one window for each configured sigma.
    SweepSigma,
    /// Randomized checks of the scalar inequalities.
    VerifyLemmas,
    /// Fit the residual constant and tabulate the continuation lower bound.
    FitLowerBound {
        /// Compare against the `radius.csv` of an earlier track-radius run.
        #[arg(long)]
        radius: Option<PathBuf>,
    },
    /// Coefficient moduli of the initial data.
    DumpSpectrum {
        #[arg(long, value_enum, default_value_t = FieldChoice::U0)]
        field: FieldChoice,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::TrackRadius => "track-radius",
            Self::SweepSigma => "sweep-sigma",
            Self::VerifyLemmas => "verify-lemmas",
            Self::FitLowerBound { .. } => "fit-lower-bound",
            Self::DumpSpectrum { .. } => "dump-spectrum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldChoice {
    U0,
    U1,
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("not a whole nonnegative count: {s}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accept_exponent_form() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("250"), Ok(250));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn flags_parse() {
        let c = Cli::try_parse_from(["gevrey-beam", "verify-lemmas", "--samples", "1e6", "--seed", "7"])
            .unwrap();
        assert_eq!(c.samples, Some(1_000_000));
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.command.name(), "verify-lemmas");
        assert!(Cli::try_parse_from(["gevrey-beam", "bogus"]).is_err());
    }
}
