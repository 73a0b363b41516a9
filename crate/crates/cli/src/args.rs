use std::path::PathBuf;

use clap::Parser;

pub const SEED_ENV: &str = "ONCOSCORE_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "oncoscore",
    version = crate::BUILD_IDENTITY,
    about = "Turns a MusicXML score into a mutant version of itself by simulating cancer growth on a leitmotif.",
    arg_required_else_help = true,
    after_help = "Flags override values read from --config. The seed falls back to $ONCOSCORE_SEED, then to 0."
)]
pub struct Args {
    /// Uncompressed partwise MusicXML file to mutate.
    #[arg(short, long, value_name = "FILE")]
    pub input: PathBuf,

    /// Where to write the mutated score [default: <input stem>.mutant.musicxml next to the input]
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,

    /// Where to write the JSON lineage report [default: <output stem>.report.json next to the output]
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,

    /// TOML file with parameter values; keys are the long flag names.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Seed for every random choice in the run.
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<u64>,

    /// Probability that an insertion will occur. [default: 0.3]
    #[arg(long, value_name = "P", value_parser = probability)]
    pub insertion: Option<f64>,

    /// Probability that a deletion will occur. [default: 0.3]
    #[arg(long, value_name = "P", value_parser = probability)]
    pub deletion: Option<f64>,

    /// Probability that an inversion will occur. [default: 0.3]
    #[arg(long, value_name = "P", value_parser = probability)]
    pub inversion: Option<f64>,

    /// Probability that a translocation will occur. [default: 0.3]
    #[arg(long, value_name = "P", value_parser = probability)]
    pub translocation: Option<f64>,

    /// Probability that a transposition will occur. [default: 0.3]
    #[arg(long, value_name = "P", value_parser = probability)]
    pub transposition: Option<f64>,

    /// How many offspring a mutant part can produce. [default: 2]
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub cancer_parts: Option<u32>,

    /// Percentage relative to the length of the piece. Given as a fraction in [0, 1), or "random". [default: 0.1]
    #[arg(long, value_name = "FRACTION", value_parser = cancer_start)]
    pub cancer_start: Option<StartArg>,

    /// Length in measures of the cancer leitmotif. [default: 2]
    #[arg(long, value_name = "MEASURES", value_parser = clap::value_parser!(u64).range(1..))]
    pub cancer_length: Option<u64>,

    /// Probability that a mutant part will reproduce. [default: 0.5]
    #[arg(long, value_name = "P", value_parser = probability)]
    pub reproduction: Option<f64>,

    /// Boolean if treatment should be applied. [default: off]
    #[arg(long, overrides_with = "no_treatment")]
    pub treatment: bool,

    /// Turn treatment off even if the config file enables it.
    #[arg(long, overrides_with = "treatment")]
    pub no_treatment: bool,

    /// Probability of a mutant to resist treatment. [default: 0.2]
    #[arg(long, value_name = "P", value_parser = probability)]
    pub survival: Option<f64>,

    /// Percentage relative to the length of the piece. Given as a fraction in (0, 1]. [default: 0.7]
    #[arg(long, value_name = "FRACTION", value_parser = therapy_start)]
    pub therapy_start: Option<f64>,

    /// Print the resolved run plan and exit without writing anything.
    #[arg(long)]
    pub describe: bool,
}

impl Args {
    pub fn treatment_flag(&self) -> Option<bool> {
        match (self.treatment, self.no_treatment) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StartArg {
    Fixed(f64),
    Random,
}

fn number(s: &str) -> Result<f64, String> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if !x.is_finite() {
        return Err(format!("`{s}` is not a finite number"));
    }
    Ok(x)
}

pub fn probability(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(format!("{x} is outside [0, 1]"));
    }
    Ok(x)
}

pub fn cancer_start(s: &str) -> Result<StartArg, String> {
    if s.trim().eq_ignore_ascii_case("random") {
        return Ok(StartArg::Random);
    }
    let x = number(s)?;
    if !(0.0..1.0).contains(&x) {
        return Err(format!("{x} is outside [0, 1)"));
    }
    Ok(StartArg::Fixed(x))
}

pub fn therapy_start(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    if !(x > 0.0 && x <= 1.0) {
        return Err(format!("{x} is outside (0, 1]"));
    }
    Ok(x)
}
