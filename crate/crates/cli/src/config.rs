use std::path::{Path, PathBuf};

use oncoscore::EngineParams;
use serde::Deserialize;

use crate::args::{self, Args, StartArg};

/// Values read from a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub seed: Option<u64>,
    pub insertion: Option<f64>,
    pub deletion: Option<f64>,
    pub inversion: Option<f64>,
    pub translocation: Option<f64>,
    pub transposition: Option<f64>,
    pub cancer_parts: Option<u32>,
    pub cancer_start: Option<StartValue>,
    pub cancer_length: Option<u64>,
    pub reproduction: Option<f64>,
    pub treatment: Option<bool>,
    pub survival: Option<f64>,
    pub therapy_start: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum StartValue {
    Fraction(f64),
    Word(String),
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| {
            let msg = e.message().replace('\n', " ");
            format!("{}: {}", path.display(), msg.trim())
        })
    }
}

/// Everything a run needs once flags and config are merged.
#[derive(Debug)]
pub struct Resolved {
    pub input: PathBuf,
    pub output: PathBuf,
    pub report: PathBuf,
    pub params: EngineParams,
    pub warnings: Vec<String>,
}

/// Merges flags over the config file over the defaults. Errors are usage errors.
pub fn resolve(args: &Args, file: FileConfig) -> Result<Resolved, String> {
    let mut params = EngineParams::default();
    let mut warnings = Vec::new();

    let prob =
        |key: &str, flag: Option<f64>, file: Option<f64>, default: f64| -> Result<f64, String> {
            match (flag, file) {
                (Some(x), _) => Ok(x),
                (None, Some(x)) => args::probability(&x.to_string())
                    .map_err(|e| format!("config key `{key}`: {e}")),
                (None, None) => Ok(default),
            }
        };
    params.p_insertion = prob(
        "insertion",
        args.insertion,
        file.insertion,
        params.p_insertion,
    )?;
    params.p_deletion = prob("deletion", args.deletion, file.deletion, params.p_deletion)?;
    params.p_inversion = prob(
        "inversion",
        args.inversion,
        file.inversion,
        params.p_inversion,
    )?;
    params.p_translocation = prob(
        "translocation",
        args.translocation,
        file.translocation,
        params.p_translocation,
    )?;
    params.p_transposition = prob(
        "transposition",
        args.transposition,
        file.transposition,
        params.p_transposition,
    )?;
    params.p_reproduction = prob(
        "reproduction",
        args.reproduction,
        file.reproduction,
        params.p_reproduction,
    )?;
    params.survival_rate = prob(
        "survival",
        args.survival,
        file.survival,
        params.survival_rate,
    )?;

    if let Some(n) = args.cancer_parts.or(file.cancer_parts) {
        if n == 0 {
            return Err("config key `cancer-parts`: must be at least 1".into());
        }
        params.max_offspring = n;
    }
    if let Some(n) = args.cancer_length.or(file.cancer_length) {
        if n == 0 {
            return Err("config key `cancer-length`: must be at least 1".into());
        }
        params.leitmotif_length =
            usize::try_from(n).map_err(|_| format!("cancer length {n} is too large"))?;
    }

    let start = match (args.cancer_start, file.cancer_start) {
        (Some(s), _) => Some(s),
        (None, Some(StartValue::Fraction(x))) => Some(
            args::cancer_start(&x.to_string())
                .map_err(|e| format!("config key `cancer-start`: {e}"))?,
        ),
        (None, Some(StartValue::Word(w))) => {
            Some(args::cancer_start(&w).map_err(|e| format!("config key `cancer-start`: {e}"))?)
        }
        (None, None) => None,
    };
    match start {
        Some(StartArg::Fixed(x)) => params.cancer_start = Some(x),
        Some(StartArg::Random) => params.cancer_start = None,
        None => {}
    }

    params.treatment_enabled = args.treatment_flag().or(file.treatment).unwrap_or(false);
    let therapy = match (args.therapy_start, file.therapy_start) {
        (Some(x), _) => Some(x),
        (None, Some(x)) => Some(
            args::therapy_start(&x.to_string())
                .map_err(|e| format!("config key `therapy-start`: {e}"))?,
        ),
        (None, None) => None,
    };
    if let Some(t) = therapy {
        params.therapy_start = t;
        if !params.treatment_enabled {
            warnings.push("therapy start is set but treatment is off; it has no effect".into());
        }
    }
    if args.survival.or(file.survival).is_some() && !params.treatment_enabled {
        warnings.push("survival rate is set but treatment is off; it has no effect".into());
    }
    params.seed = args.seed.or(file.seed).unwrap_or(0);

    params.validate().map_err(|e| e.to_string())?;

    let output = args
        .output
        .clone()
        .or(file.output)
        .unwrap_or_else(|| default_output(&args.input));
    let report = args
        .report
        .clone()
        .or(file.report)
        .unwrap_or_else(|| default_report(&output));
    if report == output {
        return Err("the report and the score cannot be written to the same file".into());
    }
    Ok(Resolved {
        input: args.input.clone(),
        output,
        report,
        params,
        warnings,
    })
}

fn stem(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    for ext in [".musicxml", ".xml"] {
        if let Some(s) = name.strip_suffix(ext) {
            if !s.is_empty() {
                return s.to_string();
            }
        }
    }
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "score".into())
}

pub fn default_output(input: &Path) -> PathBuf {
    input.with_file_name(format!("{}.mutant.musicxml", stem(input)))
}

pub fn default_report(output: &Path) -> PathBuf {
    output.with_file_name(format!("{}.report.json", stem(output)))
}
