use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::exit::CliError;

pub const DEFAULT_ORDER: usize = hankel_core::series::DEFAULT_ORDER;
pub const DEFAULT_MAX_INDEX: usize = hankel_core::grunsky::DEFAULT_MAX_INDEX;
pub const DEFAULT_RESTARTS: usize = 8;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A function named by family and parameters, as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub family: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

/// Settings shared by the flags and by one subcommand block of a config
/// file. Every field is optional so that flags can override the file.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// JSON config file with one object per subcommand
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Function family (identity, koebe, kfold, herglotz, raw, convex-*)
    #[arg(long, value_name = "NAME")]
    pub family: Option<String>,

    /// Family parameters as a comma-separated list
    #[arg(long, value_name = "CSV", value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<f64>>,

    /// Several functions at once (config file only)
    #[arg(skip)]
    pub functions: Option<Vec<FunctionSpec>>,

    /// Truncation order N
    #[arg(long, value_name = "N")]
    pub order: Option<usize>,

    /// Largest odd Grunsky index
    #[arg(long, value_name = "M")]
    pub max_index: Option<usize>,

    /// Report path (stdout if omitted)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,

    #[arg(long, value_name = "K")]
    pub restarts: Option<usize>,

    /// Number of Herglotz atoms for search
    #[arg(long, value_name = "K")]
    pub atoms: Option<usize>,

    /// Search objective: abs_h22, abs_h31, abs_aN, abs_fekete_szego
    #[arg(long, value_name = "NAME")]
    pub objective: Option<String>,

    /// Total objective evaluations across restarts
    #[arg(long, value_name = "N")]
    pub max_evals: Option<usize>,

    /// Progress messages on stderr (repeat for more)
    #[arg(short, long, action = clap::ArgAction::Count)]
    #[serde(default)]
    pub verbose: u8,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl Settings {
    /// Flags in `self` win over the block for `command` in the config file.
    pub fn resolve(&self, command: &str) -> Result<Settings, CliError> {
        let mut base = match &self.config {
            Some(path) => read_block(path, command)?,
            None => Settings::default(),
        };
        let top = self;
        overlay!(base, top; family, params, order, max_index, out, format, seed, restarts, atoms, objective, max_evals);
        if top.family.is_some() {
            base.functions = None;
        }
        base.verbose = base.verbose.max(top.verbose);
        Ok(base)
    }

    pub fn order(&self) -> usize {
        self.order.unwrap_or(DEFAULT_ORDER)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    /// Functions to process: the `functions` list, or the single
    /// `family`/`params` pair.
    pub fn function_specs(&self) -> Result<Vec<FunctionSpec>, CliError> {
        match (&self.family, &self.functions) {
            (Some(family), _) => Ok(vec![FunctionSpec {
                family: family.clone(),
                params: self.params.clone().unwrap_or_default(),
            }]),
            (None, Some(list)) if !list.is_empty() => Ok(list.clone()),
            _ => Err(CliError::Config("no function given: use --family or a `functions` list".into())),
        }
    }
}

fn read_block(path: &Path, command: &str) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut blocks: BTreeMap<String, serde_json::Value> = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    for key in blocks.keys() {
        if !["grunsky", "verify", "audit", "search"].contains(&key.as_str()) {
            return Err(CliError::Config(format!("{}: unknown subcommand block {key:?}", path.display())));
        }
    }
    match blocks.remove(command) {
        Some(block) => serde_json::from_value(block)
            .map_err(|e| CliError::Config(format!("{}: [{command}] {e}", path.display()))),
        None => Ok(Settings::default()),
    }
}
