use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Every flag the commands understand. A `--config` file holds the same
/// fields; flags given on the command line win.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Flags {
    /// Potential, e.g. `quartic`, `x2x4:lambda=1/10`, `dwell:beta=-5`, `poly:0,1,1`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,

    /// 0 for even states, 1 for odd states
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<u8>,

    /// Hankel dimension
    #[arg(long = "D")]
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,

    /// Hankel shift (0 gives lower bounds, 1 upper bounds)
    #[arg(long = "d")]
    #[serde(rename = "d", skip_serializing_if = "Option::is_none")]
    pub shift: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dmin: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dmax: Option<usize>,

    /// Significant digits to certify and print
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digits: Option<u32>,

    /// Working precision in decimal digits (default max(40, 4D + 20))
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,

    /// Starting energy, or `@file.json` to reuse the last root of an earlier run
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,

    /// `lo,hi`: start one sequence at every root in the interval
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,

    /// State index within the parity used for the default seed
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<usize>,

    /// Observable coefficients `c0,c1,...` of `c0 + c1 x^2 + c2 x^4 + ...`
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<String>,

    /// Step (rational) for a finite-difference check of the expectation value
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<String>,

    /// Right end of the wavefunction grid
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xmax: Option<f64>,

    /// Number of grid points
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,

    /// Reference eigenvalue for rate fits
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,

    /// Number of oracle eigenvalues
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,

    /// Oracle on the whole line instead of per parity
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub full_line: bool,

    /// Normalize the polynomial to leading coefficient one
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub monic: bool,

    /// Term limit for exact determinants
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term_limit: Option<usize>,

    /// Preset name for `table` and `figure-data`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,

    /// Write output here instead of stdout
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// JSON file with default values for any of these flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! prefer {
    ($cli:ident, $file:ident; $($field:ident),*) => {
        $( if $cli.$field.is_none() { $cli.$field = $file.$field; } )*
    };
}

impl Flags {
    /// Fill unset flags from the config file, if one was named.
    pub fn resolve(mut self) -> Result<Flags, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = load(&path)?;
        prefer!(self, file; potential, parity, dim, shift, dmin, dmax, digits, precision, seed, window,
            state, observable, fd_step, xmax, points, reference, count, term_limit, name, format, out);
        self.full_line |= file.full_line;
        self.monic |= file.monic;
        Ok(self)
    }
}

/// A config file is either a bare flag object or the JSON output of an
/// earlier run, whose `inputs` are reused.
fn load(path: &Path) -> Result<Flags, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))?;
    if let Some(inputs) = value.get_mut("inputs") {
        value = inputs.take();
        if let Some(map) = value.as_object_mut() {
            map.remove("command");
            map.remove("out");
        }
    }
    serde_json::from_value(value).map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))
}
