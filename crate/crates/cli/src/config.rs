//! The run configuration and its embedded `# config:` header form.

use std::path::PathBuf;

use persinv::{scale_grid, Field};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Prefix of the metadata line written at the top of every text output.
pub const HEADER_PREFIX: &str = "# config: ";

pub const DEFAULT_VERTEX_LIMIT: usize = persinv::algebra::DEFAULT_VERTEX_LIMIT;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Rips,
    Ph,
    Pl,
    Pca,
    All,
    Compare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    Xyz,
    Pdb,
    Filtration,
}

impl InputFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &std::path::Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "xyz" => Some(InputFormat::Xyz),
            "pdb" | "ent" => Some(InputFormat::Pdb),
            "filtration" | "txt" => Some(InputFormat::Filtration),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Octagon,
    Octahedron,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    File {
        path: PathBuf,
        format: InputFormat,
        /// PDB atom names to keep.
        atoms: Vec<String>,
        /// PDB chain identifiers to keep; empty keeps all.
        chains: Vec<char>,
    },
    Generator {
        name: Generator,
        /// Octagon circumradius R; unused for the octahedron.
        circumradius: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    Range { start: f64, stop: f64, step: f64 },
    List { values: Vec<f64> },
}

impl GridSpec {
    /// Parses `start:stop:step` or a comma-separated list.
    pub fn parse(s: &str) -> Result<GridSpec, CliError> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad grid value {t:?}")))
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(CliError::Config(format!(
                    "grid range must be start:stop:step, got {s:?}"
                )));
            }
            Ok(GridSpec::Range {
                start: num(parts[0])?,
                stop: num(parts[1])?,
                step: num(parts[2])?,
            })
        } else {
            let values = s.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
            Ok(GridSpec::List { values })
        }
    }

    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let values = match self {
            GridSpec::Range { start, stop, step } => {
                if !(*step > 0.0) {
                    return Err(CliError::Config(format!(
                        "grid step must be positive, got {step}"
                    )));
                }
                scale_grid(*start, *stop, *step).map_err(|e| CliError::Config(e.to_string()))?
            }
            GridSpec::List { values } => values.clone(),
        };
        if values.is_empty() {
            return Err(CliError::Config("grid is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CliError::Config(
                "grid values must be finite and nonnegative".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("grid must be strictly ascending".into()));
        }
        Ok(values)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Everything that determines the data written by one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub input: InputSpec,
    pub max_dim: usize,
    pub max_radius: f64,
    pub grid: GridSpec,
    pub lag: f64,
    /// None selects the per-matrix default tolerance.
    pub zero_tol: Option<f64>,
    pub field: Field,
    /// Largest k for Laplacian spectra.
    pub k_max: usize,
    pub graded_betti: bool,
    pub strands: Vec<usize>,
    /// Scale pair for a persistent graded Betti table.
    pub pair: Option<(f64, f64)>,
    pub vertex_limit: Option<usize>,
    pub max_support: Option<usize>,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub timing: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.max_radius > 0.0 && self.max_radius.is_finite()) {
            return bad(format!(
                "max_radius must be positive, got {}",
                self.max_radius
            ));
        }
        if !(self.lag >= 0.0 && self.lag.is_finite()) {
            return bad(format!("lag must be nonnegative, got {}", self.lag));
        }
        if let Some(t) = self.zero_tol {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("zero_tol must be positive, got {t}"));
            }
        }
        if self.k_max > self.max_dim {
            return bad(format!(
                "k_max {} exceeds max_dim {}",
                self.k_max, self.max_dim
            ));
        }
        if self.strands.is_empty() || self.strands.contains(&0) {
            return bad("strands must be a nonempty list of integers ≥ 1".into());
        }
        if let Some((a, b)) = self.pair {
            if !(a >= 0.0 && a <= b && b.is_finite()) {
                return bad(format!("pair must satisfy 0 ≤ eps1 ≤ eps2, got ({a}, {b})"));
            }
        }
        if let InputSpec::Generator {
            name: Generator::Octagon,
            circumradius,
        } = &self.input
        {
            if !(*circumradius > 0.0 && circumradius.is_finite()) {
                return bad(format!("circumradius must be positive, got {circumradius}"));
            }
        }
        self.grid.values().map(|_| ())
    }

    pub fn vertex_limit(&self) -> usize {
        self.vertex_limit.unwrap_or(DEFAULT_VERTEX_LIMIT)
    }

    /// The single-line metadata header, terminated by a newline.
    pub fn to_header(&self) -> String {
        format!(
            "{HEADER_PREFIX}{}\n",
            serde_json::to_string(self).expect("config serializes")
        )
    }

    /// Finds the first header line in `text` and parses it.
    pub fn from_header(text: &str) -> Result<RunConfig, CliError> {
        let line = text
            .lines()
            .find_map(|l| l.strip_prefix(HEADER_PREFIX))
            .ok_or_else(|| CliError::Config("no config header found".into()))?;
        serde_json::from_str(line).map_err(|e| CliError::Config(format!("bad config header: {e}")))
    }

    /// Reads a config from a JSON document, a JSON output with a `config`
    /// field, or any text output carrying a header line.
    pub fn from_text(text: &str) -> Result<RunConfig, CliError> {
        if let Ok(v) = serde_json::from_str::<serde_json::Value>(text) {
            let inner = v.get("config").cloned().unwrap_or(v);
            return serde_json::from_value(inner)
                .map_err(|e| CliError::Config(format!("bad config: {e}")));
        }
        RunConfig::from_header(text)
    }
}
