//! Command-line flags and their translation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use persinv::Field;

use crate::config::{
    Command, Generator, GridSpec, InputFormat, InputSpec, OutputFormat, RunConfig,
};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "persinv",
    version,
    about = "Persistent topological and algebraic invariants of point clouds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Build (and cache) the Vietoris-Rips filtration
    Rips(RunArgs),
    /// Barcodes and Betti curves
    Ph(RunArgs),
    /// Persistent Laplacian spectra curves
    Pl(RunArgs),
    /// Facets, f/h curves and graded Betti tables
    Pca(RunArgs),
    /// Everything above
    All(RunArgs),
    /// Cross-check report between independent computations
    Compare(RunArgs),
}

impl Sub {
    pub fn parts(&self) -> (Command, &RunArgs) {
        match self {
            Sub::Rips(a) => (Command::Rips, a),
            Sub::Ph(a) => (Command::Ph, a),
            Sub::Pl(a) => (Command::Pl, a),
            Sub::Pca(a) => (Command::Pca, a),
            Sub::All(a) => (Command::All, a),
            Sub::Compare(a) => (Command::Compare, a),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Xyz,
    Pdb,
    Filtration,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GeneratorArg {
    Octagon,
    Octahedron,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FieldArg {
    Gf2,
    Rational,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OutputArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Run configuration (JSON, or any output file with a config header); other data flags are ignored
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Structure file (.xyz, .pdb) or serialized filtration
    #[arg(long, short, value_name = "PATH", conflicts_with = "generator")]
    pub input: Option<PathBuf>,
    /// Input format; guessed from the extension when omitted
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// PDB atom names to keep, comma-separated
    #[arg(long, value_delimiter = ',', default_value = "CA")]
    pub atoms: Vec<String>,
    /// PDB chains to keep, comma-separated
    #[arg(long, value_delimiter = ',')]
    pub chains: Vec<char>,
    /// Synthetic benchmark shape instead of an input file
    #[arg(long, value_enum)]
    pub generator: Option<GeneratorArg>,
    /// Octagon circumradius in Å
    #[arg(long, default_value_t = 2.0)]
    pub circumradius: f64,

    #[arg(long, default_value_t = 3)]
    pub max_dim: usize,
    /// Largest edge length in Å
    #[arg(long, default_value_t = 4.0)]
    pub max_radius: f64,
    /// `start:stop:step` or `a,b,c`; defaults to 0:max_radius:0.1
    #[arg(long)]
    pub grid: Option<String>,
    /// Laplacian scale offset: pairs (ε, ε + lag)
    #[arg(long, default_value_t = 0.0)]
    pub lag: f64,
    /// Eigenvalues at or below this count as zero
    #[arg(long)]
    pub zero_tol: Option<f64>,
    #[arg(long, value_enum, default_value = "gf2")]
    pub field: FieldArg,
    /// Largest Laplacian degree; defaults to min(2, max_dim)
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Enumerate graded Betti strands at every grid scale
    #[arg(long)]
    pub graded_betti: bool,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub strands: Vec<usize>,
    /// Scale pair `eps1,eps2` for a persistent graded Betti table
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub pair: Option<Vec<f64>>,
    /// Override the vertex guard on Hochster enumeration
    #[arg(long)]
    pub vertex_limit: Option<usize>,
    /// Only enumerate vertex subsets up to this size
    #[arg(long)]
    pub max_support: Option<usize>,

    #[arg(long, short, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub output_format: OutputArg,
    /// Also write timing.json
    #[arg(long)]
    pub timing: bool,

    /// Worker threads
    #[arg(long, env = "PERSINV_THREADS")]
    pub threads: Option<usize>,
    /// Filtration cache directory; defaults to <out>/cache
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub no_cache: bool,
}

impl RunArgs {
    pub fn to_config(&self, command: Command) -> Result<RunConfig, CliError> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io("read", path, e))?;
            let mut cfg = RunConfig::from_text(&text)?;
            cfg.command = command;
            return Ok(cfg);
        }
        let input = match (&self.input, self.generator) {
            (Some(path), _) => {
                let format = match self.format {
                    Some(FormatArg::Xyz) => InputFormat::Xyz,
                    Some(FormatArg::Pdb) => InputFormat::Pdb,
                    Some(FormatArg::Filtration) => InputFormat::Filtration,
                    None => InputFormat::from_path(path).ok_or_else(|| {
                        CliError::Config(format!(
                            "cannot guess the format of {}; pass --format",
                            path.display()
                        ))
                    })?,
                };
                InputSpec::File {
                    path: path.clone(),
                    format,
                    atoms: self.atoms.clone(),
                    chains: self.chains.clone(),
                }
            }
            (None, Some(g)) => InputSpec::Generator {
                name: match g {
                    GeneratorArg::Octagon => Generator::Octagon,
                    GeneratorArg::Octahedron => Generator::Octahedron,
                },
                circumradius: self.circumradius,
            },
            (None, None) => {
                return Err(CliError::Config(
                    "pass --input, --generator or --config".into(),
                ))
            }
        };
        let grid = match &self.grid {
            Some(s) => GridSpec::parse(s)?,
            None => GridSpec::Range {
                start: 0.0,
                stop: self.max_radius,
                step: 0.1,
            },
        };
        let pair = match self.pair.as_deref() {
            None => None,
            Some([a, b]) => Some((*a, *b)),
            Some(_) => return Err(CliError::Config("--pair takes exactly two scales".into())),
        };
        let cfg = RunConfig {
            command,
            input,
            max_dim: self.max_dim,
            max_radius: self.max_radius,
            grid,
            lag: self.lag,
            zero_tol: self.zero_tol,
            field: match self.field {
                FieldArg::Gf2 => Field::Gf2,
                FieldArg::Rational => Field::Rational,
            },
            k_max: self.k_max.unwrap_or(self.max_dim.min(2)),
            graded_betti: self.graded_betti,
            strands: self.strands.clone(),
            pair,
            vertex_limit: self.vertex_limit,
            max_support: self.max_support,
            out_dir: self.out.clone(),
            format: match self.output_format {
                OutputArg::Csv => OutputFormat::Csv,
                OutputArg::Json => OutputFormat::Json,
            },
            timing: self.timing,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn cache_dir(&self, config: &RunConfig) -> Option<PathBuf> {
        if self.no_cache {
            return None;
        }
        Some(
            self.cache_dir
                .clone()
                .unwrap_or_else(|| config.out_dir.join("cache")),
        )
    }
}
