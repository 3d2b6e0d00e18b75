//! Executes a [`RunConfig`].

use std::path::{Path, PathBuf};
use std::time::Instant;

use persinv::algebra::{curves, facet_bars_csv, persistent_fh_vectors, CurveSelector};
use persinv::complex::{build_rips_filtration, h_vector, RipsParams};
use persinv::ingest::{generate_octagon, generate_octahedron};
use persinv::persistence::BettiCurves;
use persinv::spectral::{eigenvalue_sidecar, SpectraCurves};
use persinv::{
    compute_barcodes, facet_barcodes, graded_betti, parse_pdb, parse_xyz, persistent_betti,
    persistent_graded_betti, persistent_laplacian, reduced_betti, snapshot, spectrum,
    AtomSelection, Barcode, Filtration, HochsterOptions, PointCloud,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::{Command, Generator, InputFormat, InputSpec, RunConfig};
use crate::error::CliError;
use crate::output::{write_file, OutputWriter};

/// Settings that change how a run executes but not what it writes.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Filtration cache directory; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CompareSummary {
    pub checks: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub written: Vec<PathBuf>,
    pub compare: Option<CompareSummary>,
    pub cache_hit: bool,
}

/// Wall times in seconds plus simplex counts per grid scale.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TimingReport {
    pub filtration_build: f64,
    pub ph_reduction: Option<f64>,
    /// Per-k eigensolve totals.
    pub eigensolve: Vec<f64>,
    pub hochster: Option<f64>,
    pub fh_counting: Option<f64>,
    pub compare: Option<f64>,
    pub simplex_counts: Vec<ScaleCounts>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaleCounts {
    pub scale: f64,
    /// s_k for k = 0..=max_dim.
    pub counts: Vec<usize>,
}

pub fn run(config: &RunConfig, options: &RunOptions) -> Result<RunReport, CliError> {
    config.validate()?;
    let grid = config.grid.values()?;
    let mut timing = TimingReport::default();

    let t = Instant::now();
    let (filtration, cache_hit) = load_filtration(config, options)?;
    timing.filtration_build = t.elapsed().as_secs_f64();
    if config.k_max > filtration.max_dim() {
        return Err(CliError::Config(format!(
            "k_max {} exceeds the filtration's max_dim {}",
            config.k_max,
            filtration.max_dim()
        )));
    }
    timing.simplex_counts = grid
        .iter()
        .map(|&scale| ScaleCounts {
            scale,
            counts: filtration.counts_at(scale),
        })
        .collect();

    let mut out = OutputWriter::new(config)?;
    let mut report = RunReport {
        cache_hit,
        ..RunReport::default()
    };
    let cmd = config.command;
    if matches!(cmd, Command::Rips | Command::All) {
        out.text("filtration.txt", &filtration.to_text())?;
    }
    if matches!(cmd, Command::Ph | Command::All) {
        let t = Instant::now();
        let bc = compute_barcodes(&filtration);
        timing.ph_reduction = Some(t.elapsed().as_secs_f64());
        out.table("ph_barcode", &bc.positive().to_csv())?;
        out.table("ph_betti", &BettiCurves::new(&bc, &grid).to_csv())?;
    }
    if matches!(cmd, Command::Pl | Command::All) {
        let (spectra, times) = spectra(&filtration, config, &grid)?;
        timing.eigensolve = times;
        out.table("pl_spectra", &spectra.to_csv())?;
        out.json("pl_eigenvalues", eigenvalue_sidecar(&spectra))?;
    }
    if matches!(cmd, Command::Pca | Command::All) {
        pca(&filtration, config, &grid, &mut out, &mut timing)?;
    }
    if cmd == Command::Compare {
        let t = Instant::now();
        let (csv, summary) = compare(&filtration, config, &grid)?;
        timing.compare = Some(t.elapsed().as_secs_f64());
        out.table("compare_report", &csv)?;
        report.compare = Some(summary);
    }
    if config.timing {
        out.raw_json(
            "timing.json",
            &serde_json::to_value(&timing).expect("timing serializes"),
        )?;
    }
    report.written = out.written().to_vec();
    Ok(report)
}

fn hochster_options(config: &RunConfig) -> HochsterOptions {
    HochsterOptions {
        field: config.field,
        vertex_limit: config.vertex_limit(),
        max_support: config.max_support,
    }
}

fn guard(n: usize, config: &RunConfig) -> Result<(), CliError> {
    let limit = config.vertex_limit();
    if n > limit {
        return Err(persinv::Error::VertexGuard { n, limit }.into());
    }
    Ok(())
}

fn spectra(
    filtration: &Filtration,
    config: &RunConfig,
    grid: &[f64],
) -> Result<(SpectraCurves, Vec<f64>), CliError> {
    let mut summaries = Vec::with_capacity(config.k_max + 1);
    let mut times = Vec::with_capacity(config.k_max + 1);
    for k in 0..=config.k_max {
        let t = Instant::now();
        let per_k = grid
            .par_iter()
            .map(|&eps| {
                let lap = persistent_laplacian(filtration, k, eps, eps + config.lag)?;
                spectrum(
                    &lap,
                    config.zero_tol.unwrap_or_else(|| lap.default_zero_tol()),
                )
            })
            .collect::<persinv::Result<Vec<_>>>()?;
        times.push(t.elapsed().as_secs_f64());
        summaries.push(per_k);
    }
    Ok((
        SpectraCurves {
            grid: grid.to_vec(),
            lag: config.lag,
            summaries,
        },
        times,
    ))
}

fn pca(
    filtration: &Filtration,
    config: &RunConfig,
    grid: &[f64],
    out: &mut OutputWriter,
    timing: &mut TimingReport,
) -> Result<(), CliError> {
    if config.graded_betti || config.pair.is_some() {
        guard(filtration.vertex_count(), config)?;
    }
    let t = Instant::now();
    let selector = CurveSelector {
        graded_betti: false,
        strands: config.strands.clone(),
        options: hochster_options(config),
    };
    let mut sr = curves(filtration, grid, &selector)?;
    let bars = facet_barcodes(filtration, grid);
    timing.fh_counting = Some(t.elapsed().as_secs_f64());

    out.table("pca_facet_bars", &facet_bars_csv(&bars))?;
    out.table("pca_facets", &sr.facet_csv())?;
    out.table("pca_fh", &sr.fh_csv())?;
    out.table("pca_nonfaces", &sr.nonface_csv())?;

    if !config.graded_betti && config.pair.is_none() {
        return Ok(());
    }
    let opts = hochster_options(config);
    let t = Instant::now();
    if config.graded_betti {
        let tables = grid
            .iter()
            .map(|&eps| graded_betti(&snapshot(filtration, eps), &config.strands, &opts))
            .collect::<persinv::Result<Vec<_>>>()?;
        for (p, table) in sr.points.iter_mut().zip(tables) {
            p.graded = Some(table);
        }
        for &j in &config.strands {
            out.table(&format!("pca_strand_j{j}"), &sr.strand_csv(j))?;
        }
    }
    if let Some((e1, e2)) = config.pair {
        let table = persistent_graded_betti(filtration, e1, e2, &config.strands, &opts)?;
        out.table("pca_persistent_graded_betti", &table.to_csv())?;
        let later = snapshot(filtration, e2);
        let d = later.dim().map_or(0, |x| x + 1);
        match persistent_fh_vectors(&table, filtration.vertex_count(), d) {
            Ok(fh) => {
                let mut csv = String::from("scale1,scale2,kind,index,value\n");
                for (i, v) in fh.f.iter().enumerate() {
                    csv.push_str(&format!("{e1},{e2},f,{},{v}\n", i as isize - 1));
                }
                for (m, v) in fh.h.iter().enumerate() {
                    csv.push_str(&format!("{e1},{e2},h,{m},{v}\n"));
                }
                out.table("pca_persistent_fh", &csv)?;
            }
            Err(e) => eprintln!("persistent f/h vectors skipped: {e}"),
        }
    }
    timing.hochster = Some(t.elapsed().as_secs_f64());
    Ok(())
}

/// Cross-checks between independent code paths; returns the report CSV.
fn compare(
    filtration: &Filtration,
    config: &RunConfig,
    grid: &[f64],
) -> Result<(String, CompareSummary), CliError> {
    let mut csv = String::from("check,k,scale,expected,observed,status\n");
    let mut summary = CompareSummary::default();
    // None marks a skipped check
    let mut record = |check: &str, k: isize, scale: f64, values: Option<(String, String)>| {
        let (expected, observed) = values.clone().unwrap_or_default();
        let status = match values {
            None => {
                summary.skipped += 1;
                "skip"
            }
            Some((e, o)) if e == o => "pass",
            Some(_) => {
                summary.failed += 1;
                "fail"
            }
        };
        summary.checks += 1;
        csv.push_str(&format!(
            "{check},{k},{scale},{expected},{observed},{status}\n"
        ));
    };

    // kernel dimension of the persistent Laplacian vs persistent Betti numbers
    let bc: Barcode = compute_barcodes(filtration);
    let (spectra, _) = spectra(filtration, config, grid)?;
    for (k, per_k) in spectra.summaries.iter().enumerate() {
        for (g, s) in per_k.iter().enumerate() {
            let expected = persistent_betti(&bc, k, grid[g], grid[g] + config.lag);
            record(
                "harmonic",
                k as isize,
                grid[g],
                Some((expected.to_string(), s.harmonic_dim.to_string())),
            );
        }
    }

    // Euler characteristic from counts vs from Betti numbers
    for &eps in grid {
        let snap = snapshot(filtration, eps);
        let h = reduced_betti(&snap, config.field);
        let alt = |xs: &mut dyn Iterator<Item = usize>| {
            xs.enumerate()
                .map(|(k, x)| if k % 2 == 0 { x as i64 } else { -(x as i64) })
                .sum::<i64>()
        };
        let from_counts = alt(&mut filtration.counts_at(eps).into_iter());
        let from_betti = alt(&mut (0..=filtration.max_dim()).map(|k| h.unreduced(k)));
        record(
            "euler",
            -1,
            eps,
            Some((from_counts.to_string(), from_betti.to_string())),
        );
    }

    // h-vector from Hochster's formula vs from face counts
    for &eps in grid {
        let snap = snapshot(filtration, eps);
        if snap.n_vertices() > config.vertex_limit() {
            record("hilbert", -1, eps, None);
            continue;
        }
        let d = snap.dim().map_or(0, |x| x + 1);
        let strands: Vec<usize> = (1..d.max(2)).collect();
        let opts = HochsterOptions {
            max_support: None,
            ..hochster_options(config)
        };
        let table = graded_betti(&snap, &strands, &opts)?;
        let fh = persistent_fh_vectors(&table.as_persistent(), snap.n_vertices(), d)?;
        let expected = h_vector(&snap.f_vector()).values;
        record("hilbert", -1, eps, Some((join(&expected), join(&fh.h))));
    }
    Ok((csv, summary))
}

fn join(v: &[i64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn load_filtration(
    config: &RunConfig,
    options: &RunOptions,
) -> Result<(Filtration, bool), CliError> {
    let params = RipsParams::new(config.max_dim, config.max_radius);
    let (cloud_source, key_material): (CloudSource, Vec<u8>) = match &config.input {
        InputSpec::File { path, format, .. } => {
            let bytes = std::fs::read(path).map_err(|e| CliError::io("read", path, e))?;
            let text = String::from_utf8(bytes)
                .map_err(|_| CliError::Parse(format!("{} is not UTF-8 text", path.display())))?;
            if *format == InputFormat::Filtration {
                return Ok((Filtration::parse_text(&text)?, false));
            }
            let key = text.as_bytes().to_vec();
            (CloudSource::Text(text), key)
        }
        InputSpec::Generator { .. } => (CloudSource::Generated, Vec::new()),
    };

    let mut hasher = Sha256::new();
    hasher.update(b"persinv filtration cache v1\n");
    let mut spec = serde_json::to_value(&config.input).expect("input serializes");
    if let Some(obj) = spec.as_object_mut() {
        obj.remove("path");
    }
    hasher.update(spec.to_string().as_bytes());
    hasher
        .update(json!({ "max_dim": params.max_dim, "max_radius": params.max_radius }).to_string());
    hasher.update(&key_material);
    let key = hex::encode(hasher.finalize());

    // text filtrations lose the distance matrix that facet deaths use at max_dim 0
    let cache_path = options
        .cache_dir
        .as_ref()
        .filter(|_| config.max_dim >= 1)
        .map(|d| d.join(format!("{key}.filtration")));
    if let Some(path) = &cache_path {
        if let Ok(text) = std::fs::read_to_string(path) {
            if let Ok(f) = Filtration::parse_text(&text) {
                return Ok((f, true));
            }
        }
    }

    let cloud = match (&config.input, cloud_source) {
        (
            InputSpec::File {
                format,
                atoms,
                chains,
                ..
            },
            CloudSource::Text(text),
        ) => read_cloud(&text, *format, atoms, chains)?,
        (InputSpec::Generator { name, circumradius }, _) => match name {
            Generator::Octagon => generate_octagon(*circumradius)?,
            Generator::Octahedron => generate_octahedron(),
        },
        _ => unreachable!("file inputs always carry their text"),
    };
    let filtration = build_rips_filtration(&cloud, params)?;
    if let Some(path) = &cache_path {
        let stored = std::fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))
            .map_err(|e| CliError::io("create", path, e))
            .and_then(|_| write_file(path, &filtration.to_text()));
        if let Err(e) = stored {
            eprintln!("filtration cache not written: {e}");
        }
    }
    Ok((filtration, false))
}

enum CloudSource {
    Text(String),
    Generated,
}

fn read_cloud(
    text: &str,
    format: InputFormat,
    atoms: &[String],
    chains: &[char],
) -> Result<PointCloud, CliError> {
    Ok(match format {
        InputFormat::Xyz => parse_xyz(text)?,
        InputFormat::Pdb => {
            let mut selection = AtomSelection::atoms(atoms);
            if !chains.is_empty() {
                selection = selection.with_chains(chains);
            }
            parse_pdb(text, &selection)?
        }
        InputFormat::Filtration => unreachable!("handled before cloud parsing"),
    })
}
