#![allow(dead_code)]

use std::path::PathBuf;

use persinv::complex::{build_rips_filtration, Filtration, RipsParams};
use persinv::ingest::{generate_octagon, generate_octahedron, parse_pdb, parse_xyz, AtomSelection};
use persinv::PointCloud;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

/// Directory searched for `<ID>.pdb`; `PERSINV_FIXTURES` overrides the vendored one.
pub fn pdb_dir() -> PathBuf {
    std::env::var_os("PERSINV_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|| data_dir().join("pdb"))
}

/// Reads a PDB entry by ID, trying upper- and lowercase file names.
pub fn pdb_text(id: &str) -> Result<String, String> {
    let dir = pdb_dir();
    for name in [
        format!("{}.pdb", id.to_uppercase()),
        format!("{}.pdb", id.to_lowercase()),
    ] {
        if let Ok(text) = std::fs::read_to_string(dir.join(&name)) {
            return Ok(text);
        }
    }
    Err(format!("missing fixture {id}.pdb in {}", dir.display()))
}

pub fn pdb_cloud(id: &str, atom: &str) -> Result<PointCloud, String> {
    let text = pdb_text(id)?;
    parse_pdb(&text, &AtomSelection::atoms(&[atom])).map_err(|e| format!("{id}: {e}"))
}

pub fn octagon_cloud() -> PointCloud {
    generate_octagon(2.0).unwrap()
}

pub fn octahedron_cloud() -> PointCloud {
    generate_octahedron()
}

pub fn c20_cloud() -> PointCloud {
    let text = std::fs::read_to_string(data_dir().join("xyz/c20.xyz")).unwrap();
    parse_xyz(&text).unwrap()
}

pub fn rips(cloud: &PointCloud, max_dim: usize, max_radius: f64) -> Filtration {
    build_rips_filtration(cloud, RipsParams::new(max_dim, max_radius)).unwrap()
}

pub fn octagon() -> Filtration {
    rips(&octagon_cloud(), 3, 4.0)
}

pub fn octahedron() -> Filtration {
    rips(&octahedron_cloud(), 3, 3.0)
}

pub fn c20() -> Filtration {
    rips(&c20_cloud(), 3, 4.0)
}

/// Octagon radii r_m = 4 sin(mπ/8) for R = 2.
pub fn octagon_radius(m: u32) -> f64 {
    4.0 * (m as f64 * std::f64::consts::PI / 8.0).sin()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
