//! Point-cloud ingestion: XYZ and PDB readers plus the synthetic benchmark shapes.
//!
//! Coordinates are in ångströms throughout. PDB records are read from the
//! fixed-column layout (atom name in columns 13–16, chain in 22, residue number
//! in 23–26, coordinates in 31–54); only the first model of multi-model files is
//! used.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points closer than this trigger a warning (exact duplicates are rejected).
pub const NEAR_DUPLICATE_TOL: f64 = 1e-9;

/// Where a point cloud came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Xyz,
    Pdb {
        atoms: Vec<String>,
        chains: Option<Vec<char>>,
    },
    Generator {
        name: String,
        params: Vec<(String, f64)>,
    },
    Inline,
}

/// Labeled points in ångströms.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    points: Vec<[f64; 3]>,
    labels: Vec<String>,
    source: Source,
}

impl PointCloud {
    /// Validates lengths, finiteness and exact duplicates. Near-duplicates only warn.
    pub fn new(points: Vec<[f64; 3]>, labels: Vec<String>, source: Source) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::InvalidCloud(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidCloud(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
        let mut seen = HashSet::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            // +0.0 and -0.0 coincide
            let key = p.map(|c| (c + 0.0).to_bits());
            if !seen.insert(key) {
                return Err(Error::InvalidCloud(format!(
                    "point {i} ({}) duplicates an earlier point",
                    labels[i]
                )));
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let d = dist(&points[i], &points[j]);
                if d < NEAR_DUPLICATE_TOL {
                    log::warn!(
                        "points {i} and {j} are {d:e} apart; Rips scales near zero may be unstable"
                    );
                }
            }
        }
        Ok(PointCloud {
            points,
            labels,
            source,
        })
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        dist(&self.points[i], &self.points[j])
    }

    /// Serializes in XYZ format. Labels are written as the element column.
    pub fn to_xyz(&self, comment: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.points.len());
        let _ = writeln!(out, "{}", comment.lines().next().unwrap_or(""));
        for (p, l) in self.points.iter().zip(&self.labels) {
            let _ = writeln!(out, "{} {:?} {:?} {:?}", l, p[0], p[1], p[2]);
        }
        out
    }
}

pub(crate) fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    dist2(a, b).sqrt()
}

pub(crate) fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

/// Parses the standard XYZ format: atom count, a comment line, then `element x y z` rows.
pub fn parse_xyz(text: &str) -> Result<PointCloud> {
    let mut lines = text.lines().enumerate();
    let (_, count_line) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing atom count line"))?;
    let count: usize = count_line
        .trim()
        .parse()
        .map_err(|_| Error::parse(1, format!("malformed atom count {:?}", count_line.trim())))?;
    if count > 0 && lines.next().is_none() {
        return Err(Error::parse(2, "missing comment line"));
    } else if count == 0 {
        let _ = lines.next();
    }

    let mut points = Vec::with_capacity(count.min(1 << 20));
    let mut labels = Vec::with_capacity(count.min(1 << 20));
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        if points.len() == count {
            return Err(Error::parse(
                lineno,
                format!("more atom rows than the declared count {count}"),
            ));
        }
        let mut fields = line.split_whitespace();
        let element = fields.next().unwrap_or_default();
        let mut xyz = [0.0; 3];
        for c in xyz.iter_mut() {
            let tok = fields
                .next()
                .ok_or_else(|| Error::parse(lineno, "expected 3 coordinates"))?;
            *c = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("non-numeric coordinate {tok:?}")))?;
        }
        points.push(xyz);
        labels.push(element.to_string());
    }
    if points.len() != count {
        return Err(Error::parse(
            text.lines().count(),
            format!("declared {count} atoms but found {}", points.len()),
        ));
    }
    PointCloud::new(points, labels, Source::Xyz)
}

/// Which PDB atoms to keep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomSelection {
    pub atom_names: Vec<String>,
    pub chains: Option<Vec<char>>,
}

impl AtomSelection {
    pub fn atoms<S: AsRef<str>>(names: &[S]) -> Self {
        AtomSelection {
            atom_names: names
                .iter()
                .map(|s| s.as_ref().trim().to_string())
                .collect(),
            chains: None,
        }
    }

    pub fn with_chains(mut self, chains: &[char]) -> Self {
        self.chains = Some(chains.to_vec());
        self
    }
}

fn column(line: &str, start: usize, end: usize) -> Option<&str> {
    // 1-based inclusive PDB columns; short lines yield what is present
    let bytes = line.len();
    if bytes < start {
        return None;
    }
    line.get(start - 1..end.min(bytes))
}

/// Reads ATOM/HETATM records whose atom name is in the selection.
///
/// Only the first MODEL is read. Alternate locations other than ' ' and 'A' are
/// skipped, and the first record per (chain, residue number, atom name) wins.
pub fn parse_pdb(text: &str, selection: &AtomSelection) -> Result<PointCloud> {
    if selection.atom_names.is_empty() {
        return Err(Error::InvalidArgument(
            "atom filter must be nonempty".into(),
        ));
    }
    let mut seen: HashSet<(char, i64, String)> = HashSet::new();
    let mut points = Vec::new();
    let mut labels = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let record = column(line, 1, 6).unwrap_or("").trim_end();
        if record == "ENDMDL" {
            break;
        }
        if record != "ATOM" && record != "HETATM" {
            continue;
        }
        let Some(name) = column(line, 13, 16).map(str::trim) else {
            continue;
        };
        if !selection.atom_names.iter().any(|a| a == name) {
            continue;
        }
        let chain = column(line, 22, 22)
            .and_then(|s| s.chars().next())
            .unwrap_or(' ');
        if let Some(chains) = &selection.chains {
            if !chains.contains(&chain) {
                continue;
            }
        }
        let alt = column(line, 17, 17)
            .and_then(|s| s.chars().next())
            .unwrap_or(' ');
        if alt != ' ' && alt != 'A' {
            continue;
        }
        let res_field = column(line, 23, 26).unwrap_or("").trim();
        let res_seq: i64 = res_field
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad residue number {res_field:?}")))?;
        let mut xyz = [0.0; 3];
        for (c, start) in xyz.iter_mut().zip([31, 39, 47]) {
            let field = column(line, start, start + 7)
                .ok_or_else(|| Error::parse(lineno, "coordinate columns missing"))?
                .trim();
            *c = field
                .parse()
                .map_err(|_| Error::parse(lineno, format!("unparseable coordinate {field:?}")))?;
        }
        if !seen.insert((chain, res_seq, name.to_string())) {
            continue;
        }
        points.push(xyz);
        labels.push(format!("{chain}:{res_seq}:{name}"));
    }

    if points.is_empty() {
        return Err(Error::NoMatchingAtoms {
            filter: selection.atom_names.clone(),
        });
    }
    PointCloud::new(
        points,
        labels,
        Source::Pdb {
            atoms: selection.atom_names.clone(),
            chains: selection.chains.clone(),
        },
    )
}

/// Regular octagon in the z = 0 plane, vertex k at angle 2πk/8.
pub fn generate_octagon(circumradius: f64) -> Result<PointCloud> {
    if !(circumradius > 0.0) || !circumradius.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "circumradius must be positive, got {circumradius}"
        )));
    }
    let points = (0..8)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 8.0;
            [circumradius * t.cos(), circumradius * t.sin(), 0.0]
        })
        .collect();
    let labels = (0..8).map(|k| format!("v{k}")).collect();
    PointCloud::new(
        points,
        labels,
        Source::Generator {
            name: "octagon".into(),
            params: vec![("circumradius".into(), circumradius)],
        },
    )
}

/// The elongated octahedron {(±1,0,0), (0,±1,0), (0,0,±1.5)}.
pub fn generate_octahedron() -> PointCloud {
    let points = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.5],
        [0.0, 0.0, -1.5],
    ];
    let labels = ["+x", "-x", "+y", "-y", "+z", "-z"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    PointCloud::new(
        points,
        labels,
        Source::Generator {
            name: "octahedron".into(),
            params: vec![],
        },
    )
    .expect("fixed octahedron is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pdb_line(
        record: &str,
        serial: u32,
        name: &str,
        alt: char,
        chain: char,
        res: i32,
        xyz: [f64; 3],
    ) -> String {
        format!(
            "{record:<6}{serial:>5} {name:<4}{alt}{resn:>3} {chain}{res:>4}    {x:>8.3}{y:>8.3}{z:>8.3}  1.00  0.00",
            resn = "ALA",
            x = xyz[0],
            y = xyz[1],
            z = xyz[2],
        )
    }

    #[test]
    fn xyz_counts_and_labels() {
        let c = parse_xyz("2\ncomment\nC 0 0 0\nO 1.5 0 0\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.labels(), ["C", "O"]);
        assert_eq!(c.distance(0, 1), 1.5);
    }

    #[test]
    fn xyz_zero_atoms_is_empty() {
        assert!(parse_xyz("0\n").unwrap().is_empty());
        assert!(parse_xyz("0\nnothing here\n").unwrap().is_empty());
    }

    #[test]
    fn xyz_errors() {
        assert!(matches!(
            parse_xyz("two\nx\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_xyz("1\nx\nC 0 zero 0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_xyz("2\nx\nC 0 0 0\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_xyz("1\nx\nC 0 0 0\nC 1 1 1\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(parse_xyz(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn exact_duplicates_rejected() {
        let err = parse_xyz("2\n\nC 1 2 3\nC 1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::InvalidCloud(_)));
        let near = parse_xyz("2\n\nC 1 2 3\nC 1 2 3.0000000000001\n");
        assert!(near.is_ok());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            parse_xyz("1\n\nC 0 NaN 0\n"),
            Err(Error::InvalidCloud(_))
        ));
    }

    #[test]
    fn pdb_filters_altloc_and_models() {
        let text = [
            pdb_line("ATOM", 1, "N", ' ', 'A', 1, [0.0, 0.0, 0.0]),
            pdb_line("ATOM", 2, "CA", ' ', 'A', 1, [1.0, 0.0, 0.0]),
            pdb_line("ATOM", 3, "CA", 'A', 'A', 2, [2.0, 0.0, 0.0]),
            pdb_line("ATOM", 4, "CA", 'B', 'A', 2, [2.1, 0.0, 0.0]),
            pdb_line("ATOM", 5, "CA", ' ', 'B', 2, [3.0, 0.0, 0.0]),
            pdb_line("HETATM", 6, "P", ' ', 'B', 3, [4.0, 0.0, 0.0]),
            "ENDMDL".to_string(),
            pdb_line("ATOM", 7, "CA", ' ', 'A', 1, [9.0, 0.0, 0.0]),
        ]
        .join("\n");
        let ca = parse_pdb(&text, &AtomSelection::atoms(&["CA"])).unwrap();
        assert_eq!(ca.labels(), ["A:1:CA", "A:2:CA", "B:2:CA"]);
        assert_eq!(ca.points()[1], [2.0, 0.0, 0.0]);

        let chain_b = parse_pdb(&text, &AtomSelection::atoms(&["CA"]).with_chains(&['B'])).unwrap();
        assert_eq!(chain_b.len(), 1);

        let p = parse_pdb(&text, &AtomSelection::atoms(&["P"])).unwrap();
        assert_eq!(p.labels(), ["B:3:P"]);
    }

    #[test]
    fn pdb_first_occurrence_wins() {
        let text = [
            pdb_line("ATOM", 1, "CA", ' ', 'A', 5, [1.0, 0.0, 0.0]),
            pdb_line("ATOM", 2, "CA", ' ', 'A', 5, [7.0, 0.0, 0.0]),
        ]
        .join("\n");
        let c = parse_pdb(&text, &AtomSelection::atoms(&["CA"])).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.points()[0][0], 1.0);
    }

    #[test]
    fn pdb_errors() {
        let text = pdb_line("ATOM", 1, "N", ' ', 'A', 1, [0.0, 0.0, 0.0]);
        assert!(matches!(
            parse_pdb(&text, &AtomSelection::atoms(&["CA"])),
            Err(Error::NoMatchingAtoms { .. })
        ));
        let bad = "ATOM      1  CA  ALA A   1      xx.xxx   0.000   0.000";
        assert!(matches!(
            parse_pdb(bad, &AtomSelection::atoms(&["CA"])),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_pdb(bad, &AtomSelection::atoms::<&str>(&[])),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn pdb_short_and_non_ascii_lines_do_not_panic() {
        let sel = AtomSelection::atoms(&["CA"]);
        for text in [
            "ATOM",
            "ATOM  é",
            "HETATM    1  CA",
            "ATOM      1  CAé ALA A   1",
            "ATOM      1  CA  ALA A   1      1.0",
        ] {
            let _ = parse_pdb(text, &sel);
        }
    }

    #[test]
    fn octagon_distances() {
        let c = generate_octagon(2.0).unwrap();
        assert_eq!(c.len(), 8);
        let r1 = 2.0 * 2.0 * (PI / 8.0).sin();
        assert!((c.distance(0, 1) - r1).abs() < 1e-12);
        assert!((r1 - 1.5307).abs() < 1e-4);
        assert!((c.distance(0, 4) - 4.0).abs() < 1e-12);
        let half = generate_octagon(1.0).unwrap();
        for i in 0..8 {
            for j in i + 1..8 {
                assert!((half.distance(i, j) * 2.0 - c.distance(i, j)).abs() < 1e-12);
            }
        }
        assert!(generate_octagon(0.0).is_err());
        assert!(generate_octagon(-1.0).is_err());
    }

    #[test]
    fn octahedron_distances() {
        let c = generate_octahedron();
        assert!((c.distance(0, 2) - 2f64.sqrt()).abs() < 1e-12);
        assert!((c.distance(0, 4) - 3.25f64.sqrt()).abs() < 1e-12);
        assert!((c.distance(4, 5) - 3.0).abs() < 1e-12);
        assert!((c.distance(0, 1) - 2.0).abs() < 1e-12);
    }
}
