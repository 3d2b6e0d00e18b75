//! Persistent homology over GF(2) by column reduction with clearing.

use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::complex::Filtration;
use crate::error::{Error, Result};

/// A homology class alive on `[birth, death)`; essential classes have `death = +∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub dim: usize,
    pub birth: f64,
    #[serde(serialize_with = "ser_scale", deserialize_with = "de_scale")]
    pub death: f64,
}

impl Bar {
    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    pub fn alive_at(&self, eps: f64) -> bool {
        self.birth <= eps && eps < self.death
    }
}

/// Writes a scale, using the token `inf` for +∞.
pub fn format_scale(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

pub fn parse_scale(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        t => t.parse::<f64>().ok().filter(|x| x.is_finite()),
    }
}

fn ser_scale<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str("inf")
    }
}

fn de_scale<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(x) => Ok(x),
        Raw::Str(s) => {
            parse_scale(&s).ok_or_else(|| serde::de::Error::custom(format!("bad scale {s:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Barcode {
    pub bars: Vec<Bar>,
    pub max_dim: usize,
}

impl Barcode {
    pub fn dim(&self, k: usize) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(move |b| b.dim == k)
    }

    /// Drops zero-length bars (birth = death).
    pub fn positive(&self) -> Barcode {
        Barcode {
            bars: self
                .bars
                .iter()
                .filter(|b| b.death > b.birth)
                .copied()
                .collect(),
            max_dim: self.max_dim,
        }
    }

    /// `dim,birth,death` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,birth,death\n");
        for b in &self.bars {
            let _ = writeln!(out, "{},{},{}", b.dim, b.birth, format_scale(b.death));
        }
        out
    }

    /// Parses the output of [`Barcode::to_csv`]; lines starting with `#` are skipped.
    pub fn from_csv(text: &str, max_dim: usize) -> Result<Barcode> {
        let mut bars = Vec::new();
        let mut header_seen = false;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header_seen {
                header_seen = true;
                if line == "dim,birth,death" {
                    continue;
                }
            }
            let bad = || Error::Parse {
                line: i + 1,
                message: format!("expected dim,birth,death, got {line:?}"),
            };
            let mut parts = line.split(',');
            let (Some(d), Some(b), Some(e), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad());
            };
            let dim = d.trim().parse().map_err(|_| bad())?;
            let birth = parse_scale(b).filter(|x| x.is_finite()).ok_or_else(bad)?;
            let death = parse_scale(e).ok_or_else(bad)?;
            if death < birth {
                return Err(bad());
            }
            bars.push(Bar { dim, birth, death });
        }
        Ok(Barcode { bars, max_dim })
    }
}

fn xor_into(acc: &mut Vec<usize>, other: &[usize], scratch: &mut Vec<usize>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < acc.len() && j < other.len() {
        match acc[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(acc[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&acc[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(acc, scratch);
}

/// Standard persistence pairing. Zero-length bars are included; use
/// [`Barcode::positive`] for reports. Bars are sorted by (dim, birth, death).
pub fn compute_barcodes(filtration: &Filtration) -> Barcode {
    let entries = filtration.entries();
    let n = entries.len();
    let max_dim = filtration.max_dim();
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); max_dim + 1];
    for (i, e) in entries.iter().enumerate() {
        by_dim[e.simplex.dim()].push(i);
    }

    // pivot_col[row] = column whose reduced lowest entry is `row`
    let mut pivot_col: Vec<usize> = vec![usize::MAX; n];
    let mut negative = vec![false; n];
    let mut reduced: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut cleared = vec![false; n];
    let mut scratch = Vec::new();

    for d in (1..=max_dim).rev() {
        for &j in &by_dim[d] {
            if cleared[j] {
                continue;
            }
            let mut col: Vec<usize> = entries[j]
                .simplex
                .faces()
                .map(|f| {
                    filtration
                        .index_of(&f)
                        .expect("filtration is closed under faces")
                })
                .collect();
            col.sort_unstable();
            while let Some(&low) = col.last() {
                let p = pivot_col[low];
                if p == usize::MAX {
                    break;
                }
                xor_into(&mut col, &reduced[p], &mut scratch);
            }
            if let Some(&low) = col.last() {
                pivot_col[low] = j;
                negative[j] = true;
                // a paired creator's own column must reduce to zero
                cleared[low] = true;
                reduced[j] = col;
            }
        }
    }

    let mut bars: Vec<Bar> = (0..n)
        .filter(|&i| !negative[i])
        .map(|i| Bar {
            dim: entries[i].simplex.dim(),
            birth: entries[i].scale,
            death: match pivot_col[i] {
                usize::MAX => f64::INFINITY,
                j => entries[j].scale,
            },
        })
        .collect();
    bars.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
    Barcode { bars, max_dim }
}

/// Number of dim-`k` bars with birth ≤ eps1 and death > eps2.
pub fn persistent_betti(barcode: &Barcode, k: usize, eps1: f64, eps2: f64) -> usize {
    barcode
        .dim(k)
        .filter(|b| b.birth <= eps1 && b.death > eps2)
        .count()
}

/// β_k at each grid scale.
pub fn betti_curve(barcode: &Barcode, k: usize, grid: &[f64]) -> Vec<usize> {
    grid.iter()
        .map(|&eps| persistent_betti(barcode, k, eps, eps))
        .collect()
}

/// Betti curves for k = 0..=max_dim on a shared grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BettiCurves {
    pub grid: Vec<f64>,
    /// `curves[k][g]` is β_k at `grid[g]`.
    pub curves: Vec<Vec<usize>>,
}

impl BettiCurves {
    pub fn new(barcode: &Barcode, grid: &[f64]) -> Self {
        BettiCurves {
            grid: grid.to_vec(),
            curves: (0..=barcode.max_dim)
                .map(|k| betti_curve(barcode, k, grid))
                .collect(),
        }
    }

    /// Long format: `scale,k,betti`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scale,k,betti\n");
        for (g, eps) in self.grid.iter().enumerate() {
            for (k, curve) in self.curves.iter().enumerate() {
                let _ = writeln!(out, "{eps},{k},{}", curve[g]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_rips_filtration, RipsParams};
    use crate::ingest::{generate_octagon, generate_octahedron};

    fn octagon() -> Barcode {
        let cloud = generate_octagon(2.0).unwrap();
        compute_barcodes(&build_rips_filtration(&cloud, RipsParams::new(3, 4.0)).unwrap())
            .positive()
    }

    #[test]
    fn octagon_bars() {
        let bc = octagon();
        let r1 = 4.0 * (std::f64::consts::PI / 8.0).sin();
        let r3 = 4.0 * (3.0 * std::f64::consts::PI / 8.0).sin();
        let h0: Vec<&Bar> = bc.dim(0).collect();
        assert_eq!(h0.len(), 8);
        assert_eq!(h0.iter().filter(|b| b.is_essential()).count(), 1);
        assert!(h0
            .iter()
            .filter(|b| !b.is_essential())
            .all(|b| (b.death - r1).abs() < 1e-9));
        let h1: Vec<&Bar> = bc.dim(1).collect();
        assert_eq!(h1.len(), 1);
        assert!((h1[0].birth - r1).abs() < 1e-9 && (h1[0].death - r3).abs() < 1e-9);
        assert_eq!(bc.dim(2).count(), 0);

        assert_eq!(persistent_betti(&bc, 1, 2.0, 3.0), 1);
        assert_eq!(persistent_betti(&bc, 0, 1.0, 2.0), 1);
        assert_eq!(betti_curve(&bc, 0, &[1.0, 2.0, 3.0, 4.0]), vec![8, 1, 1, 1]);
    }

    #[test]
    fn octahedron_bars() {
        let f = build_rips_filtration(&generate_octahedron(), RipsParams::new(3, 2.5)).unwrap();
        let bc = compute_barcodes(&f).positive();
        let h1: Vec<&Bar> = bc.dim(1).collect();
        assert_eq!(h1.len(), 1);
        assert!((h1[0].birth - 2f64.sqrt()).abs() < 1e-9);
        assert!((h1[0].death - 3.25f64.sqrt()).abs() < 1e-9);
        let h2: Vec<&Bar> = bc.dim(2).collect();
        assert_eq!(h2.len(), 1);
        assert!((h2[0].birth - 3.25f64.sqrt()).abs() < 1e-9);
        assert!((h2[0].death - 2.0).abs() < 1e-9);
        assert_eq!(betti_curve(&bc, 2, &[1.9, 2.1]), vec![1, 0]);
    }

    #[test]
    fn empty_filtration() {
        let cloud =
            crate::ingest::PointCloud::new(vec![], vec![], crate::ingest::Source::Inline).unwrap();
        let f = build_rips_filtration(&cloud, RipsParams::new(2, 1.0)).unwrap();
        let bc = compute_barcodes(&f);
        assert!(bc.bars.is_empty());
        assert_eq!(betti_curve(&bc, 0, &[0.0, 1.0]), vec![0, 0]);
    }

    #[test]
    fn csv_and_json_round_trip() {
        let bc = octagon();
        let csv = bc.to_csv();
        assert!(csv.contains(",inf\n"));
        assert_eq!(Barcode::from_csv(&csv, bc.max_dim).unwrap(), bc);
        let json = serde_json::to_string(&bc).unwrap();
        assert!(json.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<Barcode>(&json).unwrap(), bc);
        assert!(Barcode::from_csv("dim,birth,death\n0,2,1\n", 0).is_err());
        assert!(Barcode::from_csv("0,nan,1\n", 0).is_err());
    }
}
