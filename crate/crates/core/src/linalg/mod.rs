//! Boundary matrices and exact ranks over GF(2) and ℚ.
//!
//! This is the ground truth the persistence, spectral and Stanley–Reisner
//! code is checked against, and the engine inside Hochster's formula.

pub mod gf2;
pub mod rational;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::complex::{ComplexSnapshot, Simplex};
use crate::error::{Error, Result};

/// Coefficient field for homology.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    #[default]
    Gf2,
    Rational,
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gf2" | "z2" => Ok(Field::Gf2),
            "rational" | "q" => Ok(Field::Rational),
            other => Err(Error::InvalidArgument(format!("unknown field {other:?}"))),
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Field::Gf2 => "gf2",
            Field::Rational => "rational",
        })
    }
}

/// Sparse integer matrix stored by columns, entries sorted by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            columns: vec![Vec::new(); ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            columns: (0..n).map(|i| vec![(i, 1)]).collect(),
        }
    }

    /// Builds from row-major dense data.
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let columns = (0..ncols)
            .map(|c| {
                (0..nrows)
                    .filter(|&r| rows[r][c] != 0)
                    .map(|r| (r, rows[r][c]))
                    .collect()
            })
            .collect();
        SparseMatrix { nrows, columns }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, c: usize) -> &[(usize, i64)] {
        &self.columns[c]
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.columns[c]
            .binary_search_by_key(&r, |e| e.0)
            .map_or(0, |i| self.columns[c][i].1)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Keeps only the rows where `keep(row)` is true, renumbering them densely.
    pub fn select_rows(&self, keep: impl Fn(usize) -> bool) -> SparseMatrix {
        let mut new_index = vec![usize::MAX; self.nrows];
        let mut next = 0;
        for (r, slot) in new_index.iter_mut().enumerate() {
            if keep(r) {
                *slot = next;
                next += 1;
            }
        }
        let columns = self
            .columns
            .iter()
            .map(|col| {
                col.iter()
                    .filter(|(r, _)| new_index[*r] != usize::MAX)
                    .map(|&(r, v)| (new_index[r], v))
                    .collect()
            })
            .collect();
        SparseMatrix {
            nrows: next,
            columns,
        }
    }

    /// Integer product `self · other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), other.nrows, "dimension mismatch");
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut acc: std::collections::BTreeMap<usize, i64> = Default::default();
                for &(k, b) in col {
                    for &(r, a) in &self.columns[k] {
                        *acc.entry(r).or_default() += a * b;
                    }
                }
                acc.into_iter().filter(|(_, v)| *v != 0).collect()
            })
            .collect();
        SparseMatrix {
            nrows: self.nrows,
            columns,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(|(_, v)| *v == 0))
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols());
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                m[(r, c)] = v as f64;
            }
        }
        m
    }

    /// One `row col value` line per nonzero entry, after a `rows cols nnz` header.
    pub fn to_triplets(&self) -> String {
        let mut out = format!("{} {} {}\n", self.nrows, self.ncols(), self.nnz());
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                let _ = writeln!(out, "{r} {c} {v}");
            }
        }
        out
    }
}

/// Rank over the given field.
pub fn rank(m: &SparseMatrix, field: Field) -> usize {
    match field {
        Field::Gf2 => {
            let cols: Vec<Vec<usize>> = m
                .columns
                .iter()
                .map(|c| {
                    c.iter()
                        .filter(|(_, v)| v % 2 != 0)
                        .map(|(r, _)| *r)
                        .collect()
                })
                .collect();
            // eliminate along the shorter side
            if m.nrows <= cols.len() {
                gf2::rank_of_columns(m.nrows, cols.iter().map(Vec::as_slice))
            } else {
                let mut rows: Vec<Vec<usize>> = vec![Vec::new(); m.nrows];
                for (c, col) in cols.iter().enumerate() {
                    for &r in col {
                        rows[r].push(c);
                    }
                }
                gf2::rank_of_columns(cols.len(), rows.iter().map(Vec::as_slice))
            }
        }
        Field::Rational => rational::rank_of_columns(m.nrows, m.columns.iter().map(Vec::as_slice)),
    }
}

/// ∂_k of a snapshot with rows and columns in canonical (lexicographic) order.
///
/// Signs follow increasing vertex order: the face omitting the i-th vertex
/// gets (−1)^i. Over GF(2) the signs are kept; only their parity matters.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMatrix {
    pub k: usize,
    pub field: Field,
    pub augmented: bool,
    /// (k−1)-simplices; empty for k = 0 (the augmentation row, if any, has no simplex).
    pub rows: Vec<Simplex>,
    pub cols: Vec<Simplex>,
    pub matrix: SparseMatrix,
}

impl BoundaryMatrix {
    pub fn rank(&self) -> usize {
        rank(&self.matrix, self.field)
    }
}

pub fn boundary_matrix(
    snapshot: &ComplexSnapshot,
    k: usize,
    field: Field,
    augmented: bool,
) -> BoundaryMatrix {
    let cols = snapshot.simplices(k).to_vec();
    if k == 0 {
        let nrows = usize::from(augmented);
        let columns = if augmented {
            vec![vec![(0, 1)]; cols.len()]
        } else {
            vec![Vec::new(); cols.len()]
        };
        return BoundaryMatrix {
            k,
            field,
            augmented,
            rows: Vec::new(),
            cols,
            matrix: SparseMatrix { nrows, columns },
        };
    }
    let rows = snapshot.simplices(k - 1).to_vec();
    let columns = cols
        .iter()
        .map(|s| {
            let mut col: Vec<(usize, i64)> = s
                .faces()
                .enumerate()
                .map(|(i, f)| {
                    let r = rows
                        .binary_search(&f)
                        .expect("snapshot is closed under faces");
                    (r, if i % 2 == 0 { 1 } else { -1 })
                })
                .collect();
            col.sort_unstable_by_key(|e| e.0);
            col
        })
        .collect();
    BoundaryMatrix {
        k,
        field,
        augmented: false,
        matrix: SparseMatrix {
            nrows: rows.len(),
            columns,
        },
        rows,
        cols,
    }
}

/// Reduced Betti numbers, indexed from k = −1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologySummary {
    pub reduced_betti: Vec<usize>,
    pub field: Field,
}

impl HomologySummary {
    /// dim H̃_k, zero outside the stored range.
    pub fn get(&self, k: isize) -> usize {
        usize::try_from(k + 1)
            .ok()
            .and_then(|i| self.reduced_betti.get(i).copied())
            .unwrap_or(0)
    }

    /// Unreduced β_k (adds one at k = 0 for a nonempty complex).
    pub fn unreduced(&self, k: usize) -> usize {
        let b = self.get(k as isize);
        if k == 0 && self.get(-1) == 0 {
            b + 1
        } else {
            b
        }
    }
}

/// Ranks of ∂_1 … ∂_{dim}; entry k holds rank ∂_k (entry 0 is the augmentation).
fn boundary_ranks(snapshot: &ComplexSnapshot, field: Field) -> Vec<usize> {
    let Some(dim) = snapshot.dim() else {
        return Vec::new();
    };
    let mut ranks = vec![1];
    ranks.extend((1..=dim).map(|k| boundary_matrix(snapshot, k, field, false).rank()));
    ranks
}

pub fn reduced_betti(snapshot: &ComplexSnapshot, field: Field) -> HomologySummary {
    let Some(dim) = snapshot.dim() else {
        return HomologySummary {
            reduced_betti: vec![1],
            field,
        };
    };
    let ranks = boundary_ranks(snapshot, field);
    let mut reduced_betti = vec![0];
    for k in 0..=dim {
        let next = ranks.get(k + 1).copied().unwrap_or(0);
        reduced_betti.push(snapshot.count(k) - ranks[k] - next);
    }
    HomologySummary {
        reduced_betti,
        field,
    }
}

/// dim of the image of H̃_k(A) → H̃_k(B) induced by inclusion A ⊆ B.
///
/// Uses dim im = dim Z̃_k(A) − dim(B_k(B) ∩ C_k(A)), where the intersection
/// has dimension rank ∂^B_{k+1} minus the rank of its rows outside A.
pub fn induced_image_rank(
    a: &ComplexSnapshot,
    b: &ComplexSnapshot,
    k: usize,
    field: Field,
) -> Result<usize> {
    if let Some(s) = a.iter().find(|s| !b.contains(s)) {
        return Err(Error::NotIncluded(format!(
            "simplex {s} of the source is missing from the target"
        )));
    }
    let n_k = a.count(k);
    if n_k == 0 {
        return Ok(0);
    }
    let rank_a = if k == 0 {
        1
    } else {
        boundary_matrix(a, k, field, false).rank()
    };
    let cycles = n_k - rank_a;
    if cycles == 0 {
        return Ok(0);
    }
    let up = boundary_matrix(b, k + 1, field, false);
    if up.cols.is_empty() {
        return Ok(cycles);
    }
    let full = up.rank();
    let outside = up.matrix.select_rows(|r| !a.contains(&up.rows[r]));
    let boundaries_in_a = full - rank(&outside, field);
    Ok(cycles - boundaries_in_a)
}

/// Dimensions where GF(2) and rational Betti numbers differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionDiagnostic {
    pub dims: Vec<isize>,
    pub gf2: HomologySummary,
    pub rational: HomologySummary,
}

/// Compares both fields; `None` when they agree (the torsion-free case).
pub fn torsion_diagnostic(snapshot: &ComplexSnapshot) -> Option<TorsionDiagnostic> {
    let gf2 = reduced_betti(snapshot, Field::Gf2);
    let rational = reduced_betti(snapshot, Field::Rational);
    if gf2.reduced_betti == rational.reduced_betti {
        return None;
    }
    let len = gf2.reduced_betti.len().max(rational.reduced_betti.len()) as isize;
    let dims = (-1..len - 1)
        .filter(|&k| gf2.get(k) != rational.get(k))
        .collect();
    log::warn!("GF(2) and rational Betti numbers disagree in dims {dims:?}");
    Some(TorsionDiagnostic {
        dims,
        gf2,
        rational,
    })
}
