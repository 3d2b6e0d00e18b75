//! Persistent combinatorial Laplacians and their spectra.
//!
//! For a pair K_i ⊆ K_j the up-part is ∂^{i,j}_{k+1}(∂^{i,j}_{k+1})ᵀ, where
//! ∂^{i,j}_{k+1} is ∂^j_{k+1} restricted to the chains whose boundary lies in
//! C_k(K_i). Split the rows of ∂^j_{k+1} into the k-simplices of K_i (block A)
//! and the rest (block B). The admissible chains are null(B), so with P the
//! orthogonal projector onto row(B),
//!
//!   L_up = A (I − P) Aᵀ = A Aᵀ − (A Q)(A Q)ᵀ,
//!
//! where Q is an orthonormal basis of row(B). This never forms null(B), whose
//! dimension is close to the (k+1)-simplex count. Only columns where B is
//! nonzero enter Q, so Q stays small when lags are short.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{snapshot, ComplexSnapshot, Filtration, Simplex};
use crate::error::{Error, Result};
use crate::linalg::{self, boundary_matrix, Field};

/// Singular values below this are treated as zero when splitting block B.
pub const SVD_ZERO: f64 = 1e-10;
/// Largest operator size solved by a dense eigendecomposition.
pub const DENSE_LIMIT: usize = 3000;
/// Eigenvalues requested from the iterative solver by default.
pub const DEFAULT_ITERATIVE_COUNT: usize = 6;

/// ∂^{i,j}_{k+1} with an explicit orthonormal basis of C^{i,j}_{k+1}.
#[derive(Clone, Debug)]
pub struct PersistentBoundary {
    /// Rows: k-simplices of K_i. Columns: basis vectors.
    pub matrix: DMatrix<f64>,
    /// Basis of C^{i,j}_{k+1} in the (k+1)-simplex coordinates of K_j.
    pub basis: DMatrix<f64>,
    pub k: usize,
    pub scales: (f64, f64),
    pub rows: Vec<Simplex>,
    pub cols: Vec<Simplex>,
}

/// Row indices of K_j's k-simplices that also lie in K_i, as positions in K_i.
fn row_map(ki: &ComplexSnapshot, kj: &ComplexSnapshot, k: usize) -> Vec<Option<usize>> {
    kj.simplices(k).iter().map(|s| ki.position(s)).collect()
}

fn check_pair(ki: &ComplexSnapshot, kj: &ComplexSnapshot) -> Result<()> {
    if ki.scale() > kj.scale() {
        return Err(Error::InvalidArgument(format!(
            "scale pair must be ordered, got ({}, {})",
            ki.scale(),
            kj.scale()
        )));
    }
    if let Some(s) = ki.iter().find(|s| !kj.contains(s)) {
        return Err(Error::NotIncluded(format!(
            "{s} is missing from the later complex"
        )));
    }
    Ok(())
}

/// Null-space basis of `b` (orthonormal columns) from a full SVD, padding rows
/// so that V is square.
fn null_space(b: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = b.shape();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    let mut padded = DMatrix::zeros(r.max(c), c);
    padded.rows_mut(0, r).copy_from(b);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let keep: Vec<usize> = (0..c)
        .filter(|&i| svd.singular_values[i] < SVD_ZERO)
        .collect();
    DMatrix::from_fn(c, keep.len(), |row, col| v_t[(keep[col], row)])
}

/// Orthonormal basis of the row space of `b` (columns of the result).
fn row_space(b: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = b.shape();
    if r == 0 || c == 0 {
        return DMatrix::zeros(c, 0);
    }
    let svd = b.transpose().svd(true, false);
    let u = svd.u.expect("requested U");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] >= SVD_ZERO)
        .collect();
    DMatrix::from_fn(c, keep.len(), |row, col| u[(row, keep[col])])
}

pub fn persistent_boundary_between(
    ki: &ComplexSnapshot,
    kj: &ComplexSnapshot,
    k: usize,
) -> Result<PersistentBoundary> {
    check_pair(ki, kj)?;
    let d = boundary_matrix(kj, k + 1, Field::Rational, false);
    let map = row_map(ki, kj, k);
    let n_i = ki.count(k);
    let ncols = d.cols.len();
    let outside: Vec<usize> = (0..map.len()).filter(|&r| map[r].is_none()).collect();

    let mut a = DMatrix::zeros(n_i, ncols);
    let mut b = DMatrix::zeros(outside.len(), ncols);
    for c in 0..ncols {
        for &(r, v) in d.matrix.column(c) {
            match map[r] {
                Some(ri) => a[(ri, c)] = v as f64,
                None => {
                    let rb = outside.binary_search(&r).expect("outside rows are indexed");
                    b[(rb, c)] = v as f64;
                }
            }
        }
    }
    let basis = if outside.is_empty() {
        DMatrix::identity(ncols, ncols)
    } else {
        null_space(&b)
    };
    Ok(PersistentBoundary {
        matrix: &a * &basis,
        basis,
        k,
        scales: (ki.scale(), kj.scale()),
        rows: ki.simplices(k).to_vec(),
        cols: d.cols,
    })
}

pub fn persistent_boundary(
    filtration: &Filtration,
    k: usize,
    eps_i: f64,
    eps_j: f64,
) -> Result<PersistentBoundary> {
    persistent_boundary_between(
        &snapshot(filtration, eps_i),
        &snapshot(filtration, eps_j),
        k,
    )
}

/// L^{i,j}_k = S + M Mᵀ-correction, stored sparsely.
///
/// `sparse` holds A Aᵀ + ∂_kᵀ ∂_k (integer-valued, exactly symmetric) and
/// `correction`, when present, is A Q so that L = sparse − (A Q)(A Q)ᵀ.
#[derive(Clone, Debug)]
pub struct LaplacianMatrix {
    pub k: usize,
    pub scales: (f64, f64),
    pub simplices: Vec<Simplex>,
    sparse: Vec<Vec<(usize, f64)>>,
    correction: Option<DMatrix<f64>>,
    /// Kernel dimension from exact ranks; filled only for operators above [`DENSE_LIMIT`].
    exact_harmonic: Option<usize>,
}

impl LaplacianMatrix {
    pub fn size(&self) -> usize {
        self.sparse.len()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for (r, row) in self.sparse.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] = v;
            }
        }
        if let Some(aq) = &self.correction {
            let g = aq * aq.transpose();
            // (g + gᵀ)/2 is exactly symmetric in floating point
            for r in 0..n {
                for c in 0..n {
                    m[(r, c)] -= 0.5 * (g[(r, c)] + g[(c, r)]);
                }
            }
        }
        m
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::from_iterator(
            self.size(),
            self.sparse
                .iter()
                .map(|row| row.iter().map(|&(c, v)| v * x[c]).sum::<f64>()),
        );
        if let Some(aq) = &self.correction {
            let t = aq.tr_mul(x);
            y -= aq * t;
        }
        y
    }

    /// Gershgorin upper bound on the spectrum.
    pub fn gershgorin_bound(&self) -> f64 {
        let mut bound: f64 = 0.0;
        let row_corr: Vec<f64> = match &self.correction {
            Some(aq) => {
                // |(A Q)(A Q)ᵀ| row sums bounded by ‖row‖ · Σ‖rows‖
                let norms: Vec<f64> = (0..aq.nrows()).map(|r| aq.row(r).norm()).collect();
                let total: f64 = norms.iter().sum();
                norms.iter().map(|n| n * total).collect()
            }
            None => vec![0.0; self.size()],
        };
        for (r, row) in self.sparse.iter().enumerate() {
            let s: f64 = row.iter().map(|(_, v)| v.abs()).sum();
            bound = bound.max(s + row_corr[r]);
        }
        bound
    }

    /// Default zero tolerance: 1e-8 · max(1, spectral bound).
    pub fn default_zero_tol(&self) -> f64 {
        1e-8 * self.gershgorin_bound().max(1.0)
    }
}

fn add_outer(rows: &mut [std::collections::BTreeMap<usize, f64>], v: &[(usize, f64)]) {
    for &(r, a) in v {
        for &(c, b) in v {
            *rows[r].entry(c).or_insert(0.0) += a * b;
        }
    }
}

pub fn persistent_laplacian_between(
    ki: &ComplexSnapshot,
    kj: &ComplexSnapshot,
    k: usize,
) -> Result<LaplacianMatrix> {
    check_pair(ki, kj)?;
    let n = ki.count(k);
    let mut acc = vec![std::collections::BTreeMap::new(); n];

    // up-part
    let up = boundary_matrix(kj, k + 1, Field::Rational, false);
    let map = row_map(ki, kj, k);
    let mut touched: Vec<usize> = Vec::new();
    let mut outside_rows: Vec<usize> = Vec::new();
    for c in 0..up.cols.len() {
        let col = up.matrix.column(c);
        let a_part: Vec<(usize, f64)> = col
            .iter()
            .filter_map(|&(r, v)| map[r].map(|ri| (ri, v as f64)))
            .collect();
        add_outer(&mut acc, &a_part);
        if a_part.len() < col.len() {
            touched.push(c);
            outside_rows.extend(
                col.iter()
                    .filter(|(r, _)| map[*r].is_none())
                    .map(|(r, _)| *r),
            );
        }
    }
    let mut correction = None;
    if !touched.is_empty() {
        outside_rows.sort_unstable();
        outside_rows.dedup();
        let mut b = DMatrix::zeros(outside_rows.len(), touched.len());
        let mut a = DMatrix::zeros(n, touched.len());
        for (tc, &c) in touched.iter().enumerate() {
            for &(r, v) in up.matrix.column(c) {
                match map[r] {
                    Some(ri) => a[(ri, tc)] = v as f64,
                    None => b[(outside_rows.binary_search(&r).unwrap(), tc)] = v as f64,
                }
            }
        }
        let q = row_space(&b);
        if q.ncols() > 0 {
            correction = Some(a * q);
        }
    }

    // down-part ∂_kᵀ ∂_k, grouped by (k−1)-simplex
    if k > 0 {
        let down = boundary_matrix(ki, k, Field::Rational, false);
        let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); down.matrix.nrows()];
        for c in 0..down.cols.len() {
            for &(r, v) in down.matrix.column(c) {
                by_row[r].push((c, v as f64));
            }
        }
        for v in &by_row {
            add_outer(&mut acc, v);
        }
    }

    let sparse = acc
        .into_iter()
        .map(|row| row.into_iter().filter(|(_, v)| *v != 0.0).collect())
        .collect();
    let mut lap = LaplacianMatrix {
        k,
        scales: (ki.scale(), kj.scale()),
        simplices: ki.simplices(k).to_vec(),
        sparse,
        correction,
        exact_harmonic: None,
    };
    if n > DENSE_LIMIT {
        lap.exact_harmonic = Some(exact_harmonic_dim(ki, kj, k));
    }
    Ok(lap)
}

/// N_k − (rank ∂^j_{k+1} − rank B) − rank ∂^i_k over GF(2).
fn exact_harmonic_dim(ki: &ComplexSnapshot, kj: &ComplexSnapshot, k: usize) -> usize {
    let up = boundary_matrix(kj, k + 1, Field::Gf2, false);
    let outside = up.matrix.select_rows(|r| !ki.contains(&up.rows[r]));
    let up_rank = up.rank() - linalg::rank(&outside, Field::Gf2);
    let down_rank = if k == 0 {
        0
    } else {
        boundary_matrix(ki, k, Field::Gf2, false).rank()
    };
    ki.count(k) - up_rank - down_rank
}

pub fn persistent_laplacian(
    filtration: &Filtration,
    k: usize,
    eps_i: f64,
    eps_j: f64,
) -> Result<LaplacianMatrix> {
    persistent_laplacian_between(
        &snapshot(filtration, eps_i),
        &snapshot(filtration, eps_j),
        k,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    /// Ascending. All eigenvalues for dense solves, the smallest few otherwise.
    pub eigenvalues: Vec<f64>,
    pub harmonic_dim: usize,
    pub lambda_min_positive: Option<f64>,
    pub dimension: usize,
    /// True when `eigenvalues` is a partial (iterative) spectrum.
    pub partial: bool,
}

impl SpectrumSummary {
    fn empty() -> Self {
        SpectrumSummary {
            eigenvalues: Vec::new(),
            harmonic_dim: 0,
            lambda_min_positive: None,
            dimension: 0,
            partial: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub dense_limit: usize,
    pub iterative_count: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            dense_limit: DENSE_LIMIT,
            iterative_count: DEFAULT_ITERATIVE_COUNT,
            max_iterations: 100_000,
            seed: 0x5eed,
        }
    }
}

pub fn spectrum(lap: &LaplacianMatrix, zero_tol: f64) -> Result<SpectrumSummary> {
    spectrum_with(lap, zero_tol, &SolverOptions::default())
}

pub fn spectrum_with(
    lap: &LaplacianMatrix,
    zero_tol: f64,
    options: &SolverOptions,
) -> Result<SpectrumSummary> {
    if !(zero_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "zero_tol must be positive, got {zero_tol}"
        )));
    }
    let n = lap.size();
    if n == 0 {
        return Ok(SpectrumSummary::empty());
    }
    let fail = |message: String| Error::Eigensolver {
        k: lap.k,
        eps_i: lap.scales.0,
        eps_j: lap.scales.1,
        message,
    };
    if n <= options.dense_limit {
        let eig = SymmetricEigen::try_new(lap.dense(), 1e-14, options.max_iterations)
            .ok_or_else(|| fail("dense eigensolver did not converge".into()))?;
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        let harmonic_dim = values.iter().filter(|&&v| v < zero_tol).count();
        return Ok(SpectrumSummary {
            lambda_min_positive: values.get(harmonic_dim).copied(),
            eigenvalues: values,
            harmonic_dim,
            dimension: n,
            partial: false,
        });
    }

    let ritz = lanczos_smallest(lap, options, zero_tol).map_err(fail)?;
    let harmonic_dim = match lap.exact_harmonic {
        Some(h) => h,
        None => exact_harmonic_from_lap(lap)?,
    };
    let lambda_min_positive = if harmonic_dim == n {
        None
    } else {
        ritz.iter().copied().find(|&v| v >= zero_tol)
    };
    Ok(SpectrumSummary {
        eigenvalues: ritz,
        harmonic_dim,
        lambda_min_positive,
        dimension: n,
        partial: true,
    })
}

fn exact_harmonic_from_lap(lap: &LaplacianMatrix) -> Result<usize> {
    Err(Error::Eigensolver {
        k: lap.k,
        eps_i: lap.scales.0,
        eps_j: lap.scales.1,
        message: "iterative path needs exact ranks; build the operator above the dense limit \
                  or lower dense_limit only for testing eigenvalues"
            .into(),
    })
}

/// Smallest Ritz values of a PSD operator by Lanczos with full
/// reorthogonalization, restarting on a fresh random direction whenever the
/// Krylov space becomes invariant so that repeated eigenvalues are found.
fn lanczos_smallest(
    lap: &LaplacianMatrix,
    options: &SolverOptions,
    zero_tol: f64,
) -> std::result::Result<Vec<f64>, String> {
    let n = lap.size();
    let want = options.iterative_count.min(n).max(1);
    let max_steps = n.min(options.max_iterations);
    let norm = lap.gershgorin_bound().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new(); // beta[i] couples i and i+1

    let random_orthogonal =
        |basis: &[DVector<f64>], rng: &mut ChaCha8Rng| -> Option<DVector<f64>> {
            for _ in 0..5 {
                let mut v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
                for _ in 0..2 {
                    for b in basis {
                        let p = b.dot(&v);
                        v.axpy(-p, b, 1.0);
                    }
                }
                let nv = v.norm();
                if nv > 1e-8 {
                    return Some(v / nv);
                }
            }
            None
        };

    let mut v = random_orthogonal(&basis, &mut rng).ok_or("could not start Lanczos")?;
    let mut last: Vec<f64> = Vec::new();
    let check_every = 20;
    while basis.len() < max_steps {
        let mut w = lap.apply(&v);
        let a = v.dot(&w);
        basis.push(v.clone());
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let p = b.dot(&w);
                w.axpy(-p, b, 1.0);
            }
        }
        let b = w.norm();
        let m = basis.len();
        let converged_check = m.is_multiple_of(check_every) || m == max_steps;
        if converged_check {
            let (vals, resid) = tridiagonal_ritz(&alpha, &beta, b);
            let tol = 1e-10 * norm;
            let mut idx: Vec<usize> = (0..vals.len()).collect();
            idx.sort_by(|&x, &y| vals[x].total_cmp(&vals[y]));
            let head: Vec<usize> = idx.iter().copied().take(want).collect();
            let done = head.len() == want
                && head.iter().all(|&i| resid[i] < tol)
                && head.iter().any(|&i| vals[i] >= zero_tol);
            last = head.iter().map(|&i| vals[i]).collect();
            if done {
                return Ok(last);
            }
        }
        if m == max_steps {
            break;
        }
        if b < 1e-10 * norm {
            // invariant subspace: continue in a fresh orthogonal direction
            beta.push(0.0);
            match random_orthogonal(&basis, &mut rng) {
                Some(next) => v = next,
                None => break,
            }
        } else {
            beta.push(b);
            v = w / b;
        }
    }
    if basis.len() == n || !last.is_empty() {
        if basis.len() == n {
            let (vals, _) = tridiagonal_ritz(&alpha, &beta, 0.0);
            let mut vals = vals;
            vals.sort_by(f64::total_cmp);
            vals.truncate(want);
            return Ok(vals);
        }
        return Err(format!(
            "Lanczos did not converge after {} steps",
            basis.len()
        ));
    }
    Err("Lanczos produced no Ritz values".into())
}

/// Ritz values of the Lanczos tridiagonal and their residual bounds |β_m s_{m,i}|.
fn tridiagonal_ritz(alpha: &[f64], beta: &[f64], next_beta: f64) -> (Vec<f64>, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |r, c| {
        if r == c {
            alpha[r]
        } else if r + 1 == c {
            beta[r]
        } else if c + 1 == r {
            beta[c]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let resid = (0..m)
        .map(|i| (next_beta * eig.eigenvectors[(m - 1, i)]).abs())
        .collect();
    (eig.eigenvalues.iter().copied().collect(), resid)
}

/// Spectral summaries of L^{(ε, ε+lag)}_k along a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectraCurves {
    pub grid: Vec<f64>,
    pub lag: f64,
    /// `summaries[k][g]`.
    pub summaries: Vec<Vec<SpectrumSummary>>,
}

impl SpectraCurves {
    /// `scale,k,harmonic_dim,lambda_min_positive`; an absent λ is an empty field.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scale,k,harmonic_dim,lambda_min_positive\n");
        for (g, eps) in self.grid.iter().enumerate() {
            for (k, per_k) in self.summaries.iter().enumerate() {
                let s = &per_k[g];
                let lambda = s
                    .lambda_min_positive
                    .map(|l| format!("{l}"))
                    .unwrap_or_default();
                out.push_str(&format!("{eps},{k},{},{lambda}\n", s.harmonic_dim));
            }
        }
        out
    }

    pub fn harmonic_curve(&self, k: usize) -> Vec<usize> {
        self.summaries[k].iter().map(|s| s.harmonic_dim).collect()
    }

    pub fn lambda_curve(&self, k: usize) -> Vec<Option<f64>> {
        self.summaries[k]
            .iter()
            .map(|s| s.lambda_min_positive)
            .collect()
    }
}

/// `zero_tol = None` uses each operator's default tolerance.
pub fn spectra_curves(
    filtration: &Filtration,
    k_max: usize,
    grid: &[f64],
    lag: f64,
    zero_tol: Option<f64>,
) -> Result<SpectraCurves> {
    spectra_curves_with(
        filtration,
        k_max,
        grid,
        lag,
        zero_tol,
        &SolverOptions::default(),
    )
}

pub fn spectra_curves_with(
    filtration: &Filtration,
    k_max: usize,
    grid: &[f64],
    lag: f64,
    zero_tol: Option<f64>,
    options: &SolverOptions,
) -> Result<SpectraCurves> {
    if !(lag >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lag must be nonnegative, got {lag}"
        )));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidArgument("grid must be ascending".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..=k_max)
        .flat_map(|k| (0..grid.len()).map(move |g| (k, g)))
        .collect();
    let snaps: Vec<(ComplexSnapshot, ComplexSnapshot)> = grid
        .par_iter()
        .map(|&eps| (snapshot(filtration, eps), snapshot(filtration, eps + lag)))
        .collect();
    let results: Vec<Result<SpectrumSummary>> = jobs
        .par_iter()
        .map(|&(k, g)| {
            let (ki, kj) = &snaps[g];
            let lap = persistent_laplacian_between(ki, kj, k)?;
            let tol = zero_tol.unwrap_or_else(|| lap.default_zero_tol());
            spectrum_with(&lap, tol, options)
        })
        .collect();
    let mut summaries = vec![Vec::with_capacity(grid.len()); k_max + 1];
    for ((k, _), r) in jobs.into_iter().zip(results) {
        summaries[k].push(r?);
    }
    Ok(SpectraCurves {
        grid: grid.to_vec(),
        lag,
        summaries,
    })
}

/// Eigenvalue lists keyed by k and grid scale, for the JSON sidecar.
pub fn eigenvalue_sidecar(curves: &SpectraCurves) -> serde_json::Value {
    serde_json::json!({
        "grid": curves.grid,
        "lag": curves.lag,
        "eigenvalues": curves
            .summaries
            .iter()
            .map(|per_k| per_k.iter().map(|s| s.eigenvalues.clone()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}
