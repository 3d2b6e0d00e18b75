//! Persistent topological, spectral and Stanley–Reisner invariants of
//! Vietoris–Rips filtrations of molecular point clouds.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod complex;
pub mod error;
pub mod ingest;
pub mod linalg;
pub mod persistence;
pub mod spectral;

pub use algebra::{
    facet_barcodes, graded_betti, minimal_nonfaces, persistent_fh_vectors, persistent_graded_betti,
    GradedBettiTable, HochsterOptions, PersistentGradedBettiTable,
};
pub use complex::{
    build_rips_filtration, scale_grid, snapshot, ComplexSnapshot, FVector, Filtration,
    FiltrationEntry, HVector, RipsParams, Simplex, Vertex,
};
pub use error::{Error, Result};
pub use ingest::{parse_pdb, parse_xyz, AtomSelection, PointCloud, Source};
pub use linalg::{
    boundary_matrix, induced_image_rank, rank, reduced_betti, Field, HomologySummary,
};
pub use persistence::{betti_curve, compute_barcodes, persistent_betti, Bar, Barcode};
pub use spectral::{
    persistent_laplacian, spectra_curves, spectrum, LaplacianMatrix, SpectrumSummary,
};
