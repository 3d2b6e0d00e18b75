//! Cross-module checks on the shipped fixtures.

mod common;

use common::*;
use persinv::algebra::{
    facet_barcodes, facet_persistence_betti, graded_betti, hochster_summand, minimal_nonfaces,
    HochsterOptions,
};
use persinv::complex::{scale_grid, snapshot, ComplexSnapshot, Filtration};
use persinv::linalg::{boundary_matrix, induced_image_rank, rank, reduced_betti, Field};
use persinv::persistence::{compute_barcodes, persistent_betti};
use persinv::spectral::{persistent_boundary, persistent_laplacian, spectra_curves, spectrum};

fn fixtures() -> Vec<(&'static str, Filtration, f64)> {
    vec![
        ("octagon", octagon(), 4.0),
        ("octahedron", octahedron(), 3.0),
        ("C20", c20(), 4.0),
    ]
}

fn small_fixtures() -> Vec<(&'static str, Filtration, f64)> {
    vec![
        ("octagon", octagon(), 4.0),
        ("octahedron", octahedron(), 3.0),
    ]
}

#[test]
fn boundary_squares_to_zero() {
    for (name, f, r) in fixtures() {
        let snap = snapshot(&f, r);
        for k in 1..=f.max_dim() {
            let a = boundary_matrix(&snap, k, Field::Rational, false).matrix;
            let b = boundary_matrix(&snap, k + 1, Field::Rational, false).matrix;
            assert!(a.mul(&b).is_zero(), "{name} k={k}");
        }
    }
}

#[test]
fn connected_graph_rank() {
    for (name, f, r) in fixtures() {
        let snap = snapshot(&f, r);
        let d1 = boundary_matrix(&snap, 1, Field::Gf2, false);
        for field in [Field::Gf2, Field::Rational] {
            assert_eq!(rank(&d1.matrix, field), snap.count(0) - 1, "{name} {field}");
        }
    }
}

#[test]
fn barcode_matches_oracle_betti() {
    for (name, f, r) in fixtures() {
        let bc = compute_barcodes(&f);
        for eps in scale_grid(0.0, r, 0.1).unwrap() {
            let snap = snapshot(&f, eps);
            let h = reduced_betti(&snap, Field::Gf2);
            for k in 0..=f.max_dim() {
                assert_eq!(
                    persistent_betti(&bc, k, eps, eps),
                    h.unreduced(k),
                    "{name} k={k} eps={eps}"
                );
            }
        }
    }
}

#[test]
fn fields_agree_on_fixtures() {
    for (name, f, r) in fixtures() {
        for eps in scale_grid(0.0, r, 0.5).unwrap() {
            let snap = snapshot(&f, eps);
            assert_eq!(
                reduced_betti(&snap, Field::Gf2).reduced_betti,
                reduced_betti(&snap, Field::Rational).reduced_betti,
                "{name} eps={eps}"
            );
        }
    }
}

#[test]
fn pair_equivalence() {
    for (name, f, r) in fixtures() {
        let bc = compute_barcodes(&f);
        let step = if name == "C20" { 0.4 } else { 0.2 };
        let grid = scale_grid(0.0, r, step).unwrap();
        let snaps: Vec<ComplexSnapshot> = grid.iter().map(|&e| snapshot(&f, e)).collect();
        for a in 0..grid.len() {
            for b in a..grid.len() {
                for k in 0..=2 {
                    let mut image =
                        induced_image_rank(&snaps[a], &snaps[b], k, Field::Gf2).unwrap();
                    if k == 0 && !snaps[a].is_empty() {
                        image += 1;
                    }
                    assert_eq!(
                        persistent_betti(&bc, k, grid[a], grid[b]),
                        image,
                        "{name} k={k} ({}, {})",
                        grid[a],
                        grid[b]
                    );
                }
            }
        }
    }
}

#[test]
fn functoriality_sandwich() {
    let f = octagon();
    let grid = scale_grid(0.0, 4.0, 0.5).unwrap();
    let snaps: Vec<ComplexSnapshot> = grid.iter().map(|&e| snapshot(&f, e)).collect();
    for a in 0..snaps.len() {
        for b in a..snaps.len() {
            for c in b..snaps.len() {
                for k in 0..=2 {
                    let ac = induced_image_rank(&snaps[a], &snaps[c], k, Field::Gf2).unwrap();
                    let ab = induced_image_rank(&snaps[a], &snaps[b], k, Field::Gf2).unwrap();
                    let bc = induced_image_rank(&snaps[b], &snaps[c], k, Field::Gf2).unwrap();
                    assert!(ac <= ab.min(bc));
                }
            }
        }
    }
}

#[test]
fn equal_scales_reduce_to_plain_laplacian() {
    for (name, f, r) in small_fixtures() {
        for eps in scale_grid(0.0, r, 0.25).unwrap() {
            let snap = snapshot(&f, eps);
            for k in 0..=2 {
                let lap = persistent_laplacian(&f, k, eps, eps).unwrap().dense();
                let up = boundary_matrix(&snap, k + 1, Field::Rational, false)
                    .matrix
                    .to_dense();
                let mut expected = &up * up.transpose();
                if k > 0 {
                    let down = boundary_matrix(&snap, k, Field::Rational, false)
                        .matrix
                        .to_dense();
                    expected += down.transpose() * down;
                }
                assert!((lap - expected).amax() <= 1e-12, "{name} k={k} eps={eps}");
            }
        }
    }
}

#[test]
fn hodge_dimension_count() {
    for (name, f, r) in small_fixtures() {
        let grid = scale_grid(0.0, r, 0.25).unwrap();
        for (a, &ei) in grid.iter().enumerate() {
            for &ej in &grid[a..] {
                for k in 0..=2 {
                    let ki = snapshot(&f, ei);
                    let pb = persistent_boundary(&f, k, ei, ej).unwrap();
                    // basis columns are orthonormal
                    let gram = pb.basis.transpose() * &pb.basis;
                    let eye = nalgebra::DMatrix::<f64>::identity(gram.nrows(), gram.ncols());
                    assert!((gram - eye).amax() < 1e-9, "{name} basis ({ei}, {ej})");
                    let up_rank = if pb.matrix.is_empty() {
                        0
                    } else {
                        pb.matrix.rank(1e-8)
                    };
                    let down_rank = if k == 0 {
                        0
                    } else {
                        boundary_matrix(&ki, k, Field::Gf2, false).rank()
                    };
                    let lap = persistent_laplacian(&f, k, ei, ej).unwrap();
                    let sp = spectrum(&lap, lap.default_zero_tol()).unwrap();
                    assert_eq!(
                        up_rank + sp.harmonic_dim + down_rank,
                        ki.count(k),
                        "{name} k={k} ({ei}, {ej})"
                    );
                }
            }
        }
    }
}

#[test]
fn persistent_boundary_lands_in_earlier_complex() {
    let f = octahedron();
    let pb = persistent_boundary(&f, 1, 1.5, 2.0).unwrap();
    let ki = snapshot(&f, 1.5);
    let kj = snapshot(&f, 2.0);
    let d = boundary_matrix(&kj, 2, Field::Rational, false);
    let image = d.matrix.to_dense() * &pb.basis;
    for (r, s) in d.rows.iter().enumerate() {
        if !ki.contains(s) {
            assert!(image.row(r).amax() < 1e-9);
        }
    }
}

#[test]
fn complete_simplex_law() {
    for (name, f, r, n) in [
        ("octagon", octagon(), 4.0, 8.0),
        ("octahedron", octahedron(), 3.0, 6.0),
    ] {
        for k in 0..f.max_dim() {
            let lap = persistent_laplacian(&f, k, r, r).unwrap();
            let sp = spectrum(&lap, lap.default_zero_tol()).unwrap();
            for v in &sp.eigenvalues[sp.harmonic_dim..] {
                assert!((v - n).abs() < 1e-9, "{name} k={k}: {v}");
            }
        }
    }
}

#[test]
fn octagon_spectral_examples() {
    let f = octagon();
    let c = spectra_curves(&f, 0, &[1.0, 2.0, 3.0], 0.0, None).unwrap();
    assert_eq!(c.harmonic_curve(0), vec![8, 1, 1]);
    let lag = spectra_curves(&f, 1, &[1.0, 2.0, 3.0], 1.0, None).unwrap();
    let bc = compute_barcodes(&f);
    for (g, eps) in [1.0, 2.0, 3.0].iter().enumerate() {
        assert_eq!(
            lag.summaries[1][g].harmonic_dim,
            persistent_betti(&bc, 1, *eps, eps + 1.0)
        );
    }
}

#[test]
fn hochster_full_support_matches_homology() {
    for (name, f, r) in small_fixtures() {
        for eps in scale_grid(0.0, r, 0.3).unwrap() {
            let snap = snapshot(&f, eps);
            let n = snap.n_vertices();
            let all: Vec<u32> = (0..n as u32).collect();
            let h = reduced_betti(&snap, Field::Gf2);
            let table = graded_betti(&snap, &[1, 2, 3], &HochsterOptions::default()).unwrap();
            for j in 1..=3usize {
                let summand = hochster_summand(&snap, &snap, &all, j, Field::Gf2).unwrap();
                assert_eq!(summand, h.get(j as isize - 1), "{name} eps={eps} j={j}");
                if n > j {
                    // the W = V summand is part of β_{n−j, n}, which has only that summand
                    assert_eq!(
                        table.get(n - j, n),
                        summand as u64,
                        "{name} eps={eps} j={j}"
                    );
                }
            }
        }
    }
}

#[test]
fn bitmask_hochster_matches_generic_oracle() {
    for (name, f, r) in small_fixtures() {
        for eps in scale_grid(0.0, r, 0.4).unwrap() {
            let snap = snapshot(&f, eps);
            let n = snap.n_vertices();
            let fast = graded_betti(&snap, &[1, 2, 3], &HochsterOptions::default()).unwrap();
            let mut slow = std::collections::BTreeMap::new();
            for w in 1u64..1 << n {
                let verts: Vec<u32> = (0..n as u32).filter(|b| w >> b & 1 == 1).collect();
                for j in 1..=3usize {
                    if verts.len() > j {
                        *slow.entry((verts.len() - j, verts.len())).or_insert(0u64) +=
                            hochster_summand(&snap, &snap, &verts, j, Field::Gf2).unwrap() as u64;
                    }
                }
            }
            for ((i, j), v) in slow {
                assert_eq!(fast.get(i, j), v, "{name} eps={eps} β_{{{i},{j}}}");
            }
        }
    }
}

#[test]
fn persistence_sandwich_per_summand() {
    let f = octagon();
    let grid = [1.0, 1.6, 2.9, 3.7, 4.0];
    for (a, &e1) in grid.iter().enumerate() {
        for &e2 in &grid[a..] {
            let s1 = snapshot(&f, e1);
            let s2 = snapshot(&f, e2);
            for w in 1u64..256 {
                let verts: Vec<u32> = (0..8).filter(|b| w >> b & 1 == 1).collect();
                for j in 1..=3 {
                    let both = hochster_summand(&s1, &s2, &verts, j, Field::Gf2).unwrap();
                    let first = hochster_summand(&s1, &s1, &verts, j, Field::Gf2).unwrap();
                    let second = hochster_summand(&s2, &s2, &verts, j, Field::Gf2).unwrap();
                    assert!(both <= first.min(second));
                }
            }
        }
    }
}

#[test]
fn nonfaces_are_sound_minimal_and_monotone() {
    for (name, f, r) in small_fixtures() {
        let mut previous: Option<persinv::algebra::MonomialIdealGenerators> = None;
        for eps in scale_grid(0.0, r, 0.1).unwrap() {
            let snap = snapshot(&f, eps);
            let gens = minimal_nonfaces(&snap, f.max_dim() + 1);
            for g in &gens.minimal_nonfaces {
                let s = persinv::Simplex::new(g.iter().copied()).unwrap();
                assert!(!snap.contains(&s), "{name} {eps}: {g:?} is a face");
                assert!(s
                    .faces()
                    .all(|t| t.vertices().is_empty() || snap.contains(&t)));
            }
            for (x, a) in gens.minimal_nonfaces.iter().enumerate() {
                for (y, b) in gens.minimal_nonfaces.iter().enumerate() {
                    assert!(x == y || !a.iter().all(|v| b.contains(v)), "{a:?} ⊆ {b:?}");
                }
            }
            // I^{later} ⊆ I^{earlier}
            if let Some(prev) = &previous {
                for g in &gens.minimal_nonfaces {
                    assert!(
                        prev.contains_monomial(g),
                        "{name} {eps}: {g:?} not in earlier ideal"
                    );
                }
            }
            previous = Some(gens);
        }
    }
}

#[test]
fn facet_bars_match_snapshot_facets() {
    for (name, f, r) in fixtures() {
        let grid = scale_grid(0.0, r, 0.1).unwrap();
        let bars = facet_barcodes(&f, &grid);
        for &eps in &grid {
            let snap = snapshot(&f, eps);
            let mut counts = vec![0; f.max_dim() + 1];
            for s in snap.facets() {
                counts[s.dim()] += 1;
            }
            // top-dimensional bars die at flag cofaces that truncation never stores
            for (i, &c) in counts.iter().enumerate().take(f.max_dim()) {
                assert_eq!(
                    facet_persistence_betti(&bars, i, eps, eps),
                    c,
                    "{name} dim {i} eps {eps}"
                );
            }
        }
    }
}

#[test]
fn persistent_bitmask_table_matches_generic_oracle() {
    for (name, f, r) in small_fixtures() {
        let grid = scale_grid(0.0, r, 0.5).unwrap();
        for (a, &e1) in grid.iter().enumerate() {
            for &e2 in &grid[a..] {
                let (s1, s2) = (snapshot(&f, e1), snapshot(&f, e2));
                let n = s2.n_vertices();
                let fast = persinv::algebra::persistent_graded_betti_between(
                    &s1,
                    &s2,
                    &[1, 2, 3],
                    &HochsterOptions::default(),
                )
                .unwrap();
                let mut slow = std::collections::BTreeMap::new();
                for w in 1u64..1 << n {
                    let verts: Vec<u32> = (0..n as u32).filter(|b| w >> b & 1 == 1).collect();
                    for j in 1..=3usize {
                        if verts.len() > j {
                            *slow.entry((verts.len() - j, verts.len())).or_insert(0u64) +=
                                hochster_summand(&s1, &s2, &verts, j, Field::Gf2).unwrap() as u64;
                        }
                    }
                }
                for ((i, j), v) in slow {
                    assert_eq!(fast.get(i, j), v, "{name} ({e1}, {e2}) β_{{{i},{j}}}");
                }
            }
        }
    }
}
