//! Randomized invariants.

use persinv::algebra::{
    graded_betti, hochster_summand, persistent_fh_vectors, persistent_graded_betti_between,
    HochsterOptions,
};
use persinv::complex::{
    build_rips_filtration, f_from_h, h_vector, scale_grid, snapshot, Filtration, RipsParams,
};
use persinv::ingest::{parse_pdb, parse_xyz, AtomSelection};
use persinv::linalg::{induced_image_rank, rank, reduced_betti, Field, SparseMatrix};
use persinv::persistence::{compute_barcodes, persistent_betti, Barcode};
use persinv::spectral::{persistent_laplacian, spectrum};
use persinv::{PointCloud, Source};
use proptest::prelude::*;

fn cloud_strategy(min: usize, max: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec(prop::array::uniform3(0.0f64..3.0), min..=max).prop_filter_map(
        "distinct points",
        |points| {
            let n = points.len();
            PointCloud::new(points, vec![String::new(); n], Source::Inline).ok()
        },
    )
}

fn rips(cloud: &PointCloud) -> Filtration {
    build_rips_filtration(cloud, RipsParams::new(3, 4.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn filtration_is_sorted_and_closed(cloud in cloud_strategy(1, 8)) {
        let f = rips(&cloud);
        for w in f.entries().windows(2) {
            prop_assert!(w[0].scale <= w[1].scale);
        }
        for e in f.entries() {
            for face in e.simplex.faces() {
                if face.vertices().is_empty() { continue; }
                prop_assert!(f.scale_of(&face).unwrap() <= e.scale);
            }
        }
    }

    #[test]
    fn text_round_trip(cloud in cloud_strategy(1, 7)) {
        let f = rips(&cloud);
        let back = Filtration::parse_text(&f.to_text()).unwrap();
        prop_assert_eq!(back.entries(), f.entries());
    }

    #[test]
    fn alive_bars_equal_betti(cloud in cloud_strategy(3, 8)) {
        let f = rips(&cloud);
        let bc = compute_barcodes(&f);
        for eps in scale_grid(0.0, 4.0, 0.5).unwrap() {
            let h = reduced_betti(&snapshot(&f, eps), Field::Gf2);
            for k in 0..=3 {
                prop_assert_eq!(persistent_betti(&bc, k, eps, eps), h.unreduced(k));
            }
        }
    }

    #[test]
    fn pairs_match_image_rank(cloud in cloud_strategy(3, 7)) {
        let f = rips(&cloud);
        let bc = compute_barcodes(&f);
        let grid = scale_grid(0.0, 4.0, 0.8).unwrap();
        for (a, &e1) in grid.iter().enumerate() {
            for &e2 in &grid[a..] {
                let (s1, s2) = (snapshot(&f, e1), snapshot(&f, e2));
                for k in 0..=2 {
                    let mut image = induced_image_rank(&s1, &s2, k, Field::Gf2).unwrap();
                    if k == 0 && !s1.is_empty() { image += 1; }
                    prop_assert_eq!(persistent_betti(&bc, k, e1, e2), image);
                }
            }
        }
    }

    #[test]
    fn kernel_equals_persistent_betti(cloud in cloud_strategy(3, 7), lag in 0.0f64..1.5) {
        let f = rips(&cloud);
        let bc = compute_barcodes(&f);
        for eps in scale_grid(0.0, 4.0, 0.5).unwrap() {
            for k in 0..=2 {
                let lap = persistent_laplacian(&f, k, eps, eps + lag).unwrap();
                let sp = spectrum(&lap, lap.default_zero_tol()).unwrap();
                prop_assert_eq!(sp.harmonic_dim, persistent_betti(&bc, k, eps, eps + lag));
                prop_assert_eq!(sp.eigenvalues.len(), sp.dimension);
                prop_assert!(sp.eigenvalues.iter().all(|&v| v > -1e-9));
            }
        }
    }

    #[test]
    fn barcode_csv_round_trip(cloud in cloud_strategy(2, 7)) {
        let bc = compute_barcodes(&rips(&cloud));
        prop_assert_eq!(Barcode::from_csv(&bc.to_csv(), bc.max_dim).unwrap(), bc);
    }

    #[test]
    fn hilbert_identity(cloud in cloud_strategy(3, 7), eps in 0.0f64..4.0) {
        let f = rips(&cloud);
        let snap = snapshot(&f, eps);
        let d = snap.dim().map_or(0, |x| x + 1);
        let strands: Vec<usize> = (1..d.max(2)).collect();
        let t = graded_betti(&snap, &strands, &HochsterOptions::default()).unwrap();
        let fh = persistent_fh_vectors(&t.as_persistent(), snap.n_vertices(), d).unwrap();
        let fv = snap.f_vector();
        prop_assert_eq!(fh.h, h_vector(&fv).values);
        prop_assert_eq!(f_from_h(&h_vector(&fv)), fv);
    }

    #[test]
    fn rank_bounds(entries in prop::collection::vec(prop::collection::vec(-2i64..=2, 5), 1..7)) {
        let m = SparseMatrix::from_dense(&entries);
        let q = rank(&m, Field::Rational);
        let two = rank(&m, Field::Gf2);
        prop_assert!(q <= m.nrows().min(m.ncols()));
        // a minor that is odd is nonzero
        prop_assert!(two <= q);
        prop_assert_eq!(q, m.to_dense().rank(1e-9));
    }

    #[test]
    fn parsers_never_panic(text in ".{0,400}") {
        let _ = parse_xyz(&text);
        let _ = parse_pdb(&text, &AtomSelection::atoms(&["CA"]));
        let _ = Filtration::parse_text(&text);
    }

    #[test]
    fn pdb_like_lines_never_panic(lines in prop::collection::vec("(ATOM  |HETATM|ENDMDL)[ -~]{0,74}", 0..20)) {
        let _ = parse_pdb(&lines.join("\n"), &AtomSelection::atoms(&["CA", "P"]));
    }

    #[test]
    fn bitmask_tables_match_summands(cloud in cloud_strategy(3, 8), e1 in 0.0f64..3.0, lag in 0.0f64..2.0) {
        let f = rips(&cloud);
        let (a, b) = (snapshot(&f, e1), snapshot(&f, e1 + lag));
        let n = b.n_vertices();
        let opts = HochsterOptions::default();
        let plain = graded_betti(&b, &[1, 2, 3], &opts).unwrap();
        let pers = persistent_graded_betti_between(&a, &b, &[1, 2, 3], &opts).unwrap();
        let mut expect_plain = std::collections::BTreeMap::new();
        let mut expect_pers = std::collections::BTreeMap::new();
        for w in 1u64..1 << n {
            let verts: Vec<u32> = (0..n as u32).filter(|x| w >> x & 1 == 1).collect();
            for j in 1..=3usize {
                if verts.len() > j {
                    let key = (verts.len() - j, verts.len());
                    *expect_plain.entry(key).or_insert(0u64) +=
                        hochster_summand(&b, &b, &verts, j, Field::Gf2).unwrap() as u64;
                    *expect_pers.entry(key).or_insert(0u64) +=
                        hochster_summand(&a, &b, &verts, j, Field::Gf2).unwrap() as u64;
                }
            }
        }
        for (&(i, j), &v) in &expect_plain {
            prop_assert_eq!(plain.get(i, j), v);
            prop_assert_eq!(pers.get(i, j), expect_pers[&(i, j)]);
        }
    }
}
