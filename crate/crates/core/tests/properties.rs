mod common;

use acr_core::algebra::rational::int;
use acr_core::algebra::{MultiPoly, PolyMatrix, Rational, RationalMatrix, Vars};
use acr_core::analysis::{
    analyze, local_acr_test, AnalysisOptions, AnalysisReport, ConvexJacobian,
};
use acr_core::cone::extreme_rays;
use acr_core::network::PowerLawSystem;
use acr_core::oracle::{brute_force_extreme_rays, permutation_det};
use acr_core::polynomialize::{phi, phi_inverse};
use acr_core::sensitivity::{
    classify_degeneracy, sensitivity_canonical, sensitivity_canonical_cramer,
    zero_sensitivity_test, SteadyStatePoint,
};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random system and an exact steady state of it that is non-degenerate wrt `S`.
fn nondegenerate_point(seed: u64) -> (PowerLawSystem, SteadyStatePoint, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(2..=4);
        let r = rng.gen_range(2..=5);
        let sys = random_system(&mut rng, n, r);
        let (k, x) = exact_steady_state(&sys, &mut rng);
        let p = SteadyStatePoint::admit_exact(&sys, k, x).unwrap();
        if classify_degeneracy(&sys, &p)
            .unwrap()
            .is_nondegenerate_wrt_s()
        {
            return (sys, p, rng);
        }
    }
}

fn small_int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RationalMatrix> {
    proptest::collection::vec(proptest::collection::vec(-2i64..=2, cols), rows).prop_map(
        move |data| {
            let data: Vec<Vec<Rational>> = data
                .into_iter()
                .map(|row| row.into_iter().map(int).collect())
                .collect();
            RationalMatrix::from_rows(cols, &data).unwrap()
        },
    )
}

fn poly_entries(count: usize) -> impl Strategy<Value = Vec<Vec<(Vec<u32>, i64)>>> {
    proptest::collection::vec(
        proptest::collection::vec((proptest::collection::vec(0u32..=2, 2), -3i64..=3), 0..=3),
        count,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cramer_agrees_with_solve(seed in any::<u64>()) {
        let (sys, p, _) = nondegenerate_point(seed);
        let w = sys.conservation().unwrap();
        for j in 0..w.rows() {
            let a = sensitivity_canonical(&sys, &p, w, j).unwrap();
            let b = sensitivity_canonical_cramer(&sys, &p, w, j).unwrap();
            let scale = a.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (u, v) in a.values.iter().zip(&b.values) {
                prop_assert!((u - v).abs() <= 1e-9 * scale, "{:?} vs {:?}", a.values, b.values);
            }
        }
    }

    #[test]
    fn zero_sensitivity_ignores_choice_of_w(seed in any::<u64>()) {
        let (sys, p, mut rng) = nondegenerate_point(seed);
        let w = sys.conservation().unwrap().clone();
        let a = random_invertible(&mut rng, w.rows());
        let other = sys.clone().with_conservation(a.mul(&w).unwrap()).unwrap();
        for i in 0..sys.num_species() {
            prop_assert_eq!(
                zero_sensitivity_test(&sys, &p, i).unwrap(),
                zero_sensitivity_test(&other, &p, i).unwrap()
            );
        }
    }

    #[test]
    fn acr_verdicts_ignore_row_basis(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, 3, 4);
        let a = random_invertible(&mut rng, sys.rank());
        let other = PowerLawSystem::from_coefficients(
            sys.species().to_vec(),
            sys.rates().to_vec(),
            a.mul(sys.coefficient_matrix()).unwrap(),
            sys.exponents().clone(),
            sys.conservation().cloned(),
        )
        .unwrap();
        let verdicts = |s: &PowerLawSystem| {
            let cj = ConvexJacobian::new(s).unwrap();
            (0..s.num_species())
                .map(|i| local_acr_test(&cj, i).unwrap().status)
                .collect::<Vec<_>>()
        };
        prop_assert_eq!(verdicts(&sys), verdicts(&other));
    }

    #[test]
    fn minors_match_permutation_expansion(
        size in 1usize..=3,
        extra in 0usize..=2,
        seed_entries in poly_entries(15),
    ) {
        let vars = Vars::new(["p", "q"]);
        let cols = size + extra;
        let entries: Vec<MultiPoly> = seed_entries
            .into_iter()
            .take(size * cols)
            .map(|terms| {
                MultiPoly::from_terms(&vars, terms.into_iter().map(|(e, c)| (e, int(c))).collect::<Vec<_>>())
            })
            .collect();
        let m = PolyMatrix::from_entries(size, cols, &vars, entries).unwrap();
        for minor in m.minors(size, &[]).unwrap() {
            prop_assert_eq!(minor.value, permutation_det(&m.submatrix(&minor.rows, &minor.cols)));
        }
    }

    #[test]
    fn extreme_rays_match_brute_force(n in (1usize..=3, 2usize..=5).prop_flat_map(|(r, c)| small_int_matrix(r, c))) {
        let rays = extreme_rays(&n);
        let brute = brute_force_extreme_rays(&n);
        prop_assert_eq!(rays.rays(), brute.as_slice());
    }

    #[test]
    fn rays_lie_in_the_kernel(n in (1usize..=3, 2usize..=6).prop_flat_map(|(r, c)| small_int_matrix(r, c))) {
        for ray in extreme_rays(&n).rational_rays() {
            prop_assert!(ray.iter().all(|e| *e >= int(0)));
            for i in 0..n.rows() {
                let dot = (0..n.cols()).fold(int(0), |acc, j| acc + n.get(i, j) * &ray[j]);
                prop_assert_eq!(dot, int(0));
            }
        }
    }

    #[test]
    fn reports_round_trip_through_json(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, 3, 4);
        let report = analyze(&sys, &AnalysisOptions { seed, samples: 4 }).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &report);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn analysis_is_deterministic_per_seed(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, 3, 5);
        let opts = AnalysisOptions { seed, samples: 8 };
        prop_assert_eq!(analyze(&sys, &opts).unwrap(), analyze(&sys, &opts).unwrap());
    }

    #[test]
    fn phi_inverts(x in proptest::collection::vec(0.05f64..20.0, 1..=3), m in proptest::collection::vec(1u32..=4, 3)) {
        let m = &m[..x.len()];
        let z = phi_inverse(&x, m).unwrap();
        let back = phi(&z, m).unwrap();
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }
}
