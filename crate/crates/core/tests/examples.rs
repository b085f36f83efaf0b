//! Worked examples end to end: parsing, family analysis and pointwise sensitivity.

mod common;

use acr_core::algebra::rational::{int, rat, to_f64};
use acr_core::algebra::{Rational, RationalMatrix};
use acr_core::analysis::{
    analyze, analyze_detailed, numeric_flux_jacobian, symbolic_acr_condition, AcrStatus,
    AnalysisOptions, AnalysisReport, ConvexJacobian, DivisibilityStatus, EvidenceReport,
    NondegeneracyStatus,
};
use acr_core::cone::extreme_rays;
use acr_core::parser::{parse_input, parse_points, parse_system, InputError};
use acr_core::sensitivity::{
    all_canonical, classify_degeneracy, jacobian_at, sensitivity_general,
    state_perturbation_direction, zero_sensitivity_test, Degeneracy, DegeneracyWrtS,
    SensitivityError, SteadyStatePoint,
};
use common::*;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn statuses(report: &AnalysisReport) -> Vec<Option<AcrStatus>> {
    report.species.iter().map(|s| s.local_acr).collect()
}

#[test]
fn two_species_network() {
    let sys = system("exchange.crn");
    let report = analyze(&sys, &AnalysisOptions::default()).unwrap();
    assert_eq!(report.nondegeneracy, NondegeneracyStatus::Certified);
    assert_eq!(
        statuses(&report),
        vec![Some(AcrStatus::Yes), Some(AcrStatus::No)]
    );
    assert_eq!(report.species[0].zero_sensitivity_implied, Some(true));
    // p_v(h) = det[(−a·h1, 0); (1, 1)] = −a·h1.
    let a = analyze_detailed(&sys, &AnalysisOptions::default()).unwrap();
    assert_eq!(a.divisibility_polynomial.unwrap().to_string(), "-a1*h1");
    assert_eq!(
        report.species[0].divisibility,
        DivisibilityStatus::Divisible
    );
}

#[test]
fn network_and_matrix_inputs_agree() {
    let net = analyze(
        &system("three_reaction_network.crn"),
        &AnalysisOptions::default(),
    )
    .unwrap();
    let mat = analyze(&system("three_reaction.crn"), &AnalysisOptions::default()).unwrap();
    assert_eq!(statuses(&net), statuses(&mat));
    assert_eq!(net.convex_jacobian, mat.convex_jacobian);
    assert_eq!(
        statuses(&net),
        vec![Some(AcrStatus::Yes), Some(AcrStatus::No)]
    );
}

#[test]
fn quadratic_network_has_a_degenerate_flux() {
    let sys = system("three_reaction.crn");
    let report = analyze(&sys, &AnalysisOptions::default()).unwrap();
    assert_eq!(report.nondegeneracy, NondegeneracyStatus::Fails);
    let EvidenceReport::Sample { v } = &report.nondegeneracy_evidence else {
        panic!("expected a sample witness");
    };
    let v: Vec<Rational> = v
        .iter()
        .map(|s| acr_core::algebra::rational::parse_rational(s).unwrap())
        .collect();
    // Independent check: v is a positive kernel vector and the 1×2 Jacobian vanishes.
    let n = sys.coefficient_matrix();
    assert!(n.mul_vec(&v).unwrap().iter().all(|x| *x == int(0)));
    assert!(v.iter().all(|x| *x > int(0)));
    let m = numeric_flux_jacobian(n, &sys.numeric_exponents().unwrap(), &v);
    assert!(m.is_zero());
}

#[test]
fn rational_exponents_keep_the_verdicts() {
    let report = analyze(
        &system("three_reaction_rational.crn"),
        &AnalysisOptions::default(),
    )
    .unwrap();
    assert_eq!(
        statuses(&report),
        vec![Some(AcrStatus::Yes), Some(AcrStatus::No)]
    );
}

#[test]
fn symbolic_single_row() {
    let sys = system("three_reaction_symbolic.crn");
    let cj = ConvexJacobian::new(&sys).unwrap();
    let x1: Vec<String> = symbolic_acr_condition(&cj, 0)
        .unwrap()
        .iter()
        .map(ToString::to_string)
        .collect();
    assert_eq!(x1, ["b21 - b22", "b21 - b23"]);
    let x2: Vec<String> = symbolic_acr_condition(&cj, 1)
        .unwrap()
        .iter()
        .map(ToString::to_string)
        .collect();
    assert_eq!(x2, ["b11 - b12", "b11 - b13"]);
    let report = analyze(&sys, &AnalysisOptions::default()).unwrap();
    assert_eq!(report.nondegeneracy, NondegeneracyStatus::Inconclusive);
    assert!(report.species[0]
        .conditions
        .contains(&"b21 - b22 = 0".to_string()));
}

#[test]
fn symbolic_conditions_specialize_to_mass_action() {
    let sym = system("idhkp_symbolic.crn");
    let cj = ConvexJacobian::new(&sym).unwrap();
    let ones = vec![int(1); cj.symbols().len()];
    for i in 0..5 {
        let conditions = symbolic_acr_condition(&cj, i).unwrap();
        let holds = conditions.iter().all(|c| c.eval(&ones) == int(0));
        assert_eq!(holds, i == 3, "species X{}", i + 1);
    }
}

#[test]
fn two_ray_example_verdicts() {
    let sys = system("two_ray.crn");
    let report = analyze(&sys, &AnalysisOptions::default()).unwrap();
    assert_eq!(
        statuses(&report),
        vec![
            Some(AcrStatus::No),
            Some(AcrStatus::Yes),
            Some(AcrStatus::No)
        ]
    );
    assert!(matches!(
        report.nondegeneracy_evidence,
        EvidenceReport::RayMinor { .. }
    ));
}

#[test]
fn product_system_divisibility_is_not_sufficient() {
    let report = analyze(&system("product.crn"), &AnalysisOptions::default()).unwrap();
    assert_eq!(
        report.species[0].divisibility,
        DivisibilityStatus::Divisible
    );
    assert_eq!(report.species[0].local_acr, Some(AcrStatus::No));
    assert_eq!(report.species[0].zero_sensitivity_implied, Some(false));
}

#[test]
fn report_round_trips_through_json() {
    for name in [
        "exchange.crn",
        "three_reaction.crn",
        "idhkp_symbolic.crn",
        "two_ray.crn",
    ] {
        let report = analyze(&system(name), &AnalysisOptions::default()).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report, "{name}");
    }
}

#[test]
fn seeds_are_reproducible() {
    let sys = system("three_reaction_rational.crn");
    let opts = AnalysisOptions {
        seed: 11,
        samples: 8,
    };
    let a = serde_json::to_string(&analyze(&sys, &opts).unwrap()).unwrap();
    let b = serde_json::to_string(&analyze(&sys, &opts).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn malformed_input_reports_position() {
    let err = parse_system(&fixture("bad/malformed.crn")).unwrap_err();
    let InputError::Parse(e) = err else {
        panic!("expected a parse error");
    };
    assert_eq!(e.line, 2);
    assert!(e.to_string().contains("line 2"));
}

#[test]
fn vanishing_jacobian_is_degenerate() {
    let sys = system("vanishing_jacobian.crn");
    let k = vec![int(1); sys.num_reactions()];
    let x = vec![rat(3, 5), rat(4, 5), int(1)];
    let p = SteadyStatePoint::admit_exact(&sys, k, x).unwrap();
    let class = classify_degeneracy(&sys, &p).unwrap();
    assert_eq!(class.plain, Degeneracy::Deg);
    assert_eq!(class.wrt_s, DegeneracyWrtS::DegWrtS);
    // dg1/dx3 = x1^2 - x2 is nonzero off the parabola.
    assert_eq!(class.jacobian_rank, 1);
    assert!(matches!(
        zero_sensitivity_test(&sys, &p, 0),
        Err(SensitivityError::DegenerateWrtS)
    ));

    // On x2 = x1^2 the whole Jacobian vanishes.
    let x1sq = (5f64.sqrt() - 1.0) / 2.0;
    let x = vec![x1sq.sqrt(), x1sq, 1.0];
    let p = SteadyStatePoint::admit(&sys, vec![1.0; sys.num_reactions()], x).unwrap();
    let class = classify_degeneracy(&sys, &p).unwrap();
    assert_eq!(class.plain, Degeneracy::Deg);
    assert_eq!(class.jacobian_rank, 0);
}

#[test]
fn points_file_admission() {
    let sys = system("exchange.crn");
    let points = parse_points(&fixture("exchange.pts"), 2, 2).unwrap();
    for pt in points {
        let p = SteadyStatePoint::admit_exact(&sys, pt.k, pt.x).unwrap();
        assert!(zero_sensitivity_test(&sys, &p, 0).unwrap());
        assert!(!zero_sensitivity_test(&sys, &p, 1).unwrap());
    }
    let off = SteadyStatePoint::admit(&sys, vec![1.0, 2.0], vec![2.1, 1.0]);
    assert!(matches!(off, Err(SensitivityError::Residual { .. })));
}

/// `[J; W]·S = (0, γ')` solved directly with nalgebra.
fn direct_solve(j: &DMatrix<f64>, w: &RationalMatrix, gamma: &[f64]) -> Vec<f64> {
    let (s, n) = (j.nrows(), j.ncols());
    let a = DMatrix::from_fn(n, n, |r, c| {
        if r < s {
            j[(r, c)]
        } else {
            to_f64(w.get(r - s, c))
        }
    });
    let mut rhs = DVector::zeros(n);
    for (i, g) in gamma.iter().enumerate() {
        rhs[s + i] = *g;
    }
    a.lu().solve(&rhs).unwrap().iter().copied().collect()
}

#[test]
fn general_perturbation_on_two_conservation_laws() {
    let sys = system("idhkp.crn");
    assert_eq!(sys.codimension(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (k, x) = exact_steady_state(&sys, &mut rng);
    let p = SteadyStatePoint::admit_exact(&sys, k, x).unwrap();
    let canon = all_canonical(&sys, &p).unwrap();
    assert_eq!(canon.len(), 2);
    let combined = sensitivity_general(&canon, &[2.0, 3.0]).unwrap();
    let j = jacobian_at(&sys, &p.k, &p.x).unwrap();
    let direct = direct_solve(&j, sys.conservation().unwrap(), &[2.0, 3.0]);
    for (a, b) in combined.values.iter().zip(&direct) {
        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
    }
    // x4 has local ACR: its sensitivity vanishes for every perturbation.
    assert!(combined.values[3].abs() < 1e-8);
    assert!(zero_sensitivity_test(&sys, &p, 3).unwrap());
}

#[test]
fn sensitivities_are_tangent_and_match_the_rank_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 40 {
        let sys = random_system(&mut rng, 3, 4);
        let (k, x) = exact_steady_state(&sys, &mut rng);
        let p = SteadyStatePoint::admit_exact(&sys, k, x).unwrap();
        if !classify_degeneracy(&sys, &p)
            .unwrap()
            .is_nondegenerate_wrt_s()
        {
            continue;
        }
        let j = jacobian_at(&sys, &p.k, &p.x).unwrap();
        let jnorm = j.norm().max(f64::MIN_POSITIVE);
        let canon = all_canonical(&sys, &p).unwrap();
        for c in &canon {
            let tangent = &j * DVector::from_column_slice(&c.values);
            assert!(tangent.norm() <= 1e-8 * jnorm);
        }
        for i in 0..sys.num_species() {
            let zero = zero_sensitivity_test(&sys, &p, i).unwrap();
            let small = canon.iter().all(|c| c.values[i].abs() < 1e-8);
            assert_eq!(zero, small, "species {i}");
        }
        checked += 1;
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let sys = random_system(&mut rng, 3, 4);
        let (k, x) = exact_steady_state(&sys, &mut rng);
        let k: Vec<f64> = k.iter().map(to_f64).collect();
        let x: Vec<f64> = x.iter().map(to_f64).collect();
        let j = jacobian_at(&sys, &k, &x).unwrap();
        for c in 0..x.len() {
            let h = 1e-6 * x[c];
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[c] += h;
            xm[c] -= h;
            let gp = acr_core::sensitivity::evaluate(&sys, &k, &xp).unwrap();
            let gm = acr_core::sensitivity::evaluate(&sys, &k, &xm).unwrap();
            for r in 0..gp.len() {
                let fd = (gp[r] - gm[r]) / (2.0 * h);
                assert!((fd - j[(r, c)]).abs() <= 1e-6 * j[(r, c)].abs().max(1.0));
            }
        }
    }
}

#[test]
fn state_directions_span_the_totals() {
    let sys = system("idhkp.crn");
    let w = sys.conservation().unwrap();
    let images: Vec<Vec<Rational>> = (0..w.cols())
        .map(|c| {
            let mut e = vec![0.0; w.cols()];
            e[c] = 1.0;
            state_perturbation_direction(w, &e)
                .unwrap()
                .iter()
                .map(|&v| acr_core::algebra::rational::from_f64(v).unwrap())
                .collect()
        })
        .collect();
    assert_eq!(
        RationalMatrix::from_rows(w.rows(), &images).unwrap().rank(),
        w.rows()
    );
}

#[test]
fn empty_flux_cone() {
    let sys = parse_input("N: 1 1\nB:\n1 0\n0 1\n")
        .unwrap()
        .build()
        .unwrap();
    assert!(!extreme_rays(sys.coefficient_matrix()).has_positive_point());
    let report = analyze(&sys, &AnalysisOptions::default()).unwrap();
    assert_eq!(report.nondegeneracy, NondegeneracyStatus::EmptyCone);
    assert!(report
        .species
        .iter()
        .all(|s| s.zero_sensitivity_implied.is_none()));
}

/// Steady states on several fibers for one `k`, found by Newton from random seeds.
fn fiber_states(
    sys: &acr_core::network::PowerLawSystem,
    k: &[f64],
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    use acr_core::sensitivity::newton_steady_state;
    use rand::Rng;
    let w = sys.conservation().unwrap();
    let mut out = Vec::new();
    for _ in 0..200 {
        if out.len() == 6 {
            break;
        }
        let x0: Vec<f64> = (0..sys.num_species())
            .map(|_| 10f64.powf(rng.gen_range(-1.0..1.0)))
            .collect();
        let t: Vec<f64> = (0..w.rows())
            .map(|r| (0..w.cols()).map(|c| to_f64(w.get(r, c)) * x0[c]).sum())
            .collect();
        if let Ok(x) = newton_steady_state(sys, k, &x0, &t) {
            out.push(x);
        }
    }
    out
}

#[test]
fn verdicts_agree_with_solved_steady_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["exchange.crn", "two_ray.crn"] {
        let sys = system(name);
        let a = analyze_detailed(&sys, &AnalysisOptions::default()).unwrap();
        assert_eq!(a.nondegeneracy.status, NondegeneracyStatus::Certified);
        let grid: Vec<Vec<f64>> = match sys.num_reactions() {
            2 => vec![vec![1.0, 2.0], vec![3.0, 1.0], vec![0.5, 0.5]],
            _ => vec![
                vec![2.0, 1.0, 1.0, 1.0],
                vec![3.0, 0.5, 2.0, 1.5],
                vec![1.5, 1.0, 0.3, 4.0],
            ],
        };
        let mut moved = vec![false; sys.num_species()];
        for k in &grid {
            let states = fiber_states(&sys, k, &mut rng);
            assert!(
                states.len() >= 3,
                "{name}: too few steady states at k = {k:?}"
            );
            for i in 0..sys.num_species() {
                let (lo, hi) = states
                    .iter()
                    .map(|x| x[i])
                    .fold((f64::INFINITY, 0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
                let spread = (hi - lo) / hi.max(1.0);
                match a.species[i].acr.as_ref().unwrap().status {
                    AcrStatus::Yes => {
                        assert!(spread < 1e-6, "{name}: x{} spread {spread:e}", i + 1)
                    }
                    _ => moved[i] |= spread > 1e-3,
                }
            }
        }
        for (i, sp) in a.species.iter().enumerate() {
            if sp.acr.as_ref().unwrap().status == AcrStatus::No {
                assert!(moved[i], "{name}: x{} never varied", i + 1);
            }
        }
    }
}
