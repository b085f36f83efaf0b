use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use acr_core::analysis::{analyze, AnalysisOptions, AnalysisReport};
use acr_core::oracle::continuation_oracle;
use acr_core::parser::parse_system;
use serde_json::Value;

fn core_fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn cli_fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn acr_scan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acr-scan"))
        .args(args)
        .env("ACR_SCAN_COLOR", "0")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn scan_mass_action_idhkp_json() {
    let out = acr_scan(&["scan", path(&core_fixture("idhkp.crn")), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains(r#""species":"X4","local_acr":"YES""#));
    assert!(text.contains(r#""nondegeneracy":"CERTIFIED""#));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    let yes: Vec<&str> = v["files"][0]["report"]["species"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["local_acr"] == "YES")
        .map(|s| s["species"].as_str().unwrap())
        .collect();
    assert_eq!(yes, ["X4"]);
}

#[test]
fn malformed_file_exits_one_with_position() {
    let out = acr_scan(&["scan", path(&core_fixture("bad/malformed.crn"))]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("malformed.crn:2:3: parse error"), "{err}");
    assert!(err.contains("A + -> B ; k1"));
}

#[test]
fn scan_continues_past_errors() {
    let out = acr_scan(&[
        "scan",
        path(&core_fixture("bad/malformed.crn")),
        path(&core_fixture("three_reaction.crn")),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["files"][0]["error"]["kind"], "parse");
    assert_eq!(v["files"][0]["error"]["line"], 2);
    assert_eq!(v["files"][0]["error"]["column"], 3);
    assert_eq!(v["files"][1]["report"]["species"][0]["local_acr"], "YES");
}

#[test]
fn missing_file_exits_one() {
    let out = acr_scan(&["scan", "no/such/file.crn"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn scan_matrix_file_verdicts() {
    let out = acr_scan(&[
        "scan",
        path(&core_fixture("three_reaction.crn")),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let species = &v["files"][0]["report"]["species"];
    assert_eq!(species[0]["species"], "X1");
    assert_eq!(species[0]["local_acr"], "YES");
    assert_eq!(species[1]["species"], "X2");
    assert_eq!(species[1]["local_acr"], "NO");

    let text = stdout(&acr_scan(&[
        "scan",
        path(&core_fixture("three_reaction.crn")),
    ]));
    assert!(text.contains("X1       YES"), "{text}");
    assert!(text.contains("X2       NO"), "{text}");
}

#[test]
fn scan_directory_is_sorted_and_recursive() {
    let dir = core_fixture("");
    let out = acr_scan(&["scan", path(&dir), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1), "malformed fixture is included");
    let v = json(&out);
    let paths: Vec<String> = v["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["path"].as_str().unwrap().to_string())
        .collect();
    let mut sorted = paths.clone();
    sorted.sort();
    assert_eq!(paths, sorted);
    assert!(paths.iter().any(|p| p.ends_with("bad/malformed.crn")));
    assert!(paths.iter().all(|p| p.ends_with(".crn")));
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let files = ["three_reaction.crn", "idhkp_symbolic.crn", "two_ray.crn"].map(core_fixture);
    let args = [
        "scan",
        path(&files[0]),
        path(&files[1]),
        path(&files[2]),
        "--format",
        "json",
        "--seed",
        "17",
        "--samples",
        "8",
    ];
    let a = acr_scan(&args);
    let b = acr_scan(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 17);
    assert_eq!(json(&a)["samples"], 8);
}

#[test]
fn json_reports_round_trip() {
    let opts = AnalysisOptions::default();
    for name in [
        "three_reaction.crn",
        "idhkp_symbolic.crn",
        "two_ray.crn",
        "product.crn",
    ] {
        let out = acr_scan(&["scan", path(&core_fixture(name)), "--format", "json"]);
        let v = json(&out);
        let read: AnalysisReport = serde_json::from_value(v["files"][0]["report"].clone()).unwrap();
        let text = std::fs::read_to_string(core_fixture(name)).unwrap();
        let direct = analyze(&parse_system(&text).unwrap(), &opts).unwrap();
        assert_eq!(read, direct, "{name}");
    }
}

#[test]
fn sensitivity_table_matches_oracle() {
    let net = core_fixture("exchange.crn");
    let out = acr_scan(&[
        "sensitivity",
        path(&net),
        "--points",
        path(&core_fixture("exchange.pts")),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let sys = parse_system(&std::fs::read_to_string(&net).unwrap()).unwrap();
    for pt in v["points"].as_array().unwrap() {
        let num = |key: &str| -> Vec<f64> {
            pt[key]
                .as_array()
                .unwrap()
                .iter()
                .map(|s| {
                    let q = acr_core::algebra::rational::parse_rational(s.as_str().unwrap());
                    acr_core::algebra::rational::to_f64(&q.unwrap())
                })
                .collect()
        };
        let (k, x) = (num("k"), num("x"));
        let sen: Vec<f64> = pt["ok"]["sensitivities"][0]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_f64().unwrap())
            .collect();
        assert_eq!(sen[0], 0.0, "x1 row is zero");
        let oracle = continuation_oracle(&sys, &k, &x, 0, 1e-4).unwrap();
        for (a, b) in sen.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-6, "{sen:?} vs {oracle:?}");
        }
        assert_eq!(pt["ok"]["zero_sensitivity"][0]["zero"], true);
        assert_eq!(pt["ok"]["zero_sensitivity"][1]["zero"], false);
    }

    let text = stdout(&acr_scan(&[
        "sensitivity",
        path(&net),
        "--points",
        path(&core_fixture("exchange.pts")),
        "--species",
        "X1",
    ]));
    assert!(text.contains("Sen_gamma1"));
    assert!(text.contains("zero sensitivity: X1 yes\n"), "{text}");
}

#[test]
fn off_steady_state_point_is_rejected() {
    let net = core_fixture("exchange.crn");
    let out = acr_scan(&[
        "sensitivity",
        path(&net),
        "--points",
        path(&cli_fixture("exchange_off.pts")),
    ]);
    assert_eq!(out.status.code(), Some(1), "every point failed");
    assert!(stdout(&out).contains("rejected: not a steady state: residual 1.000e-1"));

    let out = acr_scan(&[
        "sensitivity",
        path(&net),
        "--points",
        path(&cli_fixture("exchange_mixed.pts")),
    ]);
    assert_eq!(out.status.code(), Some(0), "one point succeeded");
    assert!(stdout(&out).contains("rejected"));
}

#[test]
fn full_rank_system_notes_vacuous_zero() {
    let out = acr_scan(&[
        "sensitivity",
        path(&cli_fixture("inflow.crn")),
        "--points",
        path(&cli_fixture("inflow.pts")),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("vacuously zero (finite fibers"), "{text}");
    assert!(text.contains("zero sensitivity: X1 yes"));
}

#[test]
fn unknown_species_is_an_input_error() {
    let out = acr_scan(&[
        "sensitivity",
        path(&core_fixture("exchange.crn")),
        "--points",
        path(&core_fixture("exchange.pts")),
        "--species",
        "Y",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown species \"Y\""));
}

#[test]
fn polynomialize_generalized_example() {
    let out = acr_scan(&["polynomialize", path(&core_fixture("fractional.gp"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("m = (3, 3)"));
    assert!(text.contains("beta(1) = (1, 0)"));
    assert!(text.contains("gtilde1 = z1^4*z2^2 - 2*z1^3*z2^2 + z2^2"));

    let v = json(&acr_scan(&[
        "polynomialize",
        path(&core_fixture("fractional.gp")),
        "--format",
        "json",
    ]));
    assert_eq!(v["m"], serde_json::json!([3, 3]));
    assert_eq!(v["identity"], false);
}

#[test]
fn polynomialize_identity_and_square_root() {
    let text = stdout(&acr_scan(&[
        "polynomialize",
        path(&cli_fixture("integer.gp")),
    ]));
    assert!(text.contains("the transform is the identity"));
    assert!(text.contains("m = (1, 1)"));

    let text = stdout(&acr_scan(&["polynomialize", path(&cli_fixture("half.gp"))]));
    assert!(text.contains("m = (2)"));
    assert!(text.contains("gtilde1 = z1"));
}

#[test]
fn explain_shows_intermediate_objects() {
    let out = acr_scan(&[
        "explain",
        path(&core_fixture("two_ray.crn")),
        "--species",
        "X2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("E1 = (1, 0, 1, 1)"));
    assert!(text.contains("non-degeneracy: CERTIFIED"));
    assert!(text.contains("X2:\n  local ACR: YES"));
    assert!(!text.contains("X1:\n"));
}

#[test]
fn color_is_off_without_a_terminal() {
    let out = Command::new(env!("CARGO_BIN_EXE_acr-scan"))
        .args(["scan", path(&core_fixture("three_reaction.crn"))])
        .output()
        .unwrap();
    assert!(!stdout(&out).contains('\x1b'));
}
