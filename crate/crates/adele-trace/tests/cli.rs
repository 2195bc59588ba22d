use std::path::PathBuf;
use std::process::{Command, Output};

use adele_trace::format::{hecke_from_json, hecke_to_json, local_sb_from_json, poisson_from_json, poisson_to_json};
use adele_trace::random::{random_hecke, random_poisson, RandomBox};
use proptest::prelude::*;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adele-trace")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("adele-trace-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn verify_default_fixture_passes() {
    let input = fixture("default_h.json");
    let out = run(&["verify", "--input", input.to_str().unwrap(), "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["schema"], "adele-trace/1");
    assert_eq!(report["verdict"], "pass");
    assert!(report["residual"].as_f64().unwrap() < 1e-10);
    let total = report["spectral"]["total"]["re"].as_f64().unwrap();
    assert!((total - 1.0864348112).abs() < 1e-10);
    assert!(report["metadata"]["seed"].is_null());
    assert_eq!(report["metadata"]["notes"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_q_support_two_is_exactly_one() {
    let input = fixture("q_support_2.json");
    let out = run(&["verify", "--input", input.to_str().unwrap(), "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["spectral"]["total"]["re"].as_f64(), Some(1.0));
    assert_eq!(report["geometric"]["total"]["re"].as_f64(), Some(1.0));
    assert_eq!(report["geometric"]["hyperbolic"][0]["alpha"], "2");
}

#[test]
fn verify_additive_fixture_agrees() {
    let input = fixture("additive_2z2.json");
    let out = run(&["verify", "--input", input.to_str().unwrap(), "--tol", "1e-12", "--modulus", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    let spectral = report["spectral"]["total"]["re"].as_f64().unwrap();
    let geometric = report["geometric"]["total"]["re"].as_f64().unwrap();
    assert!((spectral - 1.0000069747).abs() < 1e-9, "{spectral}");
    assert!((geometric - spectral).abs() < 1e-11);
    assert_eq!(report["spectral"]["characters"].as_array().unwrap().len(), 2);
}

#[test]
fn corrupt_input_is_an_input_error() {
    let input = fixture("corrupt.json");
    let out = run(&["verify", "--input", input.to_str().unwrap(), "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed JSON"));
}

#[test]
fn semantic_errors_name_the_path() {
    let path = scratch("zero_q.json");
    std::fs::write(&path, r#"{"atoms":[{"q":"0"}]}"#).unwrap();
    let out = run(&["verify", "--input", path.to_str().unwrap(), "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("$.atoms[0].q"));
    let out = run(&["verify", "--input", fixture("default_h.json").to_str().unwrap(), "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "--input", "/nonexistent/input.json", "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chars_modulus_must_cover_the_conductor() {
    let path = scratch("unit3.json");
    std::fs::write(&path, r#"{"atoms":[{"q":"1","locals":[{"p":3,"unit":[{"center":"1","level":1}]}]}]}"#).unwrap();
    let out = run(&["chars", "--input", path.to_str().unwrap(), "--modulus", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["exact_checksum"], true);
    assert_eq!(report["characters"].as_array().unwrap().len(), 2);
    let out = run(&["chars", "--input", path.to_str().unwrap(), "--modulus", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn poisson_fixtures() {
    for (name, value) in [("poisson_default.json", 1.0864348112), ("poisson_2z2.json", 1.0000069747)] {
        let input = fixture(name);
        let out = run(&["poisson", "--input", input.to_str().unwrap(), "--tol", "1e-12"]);
        assert_eq!(out.status.code(), Some(0));
        let report = stdout_json(&out);
        assert_eq!(report["kind"], "poisson");
        for side in ["lhs", "rhs"] {
            assert!((report[side]["re"].as_f64().unwrap() - value).abs() < 1e-9, "{name} {side}");
        }
    }
}

#[test]
fn fourier_of_two_z_two() {
    let input = fixture("local_2z2.json");
    let out = run(&["fourier", "--p", "2", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let got = local_sb_from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let expected = local_sb_from_json(r#"{"p":2,"atoms":[{"coeff":"1/2","level":-1}]}"#).unwrap();
    assert_eq!(got, expected);
    let out = run(&["fourier", "--p", "3", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn random_is_deterministic() {
    let args = ["random", "--seed", "1", "--primes", "2,3,5", "--atoms", "3", "--max-level", "2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let h = hecke_from_json(&String::from_utf8(a.stdout.clone()).unwrap()).unwrap();
    assert_eq!(h, random_hecke(1, &RandomBox::standard()).unwrap());
    let c = run(&["random", "--seed", "2", "--primes", "2,3,5", "--atoms", "3", "--max-level", "2"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn random_then_verify_with_identical_reports() {
    let input = scratch("random7.json");
    let out = run(&["random", "--seed", "7", "--kind", "hecke", "--output", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report_a = scratch("report_a.json");
    let report_b = scratch("report_b.json");
    for report in [&report_a, &report_b] {
        let out = run(&[
            "verify", "--input", input.to_str().unwrap(), "--tol", "1e-8", "--seed", "7", "--report", report.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read(&report_a).unwrap();
    assert_eq!(a, std::fs::read(&report_b).unwrap());
    let report: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["metadata"]["seed"], 7);
    assert_eq!(report["metadata"]["tolerances"]["tol"], 1e-8);
}

#[test]
fn random_poisson_then_check() {
    let input = scratch("random_poisson.json");
    let out = run(&["random", "--seed", "3", "--kind", "poisson", "--output", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["poisson", "--input", input.to_str().unwrap(), "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn serialization_round_trips_for_100_random_elements() {
    let bx = RandomBox::standard();
    for seed in 0..100 {
        let h = random_hecke(seed, &bx).unwrap();
        let text = hecke_to_json(&h);
        let back = hecke_from_json(&text).unwrap();
        assert_eq!(back, h, "seed {seed}");
        assert_eq!(hecke_to_json(&back), text);
        let phi = random_poisson(seed, &bx).unwrap();
        let text = poisson_to_json(&phi);
        assert_eq!(poisson_from_json(&text).unwrap(), phi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_over_the_parameter_box(seed in any::<u64>(), atoms in 1usize..5, level in 0u32..3) {
        let bx = RandomBox { atoms, max_level: level, ..RandomBox::standard() };
        let h = random_hecke(seed, &bx).unwrap();
        let text = hecke_to_json(&h);
        prop_assert_eq!(hecke_from_json(&text).unwrap(), h);
    }
}
