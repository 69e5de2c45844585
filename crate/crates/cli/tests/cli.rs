use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use littlewood_cli::args::{Cli, Format, GlobalArgs};
use littlewood_cli::config::Settings;
use littlewood_cli::error::{CliError, EXIT_FAIL, EXIT_PASS, EXIT_RESOURCE, EXIT_USAGE};
use littlewood_cli::report::Report;
use littlewood_cli::suite::{run_suite, SuiteOptions};
use littlewood_cli::{main_with_args, run};

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("littlewood-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn report(args: &[&str]) -> Report {
    let mut full = vec!["littlewood"];
    full.extend_from_slice(args);
    run(&Cli::try_parse_from(full).unwrap()).unwrap()
}

fn code(args: &[&str]) -> i32 {
    let out = tmp(&format!("out-{}.json", args.join("_").replace(['/', ':', '{', '}', '"', ','], "")));
    let mut full = vec!["littlewood".to_string(), "-o".into(), out.display().to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    main_with_args(full)
}

#[test]
fn norm_of_interval_101() {
    let r = report(&["norm", "--set", "interval:101", "--rel-err", "0.01"]);
    assert!(r.pass);
    let lo = r.result["lo"].as_f64().unwrap();
    let hi = r.result["hi"].as_f64().unwrap();
    assert!(lo <= 2.859_870_343 && 2.859_870_343 <= hi);
    assert!(hi - lo < 0.06);
    assert!(r.result["grid"].is_array() && r.result["riemann"].is_number());
}

#[test]
fn gen_gap_example() {
    let r = report(&["gen", "--kind", "gap", "--params", r#"{"a":1,"b":10,"M":3,"N":2}"#]);
    assert_eq!(r.result["set"], serde_json::json!([11, 12, 13, 21, 22, 23]));
}

#[test]
fn gen_output_feeds_verify() {
    let path = tmp("z16.json");
    let r = report(&["gen", "--kind", "zstrong-box", "--params", r#"{"deltas":[1.0],"sizes":[16,16]}"#]);
    assert!(r.pass);
    std::fs::write(&path, serde_json::to_string(&r.result).unwrap()).unwrap();
    let p = path.to_str().unwrap();
    let v = report(&["verify", "--theorem", "multidimz", "--input", p]);
    assert!(v.pass);
    assert_eq!(v.result["certified"], false);
    let e = report(&["verify", "--theorem", "multidimz", "--input", p, "--empirical-c", "0.25"]);
    assert!(e.pass);
    let m = report(&["verify", "--theorem", "main-prop", "--input", p]);
    assert!(m.pass);
    assert_eq!(m.result["q"], 16);

    let lattice = report(&["gen", "--kind", "lattice-random", "--params", r#"{"sizes":[3,4]}"#, "--seed", "3"]);
    let lp = tmp("lat.json");
    std::fs::write(&lp, serde_json::to_string(&lattice.result).unwrap()).unwrap();
    let b = report(&["verify", "--theorem", "basic-multidim", "--input", lp.to_str().unwrap()]);
    assert!(b.result["rhs_lower"].as_f64().unwrap() <= b.result["rhs"].as_f64().unwrap());
}

#[test]
fn saved_reports_are_valid_inputs() {
    let path = tmp("saved.json");
    let gen = main_with_args([
        "littlewood", "gen", "--kind", "zstrong-box", "--params", r#"{"deltas":[1.0],"sizes":[16,16]}"#,
        "-o", path.to_str().unwrap(),
    ]);
    assert_eq!(gen, EXIT_PASS);
    let p = path.to_str().unwrap();
    assert!(report(&["verify", "--theorem", "multidimz", "--input", p]).pass);
    assert!(report(&["verify", "--theorem", "main-prop", "--input", p]).pass);
}

#[test]
fn verify_multidim_on_box_shorthand() {
    let r = report(&["verify", "--theorem", "multidim", "--set", "box:8x8", "--rel-err", "0.1"]);
    assert!(r.pass);
    let lo = r.result["lhs"]["lo"].as_f64().unwrap();
    let hi = r.result["lhs"]["hi"].as_f64().unwrap();
    // 1.83238407681662^2
    assert!(lo <= 3.357_631_404_971 && 3.357_631_404_971 <= hi);
}

#[test]
fn verify_good_modulus_seeded_and_on_input() {
    let r = report(&["verify", "--theorem", "good-modulus", "--seed", "7"]);
    assert!(r.pass);
    let set = report(&["verify", "--theorem", "good-modulus", "--set", "interval:0..99"]);
    assert!(set.pass);
    assert_eq!(set.result["brute_force_agrees"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["norm", "--set", "interval:20"]), EXIT_PASS);
    assert_eq!(code(&["verify", "--theorem", "mps", "--set", "interval:101", "--c-mps", "5"]), EXIT_FAIL);
    assert_eq!(
        code(&["verify", "--theorem", "mps", "--set", "interval:101", "--c-mps", "5", "--no-fail"]),
        EXIT_PASS
    );
    assert_eq!(code(&["norm", "--set", "nonsense"]), EXIT_USAGE);
    assert_eq!(code(&["norm", "--set", "interval:20", "--rel-err", "2"]), EXIT_USAGE);
    assert_eq!(code(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(
        code(&["norm", "--set", "interval:1000", "--memory-budget", "64"]),
        EXIT_RESOURCE
    );
}

#[test]
fn config_file_sits_under_flags_and_env() {
    let path = tmp("config.json");
    std::fs::write(&path, r#"{"rel_err": 0.2, "seed": 9, "memory_budget": 1000, "format": "csv"}"#).unwrap();
    let args = GlobalArgs { config: Some(path.clone()), ..GlobalArgs::default() };
    let s = Settings::resolve(&args, None).unwrap();
    assert_eq!((s.rel_err, s.seed, s.memory_budget, s.format), (Some(0.2), 9, 1000, Format::Csv));

    let s = Settings::resolve(&args, Some("5000")).unwrap();
    assert_eq!(s.memory_budget, 5000);

    let flags = GlobalArgs { rel_err: Some(0.01), memory_budget: Some(7), ..args.clone() };
    let s = Settings::resolve(&flags, Some("5000")).unwrap();
    assert_eq!((s.rel_err, s.memory_budget, s.seed), (Some(0.01), 7, 9));

    std::fs::write(&path, r#"{"unknown_key": 1}"#).unwrap();
    assert!(matches!(Settings::resolve(&args, None), Err(CliError::Usage(_))));
    assert!(matches!(Settings::resolve(&GlobalArgs::default(), Some("lots")), Err(CliError::Usage(_))));
}

#[test]
fn json_export_round_trips() {
    for args in [
        vec!["norm", "--set", "gap:1,10,3,2"],
        vec!["verify", "--theorem", "mps", "--set", "interval:64"],
        vec!["kernel", "--m", "3", "--n", "10"],
    ] {
        let r = report(&args);
        let back = Report::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}

#[test]
fn csv_export() {
    let r = report(&["kernel", "--m", "2", "--n", "5"]);
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,fraction,float"));
    assert_eq!(lines.count(), 2 * (5 + 2 * 2) - 1);
    assert!(text.contains("\n0,1,1\n"));

    // an empty scan exports only its header
    let fam = tmp("empty.json");
    std::fs::write(&fam, r#"{"family": "intervals", "from": 10, "to": 4}"#).unwrap();
    let r = report(&["verify", "--theorem", "mps", "--input", fam.to_str().unwrap()]);
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "label,size,lhs_lo,lhs_hi,rhs_unit,ratio\n");

    let scan = tmp("scan.json");
    std::fs::write(&scan, r#"{"family": "intervals", "from": 4, "to": 9}"#).unwrap();
    let r = report(&["verify", "--theorem", "mps", "--input", scan.to_str().unwrap()]);
    assert!(r.pass);
    assert_eq!(r.table.rows.len(), 6);
}

#[test]
fn output_file_written() {
    let out = tmp("norm.csv");
    let status = main_with_args([
        "littlewood", "norm", "--set", "interval:8", "--format", "csv", "-o", out.to_str().unwrap(),
    ]);
    assert_eq!(status, EXIT_PASS);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("label,lo,hi,riemann,grid\nnorm,"));
    std::io::stdout().flush().unwrap();
}

#[test]
fn thin_command() {
    // stretch 2 makes d2 large enough for (2 + 2 delta) d1 + 4 <= d2
    let gen = report(&["gen", "--kind", "zstrong-box", "--params", r#"{"deltas":[1.5],"sizes":[12,16],"stretch":2}"#]);
    let path = tmp("thin.json");
    std::fs::write(&path, serde_json::to_string(&gen.result).unwrap()).unwrap();
    let cert = &gen.result["certificate"]["integer"];
    let (d1, d2) = (cert["d1"].to_string(), cert["d2"].to_string());
    let r = report(&[
        "thin", "--input", path.to_str().unwrap(), "--d1", &d1, "--d2", &d2, "--delta", "1.5", "--q", "4", "--s", "1",
    ]);
    assert!(r.pass);
    assert_eq!(r.result["thinning"]["kept"], serde_json::json!([1, 5, 9]));
    assert_eq!(r.table.rows.len(), 3 * 16);
    assert_eq!(code(&["thin", "--set", "interval:10", "--d1", "5", "--d2", "12", "--delta", "1", "--q", "4", "--s", "0"]), EXIT_FAIL);
}

#[test]
fn repeated_runs_are_identical_modulo_timing() {
    let args = ["suite", "--only", "4,5,6,7", "--seed", "3"];
    let a = report(&args);
    let b = report(&args);
    assert_eq!(a.numeric_view(), b.numeric_view());
    assert!(a.numeric_view().get("timestamp").is_none());
}

#[test]
fn fault_injection_fails_kernel_criteria() {
    let opts = SuiteOptions { only: vec![1, 2], fault_kernel: true, ..SuiteOptions::default() };
    let rep = run_suite(&opts).unwrap();
    assert!(rep.criteria.iter().all(|c| !c.pass));
    assert!(!rep.pass);
    let clean = run_suite(&SuiteOptions { only: vec![1, 2], ..SuiteOptions::default() }).unwrap();
    assert!(clean.pass);
}

#[test]
fn coarse_tolerance_suite_still_passes() {
    let opts = SuiteOptions { only: vec![5, 7, 9, 10], rel_err: Some(0.5), ..SuiteOptions::default() };
    let rep = run_suite(&opts).unwrap();
    assert!(rep.pass, "{:?}", rep.criteria.iter().map(|c| &c.summary).collect::<Vec<_>>());
}
