use std::path::Path;
use std::process::Command;

use acslm::cli::*;
use acslm::Error;
use serde_json::json;

const BIN: &str = env!("CARGO_BIN_EXE_acslm");

fn bundled(name: &str) -> LoadedManifest {
    load(&resolve(name).unwrap()).unwrap()
}

fn run_bundled(name: &str) -> Report {
    run(&bundled(name), RunOptions::default()).unwrap()
}

fn from_json(v: serde_json::Value) -> Result<LoadedManifest, Error> {
    let m = parse(&v.to_string())?;
    LoadedManifest::from_manifest(m, bundled_dir())
}

fn moduli_dims(r: &Report) -> (u64, u64) {
    let v = &r.block("moduli").unwrap().values;
    (v["dim_def_sl"].as_u64().unwrap(), v["dim_def_sl_l2"].as_u64().unwrap())
}

#[test]
fn theorem_manifests() {
    assert_eq!(moduli_dims(&run_bundled("r3_model")), (0, 0));
    assert_eq!(moduli_dims(&run_bundled("s2_neck")), (1, 1));
    assert_eq!(moduli_dims(&run_bundled("t2_neck")), (11, 1));
}

#[test]
fn every_bundled_manifest_runs_by_name() {
    let mut names: Vec<String> = std::fs::read_dir(bundled_dir())
        .unwrap()
        .map(|e| e.unwrap().path().file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert!(names.len() >= 8);
    for name in names {
        let out = Command::new(BIN).args(["run", &name]).output().unwrap();
        let code = out.status.code().unwrap();
        if name == "exceptional_epsilon" {
            assert_eq!(code, 2);
            continue;
        }
        assert_eq!(code, 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let rep: Report = serde_json::from_slice(&out.stdout).unwrap();
        assert!(rep.blocks.iter().all(|b| b.status == Status::Ok));
        assert!(rep.blocks.iter().all(|b| !b.module.is_empty() && !b.operation.is_empty()));
    }
}

#[test]
fn reports_are_byte_identical() {
    for name in ["s2_neck", "neck_cone", "cone_geodesics"] {
        let a = run_bundled(name).to_json();
        let b = run_bundled(name).to_json();
        assert_eq!(a, b);
    }
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<Vec<u8>> = (0..2)
        .map(|k| {
            let p = dir.path().join(format!("r{k}.json"));
            let st = Command::new(BIN).args(["run", "capped_probe", "--out"]).arg(&p).status().unwrap();
            assert!(st.success());
            std::fs::read(&p).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn timings_are_opt_in() {
    let m = bundled("s2_neck");
    let plain = run(&m, RunOptions::default()).unwrap();
    assert!(plain.blocks.iter().all(|b| b.wall_ms.is_none()));
    assert!(!plain.to_json().contains("wall_ms"));
    let timed = run(&m, RunOptions { seed: 0, timings: true }).unwrap();
    assert!(timed.blocks.iter().all(|b| b.wall_ms.is_some()));
}

#[test]
fn exceptional_epsilon_is_a_validation_error() {
    match run(&bundled("exceptional_epsilon"), RunOptions::default()) {
        Err(Error::Validation { pointer, message }) => {
            assert_eq!(pointer, "/weights/epsilon");
            assert!(message.contains("exceptional weight 0 "), "{message}");
        }
        other => panic!("{other:?}"),
    }
    let out = Command::new(BIN).args(["run", "exceptional_epsilon"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/weights/epsilon"));
}

#[test]
fn validation_errors_carry_pointers() {
    let base = json!({ "n": 3, "ends": [{ "kind": "round_sphere" }], "analyses": ["spectrum"] });
    assert!(from_json(base.clone()).is_ok());

    let cases = [
        // tagged variants are buffered, so type errors point at the element
        (json!({ "n": 3, "ends": [{ "kind": "round_sphere", "radius": "big" }], "analyses": ["spectrum"] }), "/ends/0"),
        (json!({ "n": 3, "ends": [{ "kind": "round_sphere", "radius": -1.0 }], "analyses": ["spectrum"] }), "/ends/0/radius"),
        (json!({ "n": 3, "ends": [], "analyses": ["spectrum"] }), "/ends"),
        (json!({ "n": 3, "ends": [{ "kind": "round_sphere" }], "analyses": [] }), "/analyses"),
        (json!({ "n": 3, "ends": [{ "kind": "round_sphere" }], "analyses": ["plots"] }), "/analyses/0"),
        (json!({ "n": 2, "ends": [{ "kind": "round_sphere" }], "analyses": ["spectrum"] }), "/n"),
        (json!({ "n": 3, "ends": [{ "kind": "round_sphere" }], "analyses": ["moduli"] }), "/topology"),
        (json!({ "n": 3, "ends": [{ "kind": "round_sphere" }], "topology": "missing.cplx", "analyses": ["moduli"] }), "/topology"),
        (json!({ "n": 3, "ends": [{ "kind": "mesh", "path": "nope.off" }], "analyses": ["spectrum"] }), "/ends/0/path"),
        (json!({ "n": 4, "ends": [{ "kind": "flat_torus", "vectors": [[1.0, 0.0], [0.0, 1.0]] }], "analyses": ["spectrum"] }), "/ends/0/vectors"),
        (json!({ "n": 3, "ends": [{ "kind": "round_sphere" }], "analyses": ["cone"] }), "/cone"),
        (json!({ "n": 3, "analyses": ["geodesic"], "geometry": { "chart": { "kind": "scaled_cone", "c": -1.0, "dim": 3 }, "y": [1.0, 0.0], "field": { "class": "sc_field", "components": [{}, {}, {}] } } }), "/geometry/chart"),
        (json!({ "n": 3, "analyses": ["geodesic"], "geometry": { "chart": { "kind": "scaled_cone", "c": 2.0, "dim": 3 }, "y": [1.0], "field": { "class": "sc_field", "components": [{}, {}, {}] } } }), "/geometry/y"),
        (json!({ "n": 3, "ends": [{ "kind": "round_sphere" }], "analyses": ["spectrum"], "extra": 1 }), "/extra"),
    ];
    for (v, want) in cases {
        match from_json(v.clone()) {
            Err(Error::Validation { pointer, .. }) => assert_eq!(pointer, want, "{v}"),
            other => panic!("{v}: {other:?}"),
        }
    }
}

#[test]
fn block_failures_are_partial() {
    // δ = 0 is exceptional: the count fails, the gluing still runs
    let m = from_json(json!({
        "n": 3,
        "ends": [{ "kind": "round_sphere" }, { "kind": "round_sphere" }],
        "analyses": ["spectrum", "cone"],
        "cone": { "profile": { "kind": "smoothed_neck" }, "deltas": [0.0], "lambda_max": 6.0, "glue": { "end_values": [1.0, 0.0] } }
    }))
    .unwrap();
    let r = run(&m, RunOptions::default()).unwrap();
    assert_eq!(r.exit_code, 2);
    assert_eq!(r.block("cone.count").unwrap().status, Status::Failed);
    assert_eq!(r.block("cone.count").unwrap().error.as_ref().unwrap().kind, "exceptional_weight");
    assert_eq!(r.block("cone.glue").unwrap().status, Status::Ok);
    assert_eq!(r.block("spectrum").unwrap().status, Status::Ok);

    let m = from_json(json!({
        "n": 3,
        "ends": [{ "kind": "round_sphere" }],
        "topology": { "builtin": "ball" },
        "weights": { "k1_deltas": [2.5] },
        "analyses": ["topology", "moduli"]
    }))
    .unwrap();
    let r = run(&m, RunOptions::default()).unwrap();
    assert_eq!(r.block("topology").unwrap().status, Status::Ok);
    assert_eq!(r.block("moduli").unwrap().error.as_ref().unwrap().kind, "out_of_validity");
}

#[test]
fn dependency_order_and_hidden_dependencies() {
    let r = run_bundled("s2_neck");
    let ids: Vec<&str> = r.blocks.iter().map(|b| b.id.as_str()).collect();
    assert_eq!(ids, ["spectrum", "weights", "topology", "moduli"]);
    // moduli alone still computes spectra and cohomology, without reporting them
    let r = run_bundled("r3_model");
    let ids: Vec<&str> = r.blocks.iter().map(|b| b.id.as_str()).collect();
    assert_eq!(ids, ["moduli"]);
}

#[test]
fn explain_renders_formulas() {
    let r = run_bundled("s2_neck");
    let text = explain(&r, "moduli").unwrap();
    assert!(text.contains("dim H1 + dim H0_(-1+eps) - 1 = 0 + 2 - 1 = 1"), "{text}");
    assert!(text.contains("dim H1_c"));
    let text = explain(&r, "weights").unwrap();
    assert!(text.contains("a_plus") && text.contains("a_minus"));
    let r = run_bundled("neck_cone");
    let text = explain(&r, "cone").unwrap();
    assert!(text.contains("[cone.count]") && text.contains("[cone.glue]"));
    assert!(text.contains("shooting 8 vs dim_H0 8"));
    assert!(matches!(explain(&r, "nonsense"), Err(Error::Argument(_))));

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("rep.json");
    std::fs::write(&p, r.to_json()).unwrap();
    let out = Command::new(BIN).arg("explain").arg(&p).arg("cone.glue").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("F_at_0"));
    let out = Command::new(BIN).arg("explain").arg(&p).arg("moduli").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_moves_probe_jitter() {
    let m = bundled("capped_probe");
    let a = run(&m, RunOptions { seed: 5, timings: false }).unwrap();
    let inputs = &a.block("cone.probe").unwrap().inputs;
    assert_eq!(inputs["seeds"], json!([5, 6, 7]));
    assert_eq!(a.seed, 5);
    let v = &a.block("cone.probe").unwrap().values;
    assert_eq!(v["verdicts"][0]["trend"], "non_degenerating");
    assert_eq!(v["verdicts"][1]["trend"], "degenerating");
}

#[test]
fn output_field_and_unknown_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let m = json!({
        "n": 3,
        "ends": [{ "kind": "round_sphere" }],
        "topology": fixtures.join("ball.cplx"),
        "analyses": ["topology"],
        "output": "out.json"
    });
    let mp = dir.path().join("m.json");
    std::fs::write(&mp, m.to_string()).unwrap();
    let st = Command::new(BIN).arg("run").arg(&mp).status().unwrap();
    assert!(st.success());
    let rep: Report = serde_json::from_slice(&std::fs::read(dir.path().join("out.json")).unwrap()).unwrap();
    assert_eq!(rep.block("topology").unwrap().values["s"], 1);

    let out = Command::new(BIN).args(["run", "no_such_manifest"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
