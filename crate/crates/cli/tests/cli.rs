use std::path::Path;
use std::process::Command;

use royden::graph::parse_graph_file;
use royden::potential::{equilibrium_potential, free_resistance};
use royden::{ExhaustionGenerator, VertexFn};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn royden(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_royden"))
        .args(args)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn ok(args: &[&str]) -> Value {
    let r = royden(args);
    assert_eq!(r.code, 0, "{args:?}: {}{}", r.stdout, r.stderr);
    r.json()
}

fn schema_check(def: &str, value: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas/outputs.json");
    let mut schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(schema["$defs"].get(def).is_some(), "no schema for {def}");
    schema["$ref"] = Value::String(format!("#/$defs/{def}"));
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(value)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{def}: {errors:?}");
}

#[test]
fn cap_matches_library() {
    let v = ok(&["cap", "--generator", "lattice:d=3,r=8", "--vertex", "0,0,0"]);
    let s = ExhaustionGenerator::lattice(3).unwrap().level(8).unwrap();
    let eq = equilibrium_potential(&s, s.resolve("0,0,0").unwrap()).unwrap();
    assert_eq!(v["cap"].as_f64().unwrap(), eq.cap);
    assert_eq!(v["level"], 8);
}

#[test]
fn numbers_round_trip() {
    let v = ok(&[
        "resistance",
        "--generator",
        "tree:k=3,depth=3",
        "--x",
        "t.0",
        "--y",
        "t.1.1",
    ]);
    let s = ExhaustionGenerator::tree(3).unwrap().level(3).unwrap();
    let r = free_resistance(&s, s.resolve("t.0").unwrap(), s.resolve("t.1.1").unwrap()).unwrap();
    assert_eq!(v["resistance"].as_f64().unwrap(), r);
}

#[test]
fn planar_lattice_is_recurrent() {
    let v = ok(&[
        "classify",
        "--generator",
        "lattice:d=2",
        "--levels",
        "8,11,16,23,32,45,64",
        "--tol",
        "1e-3",
    ]);
    assert_eq!(v["verdict"], "recurrent");
    assert_eq!(v["profile"]["model"], "log-decay");
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["cap", "--generator", "lattice:d=0"],
        &["cap", "--generator", "lattice:d=3"],
        &["cap"],
        &[
            "cap",
            "--generator",
            "lattice:d=1,r=2",
            "--graph",
            "x.graph",
        ],
        &["cap", "--generator", "lattice:d=1,r=2", "--tol", "0"],
        &["cap", "--generator", "lattice:d=1,r=2", "--bogus"],
        &["classify", "--generator", "lattice:d=1", "--levels", "5,3"],
    ];
    for args in cases {
        let r = royden(args);
        assert_eq!(r.code, 2, "{args:?}: {}{}", r.stdout, r.stderr);
        if !r.stdout.is_empty() {
            assert_eq!(r.json()["error"]["kind"], "Usage");
        }
    }
}

#[test]
fn domain_errors_exit_one_with_record() {
    let cases: &[(&[&str], &str)] = &[
        (
            &[
                "gamma",
                "--generator",
                "lattice:d=1,r=3",
                "--x",
                "0",
                "--y",
                "0",
            ],
            "SameVertex",
        ),
        (
            &["cap", "--generator", "lattice:d=1,r=3", "--vertex", "9"],
            "UnknownVertex",
        ),
        (
            &["cap", "--generator", "lattice:d=1,r=3", "--vertex", "3"],
            "NotInterior",
        ),
        (
            &[
                "heat",
                "--generator",
                "lattice:d=1,r=3",
                "--t",
                "1",
                "--fixture",
                "ray",
            ],
            "InvalidLabel",
        ),
        (&["validate", "--graph", "/nonexistent/graph"], "Io"),
    ];
    for (args, kind) in cases {
        let r = royden(args);
        assert_eq!(r.code, 1, "{args:?}: {}{}", r.stdout, r.stderr);
        let v = r.json();
        assert_eq!(v["error"]["kind"], *kind, "{args:?}");
        schema_check("error", &v);
    }
}

#[test]
fn randomised_commands_require_seed() {
    let cases: &[&[&str]] = &[
        &["walk", "--generator", "lattice:d=2,r=3"],
        &["liouville", "--generator", "tree:k=3", "--levels", "2:5"],
        &["ultra", "--generator", "lattice:d=2,r=3", "--t", "1"],
        &["gapcheck", "--generator", "tree:k=3,depth=3"],
    ];
    for args in cases {
        let r = royden(args);
        assert_eq!(r.code, 2, "{args:?}");
        assert!(r.stderr.contains("--seed"));
    }
}

#[test]
fn output_does_not_depend_on_threads() {
    let run = |threads: &str| {
        royden(&[
            "walk",
            "--generator",
            "lattice:d=3,r=4",
            "--trials",
            "20000",
            "--seed",
            "9",
            "--threads",
            threads,
        ])
        .stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert!(one.contains("\"seed\": 9"));
}

#[test]
fn json_outputs_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).display().to_string();
    std::fs::write(p("f.txt"), "0,0 1\n1,0 -0.5\n").unwrap();
    std::fs::write(p("bv.txt"), "-2 0\n2 1\n").unwrap();
    let path = p("path.graph");
    ok(&["gen", "--generator", "lattice:d=1,r=2", "--out", &path]);
    let grid = "lattice:d=2,r=3";
    let tree = "tree:k=3,depth=4";
    let (f, bv, grid_file) = (p("f.txt"), p("bv.txt"), p("grid.graph"));
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("validate", vec!["validate", "--generator", grid]),
        ("gen", vec!["gen", "--generator", grid, "--out", &grid_file]),
        ("cap", vec!["cap", "--generator", grid]),
        (
            "cap",
            vec!["cap", "--graph", &path, "--vertex", "0", "--potential"],
        ),
        (
            "cap-profile",
            vec![
                "cap-profile",
                "--generator",
                "lattice:d=3",
                "--levels",
                "2:6",
            ],
        ),
        (
            "classify",
            vec!["classify", "--generator", "tree:k=3", "--levels", "2:6"],
        ),
        (
            "gamma",
            vec!["gamma", "--generator", grid, "--x", "0,0", "--y", "1,1"],
        ),
        (
            "gamma",
            vec!["gamma", "--graph", &path, "--x", "-2", "--y", "2"],
        ),
        (
            "gamma-o",
            vec![
                "gamma-o",
                "--generator",
                grid,
                "--o",
                "0,0",
                "--x",
                "1,0",
                "--y",
                "0,1",
            ],
        ),
        (
            "resistance",
            vec![
                "resistance",
                "--generator",
                grid,
                "--x",
                "0,0",
                "--y",
                "1,1",
            ],
        ),
        (
            "ut-report",
            vec![
                "ut-report",
                "--generator",
                "tree:k=3",
                "--levels",
                "2:7",
                "--liouville-levels",
                "2:6",
                "--seed",
                "1",
            ],
        ),
        (
            "ut-report",
            vec![
                "ut-report",
                "--generator",
                "lattice:d=1",
                "--levels",
                "2:12",
            ],
        ),
        (
            "dirichlet",
            vec!["dirichlet", "--graph", &path, "--values", &bv],
        ),
        (
            "decompose",
            vec!["decompose", "--generator", grid, "--fn", &f],
        ),
        (
            "maxcheck",
            vec!["maxcheck", "--generator", tree, "--fixture", "harmonic"],
        ),
        (
            "hbempty",
            vec!["hbempty", "--generator", "tree:k=3", "--levels", "2:6"],
        ),
        (
            "truncate-harmonic",
            vec!["truncate-harmonic", "--generator", tree],
        ),
        (
            "liouville",
            vec![
                "liouville",
                "--generator",
                "tree:k=3",
                "--levels",
                "2:6",
                "--seed",
                "1",
            ],
        ),
        (
            "spectrum",
            vec!["spectrum", "--generator", grid, "--k", "3"],
        ),
        ("bounds", vec!["bounds", "--generator", grid]),
        (
            "heat",
            vec!["heat", "--generator", grid, "--t", "0.5", "--fn", &f],
        ),
        ("trace", vec!["trace", "--graph", &path, "--t", "0.5,1,2"]),
        (
            "gapcheck",
            vec!["gapcheck", "--generator", tree, "--seed", "1"],
        ),
        (
            "gapcheck",
            vec!["gapcheck", "--generator", "tree:k=3", "--levels", "3:7"],
        ),
        (
            "walk",
            vec![
                "walk",
                "--generator",
                grid,
                "--seed",
                "1",
                "--trials",
                "1000",
            ],
        ),
        (
            "energy",
            vec![
                "energy",
                "--generator",
                grid,
                "--fn",
                &f,
                "--g",
                &f,
                "--o",
                "0,0",
                "--laplacian",
            ],
        ),
        (
            "ultra",
            vec!["ultra", "--generator", grid, "--t", "1", "--seed", "1"],
        ),
    ];
    for (def, args) in &cases {
        schema_check(def, &ok(args));
    }
}

#[test]
fn unbounded_gamma_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("split.graph");
    // {0, 1} has no mask and no killing, so its indicator costs nothing.
    std::fs::write(&path, "E 0 1 1\nE 2 3 1\nD 3\n").unwrap();
    let path = path.to_str().unwrap();
    let v = ok(&["gamma", "--graph", path, "--x", "0", "--y", "2"]);
    assert_eq!(v["regime"], "unbounded");
    assert_eq!(v["finite"], false);
    assert!(v["value"].is_null());
    schema_check("gamma", &v);

    let v = ok(&["gamma", "--graph", path, "--x", "0", "--y", "1"]);
    assert_eq!(v["regime"], "free-fallback");
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn csv_headers_are_stable() {
    let first = |args: &[&str]| {
        let r = royden(args);
        assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
        r.stdout.lines().next().unwrap().to_string()
    };
    let grid = "lattice:d=2,r=3";
    let cases: &[(&[&str], &str)] = &[
        (
            &[
                "cap-profile",
                "--generator",
                "lattice:d=3",
                "--levels",
                "2:5",
            ],
            "level,cap,plateau_residual,decay_residual",
        ),
        (&["spectrum", "--generator", grid], "index,eigenvalue"),
        (&["bounds", "--generator", grid], "n,bound,lambda,slack"),
        (&["trace", "--generator", grid, "--t", "1,2"], "t,trace"),
        (
            &[
                "liouville",
                "--generator",
                "tree:k=3",
                "--levels",
                "2:5",
                "--seed",
                "4",
            ],
            "level,oscillation",
        ),
        (
            &["cap", "--generator", grid, "--potential"],
            "vertex,label,value",
        ),
        (
            &["truncate-harmonic", "--generator", "tree:k=3,depth=3"],
            "vertex,label,f,truncated,f0,fh",
        ),
        (
            &["gapcheck", "--generator", "tree:k=3", "--levels", "3:6"],
            "level,lambda0",
        ),
    ];
    for (args, header) in cases {
        let mut full = vec!["--output", "csv"];
        full.extend_from_slice(args);
        assert_eq!(first(&full), *header, "{args:?}");
    }
    let r = royden(&[
        "--output",
        "csv",
        "resistance",
        "--generator",
        grid,
        "--x",
        "0,0",
        "--y",
        "1,0",
    ]);
    assert_eq!(r.stdout.lines().next(), Some("resistance"));
}

#[test]
fn generated_file_reads_back() {
    let r = royden(&["gen", "--generator", "tree:k=4,depth=3,c=0.25"]);
    assert_eq!(r.code, 0);
    let s = parse_graph_file(&r.stdout).unwrap();
    let direct = ExhaustionGenerator::tree(4)
        .unwrap()
        .with_killing(royden::graph::KillingRule::Constant(0.25))
        .unwrap()
        .level(3)
        .unwrap();
    assert!(s.same_as(&direct));
}

#[test]
fn solution_files_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("p.graph");
    let values = dir.path().join("bv.txt");
    let out = dir.path().join("sol.txt");
    std::fs::write(&graph, "E 0 1 1\nE 1 2 1\nE 2 3 1\nD 0\nD 3\n").unwrap();
    std::fs::write(&values, "0 0\n3 1\n").unwrap();
    let v = ok(&[
        "dirichlet",
        "--graph",
        graph.to_str().unwrap(),
        "--values",
        values.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let s = parse_graph_file(&std::fs::read_to_string(&graph).unwrap()).unwrap();
    let written = VertexFn::parse(&std::fs::read_to_string(&out).unwrap(), &s).unwrap();
    let printed: Vec<f64> = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(written.values(), printed.as_slice());
    for (got, want) in printed.iter().zip([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]) {
        assert!((got - want).abs() < 1e-10);
    }
}

#[test]
fn config_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "generator = \"lattice:d=1\"\nlevels = \"2:6\"\n").unwrap();
    let v = ok(&["cap-profile", "--config", config.to_str().unwrap()]);
    assert_eq!(v["levels"], serde_json::json!([2, 3, 4, 5, 6]));
    for (n, cap) in v["values"].as_array().unwrap().iter().enumerate() {
        assert!((cap.as_f64().unwrap() - 2.0 / (n + 2) as f64).abs() < 1e-10);
    }
    let flag = ok(&[
        "cap-profile",
        "--config",
        config.to_str().unwrap(),
        "--levels",
        "3,5",
    ]);
    assert_eq!(flag["levels"], serde_json::json!([3, 5]));

    std::fs::write(&config, "generatr = \"lattice:d=1\"\n").unwrap();
    assert_eq!(
        royden(&["validate", "--config", config.to_str().unwrap()]).code,
        2
    );
}

#[test]
fn help_lists_every_subcommand() {
    let r = royden(&["--help"]);
    assert_eq!(r.code, 0);
    for cmd in [
        "validate",
        "gen",
        "cap",
        "cap-profile",
        "classify",
        "gamma",
        "gamma-o",
        "resistance",
        "ut-report",
        "dirichlet",
        "decompose",
        "maxcheck",
        "hbempty",
        "truncate-harmonic",
        "liouville",
        "spectrum",
        "bounds",
        "heat",
        "trace",
        "gapcheck",
        "walk",
    ] {
        assert!(
            r.stdout
                .lines()
                .any(|l| l.trim_start().starts_with(&format!("{cmd} "))),
            "{cmd}"
        );
    }
}

#[test]
fn vertex_cap_comes_from_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_royden"))
        .args(["validate", "--generator", "lattice:d=2,r=10"])
        .env("ROYDEN_VERTEX_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "SizeOverflow");
    assert_eq!(
        ok(&["validate", "--generator", "lattice:d=2,r=10"])["vertices"],
        441
    );
}
