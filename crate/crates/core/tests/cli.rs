use std::fs;
use std::path::Path;

use heat_logic::cli::export::decode_csv;
use heat_logic::cli::{main_with_args, EXIT_CONFIG, EXIT_MISMATCH, EXIT_OK};

const SMALL_GATE: &str = r#"
[gate]
kind = "and"
bc = "dirichlet"
x = 1
y = 1
nx = 40
ny = 40
mass = 60.0
sites = [
    { name = "I_x", col = 10, row = 30, role = "input-x" },
    { name = "I_y", col = 30, row = 30, role = "input-y" },
    { name = "O", col = 20, row = 10, role = "output", grounded = true, logic = "and" },
]

[optimizer]
max_iters = 25
snapshot_stride = 10
"#;

fn cli(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("heat-logic").chain(args.iter().copied()))
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn zero_lower_bound_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let code = cli(&[
        "run", "--gate", "and", "--bc", "dirichlet", "--x", "1", "--y", "1",
        "--set", "rho_min=0", "--out", path_arg(dir.path()),
    ]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(!dir.path().join("manifest.toml").exists());
}

#[test]
fn bad_flags_and_keys_are_config_errors() {
    assert_eq!(cli(&["run", "--gate", "nand", "--bc", "dirichlet"]), EXIT_CONFIG);
    assert_eq!(cli(&["run", "--gate", "and", "--bc", "robin"]), EXIT_CONFIG);
    assert_eq!(cli(&["run", "--gate", "and", "--bc", "dirichlet", "--set", "speed=3"]), EXIT_CONFIG);
    assert_eq!(cli(&["run", "--gate", "and", "--bc", "dirichlet", "--x", "2"]), EXIT_CONFIG);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[optimizer]\ntheta = 0.03\nthetta = 1\n").unwrap();
    assert_eq!(cli(&["run", "--gate", "and", "--bc", "dirichlet", "--config", path_arg(&cfg)]), EXIT_CONFIG);
    let missing = dir.path().join("missing.toml");
    assert_eq!(cli(&["run", "--config", path_arg(&missing)]), EXIT_CONFIG);
}

#[test]
fn zero_input_run_converges_at_once() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("xor00");
    let code = cli(&[
        "run", "--gate", "xor", "--bc", "neumann", "--x", "0", "--y", "0",
        "--out", path_arg(&out),
    ]);
    assert_eq!(code, EXIT_OK);
    let manifest: toml::Table = fs::read_to_string(out.join("manifest.toml")).unwrap().parse().unwrap();
    let result = manifest["result"].as_table().unwrap();
    assert_eq!(result["termination"].as_str(), Some("converged"));
    assert_eq!(result["iterations"].as_integer(), Some(1));
    assert_eq!(result["outputs"]["O"].as_integer(), Some(0));
    assert!(out.join("density_t1.pgm").exists());
    assert!(out.join("density_t1.csv").exists());
    let log = fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert_eq!(log.lines().count(), 2);
}

#[test]
fn run_from_manifest_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gate.toml");
    fs::write(&cfg, SMALL_GATE).unwrap();
    let first = dir.path().join("first");
    assert_eq!(cli(&["run", "--config", path_arg(&cfg), "--out", path_arg(&first)]), EXIT_OK);

    let snapshots: Vec<String> = fs::read_dir(&first)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv") && n.starts_with("density_t"))
        .collect();
    for stem in ["density_t10", "density_t20", "density_t25"] {
        assert!(snapshots.contains(&format!("{stem}.csv")), "{snapshots:?}");
        assert!(first.join(format!("{stem}.pgm")).exists());
    }

    let second = dir.path().join("second");
    let manifest = first.join("manifest.toml");
    assert_eq!(
        cli(&["run", "--config", path_arg(&manifest), "--out", path_arg(&second)]),
        EXIT_OK
    );
    let read = |d: &Path, f: &str| fs::read_to_string(d.join(f)).unwrap();
    let a = decode_csv(&read(&first, "density_t25.csv")).unwrap();
    let b = decode_csv(&read(&second, "density_t25.csv")).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!((a.0, a.1), (40, 40));
    assert_eq!(bits(&a.2), bits(&b.2));
    assert_eq!(read(&first, "convergence.csv"), read(&second, "convergence.csv"));

    let strip = |text: String| text.replace(path_arg(&second), path_arg(&first));
    assert_eq!(read(&first, "manifest.toml"), strip(read(&second, "manifest.toml")));
}

#[test]
fn csv_only_output_skips_images() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gate.toml");
    fs::write(&cfg, SMALL_GATE).unwrap();
    let out = dir.path().join("csv");
    let code = cli(&[
        "run", "--config", path_arg(&cfg), "--iters", "5", "--format", "csv",
        "--out", path_arg(&out),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.join("density_t5.csv").exists());
    assert!(!out.join("density_t5.pgm").exists());
}

#[test]
fn one_iteration_cannot_reproduce_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let code = cli(&[
        "truth-table", "--gate", "and", "--bc", "dirichlet", "--set", "max_iters=1",
        "--out", path_arg(dir.path()),
    ]);
    assert_eq!(code, EXIT_MISMATCH);
    let table = fs::read_to_string(dir.path().join("truth_table.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "x,y,O,rho_O,iterations");
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("1,1,0,"));
    for row in ["row_x0_y0", "row_x0_y1", "row_x1_y0", "row_x1_y1"] {
        assert!(dir.path().join(row).join("manifest.toml").exists());
    }
}
