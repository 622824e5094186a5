//! Write density snapshots, the convergence log and a manifest for a short
//! run of the temperature-encoded AND gate.
//!
//!     cargo run --release --example snapshot_export -- [out-dir]

use heat_logic::cli::{cmd_run, ConfigFile, RunConfig, SnapshotFormat};

fn main() -> heat_logic::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "snapshots".into());
    let mut file = ConfigFile::parse(
        r#"
        [gate]
        kind = "and"
        bc = "dirichlet"
        x = 1
        y = 0

        [optimizer]
        max_iters = 50
        snapshot_stride = 10
        "#,
    )?;
    file.set("theta=0.03")?;
    let mut config = RunConfig::resolve(&file)?;
    config.out_dir = out.into();
    config.format = SnapshotFormat::Both;

    let report = cmd_run(&config)?;
    let mut files: Vec<_> = std::fs::read_dir(&report.out_dir)
        .map_err(|e| heat_logic::Error::Io { path: report.out_dir.clone(), source: e })?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect();
    files.sort();
    println!("wrote {} files to {}", files.len(), report.out_dir.display());
    for f in files {
        println!("  {f}");
    }
    Ok(())
}
