//! A user-defined gate from a TOML configuration: a small XOR-style layout
//! with a grounded outlet below the inputs.
//!
//!     cargo run --release --example custom_gate

use heat_logic::cli::{ConfigFile, RunConfig};
use heat_logic::gates::truth_table;

const CONFIG: &str = r#"
[gate]
kind = "xor"
bc = "dirichlet"
nx = 80
ny = 80
mass = 300.0
sites = [
    { name = "I_x", col = 20, row = 60, role = "input-x" },
    { name = "I_y", col = 60, row = 60, role = "input-y" },
    { name = "O", col = 40, row = 60, role = "output", logic = "xor" },
    { name = "V", col = 40, row = 15, role = "outlet", grounded = true },
]

[optimizer]
max_iters = 150
"#;

fn main() -> heat_logic::Result<()> {
    let config = RunConfig::resolve(&ConfigFile::parse(CONFIG)?)?;
    let table = truth_table(&config.spec, &config.params);
    for row in &table.rows {
        match &row.outcome {
            Ok(o) => {
                let r = &o.readout.outputs[0];
                println!("x={} y={} -> {} (rho {:.3})", row.x as u8, row.y as u8, r.value as u8, r.density);
            }
            Err(e) => println!("x={} y={} failed: {e}", row.x as u8, row.y as u8),
        }
    }
    println!("xor reproduced: {}", table.matches(&config.spec));
    Ok(())
}
