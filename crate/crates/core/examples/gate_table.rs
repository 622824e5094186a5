//! Full-size truth table for one built-in gate. Each row is a 200×200
//! optimisation, so expect a few minutes per row.
//!
//!     cargo run --release --example gate_table -- and dirichlet
//!     cargo run --release --example gate_table -- xor neumann
//!     cargo run --release --example gate_table -- half-adder dirichlet

use heat_logic::gates::{truth_table, BcKind, GateKind, GateSpec};

fn main() -> heat_logic::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind: GateKind = args.next().as_deref().unwrap_or("and").parse()?;
    let bc: BcKind = args.next().as_deref().unwrap_or("dirichlet").parse()?;
    let spec = GateSpec::build(kind, bc);
    let params = spec.default_params();

    println!("{}-{} on {}x{}, mass {}", kind.name(), bc.name(), spec.nx, spec.ny, params.mass);
    for site in &spec.sites {
        println!("  {:4} at ({:3},{:3}) {:?}", site.name, site.col, site.row, site.role);
    }

    let table = truth_table(&spec, &params);
    for row in &table.rows {
        let expected = row.expected(&spec);
        match &row.outcome {
            Ok(o) => {
                let cells: Vec<String> = o
                    .readout
                    .outputs
                    .iter()
                    .zip(&expected)
                    .map(|(r, &want)| {
                        format!("{}={} (rho {:.3}, want {})", r.name, r.value as u8, r.density, want as u8)
                    })
                    .collect();
                println!(
                    "x={} y={}  {}  [{} after {}]",
                    row.x as u8,
                    row.y as u8,
                    cells.join("  "),
                    o.trace.termination,
                    o.trace.iterations()
                );
            }
            Err(e) => println!("x={} y={}  failed: {e}", row.x as u8, row.y as u8),
        }
    }
    println!("table {}", if table.matches(&spec) { "matches" } else { "does not match" });
    Ok(())
}
