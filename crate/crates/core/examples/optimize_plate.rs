//! Grow a conductive path between a hot and a cold patch, with either update
//! rule.
//!
//!     cargo run --release --example optimize_plate -- [bang-bang|euler]

use heat_logic::fem::{BoundaryConditionSet, GridMesh};
use heat_logic::optimizer::{run_with, DensityField, OptParams, Stepper, UpdateRule};

fn main() -> heat_logic::Result<()> {
    let rule = match std::env::args().nth(1).as_deref() {
        Some("euler") => UpdateRule::Euler,
        _ => UpdateRule::BangBang,
    };
    let mesh = GridMesh::new(64, 48)?;
    let params = OptParams {
        mass: 250.0,
        max_iters: 120,
        rule,
        q: 0.05,
        ..OptParams::default()
    };

    let mut bcs = BoundaryConditionSet::new();
    for n in mesh.element_nodes(mesh.element_index(8, 36)) {
        bcs.set_temperature(n, 100.0)?;
    }
    for n in mesh.element_nodes(mesh.element_index(55, 10)) {
        bcs.set_temperature(n, 0.0)?;
    }

    let mut stepper = Stepper::new(mesh, bcs, params)?;
    let trace = run_with(&mut stepper, DensityField::initial(&mesh, &params), |state, out| {
        if state.iteration() % 20 == 0 {
            println!(
                "step {:3}  cost {:10.3}  mass {:8.2}  cg {}",
                state.iteration(),
                out.costs.total(),
                out.state.mass(),
                out.cg_iterations
            );
        }
    })?;
    println!("{} after {} iterations", trace.termination, trace.iterations());

    let rho = trace.final_state.values();
    for row in (0..mesh.ny()).rev().step_by(2) {
        let line: String = (0..mesh.nx())
            .map(|col| match rho[mesh.element_index(col, row)] {
                r if r > 0.9 => '#',
                r if r > 0.5 => '+',
                r if r > 0.05 => '.',
                _ => ' ',
            })
            .collect();
        println!("|{line}|");
    }
    Ok(())
}
