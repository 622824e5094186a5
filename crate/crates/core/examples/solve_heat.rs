//! Stationary conduction on a plate with a conductive stripe: one end held
//! hot, the other cold.
//!
//!     cargo run --release --example solve_heat

use heat_logic::fem::{assemble, element_cost, solve, BoundaryConditionSet, ConductivityParams, Face, GridMesh};

fn main() -> heat_logic::Result<()> {
    let mesh = GridMesh::new(60, 40)?;
    let params = ConductivityParams::default();

    // dense horizontal stripe through a near-insulating plate
    let densities: Vec<f64> = (0..mesh.element_count())
        .map(|e| {
            let (_, row) = mesh.element_coords(e);
            if (17..23).contains(&row) { 1.0 } else { 0.01 }
        })
        .collect();

    let mut bcs = BoundaryConditionSet::new();
    for j in 0..=mesh.ny() {
        bcs.set_temperature(mesh.node_index(0, j), 100.0)?;
        bcs.set_temperature(mesh.node_index(mesh.nx(), j), 0.0)?;
    }
    // a little extra heat injected through the top edge
    bcs.add_flux(mesh.element_index(30, 39), Face::Top, 0.5)?;

    let system = assemble(&mesh, &densities, &params, &bcs)?;
    let solution = solve(&system)?;
    let costs = element_cost(&mesh, &densities, &params, &solution.temperature)?;

    println!(
        "{} unknowns, {} fixed, CG converged in {} iterations (residual {:.1e})",
        system.dim(),
        system.dim() - system.free_count(),
        solution.iterations,
        solution.relative_residual
    );
    println!(
        "sum of element costs {:.6}, stored energy {:.6}",
        costs.total(),
        system.energy(solution.temperature.values())
    );
    let t = solution.temperature.values();
    for i in (0..=mesh.nx()).step_by(10) {
        println!(
            "x={i:3}  stripe T={:7.3}  edge T={:7.3}",
            t[mesh.node_index(i, 20)],
            t[mesh.node_index(i, 0)]
        );
    }
    Ok(())
}
