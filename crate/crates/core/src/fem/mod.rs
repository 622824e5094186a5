//! Finite-element discretisation of stationary heat conduction on a regular
//! grid of unit bilinear quadrilaterals with SIMP-interpolated conductivity.

mod assembly;
mod boundary;
mod cost;
mod element;
mod mesh;
mod solver;

pub use assembly::{assemble, Assembler, CsrMatrix, LinearSystem, FLUX_BALANCE_TOL};
pub use boundary::BoundaryConditionSet;
pub use cost::{element_cost, ElementCostField};
pub use element::{
    element_conductivity, element_stiffness, unit_stiffness, ConductivityParams, ElementMatrix,
};
pub use mesh::{build_mesh, Face, GridMesh};
pub use solver::{solve, solve_with, Solution, SolverOptions, TemperatureField};
