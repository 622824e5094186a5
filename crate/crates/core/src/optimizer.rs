//! Density evolution: solve, evaluate element costs, compare each element's
//! cost per unit density with the global multiplier, step, and clamp.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{
    element_cost, Assembler, BoundaryConditionSet, ConductivityParams, ElementCostField,
    GridMesh, LinearSystem, SolverOptions, TemperatureField,
};

/// Density update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateRule {
    /// Fixed step `±θ` chosen by the sign of `C_i/(ρ_i V_i) − μ`.
    BangBang,
    /// Explicit projected Euler step `q · (C_i/(ρ_i V_i) − μ)`.
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptParams {
    pub rho_min: f64,
    pub rho_max: f64,
    pub theta: f64,
    /// Euler step scale `λ Δt`.
    pub q: f64,
    pub conductivity: ConductivityParams,
    /// Target material mass `Σ_i ρ_ev V_i`.
    pub mass: f64,
    pub max_iters: usize,
    pub rule: UpdateRule,
    pub snapshot_stride: usize,
}

impl Default for OptParams {
    fn default() -> Self {
        Self {
            rho_min: 0.01,
            rho_max: 1.0,
            theta: 0.03,
            q: 0.01,
            conductivity: ConductivityParams::default(),
            mass: 2000.0,
            max_iters: 200,
            rule: UpdateRule::BangBang,
            snapshot_stride: 10,
        }
    }
}

impl OptParams {
    pub fn with_mass(mass: f64) -> Self {
        Self {
            mass,
            ..Self::default()
        }
    }

    pub fn validate(&self, element_count: usize) -> Result<()> {
        if !(self.rho_min > 0.0 && self.rho_min < self.rho_max && self.rho_max <= 1.0) {
            return Err(Error::invalid(format!(
                "density bounds must satisfy 0 < rho_min < rho_max <= 1, got rho_min={} rho_max={}",
                self.rho_min, self.rho_max
            )));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::invalid(format!("theta must be positive, got {}", self.theta)));
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::invalid(format!("q must be positive, got {}", self.q)));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::invalid(format!("mass must be positive, got {}", self.mass)));
        }
        if self.mass > element_count as f64 * self.rho_max {
            return Err(Error::invalid(format!(
                "mass {} exceeds the capacity {} of the design domain",
                self.mass,
                element_count as f64 * self.rho_max
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::invalid("snapshot_stride must be at least 1"));
        }
        self.conductivity.validate()
    }
}

/// Per-element densities and the iteration counter.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    values: Vec<f64>,
    iteration: usize,
}

impl DensityField {
    /// Uniform `ρ_min` start.
    pub fn initial(mesh: &GridMesh, params: &OptParams) -> Self {
        Self {
            values: vec![params.rho_min; mesh.element_count()],
            iteration: 0,
        }
    }

    pub fn from_values(values: Vec<f64>, iteration: usize) -> Self {
        Self { values, iteration }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Lagrange-type multiplier `μ = Σ_i C_i / M`.
pub fn mu(costs: &ElementCostField, params: &OptParams) -> Result<f64> {
    if !(params.mass > 0.0) {
        return Err(Error::invalid(format!("mass must be positive, got {}", params.mass)));
    }
    Ok(costs.total() / params.mass)
}

/// Clamp to `[ρ_min, ρ_max]`.
pub fn project(rho: f64, params: &OptParams) -> f64 {
    if rho > params.rho_max {
        params.rho_max
    } else if rho < params.rho_min {
        params.rho_min
    } else {
        rho
    }
}

fn check_aligned(densities: &DensityField, costs: &ElementCostField) -> Result<()> {
    if densities.len() != costs.len() {
        return Err(Error::invalid(format!(
            "density field has {} entries, cost field has {}",
            densities.len(),
            costs.len()
        )));
    }
    Ok(())
}

const ELEMENT_VOLUME: f64 = 1.0;

pub fn update_bang_bang(
    densities: &DensityField,
    costs: &ElementCostField,
    mu_n: f64,
    params: &OptParams,
) -> Result<DensityField> {
    check_aligned(densities, costs)?;
    // No dissipation anywhere: nothing drives growth.
    let unloaded = costs.total() == 0.0;
    let values = densities
        .values
        .iter()
        .zip(costs.values())
        .map(|(&rho, &c)| {
            let grow = !unloaded && c / (rho * ELEMENT_VOLUME) - mu_n >= 0.0;
            let next = if grow { rho + params.theta } else { rho - params.theta };
            project(next, params)
        })
        .collect();
    Ok(DensityField {
        values,
        iteration: densities.iteration + 1,
    })
}

pub fn update_euler(
    densities: &DensityField,
    costs: &ElementCostField,
    mu_n: f64,
    params: &OptParams,
) -> Result<DensityField> {
    check_aligned(densities, costs)?;
    let values = densities
        .values
        .iter()
        .zip(costs.values())
        .map(|(&rho, &c)| project(rho + params.q * (c / (rho * ELEMENT_VOLUME) - mu_n), params))
        .collect();
    Ok(DensityField {
        values,
        iteration: densities.iteration + 1,
    })
}

/// Outcome of one optimisation step.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub state: DensityField,
    /// Costs of the densities the step started from.
    pub costs: ElementCostField,
    pub temperature: TemperatureField,
    pub mu: f64,
    /// Relative gap between `Σ C_i` and `Tᵀ K T` for this solve.
    pub energy_gap: f64,
    pub cg_iterations: usize,
}

/// Reusable stepping context for one mesh and boundary-condition set.
#[derive(Debug, Clone)]
pub struct Stepper {
    assembler: Assembler,
    bcs: BoundaryConditionSet,
    params: OptParams,
    solver: SolverOptions,
    warm: Option<Vec<f64>>,
}

impl Stepper {
    pub fn new(mesh: GridMesh, bcs: BoundaryConditionSet, params: OptParams) -> Result<Self> {
        params.validate(mesh.element_count())?;
        bcs.validate(&mesh)?;
        Ok(Self {
            assembler: Assembler::new(mesh),
            bcs,
            params,
            solver: SolverOptions::default(),
            warm: None,
        })
    }

    pub fn with_solver(mut self, solver: SolverOptions) -> Self {
        self.solver = solver;
        self
    }

    pub fn mesh(&self) -> &GridMesh {
        self.assembler.mesh()
    }

    pub fn params(&self) -> &OptParams {
        &self.params
    }

    pub fn assemble(&self, state: &DensityField) -> Result<LinearSystem> {
        self.assembler
            .assemble(&state.values, &self.params.conductivity, &self.bcs)
    }

    /// Solve on `state`, evaluate costs and `μ`, and apply the update rule.
    /// The previous temperature field seeds the next solve.
    pub fn step(&mut self, state: &DensityField) -> Result<StepOutput> {
        let system = self.assemble(state)?;
        let solution = crate::fem::solve_with(&system, &self.solver, self.warm.as_deref())?;
        let costs = element_cost(
            self.mesh(),
            &state.values,
            &self.params.conductivity,
            &solution.temperature,
        )?;
        let total = costs.total();
        let energy = system.energy(solution.temperature.values());
        let scale = total.abs().max(energy.abs());
        let energy_gap = if scale == 0.0 {
            0.0
        } else {
            (total - energy).abs() / scale
        };
        let mu_n = mu(&costs, &self.params)?;
        let next = match self.params.rule {
            UpdateRule::BangBang => update_bang_bang(state, &costs, mu_n, &self.params)?,
            UpdateRule::Euler => update_euler(state, &costs, mu_n, &self.params)?,
        };
        self.warm = Some(solution.temperature.values().to_vec());
        Ok(StepOutput {
            state: next,
            costs,
            temperature: solution.temperature,
            mu: mu_n,
            energy_gap,
            cg_iterations: solution.iterations,
        })
    }
}

/// One-shot step without warm start.
pub fn step(
    state: &DensityField,
    mesh: &GridMesh,
    bcs: &BoundaryConditionSet,
    params: &OptParams,
) -> Result<StepOutput> {
    Stepper::new(*mesh, bcs.clone(), *params)?.step(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Converged,
    MaxIters,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max-iters",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// Iteration count after the update.
    pub iteration: usize,
    /// `Σ C_i` of the densities the update started from.
    pub total_cost: f64,
    /// `Σ ρ_i` after the update.
    pub total_mass: f64,
    pub mu: f64,
    pub max_change: f64,
    pub energy_gap: f64,
    pub cg_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub iteration: usize,
    pub densities: Arc<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    pub snapshots: Vec<Snapshot>,
    pub termination: Termination,
    pub final_state: DensityField,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.final_state.iteration
    }

    pub fn max_energy_gap(&self) -> f64 {
        self.records.iter().fold(0.0, |m, r| m.max(r.energy_gap))
    }
}

/// Drive `step` until the density field stops moving or `max_iters` is hit.
///
/// Converged means `max_i |Δρ_i| < θ/2`; under the bang-bang rule every
/// element must then be pinned at a bound.
pub fn run(
    state: DensityField,
    mesh: &GridMesh,
    bcs: &BoundaryConditionSet,
    params: &OptParams,
) -> Result<RunTrace> {
    let mut stepper = Stepper::new(*mesh, bcs.clone(), *params)?;
    run_with(&mut stepper, state, |_, _| {})
}

/// As [`run`], with a callback observing every step.
pub fn run_with(
    stepper: &mut Stepper,
    mut state: DensityField,
    mut observe: impl FnMut(&DensityField, &StepOutput),
) -> Result<RunTrace> {
    let params = *stepper.params();
    let tol = 0.5 * params.theta;
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let termination = loop {
        let out = stepper.step(&state).map_err(|e| Error::RunFailure {
            iteration: state.iteration + 1,
            source: Box::new(e),
        })?;
        observe(&state, &out);
        let max_change = state
            .values
            .iter()
            .zip(&out.state.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let next = out.state;
        records.push(TraceRecord {
            iteration: next.iteration,
            total_cost: out.costs.total(),
            total_mass: next.mass(),
            mu: out.mu,
            max_change,
            energy_gap: out.energy_gap,
            cg_iterations: out.cg_iterations,
        });
        state = next;
        let done = if max_change < tol {
            Some(Termination::Converged)
        } else if state.iteration >= params.max_iters {
            Some(Termination::MaxIters)
        } else {
            None
        };
        if done.is_some() || state.iteration % params.snapshot_stride == 0 {
            snapshots.push(Snapshot {
                iteration: state.iteration,
                densities: Arc::new(state.values.clone()),
            });
        }
        if let Some(t) = done {
            break t;
        }
    };
    Ok(RunTrace {
        records,
        snapshots,
        termination,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(values: Vec<f64>) -> DensityField {
        DensityField::from_values(values, 0)
    }

    #[test]
    fn mu_is_cost_over_mass() {
        let p = OptParams::with_mass(2000.0);
        let zero = ElementCostField::from_values(vec![0.0; 4]);
        assert_eq!(mu(&zero, &p).unwrap(), 0.0);
        let c = ElementCostField::from_values(vec![1000.0, 3000.0]);
        assert_eq!(mu(&c, &p).unwrap(), 2.0);
        let bad = OptParams::with_mass(0.0);
        assert!(mu(&c, &bad).is_err());
    }

    #[test]
    fn projection_cases() {
        let p = OptParams::default();
        assert_eq!(project(1.02, &p), 1.0);
        assert_eq!(project(0.5, &p), 0.5);
        assert_eq!(project(-0.02, &p), 0.01);
    }

    #[test]
    fn bang_bang_branches() {
        let p = OptParams::default();
        // C/ρ = 5 against μ = 2: up
        let out = update_bang_bang(
            &field(vec![0.01, 0.01, 0.01]),
            &ElementCostField::from_values(vec![0.05, 0.0, 0.02]),
            2.0,
            &p,
        )
        .unwrap();
        assert!((out.values()[0] - 0.04).abs() < 1e-15);
        // zero cost: down, clamped to the floor
        assert_eq!(out.values()[1], 0.01);
        // equality takes the up branch
        assert!((out.values()[2] - 0.04).abs() < 1e-15);
        assert_eq!(out.iteration(), 1);
    }

    #[test]
    fn bang_bang_without_any_cost_shrinks_everything() {
        let p = OptParams::default();
        let out = update_bang_bang(
            &field(vec![0.01, 0.5, 1.0]),
            &ElementCostField::from_values(vec![0.0; 3]),
            0.0,
            &p,
        )
        .unwrap();
        assert_eq!(out.values()[0], 0.01);
        assert!((out.values()[1] - 0.47).abs() < 1e-15);
        assert!((out.values()[2] - 0.97).abs() < 1e-15);
    }

    #[test]
    fn euler_step_cases() {
        let p = OptParams {
            q: 0.01,
            ..OptParams::default()
        };
        let out = update_euler(
            &field(vec![0.5, 0.4, 0.99]),
            &ElementCostField::from_values(vec![1.5, 0.4, 0.99 * 7.0]),
            1.0,
            &p,
        )
        .unwrap();
        assert!((out.values()[0] - 0.52).abs() < 1e-15);
        // stationary: C/ρ = μ
        assert_eq!(out.values()[1], 0.4);
        // 0.99 + 0.06 clamps to the ceiling
        assert_eq!(out.values()[2], 1.0);
    }

    #[test]
    fn misaligned_fields_rejected() {
        let p = OptParams::default();
        let c = ElementCostField::from_values(vec![0.0; 2]);
        assert!(update_bang_bang(&field(vec![0.1; 3]), &c, 0.0, &p).is_err());
        assert!(update_euler(&field(vec![0.1; 3]), &c, 0.0, &p).is_err());
    }

    #[test]
    fn params_validation() {
        let n = 100;
        assert!(OptParams::with_mass(50.0).validate(n).is_ok());
        assert!(OptParams::with_mass(101.0).validate(n).is_err());
        let p = OptParams {
            rho_min: 0.0,
            ..OptParams::with_mass(50.0)
        };
        assert!(p.validate(n).is_err());
        let p = OptParams {
            theta: 0.0,
            ..OptParams::with_mass(50.0)
        };
        assert!(p.validate(n).is_err());
    }

    #[test]
    fn unloaded_problem_converges_immediately() {
        let mesh = GridMesh::new(6, 6).unwrap();
        let mut bcs = BoundaryConditionSet::new();
        for node in mesh.element_nodes(7) {
            bcs.set_temperature(node, 0.0).unwrap();
        }
        let params = OptParams::with_mass(10.0);
        let trace = run(DensityField::initial(&mesh, &params), &mesh, &bcs, &params).unwrap();
        assert_eq!(trace.termination, Termination::Converged);
        assert_eq!(trace.iterations(), 1);
        assert!(trace.final_state.values().iter().all(|&r| r == params.rho_min));
        assert_eq!(trace.snapshots.len(), 1);
    }

    #[test]
    fn snapshots_follow_the_stride() {
        let mesh = GridMesh::new(10, 10).unwrap();
        let mut bcs = BoundaryConditionSet::new();
        for node in mesh.element_nodes(mesh.element_index(2, 5)) {
            bcs.set_temperature(node, 100.0).unwrap();
        }
        for node in mesh.element_nodes(mesh.element_index(7, 5)) {
            bcs.set_temperature(node, 0.0).unwrap();
        }
        let params = OptParams {
            max_iters: 25,
            snapshot_stride: 10,
            ..OptParams::with_mass(15.0)
        };
        let trace = run(DensityField::initial(&mesh, &params), &mesh, &bcs, &params).unwrap();
        let iters: Vec<_> = trace.snapshots.iter().map(|s| s.iteration).collect();
        let last = trace.iterations();
        assert!(iters.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*iters.last().unwrap(), last);
        assert!(iters.iter().all(|&i| i % 10 == 0 || i == last));
        let rec: Vec<_> = trace.records.iter().map(|r| r.iteration).collect();
        assert_eq!(rec, (1..=last).collect::<Vec<_>>());
    }
}
