//! Gate layouts, logic encoding and density readout.
//!
//! Each gate is a set of one-element sites on a 200×200 plate. With
//! temperature encoding, logic 1 holds the bottom face of an input element at
//! `T_hi` and logic 0 at zero; grounded outputs and outlets are held at zero.
//! With flux encoding, logic 1 injects `Q_hi` through the bottom face of the
//! input element and the outlets drain the total in equal shares. The output
//! bit is read from the material density that grows at the output site.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{BoundaryConditionSet, Face, GridMesh};
use crate::optimizer::{run_with, DensityField, OptParams, RunTrace, Stepper};

/// Density at or above which an output reads as logic 1.
pub const READOUT_THRESHOLD: f64 = 0.5;

/// Minimum distance, in elements, between a site and the plate boundary.
pub const SITE_MARGIN: usize = 5;

/// Element face through which every site couples to the field.
pub const SITE_FACE: Face = Face::Bottom;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    And,
    Xor,
    HalfAdder,
}

impl GateKind {
    pub const ALL: [GateKind; 3] = [GateKind::And, GateKind::Xor, GateKind::HalfAdder];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "and",
            GateKind::Xor => "xor",
            GateKind::HalfAdder => "half-adder",
        }
    }
}

impl std::str::FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "and" => Ok(GateKind::And),
            "xor" => Ok(GateKind::Xor),
            "half-adder" => Ok(GateKind::HalfAdder),
            other => Err(Error::Config(format!(
                "gate: unknown kind {other:?} (expected and, xor or half-adder)"
            ))),
        }
    }
}

/// How logic inputs enter the plate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BcKind {
    /// Prescribed temperature.
    Dirichlet,
    /// Prescribed flux.
    Neumann,
}

impl BcKind {
    pub const ALL: [BcKind; 2] = [BcKind::Dirichlet, BcKind::Neumann];

    pub fn name(self) -> &'static str {
        match self {
            BcKind::Dirichlet => "dirichlet",
            BcKind::Neumann => "neumann",
        }
    }
}

impl std::str::FromStr for BcKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(BcKind::Dirichlet),
            "neumann" => Ok(BcKind::Neumann),
            other => Err(Error::Config(format!(
                "bc: unknown kind {other:?} (expected dirichlet or neumann)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SiteRole {
    InputX,
    InputY,
    Output,
    Outlet,
}

/// Boolean function an output is expected to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogicFn {
    And,
    Xor,
}

impl LogicFn {
    pub fn eval(self, x: bool, y: bool) -> bool {
        match self {
            LogicFn::And => x && y,
            LogicFn::Xor => x ^ y,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteSpec {
    pub name: String,
    pub col: usize,
    pub row: usize,
    pub role: SiteRole,
    /// Held at zero temperature. Only meaningful for outputs and outlets of
    /// temperature-encoded gates.
    #[serde(default)]
    pub grounded: bool,
    /// Expected function for outputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logic: Option<LogicFn>,
}

impl SiteSpec {
    fn new(name: &str, col: usize, row: usize, role: SiteRole) -> Self {
        Self {
            name: name.to_string(),
            col,
            row,
            role,
            grounded: false,
            logic: None,
        }
    }

    fn grounded(mut self) -> Self {
        self.grounded = true;
        self
    }

    fn computing(mut self, logic: LogicFn) -> Self {
        self.logic = Some(logic);
        self
    }

    pub fn distance(&self, other: &SiteSpec) -> f64 {
        let dx = self.col as f64 - other.col as f64;
        let dy = self.row as f64 - other.row as f64;
        dx.hypot(dy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub kind: GateKind,
    pub bc: BcKind,
    pub nx: usize,
    pub ny: usize,
    pub mass: f64,
    /// Input temperature for logic 1.
    pub t_hi: f64,
    /// Input flux for logic 1.
    pub q_hi: f64,
    pub sites: Vec<SiteSpec>,
}

const GRID: usize = 200;
const T_HI: f64 = 100.0;
const Q_HI: f64 = 1.0;

impl GateSpec {
    fn plate(kind: GateKind, bc: BcKind, mass: f64, sites: Vec<SiteSpec>) -> Self {
        Self {
            kind,
            bc,
            nx: GRID,
            ny: GRID,
            mass,
            t_hi: T_HI,
            q_hi: Q_HI,
            sites,
        }
    }

    pub fn build(kind: GateKind, bc: BcKind) -> Self {
        match (kind, bc) {
            (GateKind::And, BcKind::Dirichlet) => build_and_dirichlet(),
            (GateKind::And, BcKind::Neumann) => build_and_neumann(),
            (GateKind::Xor, BcKind::Dirichlet) => build_xor_dirichlet(),
            (GateKind::Xor, BcKind::Neumann) => build_xor_neumann(),
            (GateKind::HalfAdder, BcKind::Dirichlet) => build_half_adder_dirichlet(),
            (GateKind::HalfAdder, BcKind::Neumann) => build_half_adder_neumann(),
        }
    }

    pub fn mesh(&self) -> Result<GridMesh> {
        GridMesh::new(self.nx, self.ny)
    }

    pub fn site(&self, name: &str) -> Option<&SiteSpec> {
        self.sites.iter().find(|s| s.name == name)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &SiteSpec> {
        self.sites.iter().filter(|s| s.role == SiteRole::Output)
    }

    pub fn outlets(&self) -> impl Iterator<Item = &SiteSpec> {
        self.sites.iter().filter(|s| s.role == SiteRole::Outlet)
    }

    /// Optimiser defaults with this gate's material mass.
    pub fn default_params(&self) -> OptParams {
        OptParams::with_mass(self.mass)
    }

    pub fn element_of(&self, site: &SiteSpec) -> usize {
        site.row * self.nx + site.col
    }

    pub fn validate(&self) -> Result<()> {
        let mesh = self.mesh().map_err(|e| Error::InvalidSpec(e.to_string()))?;
        let mut names = BTreeSet::new();
        for s in &self.sites {
            if !names.insert(s.name.as_str()) {
                return Err(Error::InvalidSpec(format!("duplicate site name {:?}", s.name)));
            }
            let inside = s.col >= SITE_MARGIN
                && s.row >= SITE_MARGIN
                && s.col + SITE_MARGIN < mesh.nx()
                && s.row + SITE_MARGIN < mesh.ny();
            if !inside {
                return Err(Error::InvalidSpec(format!(
                    "site {} at ({}, {}) is within {SITE_MARGIN} elements of the boundary",
                    s.name, s.col, s.row
                )));
            }
            if s.role == SiteRole::Output && s.logic.is_none() {
                return Err(Error::InvalidSpec(format!(
                    "output {} has no expected logic function",
                    s.name
                )));
            }
            if matches!(s.role, SiteRole::InputX | SiteRole::InputY) && s.grounded {
                return Err(Error::InvalidSpec(format!("input {} cannot be grounded", s.name)));
            }
        }
        let count = |role| self.sites.iter().filter(|s| s.role == role).count();
        if count(SiteRole::InputX) != 1 || count(SiteRole::InputY) != 1 {
            return Err(Error::InvalidSpec(
                "a gate needs exactly one x input and one y input".into(),
            ));
        }
        if count(SiteRole::Output) == 0 {
            return Err(Error::InvalidSpec("a gate needs at least one output".into()));
        }
        let mut cells = BTreeSet::new();
        for s in &self.sites {
            if !cells.insert((s.col, s.row)) {
                return Err(Error::InvalidSpec(format!(
                    "site {} shares element ({}, {}) with another site",
                    s.name, s.col, s.row
                )));
            }
        }
        match self.bc {
            BcKind::Neumann => {
                if count(SiteRole::Outlet) == 0 {
                    return Err(Error::InvalidSpec(
                        "a flux-encoded gate needs at least one outlet".into(),
                    ));
                }
                if !(self.q_hi > 0.0 && self.q_hi.is_finite()) {
                    return Err(Error::InvalidSpec(format!("q_hi must be positive, got {}", self.q_hi)));
                }
            }
            BcKind::Dirichlet => {
                if !self.sites.iter().any(|s| s.grounded) {
                    return Err(Error::InvalidSpec(
                        "a temperature-encoded gate needs a grounded output or outlet".into(),
                    ));
                }
                if !(self.t_hi.is_finite() && self.t_hi != 0.0) {
                    return Err(Error::InvalidSpec(format!("t_hi must be nonzero, got {}", self.t_hi)));
                }
            }
        }
        if !(self.mass > 0.0) {
            return Err(Error::InvalidSpec(format!("mass must be positive, got {}", self.mass)));
        }
        Ok(())
    }

    /// Outlet fluxes for given input fluxes, in site order. The last outlet
    /// absorbs the rounding so the total balances exactly.
    pub fn outlet_fluxes(&self, q_x: f64, q_y: f64) -> Vec<f64> {
        let n = self.outlets().count();
        if n == 0 {
            return Vec::new();
        }
        let total = q_x + q_y;
        let share = -total / n as f64;
        let mut fluxes = vec![share; n];
        fluxes[n - 1] = -total - share * (n - 1) as f64;
        fluxes
    }
}

/// AND, temperature inputs: `I_x`, `I_y` and a grounded `O` on an isosceles
/// triangle with base 102 and legs ≈127.
pub fn build_and_dirichlet() -> GateSpec {
    GateSpec::plate(
        GateKind::And,
        BcKind::Dirichlet,
        2000.0,
        vec![
            SiteSpec::new("I_x", 49, 150, SiteRole::InputX),
            SiteSpec::new("I_y", 151, 150, SiteRole::InputY),
            SiteSpec::new("O", 100, 34, SiteRole::Output)
                .grounded()
                .computing(LogicFn::And),
        ],
    )
}

/// XOR, temperature inputs: the AND triangle with the apex turned into a
/// grounded outlet `V` and a free output `O` at the base midpoint.
pub fn build_xor_dirichlet() -> GateSpec {
    GateSpec::plate(
        GateKind::Xor,
        BcKind::Dirichlet,
        2000.0,
        vec![
            SiteSpec::new("I_x", 49, 150, SiteRole::InputX),
            SiteSpec::new("I_y", 151, 150, SiteRole::InputY),
            SiteSpec::new("V", 100, 34, SiteRole::Outlet).grounded(),
            SiteSpec::new("O", 100, 150, SiteRole::Output).computing(LogicFn::Xor),
        ],
    )
}

/// AND, flux inputs: `I_x`, `I_y` 40 apart, outlet `V` at distances 70 and
/// 90, output `O` between the inputs.
pub fn build_and_neumann() -> GateSpec {
    GateSpec::plate(
        GateKind::And,
        BcKind::Neumann,
        800.0,
        vec![
            SiteSpec::new("I_x", 80, 100, SiteRole::InputX),
            SiteSpec::new("I_y", 120, 100, SiteRole::InputY),
            SiteSpec::new("V", 60, 33, SiteRole::Outlet),
            SiteSpec::new("O", 100, 100, SiteRole::Output).computing(LogicFn::And),
        ],
    )
}

/// XOR, flux inputs: inputs and outlets on a square of side 42, each outlet
/// diagonally opposite one input, output at the centre.
pub fn build_xor_neumann() -> GateSpec {
    GateSpec::plate(
        GateKind::Xor,
        BcKind::Neumann,
        400.0,
        vec![
            SiteSpec::new("I_x", 79, 121, SiteRole::InputX),
            SiteSpec::new("I_y", 121, 121, SiteRole::InputY),
            SiteSpec::new("V_1", 79, 79, SiteRole::Outlet),
            SiteSpec::new("V_2", 121, 79, SiteRole::Outlet),
            SiteSpec::new("O", 100, 100, SiteRole::Output).computing(LogicFn::Xor),
        ],
    )
}

/// Half-adder, temperature inputs: the XOR triangle with the grounded apex
/// read as the carry `O_1` and the free base midpoint as the sum `O_2`.
pub fn build_half_adder_dirichlet() -> GateSpec {
    GateSpec::plate(
        GateKind::HalfAdder,
        BcKind::Dirichlet,
        2000.0,
        vec![
            SiteSpec::new("I_x", 49, 150, SiteRole::InputX),
            SiteSpec::new("I_y", 151, 150, SiteRole::InputY),
            SiteSpec::new("O_1", 100, 34, SiteRole::Output)
                .grounded()
                .computing(LogicFn::And),
            SiteSpec::new("O_2", 100, 150, SiteRole::Output).computing(LogicFn::Xor),
        ],
    )
}

/// Half-adder, flux inputs: inputs and two outlets on a square of side 40
/// with the sum `O_2` at the centre, a third outlet `V_3` below the square
/// and the carry `O_1` midway between `V_2` and `V_3`.
pub fn build_half_adder_neumann() -> GateSpec {
    GateSpec::plate(
        GateKind::HalfAdder,
        BcKind::Neumann,
        2000.0,
        vec![
            SiteSpec::new("I_x", 80, 130, SiteRole::InputX),
            SiteSpec::new("I_y", 120, 130, SiteRole::InputY),
            SiteSpec::new("V_1", 80, 90, SiteRole::Outlet),
            SiteSpec::new("V_2", 120, 90, SiteRole::Outlet),
            SiteSpec::new("V_3", 84, 55, SiteRole::Outlet),
            SiteSpec::new("O_2", 100, 110, SiteRole::Output).computing(LogicFn::Xor),
            SiteSpec::new("O_1", 102, 72, SiteRole::Output).computing(LogicFn::And),
        ],
    )
}

/// Boundary conditions for logic inputs `(x, y)`.
///
/// Every site acts through the bottom face of its element: Dirichlet sites
/// fix that face's two nodes, Neumann sites push their flux through it. The
/// site element itself stays free to carry heat, so material can grow on a
/// site just as it does around it.
pub fn encode_inputs(spec: &GateSpec, x: bool, y: bool) -> Result<BoundaryConditionSet> {
    spec.validate()?;
    let mesh = spec.mesh()?;
    let mut bcs = BoundaryConditionSet::new();
    let bit = |role| match role {
        SiteRole::InputX => x,
        _ => y,
    };
    match spec.bc {
        BcKind::Dirichlet => {
            for site in &spec.sites {
                let temperature = match site.role {
                    SiteRole::InputX | SiteRole::InputY => {
                        if bit(site.role) {
                            spec.t_hi
                        } else {
                            0.0
                        }
                    }
                    SiteRole::Output | SiteRole::Outlet if site.grounded => 0.0,
                    _ => continue,
                };
                for node in mesh.face_nodes(spec.element_of(site), SITE_FACE) {
                    bcs.set_temperature(node, temperature)?;
                }
            }
        }
        BcKind::Neumann => {
            let q = |b: bool| if b { spec.q_hi } else { 0.0 };
            let (q_x, q_y) = (q(x), q(y));
            let mut outlet_fluxes = spec.outlet_fluxes(q_x, q_y).into_iter();
            for site in &spec.sites {
                let flux = match site.role {
                    SiteRole::InputX => q_x,
                    SiteRole::InputY => q_y,
                    SiteRole::Outlet => outlet_fluxes.next().expect("one flux per outlet"),
                    SiteRole::Output => continue,
                };
                if flux != 0.0 {
                    bcs.add_flux(spec.element_of(site), SITE_FACE, flux)?;
                }
            }
            bcs.set_default_gauge(&mesh);
        }
    }
    Ok(bcs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputReading {
    pub name: String,
    pub density: f64,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutResult {
    pub outputs: Vec<OutputReading>,
    pub threshold: f64,
}

impl ReadoutResult {
    pub fn get(&self, name: &str) -> Option<&OutputReading> {
        self.outputs.iter().find(|o| o.name == name)
    }
}

/// Read each output bit from the density of its site element.
pub fn read_output(densities: &DensityField, spec: &GateSpec) -> Result<ReadoutResult> {
    let expected = spec.nx * spec.ny;
    if densities.len() != expected {
        return Err(Error::InvalidSpec(format!(
            "density field has {} entries, gate grid has {expected} elements",
            densities.len()
        )));
    }
    let outputs: Vec<_> = spec
        .outputs()
        .map(|site| {
            let density = densities.values()[spec.element_of(site)];
            OutputReading {
                name: site.name.clone(),
                density,
                value: density >= READOUT_THRESHOLD,
            }
        })
        .collect();
    if outputs.is_empty() {
        return Err(Error::InvalidSpec("gate has no output site".into()));
    }
    Ok(ReadoutResult {
        outputs,
        threshold: READOUT_THRESHOLD,
    })
}

/// Result of driving one input pair to termination.
#[derive(Debug, Clone)]
pub struct RowOutcome {
    pub readout: ReadoutResult,
    pub trace: RunTrace,
}

#[derive(Debug)]
pub struct TruthRow {
    pub x: bool,
    pub y: bool,
    pub outcome: Result<RowOutcome>,
}

impl TruthRow {
    /// Expected bit per output, in output order.
    pub fn expected(&self, spec: &GateSpec) -> Vec<bool> {
        spec.outputs()
            .map(|s| s.logic.map_or(false, |f| f.eval(self.x, self.y)))
            .collect()
    }

    pub fn matches(&self, spec: &GateSpec) -> bool {
        match &self.outcome {
            Ok(o) => o
                .readout
                .outputs
                .iter()
                .map(|r| r.value)
                .eq(self.expected(spec)),
            Err(_) => false,
        }
    }
}

#[derive(Debug)]
pub struct TruthTable {
    pub rows: Vec<TruthRow>,
}

impl TruthTable {
    pub fn matches(&self, spec: &GateSpec) -> bool {
        self.rows.iter().all(|r| r.matches(spec))
    }
}

pub const INPUT_ROWS: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

/// Encode, optimise and read one input pair.
pub fn run_row(spec: &GateSpec, params: &OptParams, x: bool, y: bool) -> Result<RowOutcome> {
    let bcs = encode_inputs(spec, x, y)?;
    let mesh = spec.mesh()?;
    let mut stepper = Stepper::new(mesh, bcs, *params)?;
    let trace = run_with(&mut stepper, DensityField::initial(&mesh, params), |_, _| {})?;
    let readout = read_output(&trace.final_state, spec)?;
    Ok(RowOutcome { readout, trace })
}

/// Run all four input pairs. Rows are independent; a failing row is
/// reported without stopping the others.
pub fn truth_table(spec: &GateSpec, params: &OptParams) -> TruthTable {
    let rows = std::thread::scope(|scope| {
        let handles: Vec<_> = INPUT_ROWS
            .iter()
            .map(|&(x, y)| scope.spawn(move || (x, y, run_row(spec, params, x, y))))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                let (x, y, outcome) = h.join().expect("truth-table row panicked");
                TruthRow { x, y, outcome }
            })
            .collect()
    });
    TruthTable { rows }
}
