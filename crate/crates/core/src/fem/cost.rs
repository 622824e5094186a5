use super::element::{quadratic_form, unit_stiffness, ConductivityParams};
use super::mesh::GridMesh;
use super::solver::TemperatureField;
use crate::error::{Error, Result};

/// Per-element heat-dissipation work `C_i = ∫ ∇T · k_i ∇T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementCostField(Vec<f64>);

impl ElementCostField {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Self(values)
    }
}

/// Evaluate `C_i = t_eᵀ (k_i K0) t_e` for every element. For the bilinear
/// element this equals the mean of the 2×2 Gauss-point integrand times the
/// element volume.
pub fn element_cost(
    mesh: &GridMesh,
    densities: &[f64],
    params: &ConductivityParams,
    temperature: &TemperatureField,
) -> Result<ElementCostField> {
    if densities.len() != mesh.element_count() {
        return Err(Error::invalid(format!(
            "density field has {} entries, mesh has {} elements",
            densities.len(),
            mesh.element_count()
        )));
    }
    if temperature.len() != mesh.node_count() {
        return Err(Error::invalid(format!(
            "temperature field has {} entries, mesh has {} nodes",
            temperature.len(),
            mesh.node_count()
        )));
    }
    let k0 = unit_stiffness();
    let t = temperature.values();
    let costs = densities
        .iter()
        .enumerate()
        .map(|(e, &rho)| {
            let nodes = mesh.element_nodes(e);
            // K0 annihilates constants; shifting removes the offset before rounding
            let base = t[nodes[0]];
            let te = nodes.map(|n| t[n] - base);
            (params.eval(rho) * quadratic_form(&k0, &te)).max(0.0)
        })
        .collect();
    Ok(ElementCostField(costs))
}
