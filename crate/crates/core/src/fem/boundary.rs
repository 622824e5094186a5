use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::mesh::{Face, GridMesh};
use crate::error::{Error, Result};

/// Prescribed temperatures, face fluxes and volumetric sources.
///
/// Any boundary not listed here is adiabatic. Flux values are integrated over
/// the unit face; positive flux injects heat.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConditionSet {
    dirichlet: BTreeMap<usize, f64>,
    neumann: BTreeMap<(usize, Face), f64>,
    source: Option<Vec<f64>>,
    gauge: Option<usize>,
}

impl BoundaryConditionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Prescribe `temperature` at `node`. Re-setting the same value is allowed,
    /// a different value is rejected.
    pub fn set_temperature(&mut self, node: usize, temperature: f64) -> Result<()> {
        if !temperature.is_finite() {
            return Err(Error::invalid(format!(
                "temperature at node {node} is not finite"
            )));
        }
        match self.dirichlet.get(&node) {
            Some(&existing) if existing != temperature => Err(Error::invalid(format!(
                "node {node} already fixed at {existing}, cannot also fix at {temperature}"
            ))),
            _ => {
                self.dirichlet.insert(node, temperature);
                Ok(())
            }
        }
    }

    /// Add `flux` through `face` of `element`. Repeated calls accumulate.
    pub fn add_flux(&mut self, element: usize, face: Face, flux: f64) -> Result<()> {
        if !flux.is_finite() {
            return Err(Error::invalid(format!(
                "flux on element {element} is not finite"
            )));
        }
        *self.neumann.entry((element, face)).or_insert(0.0) += flux;
        Ok(())
    }

    pub fn set_source(&mut self, source: Vec<f64>) {
        self.source = Some(source);
    }

    /// Pin `node` to zero when the problem has no Dirichlet data. Ignored
    /// otherwise.
    pub fn set_gauge(&mut self, node: usize) {
        self.gauge = Some(node);
    }

    /// Pin the lowest-indexed node that carries no flux load.
    pub fn set_default_gauge(&mut self, mesh: &GridMesh) {
        let loaded: std::collections::BTreeSet<usize> = self
            .neumann
            .keys()
            .flat_map(|&(e, f)| mesh.face_nodes(e, f))
            .collect();
        let node = (0..mesh.node_count())
            .find(|n| !loaded.contains(n))
            .unwrap_or(0);
        self.gauge = Some(node);
    }

    pub fn dirichlet(&self) -> &BTreeMap<usize, f64> {
        &self.dirichlet
    }

    pub fn neumann(&self) -> &BTreeMap<(usize, Face), f64> {
        &self.neumann
    }

    pub fn source(&self) -> Option<&[f64]> {
        self.source.as_deref()
    }

    pub fn gauge(&self) -> Option<usize> {
        self.gauge
    }

    pub fn net_flux(&self) -> f64 {
        self.neumann.values().sum()
    }

    pub fn validate(&self, mesh: &GridMesh) -> Result<()> {
        if let Some((&node, _)) = self.dirichlet.range(mesh.node_count()..).next() {
            return Err(Error::invalid(format!(
                "Dirichlet node {node} outside mesh of {} nodes",
                mesh.node_count()
            )));
        }
        if let Some(&(element, _)) = self
            .neumann
            .keys()
            .find(|(e, _)| *e >= mesh.element_count())
        {
            return Err(Error::invalid(format!(
                "flux face on element {element} outside mesh of {} elements",
                mesh.element_count()
            )));
        }
        if let Some(source) = &self.source {
            if source.len() != mesh.element_count() {
                return Err(Error::invalid(format!(
                    "source has {} entries, mesh has {} elements",
                    source.len(),
                    mesh.element_count()
                )));
            }
        }
        if let Some(g) = self.gauge {
            if g >= mesh.node_count() {
                return Err(Error::invalid(format!("gauge node {g} outside mesh")));
            }
        }
        Ok(())
    }
}
