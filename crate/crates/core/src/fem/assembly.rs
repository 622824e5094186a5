use std::sync::Arc;

use super::boundary::BoundaryConditionSet;
use super::element::{unit_stiffness, ConductivityParams, ElementMatrix};
use super::mesh::GridMesh;
use crate::error::{Error, Result};

/// Relative flux imbalance tolerated in a pure-Neumann problem.
pub const FLUX_BALANCE_TOL: f64 = 1e-9;

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    row_ptr: Arc<Vec<usize>>,
    col_idx: Arc<Vec<u32>>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.col_idx[range.clone()].binary_search(&(col as u32)) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    /// `out = A x`
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        for (row, o) in out.iter_mut().enumerate() {
            let (start, end) = (self.row_ptr[row], self.row_ptr[row + 1]);
            let mut acc = 0.0;
            for k in start..end {
                acc += self.values[k] * x[self.col_idx[k] as usize];
            }
            *o = acc;
        }
    }

    /// `out = mask ∘ (A x)`, returning `xᵀ out`.
    pub(crate) fn masked_mul_dot(&self, x: &[f64], mask: &[f64], out: &mut [f64]) -> f64 {
        let mut dot = 0.0;
        for row in 0..self.dim() {
            let (start, end) = (self.row_ptr[row], self.row_ptr[row + 1]);
            let mut acc = 0.0;
            for (v, &c) in self.values[start..end].iter().zip(&self.col_idx[start..end]) {
                acc += v * x[c as usize];
            }
            acc *= mask[row];
            out[row] = acc;
            dot += acc * x[row];
        }
        dot
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.dim()).all(|i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).all(|k| {
                let j = self.col_idx[k] as usize;
                (self.values[k] - self.get(j, i)).abs() <= tol
            })
        })
    }
}

/// Nine-point sparsity of the grid plus, for every element, the CSR slot of
/// each of its 16 local matrix entries.
#[derive(Debug)]
struct Pattern {
    row_ptr: Arc<Vec<usize>>,
    col_idx: Arc<Vec<u32>>,
    scatter: Vec<[u32; 16]>,
}

impl Pattern {
    fn new(mesh: &GridMesh) -> Self {
        let (nx, ny) = (mesh.nx(), mesh.ny());
        let mut row_ptr = Vec::with_capacity(mesh.node_count() + 1);
        let mut col_idx = Vec::with_capacity(9 * mesh.node_count());
        row_ptr.push(0);
        for j in 0..=ny {
            for i in 0..=nx {
                for jj in j.saturating_sub(1)..=(j + 1).min(ny) {
                    for ii in i.saturating_sub(1)..=(i + 1).min(nx) {
                        col_idx.push(mesh.node_index(ii, jj) as u32);
                    }
                }
                row_ptr.push(col_idx.len());
            }
        }
        let scatter = (0..mesh.element_count())
            .map(|e| {
                let nodes = mesh.element_nodes(e);
                let mut slots = [0u32; 16];
                for a in 0..4 {
                    let row = &col_idx[row_ptr[nodes[a]]..row_ptr[nodes[a] + 1]];
                    for b in 0..4 {
                        let k = row.binary_search(&(nodes[b] as u32)).expect("node pair in stencil");
                        slots[4 * a + b] = (row_ptr[nodes[a]] + k) as u32;
                    }
                }
                slots
            })
            .collect();
        Self {
            row_ptr: Arc::new(row_ptr),
            col_idx: Arc::new(col_idx),
            scatter,
        }
    }
}

/// Discrete conduction problem: full matrix, load vector and constrained nodes.
///
/// Constrained degrees of freedom are eliminated at solve time; the full
/// matrix is kept so that energies can be evaluated on complete fields.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub load: Vec<f64>,
    constrained: Vec<Option<f64>>,
}

impl LinearSystem {
    pub fn dim(&self) -> usize {
        self.load.len()
    }

    pub fn constraint(&self, node: usize) -> Option<f64> {
        self.constrained[node]
    }

    pub fn constraints(&self) -> &[Option<f64>] {
        &self.constrained
    }

    pub fn free_count(&self) -> usize {
        self.constrained.iter().filter(|c| c.is_none()).count()
    }

    /// `Tᵀ K T` over the full node vector.
    pub fn energy(&self, temperature: &[f64]) -> f64 {
        let kt = self.matrix.mul_vec(temperature);
        kt.iter().zip(temperature).map(|(a, b)| a * b).sum()
    }
}

/// Reusable assembler for one mesh; caches the sparsity pattern.
#[derive(Debug, Clone)]
pub struct Assembler {
    mesh: GridMesh,
    pattern: Arc<Pattern>,
    unit: ElementMatrix,
}

impl Assembler {
    pub fn new(mesh: GridMesh) -> Self {
        Self {
            pattern: Arc::new(Pattern::new(&mesh)),
            mesh,
            unit: unit_stiffness(),
        }
    }

    pub fn mesh(&self) -> &GridMesh {
        &self.mesh
    }

    pub fn assemble(
        &self,
        densities: &[f64],
        params: &ConductivityParams,
        bcs: &BoundaryConditionSet,
    ) -> Result<LinearSystem> {
        let mesh = &self.mesh;
        if densities.len() != mesh.element_count() {
            return Err(Error::invalid(format!(
                "density field has {} entries, mesh has {} elements",
                densities.len(),
                mesh.element_count()
            )));
        }
        if let Some(bad) = densities.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::invalid(format!("density {bad} outside [0, 1]")));
        }
        params.validate()?;
        bcs.validate(mesh)?;

        let mut values = vec![0.0; self.pattern.col_idx.len()];
        for (e, slots) in self.pattern.scatter.iter().enumerate() {
            let k = params.eval(densities[e]);
            for a in 0..4 {
                for b in 0..4 {
                    values[slots[4 * a + b] as usize] += k * self.unit[a][b];
                }
            }
        }

        let mut load = vec![0.0; mesh.node_count()];
        let mut total = 0.0;
        for (&(e, face), &q) in bcs.neumann() {
            for node in mesh.face_nodes(e, face) {
                load[node] += 0.5 * q;
            }
            total += q.abs();
        }
        let mut net = bcs.net_flux();
        if let Some(source) = bcs.source() {
            let vol = mesh.element_volume();
            for (e, &f) in source.iter().enumerate() {
                for node in mesh.element_nodes(e) {
                    load[node] += 0.25 * f * vol;
                }
                net += f * vol;
                total += f.abs() * vol;
            }
        }

        let mut constrained = vec![None; mesh.node_count()];
        if bcs.dirichlet().is_empty() {
            if net.abs() > FLUX_BALANCE_TOL * total {
                return Err(Error::IllPosed { net, total });
            }
            let gauge = bcs.gauge().ok_or(Error::SingularSystem)?;
            constrained[gauge] = Some(0.0);
        } else {
            for (&node, &t) in bcs.dirichlet() {
                constrained[node] = Some(t);
            }
        }

        Ok(LinearSystem {
            matrix: CsrMatrix {
                row_ptr: Arc::clone(&self.pattern.row_ptr),
                col_idx: Arc::clone(&self.pattern.col_idx),
                values,
            },
            load,
            constrained,
        })
    }
}

pub fn assemble(
    mesh: &GridMesh,
    densities: &[f64],
    params: &ConductivityParams,
    bcs: &BoundaryConditionSet,
) -> Result<LinearSystem> {
    Assembler::new(*mesh).assemble(densities, params, bcs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::Face;

    #[test]
    fn single_element_matches_element_matrix() {
        let mesh = GridMesh::new(1, 1).unwrap();
        let bcs = {
            let mut b = BoundaryConditionSet::new();
            b.set_temperature(0, 0.0).unwrap();
            b
        };
        let sys = assemble(&mesh, &[1.0], &ConductivityParams::default(), &bcs).unwrap();
        let k0 = unit_stiffness();
        let nodes = mesh.element_nodes(0);
        for a in 0..4 {
            for b in 0..4 {
                assert!((sys.matrix.get(nodes[a], nodes[b]) - k0[a][b]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn assembled_matrix_is_symmetric_with_zero_row_sums() {
        let mesh = GridMesh::new(5, 4).unwrap();
        let rho: Vec<f64> = (0..mesh.element_count())
            .map(|e| 0.01 + 0.05 * (e % 17) as f64)
            .collect();
        let mut bcs = BoundaryConditionSet::new();
        bcs.set_temperature(0, 1.0).unwrap();
        let sys = assemble(&mesh, &rho, &ConductivityParams::default(), &bcs).unwrap();
        assert!(sys.matrix.is_symmetric(1e-15));
        let ones = vec![1.0; mesh.node_count()];
        assert!(sys.matrix.mul_vec(&ones).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn face_flux_split_between_face_nodes() {
        let mesh = GridMesh::new(2, 2).unwrap();
        let mut bcs = BoundaryConditionSet::new();
        bcs.add_flux(3, Face::Bottom, 1.0).unwrap();
        bcs.add_flux(0, Face::Left, -1.0).unwrap();
        bcs.set_gauge(8);
        let sys = assemble(&mesh, &[1.0; 4], &ConductivityParams::default(), &bcs).unwrap();
        let [a, b] = mesh.face_nodes(3, Face::Bottom);
        assert_eq!(sys.load[a], 0.5);
        assert_eq!(sys.load[b], 0.5);
        assert!(sys.load.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn unbalanced_pure_neumann_is_ill_posed() {
        let mesh = GridMesh::new(3, 3).unwrap();
        let mut bcs = BoundaryConditionSet::new();
        bcs.add_flux(4, Face::Bottom, 1.0).unwrap();
        bcs.set_default_gauge(&mesh);
        let err = assemble(&mesh, &[0.5; 9], &ConductivityParams::default(), &bcs).unwrap_err();
        assert!(matches!(err, Error::IllPosed { .. }));
    }

    #[test]
    fn pure_neumann_without_gauge_is_singular() {
        let mesh = GridMesh::new(3, 3).unwrap();
        let mut bcs = BoundaryConditionSet::new();
        bcs.add_flux(4, Face::Bottom, 1.0).unwrap();
        bcs.add_flux(0, Face::Bottom, -1.0).unwrap();
        let err = assemble(&mesh, &[0.5; 9], &ConductivityParams::default(), &bcs).unwrap_err();
        assert!(matches!(err, Error::SingularSystem));
    }

    #[test]
    fn density_length_checked() {
        let mesh = GridMesh::new(3, 3).unwrap();
        let mut bcs = BoundaryConditionSet::new();
        bcs.set_temperature(0, 0.0).unwrap();
        assert!(assemble(&mesh, &[0.5; 8], &ConductivityParams::default(), &bcs).is_err());
    }

    #[test]
    fn source_contributes_quarter_loads() {
        let mesh = GridMesh::new(1, 1).unwrap();
        let mut bcs = BoundaryConditionSet::new();
        bcs.set_temperature(0, 0.0).unwrap();
        bcs.set_source(vec![2.0]);
        let sys = assemble(&mesh, &[1.0], &ConductivityParams::default(), &bcs).unwrap();
        assert_eq!(sys.load, vec![0.5; 4]);
    }
}
