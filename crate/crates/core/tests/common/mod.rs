#![allow(dead_code)]

use heat_logic::fem::{BoundaryConditionSet, Face, GridMesh, LinearSystem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Dense Gaussian elimination with partial pivoting on the free unknowns.
pub fn dense_solve(system: &LinearSystem) -> Vec<f64> {
    let n = system.dim();
    let free: Vec<usize> = (0..n).filter(|&i| system.constraint(i).is_none()).collect();
    let fixed: Vec<f64> = (0..n).map(|i| system.constraint(i).unwrap_or(0.0)).collect();
    let m = free.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for (r, &i) in free.iter().enumerate() {
        let mut rhs = system.load[i];
        for j in 0..n {
            let kij = system.matrix.get(i, j);
            if kij != 0.0 && system.constraint(j).is_some() {
                rhs -= kij * fixed[j];
            }
        }
        for (c, &j) in free.iter().enumerate() {
            a[r][c] = system.matrix.get(i, j);
        }
        a[r][m] = rhs;
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..=m {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let s: f64 = (row + 1..m).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][m] - s) / a[row][row];
    }
    let mut out = fixed;
    for (r, &i) in free.iter().enumerate() {
        out[i] = x[r];
    }
    out
}

pub fn random_densities(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.gen_range(0.0..=1.0)).collect()
}

const FACES: [Face; 4] = [Face::Bottom, Face::Right, Face::Top, Face::Left];

/// Mixed problem: a few fixed nodes plus arbitrary face fluxes.
pub fn random_dirichlet(rng: &mut ChaCha8Rng, mesh: &GridMesh) -> BoundaryConditionSet {
    let mut bcs = BoundaryConditionSet::new();
    let fixed = rng.gen_range(1..=4.min(mesh.node_count()));
    for _ in 0..fixed {
        let node = rng.gen_range(0..mesh.node_count());
        let _ = bcs.set_temperature(node, rng.gen_range(-100.0..100.0));
    }
    for _ in 0..rng.gen_range(0..4) {
        let e = rng.gen_range(0..mesh.element_count());
        bcs.add_flux(e, FACES[rng.gen_range(0..4)], rng.gen_range(-2.0..2.0))
            .unwrap();
    }
    bcs
}

/// Pure flux problem with zero net flux and the default gauge pin.
pub fn random_balanced_neumann(rng: &mut ChaCha8Rng, mesh: &GridMesh) -> BoundaryConditionSet {
    let mut bcs = BoundaryConditionSet::new();
    let loads = rng.gen_range(2..=5);
    let mut sum = 0.0;
    for k in 0..loads {
        let e = rng.gen_range(0..mesh.element_count());
        let face = FACES[rng.gen_range(0..4)];
        let q = if k + 1 == loads { -sum } else { rng.gen_range(-1.0..1.0) };
        sum += q;
        bcs.add_flux(e, face, q).unwrap();
    }
    bcs.set_default_gauge(mesh);
    bcs
}
