//! Bilinear unit-square conduction element and the SIMP conductivity law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ElementMatrix = [[f64; 4]; 4];

/// Parameters of the SIMP power law `k(ρ) = k_min + (k_max - k_min) ρ^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConductivityParams {
    pub k_min: f64,
    pub k_max: f64,
    pub penalty: f64,
}

impl Default for ConductivityParams {
    fn default() -> Self {
        Self {
            k_min: 0.009,
            k_max: 1.0,
            penalty: 2.0,
        }
    }
}

impl ConductivityParams {
    pub fn new(k_min: f64, k_max: f64, penalty: f64) -> Result<Self> {
        let params = Self {
            k_min,
            k_max,
            penalty,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_min > 0.0 && self.k_min < self.k_max && self.k_max.is_finite()) {
            return Err(Error::invalid(format!(
                "conductivity bounds must satisfy 0 < k_min < k_max, got k_min={} k_max={}",
                self.k_min, self.k_max
            )));
        }
        if !(self.penalty > 1.0 && self.penalty.is_finite()) {
            return Err(Error::invalid(format!(
                "penalty exponent must exceed 1, got {}",
                self.penalty
            )));
        }
        Ok(())
    }

    /// Unchecked evaluation for the assembly hot loop.
    #[inline]
    pub(crate) fn eval(&self, rho: f64) -> f64 {
        self.k_min + (self.k_max - self.k_min) * rho.powf(self.penalty)
    }
}

pub fn element_conductivity(rho: f64, params: &ConductivityParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid(format!("density {rho} outside [0, 1]")));
    }
    Ok(params.eval(rho))
}

/// Gauss points of the 2×2 rule on [0, 1]², each with weight 1/4.
pub(crate) fn gauss_points() -> [(f64, f64); 4] {
    let g = 0.5 / 3f64.sqrt();
    let (a, b) = (0.5 - g, 0.5 + g);
    [(a, a), (b, a), (b, b), (a, b)]
}

/// Shape-function gradients of the bilinear element at local point `(x, y)`
/// of the unit square, nodes counterclockwise from the lower-left corner.
pub(crate) fn shape_gradients(x: f64, y: f64) -> [[f64; 2]; 4] {
    [
        [-(1.0 - y), -(1.0 - x)],
        [1.0 - y, -x],
        [y, x],
        [-y, 1.0 - x],
    ]
}

/// Unit-conductivity matrix of the unit-square bilinear element, integrated
/// with the 2×2 Gauss rule.
pub fn unit_stiffness() -> ElementMatrix {
    let mut k = [[0.0; 4]; 4];
    for (x, y) in gauss_points() {
        let grads = shape_gradients(x, y);
        for a in 0..4 {
            for b in 0..4 {
                k[a][b] += 0.25 * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
            }
        }
    }
    k
}

pub fn element_stiffness(conductivity: f64) -> Result<ElementMatrix> {
    if !(conductivity > 0.0 && conductivity.is_finite()) {
        return Err(Error::invalid(format!(
            "conductivity must be positive, got {conductivity}"
        )));
    }
    let mut k = unit_stiffness();
    k.iter_mut()
        .flatten()
        .for_each(|v| *v *= conductivity);
    Ok(k)
}

/// `tᵀ K t` for a 4×4 element matrix.
#[inline]
pub(crate) fn quadratic_form(k: &ElementMatrix, t: &[f64; 4]) -> f64 {
    let mut acc = 0.0;
    for a in 0..4 {
        let mut row = 0.0;
        for b in 0..4 {
            row += k[a][b] * t[b];
        }
        acc += t[a] * row;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conductivity_endpoints() {
        let p = ConductivityParams::default();
        assert_eq!(element_conductivity(1.0, &p).unwrap(), 1.0);
        assert_eq!(element_conductivity(0.0, &p).unwrap(), 0.009);
        // 0.009 + 0.991 * 1e-4
        let k = element_conductivity(0.01, &p).unwrap();
        assert!((k - 0.0090991).abs() < 1e-15);
    }

    #[test]
    fn conductivity_rejects_out_of_range_density() {
        let p = ConductivityParams::default();
        assert!(element_conductivity(-0.01, &p).is_err());
        assert!(element_conductivity(1.01, &p).is_err());
    }

    #[test]
    fn conductivity_params_validation() {
        assert!(ConductivityParams::new(0.0, 1.0, 2.0).is_err());
        assert!(ConductivityParams::new(1.0, 1.0, 2.0).is_err());
        assert!(ConductivityParams::new(0.1, 1.0, 1.0).is_err());
        assert!(ConductivityParams::new(0.1, 1.0, 3.0).is_ok());
    }

    #[test]
    fn unit_stiffness_matches_closed_form() {
        let k = unit_stiffness();
        for a in 0..4 {
            for b in 0..4 {
                let expected = if a == b {
                    2.0 / 3.0
                } else if (a + 2) % 4 == b {
                    -1.0 / 3.0
                } else {
                    -1.0 / 6.0
                };
                assert!((k[a][b] - expected).abs() < 1e-15, "K0[{a}][{b}] = {}", k[a][b]);
            }
        }
    }

    #[test]
    fn stiffness_is_linear_in_conductivity() {
        let k1 = element_stiffness(1.0).unwrap();
        let k2 = element_stiffness(2.0).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(k2[a][b], 2.0 * k1[a][b]);
            }
        }
    }

    #[test]
    fn constant_field_is_in_the_null_space() {
        let k = unit_stiffness();
        for row in &k {
            assert!(row.iter().sum::<f64>().abs() < 1e-12);
        }
        assert!(quadratic_form(&k, &[1.0; 4]).abs() < 1e-12);
    }

    #[test]
    fn stiffness_rejects_nonpositive_conductivity() {
        assert!(element_stiffness(0.0).is_err());
        assert!(element_stiffness(-1.0).is_err());
        assert!(element_stiffness(f64::NAN).is_err());
    }

    #[test]
    fn unit_gradient_energy() {
        let k = unit_stiffness();
        assert!((quadratic_form(&k, &[0.0, 1.0, 1.0, 0.0]) - 1.0).abs() < 1e-14);
    }
}
