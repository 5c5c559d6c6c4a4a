//! Pointwise spectrum of a Killing tensor on the sphere.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{to_nalgebra, Vec4};
use crate::tensor::act::{kt_at, Act};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenStructure {
    /// Tangential eigenvalues, ascending.
    pub tangential: [f64; 3],
    pub gap: f64,
    pub radial: f64,
}

/// Splits the spectrum of `K(x)` into the radial eigenvalue (eigenvector along `x`) and the
/// three tangential ones.
pub fn eigen_structure_at(c: &Act<f64>, x: &Vec4<f64>, tol: f64) -> Result<EigenStructure> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotOnSphere);
    }
    let k = kt_at(c, x);
    let eig = SymmetricEigen::new(to_nalgebra(&k));
    let mut radial_idx = 0;
    let mut best = -1.0;
    for j in 0..4 {
        let v = eig.eigenvectors.column(j);
        let overlap = (0..4).map(|i| v[i] * x[i]).sum::<f64>().abs();
        if overlap > best {
            best = overlap;
            radial_idx = j;
        }
    }
    let radial = eig.eigenvalues[radial_idx];
    let scale = k.iter().flatten().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    if radial.abs() > tol * scale {
        return Err(Error::RadialEigenvalueNonzero(radial));
    }
    let mut t: Vec<f64> = (0..4).filter(|&j| j != radial_idx).map(|j| eig.eigenvalues[j]).collect();
    t.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let gap = (t[1] - t[0]).min(t[2] - t[1]);
    Ok(EigenStructure { tangential: [t[0], t[1], t[2]], gap, radial })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::act::casimir;

    #[test]
    fn casimir_is_isotropic() {
        let e = eigen_structure_at(&casimir(1.0), &[0.5, 0.5, 0.5, 0.5], 1e-10).unwrap();
        assert!(e.gap.abs() < 1e-14);
        assert!((e.tangential[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn zero_tensor_has_zero_spectrum() {
        let e = eigen_structure_at(&Act::zero(), &[1.0, 0.0, 0.0, 0.0], 1e-10).unwrap();
        assert_eq!(e.tangential, [0.0; 3]);
        assert_eq!(e.gap, 0.0);
    }

    #[test]
    fn off_sphere_rejected() {
        assert_eq!(eigen_structure_at(&Act::zero(), &[2.0, 0.0, 0.0, 0.0], 1e-10), Err(Error::NotOnSphere));
    }
}
