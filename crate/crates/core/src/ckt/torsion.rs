//! Nijenhuis and Haantjes tensors of `K_ij(x) = 4 C_ikjl x^k x^l`, with exact derivatives.

use crate::mat::{Mat4, Vec4};
use crate::scalar::Ring;
use crate::tensor::act::{kt_at, kt_gradient, Act};

/// `t[i][j][k] = T^i_jk`.
pub type Tensor3<T> = [[[T; 4]; 4]; 4];

fn zero3<T: Ring>() -> Tensor3<T> {
    std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| T::zero())))
}

/// `N^i_jk = K^l_j d_l K^i_k - K^l_k d_l K^i_j + K^i_l (d_k K^l_j - d_j K^l_k)`.
pub fn nijenhuis_from<T: Ring>(k: &Mat4<T>, dk: &Tensor3<T>) -> Tensor3<T> {
    let mut n = zero3();
    for i in 0..4 {
        for j in 0..4 {
            for kk in (j + 1)..4 {
                let mut acc = T::zero();
                for l in 0..4 {
                    acc = acc + k[l][j].clone() * dk[l][i][kk].clone() - k[l][kk].clone() * dk[l][i][j].clone()
                        + k[i][l].clone() * (dk[kk][l][j].clone() - dk[j][l][kk].clone());
                }
                n[i][kk][j] = -acc.clone();
                n[i][j][kk] = acc;
            }
        }
    }
    n
}

pub fn nijenhuis_at<T: Ring>(c: &Act<T>, x: &Vec4<T>) -> Tensor3<T> {
    nijenhuis_from(&kt_at(c, x), &kt_gradient(c, x))
}

/// `H(X,Y) = N(KX,KY) - K N(X,KY) - K N(KX,Y) + K^2 N(X,Y)` in components.
pub fn haantjes_from<T: Ring>(k: &Mat4<T>, n: &Tensor3<T>) -> Tensor3<T> {
    // q[l][j][kk] = N^l_jm K^m_kk
    let mut q = zero3::<T>();
    for l in 0..4 {
        for j in 0..4 {
            for kk in 0..4 {
                q[l][j][kk] = (0..4).fold(T::zero(), |acc, m| acc + n[l][j][m].clone() * k[m][kk].clone());
            }
        }
    }
    let mut kq = zero3::<T>();
    for i in 0..4 {
        for j in 0..4 {
            for kk in 0..4 {
                kq[i][j][kk] = (0..4).fold(T::zero(), |acc, l| acc + k[i][l].clone() * q[l][j][kk].clone());
            }
        }
    }
    let k2 = crate::mat::mul4(k, k);
    let mut h = zero3();
    for i in 0..4 {
        for j in 0..4 {
            for kk in (j + 1)..4 {
                // N(KX,KY)^i_jk = q[i][l][kk] K^l_j
                let a = (0..4).fold(T::zero(), |acc, l| acc + q[i][l][kk].clone() * k[l][j].clone());
                let d = (0..4).fold(T::zero(), |acc, l| acc + k2[i][l].clone() * n[l][j][kk].clone());
                let v = a - kq[i][j][kk].clone() + kq[i][kk][j].clone() + d;
                h[i][kk][j] = -v.clone();
                h[i][j][kk] = v;
            }
        }
    }
    h
}

pub fn haantjes_at<T: Ring>(c: &Act<T>, x: &Vec4<T>) -> Tensor3<T> {
    let k = kt_at(c, x);
    let n = nijenhuis_from(&k, &kt_gradient(c, x));
    haantjes_from(&k, &n)
}

pub fn max_abs3(t: &Tensor3<f64>) -> f64 {
    t.iter().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn is_zero3<T: Ring>(t: &Tensor3<T>) -> bool {
    t.iter().flatten().flatten().all(|v| v.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational};
    use crate::tensor::act::casimir;

    #[test]
    fn casimir_torsion_vanishes_on_tangent_vectors() {
        let c = casimir(int(1));
        let half = Rational::new(1.into(), 2.into());
        let x: Vec4<Rational> = [half.clone(), half.clone(), half.clone(), half];
        let n = nijenhuis_at(&c, &x);
        assert!(is_zero3(&haantjes_at(&c, &x)));
        let tangent: [Vec4<Rational>; 3] =
            [[int(1), int(-1), int(0), int(0)], [int(0), int(0), int(1), int(-1)], [int(1), int(1), int(-1), int(-1)]];
        for a in &tangent {
            for b in &tangent {
                for row in &n {
                    let v = (0..4)
                        .flat_map(|j| (0..4).map(move |k| (j, k)))
                        .fold(int(0), |acc, (j, k)| acc + row[j][k].clone() * a[j].clone() * b[k].clone());
                    assert_eq!(v, int(0));
                }
            }
        }
        // the |x|^2 eigenvalue varies radially, so the ambient torsion is not zero
        assert!(!is_zero3(&n));
    }

    #[test]
    fn antisymmetric_in_lower_indices() {
        let c = crate::tensor::act::Act::from_slots(&(0..20).map(|i| int(i * i - 7)).collect::<Vec<_>>());
        let x: Vec4<Rational> = [int(2), int(1), int(-1), int(3)];
        let n = nijenhuis_at(&c, &x);
        let h = haantjes_at(&c, &x);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert_eq!(n[i][j][k], -n[i][k][j].clone());
                    assert_eq!(h[i][j][k], -h[i][k][j].clone());
                }
            }
        }
    }
}
