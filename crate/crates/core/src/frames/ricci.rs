//! Algebraic Ricci tensor and the frame that diagonalizes it.

use nalgebra::{Matrix4, SymmetricEigen};
use num::{Signed, Zero};

use crate::linalg;
use crate::mat::{det4, dot4, mat_vec4, Mat4, Mat6, Vec4};
use crate::scalar::{common_denominator, rationalize, Field, Rational, Ring};
use crate::tensor::act::Act;
use crate::tensor::action::{congruence, frame_unchecked, Frame};

pub use crate::tensor::act::ricci;

/// Relative tolerance for grouping Ricci eigenvalues into eigenspaces.
pub const EIGEN_CLUSTER_TOL: f64 = 1e-9;

/// Diagonalizing frame of a Ricci tensor; column `k` spans the `k`-th eigendirection.
#[derive(Clone, Debug)]
pub struct RicciFrame {
    pub eigenvalues: [f64; 4],
    pub frame: Frame<f64>,
    /// Eigenspace dimensions in column order.
    pub multiplicities: Vec<usize>,
    pub exact: Option<ExactFrame>,
}

impl RicciFrame {
    pub fn is_isotropic(&self) -> bool {
        self.multiplicities.len() == 1
    }

    pub fn max_multiplicity(&self) -> usize {
        self.multiplicities.iter().copied().max().unwrap_or(0)
    }
}

/// A frame with rational column directions: column `k` of the rotation is `w_k / |w_k|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactFrame {
    pub eigenvalues: [Rational; 4],
    pub directions: [Vec4<Rational>; 4],
}

/// Pair-matrix diagonal of a transformed tensor, plus the size of what is off the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct PairDiagonal {
    pub diag: [Rational; 6],
    pub off_diagonal_zero: bool,
    pub off_diagonal_max: f64,
}

impl ExactFrame {
    pub fn norms_squared(&self) -> [Rational; 4] {
        std::array::from_fn(|k| dot4(&self.directions[k], &self.directions[k]))
    }

    /// Unnormalized matrix `W` with the directions as columns.
    pub fn direction_matrix(&self) -> Mat4<Rational> {
        std::array::from_fn(|i| std::array::from_fn(|k| self.directions[k][i].clone()))
    }

    pub fn to_frame(&self) -> Frame<f64> {
        let n = self.norms_squared();
        let m: Mat4<f64> =
            std::array::from_fn(|i| std::array::from_fn(|k| self.directions[k][i].to_f64() / n[k].to_f64().sqrt()));
        frame_unchecked(m)
    }

    /// New column `k` is old column `perm[k]`; the last column is negated if needed for det +1.
    pub fn permuted(&self, perm: [usize; 4]) -> Self {
        let mut out = Self {
            eigenvalues: std::array::from_fn(|k| self.eigenvalues[perm[k]].clone()),
            directions: std::array::from_fn(|k| self.directions[perm[k]].clone()),
        };
        out.fix_orientation();
        out
    }

    fn fix_orientation(&mut self) {
        if det4(&self.direction_matrix()).is_negative() {
            self.directions[3] = self.directions[3].clone().map(|v| -v);
        }
    }

    /// Exact check of `R w_k = lambda_k w_k` and pairwise orthogonality.
    pub fn diagonalizes(&self, r: &Mat4<Rational>) -> bool {
        (0..4).all(|k| {
            let rw = mat_vec4(r, &self.directions[k]);
            (0..4).all(|i| rw[i] == &self.eigenvalues[k] * &self.directions[k][i])
        }) && (0..4).all(|a| (a + 1..4).all(|b| dot4(&self.directions[a], &self.directions[b]).is_zero()))
    }

    /// Pair-matrix entries of `so4_act(C, Λᵀ)`: the diagonal exactly, the rest by magnitude.
    pub fn pair_diagonal(&self, c: &Act<Rational>) -> PairDiagonal {
        let w = self.direction_matrix();
        let wt: Mat4<Rational> = std::array::from_fn(|i| std::array::from_fn(|j| w[j][i].clone()));
        let raw = congruence(c, &wt);
        let n = self.norms_squared();
        let pn: [Rational; 6] = std::array::from_fn(|a| {
            let (i, j) = crate::tensor::act::PAIRS[a];
            &n[i] * &n[j]
        });
        let m: &Mat6<Rational> = raw.pair_matrix();
        let mut off_zero = true;
        let mut off_max: f64 = 0.0;
        for a in 0..6 {
            for b in 0..6 {
                if a != b && !m[a][b].is_zero() {
                    off_zero = false;
                    let v = m[a][b].to_f64().abs() / (pn[a].to_f64() * pn[b].to_f64()).sqrt();
                    off_max = off_max.max(v);
                }
            }
        }
        PairDiagonal {
            diag: std::array::from_fn(|a| &m[a][a] / &pn[a]),
            off_diagonal_zero: off_zero,
            off_diagonal_max: off_max,
        }
    }
}

/// Gram-Schmidt without normalization; drops vectors whose residual is negligible.
fn orthogonalize<T: Field>(vectors: &[Vec4<T>], tol: f64) -> Vec<Vec4<T>> {
    let mut out: Vec<Vec4<T>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for u in &out {
            let coef = dot4(&r, u) / dot4(u, u);
            r = std::array::from_fn(|i| r[i].clone() - coef.clone() * u[i].clone());
        }
        let scale = dot4(v, v).to_f64().max(1e-300);
        let keep = if T::EXACT { !dot4(&r, &r).is_zero() } else { dot4(&r, &r).to_f64() > tol * scale };
        if keep {
            out.push(r);
        }
    }
    out
}

/// Deterministic basis of the span of `space`: project `e1..e4` in order, then orthogonalize.
fn axis_basis<T: Field>(space: &[Vec4<T>], tol: f64) -> Vec<Vec4<T>> {
    let ortho = orthogonalize(space, tol);
    let dim = ortho.len();
    let projections: Vec<Vec4<T>> = (0..4)
        .map(|k| {
            let mut p: Vec4<T> = std::array::from_fn(|_| T::zero());
            for u in &ortho {
                let coef = u[k].clone() / dot4(u, u);
                p = std::array::from_fn(|i| p[i].clone() + coef.clone() * u[i].clone());
            }
            p
        })
        .collect();
    let mut basis = orthogonalize(&projections, tol);
    basis.truncate(dim);
    basis
}

/// Index of the first entry of largest magnitude.
fn dominant_entry<T: Ring>(v: &Vec4<T>) -> usize {
    let mut best = 0;
    for i in 1..4 {
        let (a, b) = (v[i].to_f64().abs(), v[best].to_f64().abs());
        if a > b * (1.0 + 1e-12) {
            best = i;
        }
    }
    best
}

fn sign_fixed<T: Ring>(v: Vec4<T>) -> Vec4<T> {
    if v[dominant_entry(&v)].to_f64() < 0.0 {
        v.map(|e| -e)
    } else {
        v
    }
}

type Spectrum = (SymmetricEigen<f64, nalgebra::U4>, Vec<usize>, Vec<(usize, usize)>);

/// Eigenvalues sorted descending and grouped into clusters `(start, len)`.
fn clustered_spectrum(r: &Mat4<f64>) -> Spectrum {
    let eig = Matrix4::from_fn(|i, j| 0.5 * (r[i][j] + r[j][i])).symmetric_eigen();
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    for pos in 0..4 {
        let v = eig.eigenvalues[order[pos]];
        match clusters.last_mut() {
            Some((start, len))
                if (eig.eigenvalues[order[*start + *len - 1]] - v).abs() <= EIGEN_CLUSTER_TOL * scale =>
            {
                *len += 1
            }
            _ => clusters.push((pos, 1)),
        }
    }
    (eig, order, clusters)
}

/// Orthonormal eigenframe of a symmetric `R`.
///
/// Eigenvalues descend along the columns. Inside a repeated eigenspace the basis comes from
/// projecting `e1..e4` in order. Each column is signed so its largest entry is positive and
/// the last column is negated when needed for det +1.
pub fn frame_from_ricci(r: &Mat4<f64>) -> RicciFrame {
    let (eig, order, clusters) = clustered_spectrum(r);
    let mut columns: Vec<Vec4<f64>> = Vec::with_capacity(4);
    let mut eigenvalues = [0.0; 4];
    for &(start, len) in &clusters {
        let space: Vec<Vec4<f64>> =
            (start..start + len).map(|p| std::array::from_fn(|i| eig.eigenvectors[(i, order[p])])).collect();
        let mean = (start..start + len).map(|p| eig.eigenvalues[order[p]]).sum::<f64>() / len as f64;
        let mut basis = axis_basis(&space, 1e-16);
        while basis.len() < len {
            // numerically lost direction: fall back to the raw eigenvectors
            basis = orthogonalize(&space, 0.0);
        }
        for (k, v) in basis.into_iter().take(len).enumerate() {
            let n = dot4(&v, &v).sqrt();
            columns.push(sign_fixed(v.map(|e| e / n)));
            eigenvalues[start + k] = mean;
        }
    }
    let mut m: Mat4<f64> = std::array::from_fn(|i| std::array::from_fn(|k| columns[k][i]));
    if det4(&m) < 0.0 {
        for row in m.iter_mut() {
            row[3] = -row[3];
        }
    }
    RicciFrame {
        eigenvalues,
        frame: frame_unchecked(m),
        multiplicities: clusters.iter().map(|c| c.1).collect(),
        exact: None,
    }
}

/// Primitive integer direction parallel to `v`.
fn primitive(v: Vec4<Rational>) -> Vec4<Rational> {
    let den = common_denominator(v.iter());
    let ints: Vec<num::BigInt> = v.iter().map(|e| (e * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(num::BigInt::zero(), |acc, e| num::Integer::gcd(&acc, e));
    if g.is_zero() {
        return v;
    }
    std::array::from_fn(|i| Rational::from_integer(&ints[i] / &g))
}

/// Exact eigenframe when every Ricci eigenvalue is rational; same conventions as
/// [`frame_from_ricci`].
pub fn exact_frame_from_ricci(r: &Mat4<Rational>) -> Option<ExactFrame> {
    let rf = crate::mat::to_f64_4(r);
    let (eig, order, clusters) = clustered_spectrum(&rf);
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut eigenvalues: Vec<Rational> = Vec::with_capacity(4);
    let mut directions: Vec<Vec4<Rational>> = Vec::with_capacity(4);
    for &(start, len) in &clusters {
        let mean = (start..start + len).map(|p| eig.eigenvalues[order[p]]).sum::<f64>() / len as f64;
        let lambda = rationalize(mean, 1_000_000, 1e-9 * scale)?;
        let rows: Vec<Vec<Rational>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { &r[i][j] - &lambda } else { r[i][j].clone() }).collect())
            .collect();
        let null = linalg::nullspace(&rows, 4);
        if null.len() != len {
            return None;
        }
        let space: Vec<Vec4<Rational>> = null.into_iter().map(|v| std::array::from_fn(|i| v[i].clone())).collect();
        for v in axis_basis(&space, 0.0) {
            directions.push(sign_fixed(primitive(v)));
            eigenvalues.push(lambda.clone());
        }
    }
    if directions.len() != 4 {
        return None;
    }
    let mut f = ExactFrame {
        eigenvalues: std::array::from_fn(|k| eigenvalues[k].clone()),
        directions: std::array::from_fn(|k| directions[k].clone()),
    };
    f.fix_orientation();
    f.diagonalizes(r).then_some(f)
}

/// Ricci frame of a rational tensor, exact whenever the spectrum is rational.
pub fn ricci_frame(c: &Act<Rational>) -> RicciFrame {
    let r = ricci(c);
    let mut rf = frame_from_ricci(&crate::mat::to_f64_4(&r));
    if let Some(ex) = exact_frame_from_ricci(&r) {
        rf.frame = ex.to_frame();
        rf.eigenvalues = std::array::from_fn(|k| ex.eigenvalues[k].to_f64());
        rf.exact = Some(ex);
    }
    rf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{identity4, mul4, transpose4};
    use crate::scalar::int;

    #[test]
    fn identity_gives_identity_frame() {
        let f = frame_from_ricci(&identity4());
        assert_eq!(f.frame.matrix(), &identity4::<f64>());
        assert!(f.is_isotropic());
        let ex = exact_frame_from_ricci(&identity4()).unwrap();
        assert_eq!(ex.direction_matrix(), identity4());
    }

    #[test]
    fn distinct_spectrum_is_diagonalized() {
        let r: Mat4<f64> = [[4.0, 1.0, 0.5, 0.0], [1.0, 3.0, 0.2, 0.1], [0.5, 0.2, 2.0, 0.3], [0.0, 0.1, 0.3, 1.0]];
        let f = frame_from_ricci(&r);
        let l = f.frame.matrix();
        let d = mul4(&mul4(&transpose4(l), &r), l);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(d[i][j].abs() < 1e-10);
                }
            }
        }
        assert!(d[0][0] >= d[1][1] && d[1][1] >= d[2][2] && d[2][2] >= d[3][3]);
    }

    #[test]
    fn exact_frame_on_rational_spectrum() {
        let r: Mat4<Rational> = [
            [int(3), int(1), int(0), int(0)],
            [int(1), int(3), int(0), int(0)],
            [int(0), int(0), int(2), int(0)],
            [int(0), int(0), int(0), int(4)],
        ];
        let ex = exact_frame_from_ricci(&r).unwrap();
        assert!(ex.diagonalizes(&r));
        assert_eq!(ex.eigenvalues, [int(4), int(4), int(2), int(2)]);
        assert!(det4(&ex.direction_matrix()) > int(0));
    }
}
