//! SO(4) acting on algebraic curvature tensors through the second compound matrix.

use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::mat::{det4, identity4, inverse4, mul4, transpose4, Mat4, Mat6, Vec4};
use crate::scalar::{int, rat, Field, Rational, Ring};
use crate::tensor::act::{kt_at, Act, PAIRS};

/// A special orthogonal 4x4 matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<T> {
    m: Mat4<T>,
}

impl<T: Ring> Frame<T> {
    pub fn new(m: Mat4<T>) -> Result<Self> {
        if is_special_orthogonal(&m) {
            Ok(Self { m })
        } else {
            Err(Error::NotSpecialOrthogonal)
        }
    }

    pub fn identity() -> Self {
        Self { m: identity4() }
    }

    pub fn matrix(&self) -> &Mat4<T> {
        &self.m
    }

    pub fn transpose(&self) -> Self {
        Self { m: transpose4(&self.m) }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { m: mul4(&self.m, &other.m) }
    }

    pub fn to_f64(&self) -> Frame<f64> {
        Frame { m: crate::mat::to_f64_4(&self.m) }
    }
}

impl Frame<f64> {
    /// Accepts a matrix that is special orthogonal to within `tol`.
    pub fn new_with_tol(m: Mat4<f64>, tol: f64) -> Result<Self> {
        if orthogonality_defect(&m) <= tol && (det4(&m) - 1.0).abs() <= tol {
            Ok(Self { m })
        } else {
            Err(Error::NotSpecialOrthogonal)
        }
    }
}

pub fn orthogonality_defect(m: &Mat4<f64>) -> f64 {
    let p = mul4(&transpose4(m), m);
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let e = if i == j { 1.0 } else { 0.0 };
            d = d.max((p[i][j] - e).abs());
        }
    }
    d
}

fn is_special_orthogonal<T: Ring>(m: &Mat4<T>) -> bool {
    let p = mul4(&transpose4(m), m);
    let tol = 1e-10;
    for i in 0..4 {
        for j in 0..4 {
            let e = if i == j { T::one() } else { T::zero() };
            if !(p[i][j].clone() - e).is_negligible(tol) {
                return false;
            }
        }
    }
    (det4(m) - T::one()).is_negligible(tol)
}

/// Second compound: `lambda[I][K] = L_ik L_jl - L_il L_jk` for `I = (i,j)`, `K = (k,l)`.
pub fn compound<T: Ring>(l: &Mat4<T>) -> Mat6<T> {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let (i, j) = PAIRS[a];
            let (k, m) = PAIRS[b];
            l[i][k].clone() * l[j][m].clone() - l[i][m].clone() * l[j][k].clone()
        })
    })
}

/// `C~_ijkl = L_ip L_jq L_kr L_ls C_pqrs`, computed as `lambda C lambda^T` on pair matrices.
pub fn so4_act<T: Ring>(c: &Act<T>, frame: &Frame<T>) -> Act<T> {
    congruence(c, frame.matrix())
}

/// `lambda C lambda^T` for an arbitrary 4x4 matrix `l`; the result keeps the ACT symmetries.
pub fn congruence<T: Ring>(c: &Act<T>, l: &Mat4<T>) -> Act<T> {
    let lam = compound(l);
    let m = c.pair_matrix();
    let mut tmp: Mat6<T> = std::array::from_fn(|_| std::array::from_fn(|_| T::zero()));
    for a in 0..6 {
        for d in 0..6 {
            let mut acc = T::zero();
            for b in 0..6 {
                if !lam[a][b].is_zero() && !m[b][d].is_zero() {
                    acc = acc + lam[a][b].clone() * m[b][d].clone();
                }
            }
            tmp[a][d] = acc;
        }
    }
    let out: Mat6<T> = std::array::from_fn(|a| {
        std::array::from_fn(|e| {
            let mut acc = T::zero();
            for d in 0..6 {
                if !tmp[a][d].is_zero() && !lam[e][d].is_zero() {
                    acc = acc + tmp[a][d].clone() * lam[e][d].clone();
                }
            }
            acc
        })
    });
    Act::from_pair_matrix_unchecked(out)
}

/// Checked variant taking a raw matrix.
pub fn so4_act_matrix<T: Ring>(c: &Act<T>, l: &Mat4<T>) -> Result<Act<T>> {
    Ok(so4_act(c, &Frame::new(l.clone())?))
}

/// `Tr(C^k)` for `k = 1..14` on the 6x6 pair matrix.
pub fn invariants<T: Ring>(c: &Act<T>) -> Vec<T> {
    let m = c.pair_matrix();
    let mut power = m.clone();
    let mut out = Vec::with_capacity(14);
    for k in 1..=14 {
        if k > 1 {
            power = crate::mat::mul6(&power, m);
        }
        out.push((0..6).fold(T::zero(), |acc, i| acc + power[i][i].clone()));
    }
    out
}

/// `(Tr K, Tr K^2, Tr K^3, |x|^2)` with `K = kt_at(C, x)`.
pub fn covariants<T: Ring>(c: &Act<T>, x: &Vec4<T>) -> [T; 4] {
    let k = kt_at(c, x);
    let k2 = mul4(&k, &k);
    let k3 = mul4(&k2, &k);
    [crate::mat::trace4(&k), crate::mat::trace4(&k2), crate::mat::trace4(&k3), crate::mat::dot4(x, x)]
}

/// Cayley transform `(I - S)(I + S)^{-1}` of a skew matrix; always in SO(4).
pub fn cayley<T: Field>(s: &[T; 6]) -> Frame<T> {
    let mut sk: Mat4<T> = crate::mat::zero4();
    for (idx, (i, j)) in PAIRS.iter().enumerate() {
        sk[*i][*j] = s[idx].clone();
        sk[*j][*i] = -s[idx].clone();
    }
    let id: Mat4<T> = identity4();
    let minus: Mat4<T> = std::array::from_fn(|i| std::array::from_fn(|j| id[i][j].clone() - sk[i][j].clone()));
    let plus: Mat4<T> = std::array::from_fn(|i| std::array::from_fn(|j| id[i][j].clone() + sk[i][j].clone()));
    let inv = inverse4(&plus).expect("I + S is invertible for skew S");
    Frame { m: mul4(&minus, &inv) }
}

/// Random rational rotation from a Cayley transform with small rational skew entries.
pub fn random_rational_frame(rng: &mut impl rand::Rng) -> Frame<Rational> {
    let s: [Rational; 6] = std::array::from_fn(|_| {
        let n = rng.random_range(-6i64..=6);
        let d = rng.random_range(1i64..=5);
        rat(n, d)
    });
    cayley(&s)
}

/// Haar-random rotation from the QR factorization of a Gaussian matrix.
pub fn random_frame(rng: &mut impl rand::Rng) -> Frame<f64> {
    let g = nalgebra::Matrix4::<f64>::from_fn(|_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..4 {
        if r[(j, j)] < 0.0 {
            for i in 0..4 {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        for i in 0..4 {
            q[(i, 3)] = -q[(i, 3)];
        }
    }
    Frame { m: crate::mat::from_nalgebra(&q) }
}

/// Rotation by `theta` in the `(a, b)` plane (zero-based axes).
pub fn plane_rotation(a: usize, b: usize, theta: f64) -> Frame<f64> {
    let mut m: Mat4<f64> = identity4();
    let (s, c) = theta.sin_cos();
    m[a][a] = c;
    m[b][b] = c;
    m[a][b] = -s;
    m[b][a] = s;
    Frame { m }
}

/// Signed permutation frame sending axis `perm[k]` to position `k`, sign-fixed to det +1.
pub fn permutation_frame<T: Ring>(perm: [usize; 4]) -> Frame<T> {
    let mut m: Mat4<T> = crate::mat::zero4();
    for (k, &p) in perm.iter().enumerate() {
        m[p][k] = T::one();
    }
    if det4(&m).to_f64() < 0.0 {
        for row in m.iter_mut() {
            row[3] = -row[3].clone();
        }
    }
    Frame { m }
}

/// Wraps a matrix already known to be special orthogonal.
pub(crate) fn frame_unchecked<T: Ring>(m: Mat4<T>) -> Frame<T> {
    Frame { m }
}

/// Exact rational point on S³ by inverse stereographic projection of `t`.
pub fn sphere_point(t: &[Rational; 3]) -> Vec4<Rational> {
    let s: Rational = t.iter().map(|v| v * v).sum();
    let den = &s + int(1);
    [int(2) * &t[0] / &den, int(2) * &t[1] / &den, int(2) * &t[2] / &den, (&s - int(1)) / &den]
}

pub fn random_sphere_point_rational(rng: &mut impl rand::Rng) -> Vec4<Rational> {
    let t: [Rational; 3] = std::array::from_fn(|_| rat(rng.random_range(-9i64..=9), rng.random_range(1i64..=7)));
    sphere_point(&t)
}

/// Uniform point on S³ from a normalized Gaussian draw.
pub fn random_sphere_point(rng: &mut impl rand::Rng) -> Vec4<f64> {
    loop {
        let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-8 {
            return g.map(|v| v / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::identity6;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn compound_of_identity() {
        let id: Mat4<Rational> = identity4();
        assert_eq!(compound(&id), identity6());
    }

    #[test]
    fn cayley_is_special_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f = random_rational_frame(&mut rng);
            assert!(Frame::new(f.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn rejects_reflections() {
        let mut m: Mat4<Rational> = identity4();
        m[0][0] = int(-1);
        assert_eq!(Frame::new(m), Err(Error::NotSpecialOrthogonal));
    }

    #[test]
    fn sphere_points_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let p = random_sphere_point_rational(&mut rng);
            assert_eq!(crate::mat::dot4(&p, &p), int(1));
        }
    }

    #[test]
    fn permutation_frames_have_det_one() {
        let f: Frame<Rational> = permutation_frame([1, 0, 2, 3]);
        assert_eq!(det4(f.matrix()), int(1));
    }
}
