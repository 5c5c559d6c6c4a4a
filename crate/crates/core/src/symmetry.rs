//! Web symmetries: Killing vectors of E⁴ whose Lie derivative annihilates `K + α𝒞`.
//!
//! For `V = A + M x` the Lie derivative of `K = 4 C x x` splits by degree in `x`: the
//! translation part `A^k ∂_k (K + α𝒞)` is linear, the rotation part is quadratic and blind
//! to `α`. The two sectors are therefore solved separately.

use nalgebra::{DMatrix, DVector, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::database::{Category, WebClass};
use crate::linalg;
use crate::mat::{Mat4, Vec4};
use crate::scalar::{int, rationalize, Field, Rational, Ring};
use crate::tensor::act::{casimir, kt_at, kt_gradient, Act, PAIRS};
use crate::tensor::killing::KillingVectorParams;
use crate::tensor::poly::{kt_poly, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KvKind {
    Translational,
    Rotational,
    Mixed,
}

/// Killing-vector invariants: `I1 = B_ij B^ij`, `I2 = A_i A^i`, and for rotations
/// `eps_ijkl B^ij B^kl`.
#[derive(Clone, Debug, PartialEq)]
pub struct KvClass<T> {
    pub kind: KvKind,
    pub i1: T,
    pub a_norm: T,
    pub eps_bb: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryGenerator<T> {
    pub kv: KillingVectorParams<T>,
    pub kind: KvKind,
    /// `α` with `ℒ_V (K + α𝒞) = 0`; `None` when any `α` works (rotations).
    pub casimir_alpha: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetrySignature<T> {
    pub n_rotations: usize,
    pub n_translations: usize,
    pub generators: Vec<SymmetryGenerator<T>>,
}

impl<T> SymmetrySignature<T> {
    pub fn counts(&self) -> (usize, usize) {
        (self.n_rotations, self.n_translations)
    }
}

/// `(ℒ_V K)_ij = V^k ∂_k K_ij + K_kj ∂_i V^k + K_ik ∂_j V^k` as polynomials in `x`.
pub fn lie_derivative_kt(v: &KillingVectorParams<Rational>, c: &Act<Rational>) -> Mat4<Poly> {
    let k = kt_poly(c);
    let m = v.linear_part();
    let vk: Vec<Poly> = (0..4)
        .map(|a| (0..4).fold(Poly::constant(v.a[a].clone()), |acc, j| acc.add(&Poly::x(j).scale(&m[a][j]))))
        .collect();
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut out = Poly::zero();
            for a in 0..4 {
                out = out.add(&vk[a].mul(&k[i][j].derivative(a)));
                out = out.add(&k[a][j].scale(&m[a][i]));
                out = out.add(&k[i][a].scale(&m[a][j]));
            }
            out
        })
    })
}

/// Pointwise `ℒ_V K` for `V = A + M x`.
pub fn lie_derivative_at<T: Ring>(a: &Vec4<T>, m: &Mat4<T>, c: &Act<T>, x: &Vec4<T>) -> Mat4<T> {
    let k = kt_at(c, x);
    let dk = kt_gradient(c, x);
    let v: Vec4<T> = std::array::from_fn(|p| (0..4).fold(a[p].clone(), |acc, q| acc + m[p][q].clone() * x[q].clone()));
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (0..4).fold(T::zero(), |acc, p| {
                acc + v[p].clone() * dk[p][i][j].clone()
                    + k[p][j].clone() * m[p][i].clone()
                    + k[i][p].clone() * m[p][j].clone()
            })
        })
    })
}

fn unit<T: Ring>(i: usize) -> Vec4<T> {
    std::array::from_fn(|k| if k == i { T::one() } else { T::zero() })
}

/// Points on which a quadratic form in four variables is determined: `e_i` and `e_i + e_j`.
fn quadratic_nodes<T: Ring>() -> Vec<Vec4<T>> {
    let mut out: Vec<Vec4<T>> = (0..4).map(unit).collect();
    for (i, j) in PAIRS {
        out.push(std::array::from_fn(|k| if k == i || k == j { T::one() } else { T::zero() }));
    }
    out
}

/// Linear map from the six rotation coordinates `M_ij` (over the pairs) to the values of
/// `ℒ_V K` at the quadratic nodes; column `p` is the image of the rotation in pair `p`.
fn rotation_system<T: Ring>(c: &Act<T>) -> Vec<Vec<T>> {
    let zero_a: Vec4<T> = std::array::from_fn(|_| T::zero());
    let nodes = quadratic_nodes::<T>();
    let cols: Vec<Vec<T>> = PAIRS
        .iter()
        .map(|&(i, j)| {
            let mut m: Mat4<T> = crate::mat::zero4();
            m[i][j] = T::one();
            m[j][i] = -T::one();
            nodes
                .iter()
                .flat_map(|x| {
                    let l = lie_derivative_at(&zero_a, &m, c, x);
                    upper_triangle(&l)
                })
                .collect()
        })
        .collect();
    transpose(&cols)
}

/// Linear map from `A` to the coefficients of the linear form `A^k ∂_k K_ij`.
fn translation_system<T: Ring>(c: &Act<T>) -> Vec<Vec<T>> {
    let cols: Vec<Vec<T>> = (0..4)
        .map(|a| {
            (0..4)
                .flat_map(|n| {
                    let dk = kt_gradient(c, &unit::<T>(n));
                    upper_triangle(&dk[a])
                })
                .collect()
        })
        .collect();
    transpose(&cols)
}

fn upper_triangle<T: Clone>(m: &Mat4<T>) -> Vec<T> {
    (0..4).flat_map(|p| (p..4).map(move |q| m[p][q].clone())).collect()
}

fn transpose<T: Clone>(cols: &[Vec<T>]) -> Vec<Vec<T>> {
    let nrows = cols.first().map_or(0, |c| c.len());
    (0..nrows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
}

fn to_dmatrix<T: Ring>(rows: &[Vec<T>]) -> DMatrix<f64> {
    let ncols = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j].to_f64())
}

/// Real `α` candidates with `(T_K + α T_𝒞) A = 0` for some `A ≠ 0`: eigenvalues of
/// `-pinv(T_𝒞) T_K`, plus zero.
fn alpha_candidates(tk: &DMatrix<f64>, tc: &DMatrix<f64>) -> Vec<f64> {
    let pinv = tc.clone().pseudo_inverse(1e-12).expect("pseudo-inverse");
    let p: DMatrix<f64> = -(pinv * tk);
    let p4 = Matrix4::from_fn(|i, j| p[(i, j)]);
    let scale = p4.amax().max(1.0);
    let mut out = vec![0.0];
    for z in p4.complex_eigenvalues().iter() {
        if z.im.abs() <= 1e-8 * scale && !out.iter().any(|v: &f64| (v - z.re).abs() <= 1e-8 * scale) {
            out.push(z.re);
        }
    }
    out
}

pub fn classify_kv<T: Field>(v: &KillingVectorParams<T>) -> Result<KvClass<T>> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let b = &v.b;
    let i1 = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .fold(T::zero(), |acc, (i, j)| acc + b[i][j].clone() * b[i][j].clone());
    let a_norm = crate::mat::dot4(&v.a, &v.a);
    let a_zero = v.a.iter().all(|x| x.is_negligible(1e-12));
    let kind = if i1.is_negligible(1e-12) {
        KvKind::Translational
    } else if a_zero {
        KvKind::Rotational
    } else {
        KvKind::Mixed
    };
    let eps_bb = (kind == KvKind::Rotational).then(|| T::from_i64(8) * pfaffian(b));
    Ok(KvClass { kind, i1, a_norm, eps_bb })
}

/// `B12 B34 - B13 B24 + B14 B23`.
pub fn pfaffian<T: Ring>(b: &Mat4<T>) -> T {
    b[0][1].clone() * b[2][3].clone() - b[0][2].clone() * b[1][3].clone() + b[0][3].clone() * b[1][2].clone()
}

/// Block parameters `(κ1, κ2)`, `|κ1| >= |κ2| >= 0`, of a skew matrix; `κ1² + κ2² = I1/2`.
pub fn kv_canonical_form<T: Ring>(b: &Mat4<T>) -> Result<(f64, f64)> {
    let bf = crate::mat::to_f64_4(b);
    let s: f64 = PAIRS.iter().map(|&(i, j)| bf[i][j] * bf[i][j]).sum();
    if s == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let p = pfaffian(&bf).abs();
    let disc = (s * s - 4.0 * p * p).max(0.0).sqrt();
    let k1 = ((s + disc) / 2.0).sqrt();
    let k2 = if k1 > 0.0 { p / k1 } else { 0.0 };
    Ok((k1, k2))
}

fn rotation_generator<T: Field>(coords: &[T]) -> SymmetryGenerator<T> {
    let mut m: Mat4<T> = crate::mat::zero4();
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        m[i][j] = coords[p].clone();
        m[j][i] = -coords[p].clone();
    }
    let kv = KillingVectorParams::from_linear_field(std::array::from_fn(|_| T::zero()), m).expect("skew");
    SymmetryGenerator { kv, kind: KvKind::Rotational, casimir_alpha: None }
}

fn translation_generator<T: Field>(a: &[T], alpha: T) -> SymmetryGenerator<T> {
    let kv = KillingVectorParams::new(std::array::from_fn(|k| a[k].clone()), crate::mat::zero4()).expect("zero B");
    SymmetryGenerator { kv, kind: KvKind::Translational, casimir_alpha: Some(alpha) }
}

/// Exact symmetry algebra of a rational tensor.
pub fn symmetry_algebra(c: &Act<Rational>) -> Result<SymmetrySignature<Rational>> {
    if c.is_zero() {
        return Err(Error::DegenerateInput("every Killing vector preserves the zero tensor".into()));
    }
    let rot = linalg::nullspace(&rotation_system(c), 6);
    let tk = translation_system(c);
    let tc = translation_system(&casimir(int(1)));
    let mut best: (Vec<Vec<Rational>>, Rational) = (vec![], int(0));
    for alpha in alpha_candidates(&to_dmatrix(&tk), &to_dmatrix(&tc)) {
        let Some(q) = rationalize(alpha, 1_000_000, 1e-9) else { continue };
        let rows: Vec<Vec<Rational>> =
            tk.iter().zip(&tc).map(|(rk, rc)| rk.iter().zip(rc).map(|(a, b)| a + &q * b).collect()).collect();
        let null = linalg::nullspace(&rows, 4);
        if null.len() > best.0.len() {
            best = (null, q);
        }
    }
    let mut generators: Vec<SymmetryGenerator<Rational>> = rot.iter().map(|v| rotation_generator(v)).collect();
    generators.extend(best.0.iter().map(|a| translation_generator(a, best.1.clone())));
    Ok(SymmetrySignature { n_rotations: rot.len(), n_translations: best.0.len(), generators })
}

/// Float symmetry algebra; nullspaces by singular values below `rel_tol` of the largest.
pub fn symmetry_algebra_f64(c: &Act<f64>, rel_tol: f64) -> Result<SymmetrySignature<f64>> {
    let norm = c.frobenius();
    if norm == 0.0 {
        return Err(Error::DegenerateInput("every Killing vector preserves the zero tensor".into()));
    }
    let c = c.scale(&(1.0 / norm));
    let rot = linalg::nullspace_f64(&to_dmatrix(&rotation_system(&c)), rel_tol);
    let tk = to_dmatrix(&translation_system(&c));
    let tc = to_dmatrix(&translation_system(&casimir(1.0)));
    let mut best: (Vec<DVector<f64>>, f64) = (vec![], 0.0);
    for alpha in alpha_candidates(&tk, &tc) {
        let m = &tk + &tc * alpha;
        // absolute threshold: the system scale is fixed by the normalization
        let s = m.clone().svd(false, true);
        let vt = s.v_t.expect("v_t");
        let null: Vec<DVector<f64>> =
            (0..4).filter(|&i| s.singular_values[i] <= rel_tol).map(|i| vt.row(i).transpose()).collect();
        if null.len() > best.0.len() {
            best = (null, alpha);
        }
    }
    let mut generators: Vec<SymmetryGenerator<f64>> = rot.iter().map(|v| rotation_generator(v.as_slice())).collect();
    generators.extend(best.0.iter().map(|a| translation_generator(a.as_slice(), best.1 * norm)));
    Ok(SymmetrySignature { n_rotations: rot.len(), n_translations: best.0.len(), generators })
}

/// Table lookup from symmetry counts to the web category.
pub fn web_category(n_rotations: usize, n_translations: usize) -> Result<(Category, &'static [WebClass])> {
    Category::ALL
        .iter()
        .find(|c| c.signature() == (n_rotations, n_translations))
        .map(|c| (*c, c.webs()))
        .ok_or(Error::UnknownSignature { rotations: n_rotations, translations: n_translations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::database::sample_parameters;

    #[test]
    fn casimir_is_rotation_invariant() {
        let r = KillingVectorParams::<Rational>::rotation(0, 1);
        let l = lie_derivative_kt(&r, &casimir(int(1)));
        assert!(l.iter().flatten().all(Poly::is_zero));
        let t = KillingVectorParams::<Rational>::translation(0);
        let l = lie_derivative_kt(&t, &casimir(int(1)));
        assert!(l.iter().flatten().any(|p| !p.is_zero() && p.degree() == Some(1)));
    }

    #[test]
    fn pointwise_matches_polynomial() {
        let c = Act::from_slots(&(0..20).map(|i| int(i % 7 - 3)).collect::<Vec<_>>());
        let v = KillingVectorParams::from_coords(&(0..10).map(|i| int(i - 4)).collect::<Vec<_>>());
        let poly = lie_derivative_kt(&v, &c);
        let x = [int(2), int(-1), int(3), int(1)];
        let at = lie_derivative_at(&v.a, &v.linear_part(), &c, &x);
        let vals: [Rational; 8] = std::array::from_fn(|k| if k < 4 { x[k].clone() } else { int(0) });
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(poly[i][j].eval(&vals), at[i][j]);
            }
        }
    }

    #[test]
    fn table_counts() {
        for web in WebClass::ALL {
            let c = web.form().act(&sample_parameters(web)[0]);
            let sig = symmetry_algebra(&c).unwrap();
            assert_eq!(sig.counts(), web.category().signature(), "{web}");
        }
    }

    #[test]
    fn canonical_block_parameters() {
        let mut b: Mat4<f64> = crate::mat::zero4();
        b[0][1] = 1.0;
        b[1][0] = -1.0;
        b[2][3] = 2.0;
        b[3][2] = -2.0;
        let (k1, k2) = kv_canonical_form(&b).unwrap();
        assert!((k1 - 2.0).abs() < 1e-12 && (k2 - 1.0).abs() < 1e-12);
    }
}
