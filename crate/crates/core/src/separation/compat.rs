//! The compatibility condition d(K dV) = 0 as linear constraints on the 20 ACT parameters.
//!
//! With `omega = K grad V` in ambient coordinates, the pull-back of `d omega` to S³
//! vanishes iff `x ^ d omega = 0`, which gives four scalar rows per sample point.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::{self, RowReducer};
use crate::mat::{Mat4, Vec4};
use crate::scalar::{Field, Rational};
use crate::separation::potential::{Potential, RationalPotential};
use crate::tensor::act::{kt_at, kt_gradient, Act};
use crate::tensor::action::{random_sphere_point, random_sphere_point_rational};

pub const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

/// Null-space threshold relative to the largest singular value.
pub const NULLSPACE_TOL: f64 = 1e-9;
/// Acceptance threshold on fresh verification samples.
pub const VERIFY_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct CompatibleSpace {
    pub basis: Vec<Act<f64>>,
    pub exact_basis: Option<Vec<Act<Rational>>>,
    pub dimension: usize,
    pub sample_residual: f64,
    pub samples: usize,
    pub exact: bool,
}

impl CompatibleSpace {
    pub fn is_everything(&self) -> bool {
        self.dimension == 20
    }

    /// Exact membership when an exact basis is known.
    pub fn contains_exact(&self, c: &Act<Rational>) -> Option<bool> {
        let basis = self.exact_basis.as_ref()?;
        let rows: Vec<Vec<Rational>> = basis.iter().map(|b| b.slots()).collect();
        Some(linalg::span_rref(&rows, 20).contains(&c.slots()))
    }

    /// Orthonormal basis in flattened pair-matrix coordinates.
    pub fn orthonormal(&self) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self.basis.iter().map(pair_vector).collect();
        if cols.is_empty() {
            return DMatrix::zeros(36, 0);
        }
        linalg::orthonormal_columns(&DMatrix::from_columns(&cols), 1e-10)
    }
}

/// Flattened pair matrix; its Euclidean inner product is SO(4) invariant.
pub fn pair_vector(c: &Act<f64>) -> DVector<f64> {
    let m = c.pair_matrix();
    DVector::from_fn(36, |k, _| m[k / 6][k % 6])
}

pub fn unit_slot_acts<T: Field>() -> Vec<Act<T>> {
    (0..20)
        .map(|s| {
            let v: Vec<T> = (0..20).map(|k| if k == s { T::one() } else { T::zero() }).collect();
            Act::from_slots(&v)
        })
        .collect()
}

/// The four rows of `x ^ d(K grad V)` at `x`, one column per basis tensor.
pub fn rows_at<T: Field>(basis: &[Act<T>], x: &Vec4<T>, grad: &Vec4<T>, hess: &Mat4<T>) -> Vec<Vec<T>> {
    let mut rows: Vec<Vec<T>> = (0..4).map(|_| Vec::with_capacity(basis.len())).collect();
    for c in basis {
        let k = kt_at(c, x);
        let dk = kt_gradient(c, x);
        // d_i omega_j
        let d: Mat4<T> = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                (0..4).fold(T::zero(), |acc, l| {
                    acc + dk[i][j][l].clone() * grad[l].clone() + k[j][l].clone() * hess[i][l].clone()
                })
            })
        });
        let f = |i: usize, j: usize| d[i][j].clone() - d[j][i].clone();
        for (r, &[i, j, l]) in TRIPLES.iter().enumerate() {
            rows[r].push(x[i].clone() * f(j, l) + x[j].clone() * f(l, i) + x[l].clone() * f(i, j));
        }
    }
    rows
}

/// Residual of `x ^ d(K grad V)` for one tensor, relative to the size of its ingredients.
pub fn compatibility_residual_at(c: &Act<f64>, v: &dyn Potential, x: &Vec4<f64>) -> f64 {
    let g = v.gradient_f64(x);
    let h = v.hessian_f64(x);
    let rows = rows_at(std::slice::from_ref(c), x, &g, &h);
    let scale = c.frobenius() * (norm4(&g) + h.iter().flatten().map(|e| e * e).sum::<f64>().sqrt()).max(1e-300);
    rows.iter().map(|r| r[0].abs()).fold(0.0, f64::max) / scale
}

fn norm4(v: &Vec4<f64>) -> f64 {
    v.iter().map(|e| e * e).sum::<f64>().sqrt()
}

/// A sample point with the gradient and Hessian of the potential there.
type Sample<T> = (Vec4<T>, Vec4<T>, Mat4<T>);

fn exact_points(v: &RationalPotential, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Sample<Rational>>> {
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n {
        tries += 1;
        if tries > 50 * n + 100 {
            return Err(Error::ChartSingularity);
        }
        let x = random_sphere_point_rational(rng);
        if let (Some(g), Some(h)) = (v.gradient(&x), v.hessian(&x)) {
            out.push((x, g, h));
        }
    }
    Ok(out)
}

/// Exact compatible space of a rational potential.
pub fn compatibility_constraints_exact(v: &RationalPotential, n_samples: usize, seed: u64) -> Result<CompatibleSpace> {
    let n_samples = n_samples.max(60);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis: Vec<Act<Rational>> = unit_slot_acts();
    let mut rr = RowReducer::new(20);
    let mut used = 0;
    let mut batch = n_samples;
    loop {
        let pts = exact_points(v, batch, &mut rng)?;
        used += pts.len();
        let rows: Vec<Vec<Vec<Rational>>> = exec::map(&pts, |(x, g, h)| rows_at(&basis, x, g, h));
        for r in rows.into_iter().flatten() {
            if rr.is_full() {
                break;
            }
            rr.push(r);
        }
        // Fresh points must add nothing.
        let fresh = exact_points(v, 8, &mut rng)?;
        used += fresh.len();
        let null = rr.nullspace();
        let acts: Vec<Act<Rational>> = null.iter().map(|s| Act::from_slots(s)).collect();
        let ok =
            exec::all(&fresh, |(x, g, h)| rows_at(&acts, x, g, h).iter().all(|r| r.iter().all(num::Zero::is_zero)));
        if ok {
            return Ok(CompatibleSpace {
                basis: acts.iter().map(|a| a.to_f64()).collect(),
                dimension: acts.len(),
                exact_basis: Some(acts),
                sample_residual: 0.0,
                samples: used,
                exact: true,
            });
        }
        batch = 8;
    }
}

fn float_points(v: &dyn Potential, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Sample<f64>>> {
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n {
        tries += 1;
        if tries > 50 * n + 100 {
            return Err(Error::ChartSingularity);
        }
        let x = random_sphere_point(rng);
        if let Some(rv) = v.exact() {
            if !rv.is_regular_at(&x, 1e-3) {
                continue;
            }
        }
        let g = v.gradient_f64(&x);
        let h = v.hessian_f64(&x);
        if g.iter().chain(h.iter().flatten()).all(|e| e.is_finite()) {
            out.push((x, g, h));
        }
    }
    Ok(out)
}

fn normalized_rows(pts: &[(Vec4<f64>, Vec4<f64>, Mat4<f64>)], basis: &[Act<f64>]) -> Vec<Vec<f64>> {
    exec::map(pts, |(x, g, h)| rows_at(basis, x, g, h))
        .into_iter()
        .flatten()
        .filter_map(|r| {
            let n = r.iter().map(|e| e * e).sum::<f64>().sqrt();
            (n > 0.0).then(|| r.iter().map(|e| e / n).collect())
        })
        .collect()
}

/// Float compatible space: SVD null space, re-verified on fresh samples.
pub fn compatibility_constraints_f64(v: &dyn Potential, n_samples: usize, seed: u64) -> Result<CompatibleSpace> {
    let n_samples = n_samples.max(60);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis: Vec<Act<f64>> = unit_slot_acts();
    let mut rows = normalized_rows(&float_points(v, n_samples, &mut rng)?, &basis);
    let mut used = n_samples;
    let mut last = (Vec::new(), f64::INFINITY);
    for _ in 0..3 {
        let null = if rows.is_empty() {
            (0..20).map(|k| DVector::from_fn(20, |i, _| if i == k { 1.0 } else { 0.0 })).collect()
        } else {
            let a = DMatrix::from_fn(rows.len(), 20, |i, j| rows[i][j]);
            linalg::nullspace_f64(&a, NULLSPACE_TOL)
        };
        let fresh_pts = float_points(v, n_samples / 2, &mut rng)?;
        used += fresh_pts.len();
        let fresh = normalized_rows(&fresh_pts, &basis);
        let residual = null
            .iter()
            .flat_map(|c| fresh.iter().map(move |r| r.iter().zip(c.iter()).map(|(a, b)| a * b).sum::<f64>().abs()))
            .fold(0.0, f64::max);
        last = (null, residual);
        if residual <= VERIFY_TOL {
            break;
        }
        rows.extend(fresh);
    }
    let (null, residual) = last;
    let acts: Vec<Act<f64>> = null.iter().map(|c| Act::from_slots(c.as_slice())).collect();
    Ok(CompatibleSpace {
        dimension: acts.len(),
        basis: acts,
        exact_basis: None,
        sample_residual: residual,
        samples: used,
        exact: false,
    })
}

/// Exact when the potential is rational and `exact` is requested.
pub fn compatibility_constraints(
    v: &dyn Potential,
    n_samples: usize,
    seed: u64,
    exact: bool,
) -> Result<CompatibleSpace> {
    match (exact, v.exact()) {
        (true, Some(rv)) => compatibility_constraints_exact(rv, n_samples, seed),
        _ => compatibility_constraints_f64(v, n_samples, seed),
    }
}
