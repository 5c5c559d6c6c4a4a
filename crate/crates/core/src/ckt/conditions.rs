//! Algebraic CKT conditions on the curvature tensor, certified exactly.
//!
//! A homogeneous polynomial of degree `d` in four variables vanishes identically iff it
//! vanishes on the lattice `{a in N^4 : |a| = d}`.

use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};

use crate::ckt::symexpr::{tsn1, tsn5, tsn6, SymmetrizedExpression};
use crate::ckt::torsion::{haantjes_at, is_zero3, max_abs3};
use crate::exec;
use crate::scalar::Rational;
use crate::tensor::act::Act;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TsnReport {
    pub tsn1: bool,
    pub tsn5: bool,
    pub tsn6: bool,
    pub h: bool,
}

impl TsnReport {
    pub fn all(&self) -> bool {
        self.tsn1 && self.tsn5 && self.tsn6 && self.h
    }
}

/// Degree of the Haantjes polynomial of `K = 4 C x x`.
pub const HAANTJES_DEGREE: usize = 7;

pub fn lattice(d: usize) -> Vec<[i64; 4]> {
    let d = d as i64;
    let mut out = Vec::new();
    for a in 0..=d {
        for b in 0..=(d - a) {
            for c in 0..=(d - a - b) {
                out.push([a, b, c, d - a - b - c]);
            }
        }
    }
    out
}

fn lattice_big(d: usize) -> Vec<[BigInt; 4]> {
    lattice(d).into_iter().map(|p| p.map(BigInt::from)).collect()
}

/// True iff the expression vanishes identically on the given integer-valued tensor.
pub fn expression_vanishes(expr: &SymmetrizedExpression, c: &Act<BigInt>) -> bool {
    let pts = lattice_big(expr.degree());
    exec::all(&pts, |x| expr.evaluate(c, x).iter().all(|v| v.is_zero()))
}

pub fn tsn_conditions(c: &Act<Rational>) -> (bool, bool, bool) {
    let ci = c.to_integer();
    (expression_vanishes(&tsn1(), &ci), expression_vanishes(&tsn5(), &ci), expression_vanishes(&tsn6(), &ci))
}

/// The H condition: the Haantjes tensor of `K = 4 C x x` vanishes as a polynomial in `x`.
pub fn h_condition(c: &Act<Rational>) -> bool {
    let ci = c.to_integer();
    let pts = lattice_big(HAANTJES_DEGREE);
    exec::all(&pts, |x| is_zero3(&haantjes_at(&ci, x)))
}

pub fn tsn_report(c: &Act<Rational>) -> TsnReport {
    let (tsn1, tsn5, tsn6) = tsn_conditions(c);
    TsnReport { tsn1, tsn5, tsn6, h: h_condition(c) }
}

/// Float check of an expression at the given unit points, relative to `|C|^factors`.
pub fn expression_max_f64(expr: &SymmetrizedExpression, c: &Act<f64>, points: &[[f64; 4]]) -> f64 {
    let n = c.frobenius();
    if n == 0.0 {
        return 0.0;
    }
    let cn = c.scale(&(1.0 / n));
    exec::map(points, |x| expr.evaluate(&cn, x).iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .into_iter()
        .fold(0.0, f64::max)
}

/// Float TSN/H report at sample points for tensors without an exact representation.
pub fn tsn_report_f64(c: &Act<f64>, points: &[[f64; 4]], tol: f64) -> TsnReport {
    let n = c.frobenius();
    let cn = if n == 0.0 { c.clone() } else { c.scale(&(1.0 / n)) };
    let h = exec::map(points, |x| max_abs3(&haantjes_at(&cn, x))).into_iter().fold(0.0, f64::max);
    TsnReport {
        tsn1: expression_max_f64(&tsn1(), c, points) <= tol,
        tsn5: expression_max_f64(&tsn5(), c, points) <= tol,
        tsn6: expression_max_f64(&tsn6(), c, points) <= tol,
        h: h <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_sizes() {
        assert_eq!(lattice(3).len(), 20);
        assert_eq!(lattice(5).len(), 56);
        assert_eq!(lattice(7).len(), 120);
    }

    #[test]
    fn zero_tensor_passes_everything() {
        let r = tsn_report(&Act::zero());
        assert!(r.all());
    }
}
