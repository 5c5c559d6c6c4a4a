//! Algebraic curvature tensors: the 20-parameter coefficient space of Killing tensors on S³.

use std::fmt;

use crate::error::{Error, Result};
use crate::mat::{Mat4, Mat6, Vec4};
use crate::scalar::{format_rational, Field, Rational, Ring};

/// Skew index pairs in the fixed order 12, 13, 14, 23, 24, 34 (zero-based internally).
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// An ordered pair `i < j` of ambient axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkewPair {
    pub i: usize,
    pub j: usize,
}

impl SkewPair {
    pub fn from_index(idx: usize) -> Self {
        let (i, j) = PAIRS[idx];
        Self { i, j }
    }

    /// Position in the enumeration 12, 13, 14, 23, 24, 34.
    pub fn index(&self) -> usize {
        pair_index(self.i, self.j).expect("i < j").0
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.i + 1, self.j + 1)
    }
}

/// Pair position and orientation sign for an unordered `(i, j)`; `None` when `i == j`.
pub fn pair_index(i: usize, j: usize) -> Option<(usize, i8)> {
    let (a, b, s) = match i.cmp(&j) {
        std::cmp::Ordering::Less => (i, j, 1),
        std::cmp::Ordering::Greater => (j, i, -1),
        std::cmp::Ordering::Equal => return None,
    };
    let idx = PAIRS.iter().position(|&p| p == (a, b))?;
    Some((idx, s))
}

/// The 20 independent slots (one-based labels), lexicographically smallest orbit
/// representatives with 1423 eliminated through the first Bianchi identity.
pub const SLOTS: [[usize; 4]; 20] = [
    [1, 2, 1, 2],
    [1, 2, 1, 3],
    [1, 2, 1, 4],
    [1, 2, 2, 3],
    [1, 2, 2, 4],
    [1, 2, 3, 4],
    [1, 3, 1, 3],
    [1, 3, 1, 4],
    [1, 3, 2, 3],
    [1, 3, 2, 4],
    [1, 3, 3, 4],
    [1, 4, 1, 4],
    [1, 4, 2, 4],
    [1, 4, 3, 4],
    [2, 3, 2, 3],
    [2, 3, 2, 4],
    [2, 3, 3, 4],
    [2, 4, 2, 4],
    [2, 4, 3, 4],
    [3, 4, 3, 4],
];

pub fn slot_label(s: usize) -> String {
    SLOTS[s].iter().map(|d| d.to_string()).collect()
}

fn slot_pairs(s: usize) -> (usize, usize) {
    let [i, j, k, l] = SLOTS[s];
    (pair_index(i - 1, j - 1).unwrap().0, pair_index(k - 1, l - 1).unwrap().0)
}

/// Algebraic curvature tensor, held as its symmetric 6x6 pair matrix `C[I][J] = C_{ijkl}`.
#[derive(Clone, PartialEq)]
pub struct Act<T> {
    m: Mat6<T>,
}

impl<T: Ring> Act<T> {
    pub fn zero() -> Self {
        Self { m: std::array::from_fn(|_| std::array::from_fn(|_| T::zero())) }
    }

    /// Builds from a symmetric pair matrix; rejects asymmetric or non-Bianchi input.
    pub fn from_pair_matrix(m: Mat6<T>) -> Result<Self> {
        for a in 0..6 {
            for b in 0..a {
                if !(m[a][b].clone() - m[b][a].clone()).is_negligible(1e-12) {
                    let (i, j) = PAIRS[a];
                    let (k, l) = PAIRS[b];
                    return Err(Error::ConflictingEntry(format!("{}{}{}{}", i + 1, j + 1, k + 1, l + 1)));
                }
            }
        }
        let act = Self { m };
        let b = act.bianchi_defect();
        if !b.is_negligible(1e-12) {
            return Err(Error::BianchiViolation(format!("{b:?}")));
        }
        Ok(act)
    }

    /// From the pair matrix without checks. The caller guarantees the symmetries.
    pub(crate) fn from_pair_matrix_unchecked(m: Mat6<T>) -> Self {
        Self { m }
    }

    pub fn pair_matrix(&self) -> &Mat6<T> {
        &self.m
    }

    fn bianchi_defect(&self) -> T {
        // C1234 - C1324 + C1423
        self.m[0][5].clone() - self.m[1][4].clone() + self.m[2][3].clone()
    }

    /// `C_{ijkl}` for zero-based indices.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        match (pair_index(i, j), pair_index(k, l)) {
            (Some((a, s1)), Some((b, s2))) => {
                if s1 * s2 > 0 {
                    self.m[a][b].clone()
                } else {
                    -self.m[a][b].clone()
                }
            }
            _ => T::zero(),
        }
    }

    /// All 256 components, index `((i*4+j)*4+k)*4+l`.
    pub fn full(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(256);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        out.push(self.get(i, j, k, l));
                    }
                }
            }
        }
        out
    }

    pub fn slots(&self) -> Vec<T> {
        (0..20)
            .map(|s| {
                let (a, b) = slot_pairs(s);
                self.m[a][b].clone()
            })
            .collect()
    }

    pub fn from_slots(v: &[T]) -> Self {
        assert_eq!(v.len(), 20, "an ACT has 20 independent slots");
        let mut m: Mat6<T> = std::array::from_fn(|_| std::array::from_fn(|_| T::zero()));
        for (s, val) in v.iter().enumerate() {
            let (a, b) = slot_pairs(s);
            m[a][b] = val.clone();
            m[b][a] = val.clone();
        }
        // C1423 = C1324 - C1234
        let c1423 = m[1][4].clone() - m[0][5].clone();
        m[2][3] = c1423.clone();
        m[3][2] = c1423;
        Self { m }
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_zero())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Act<U> {
        Act { m: std::array::from_fn(|a| std::array::from_fn(|b| f(&self.m[a][b]))) }
    }

    pub fn to_f64(&self) -> Act<f64> {
        self.map(|v| v.to_f64())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { m: std::array::from_fn(|a| std::array::from_fn(|b| self.m[a][b].clone() + other.m[a][b].clone())) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { m: std::array::from_fn(|a| std::array::from_fn(|b| self.m[a][b].clone() - other.m[a][b].clone())) }
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map(|v| v.clone() * k.clone())
    }

    /// Frobenius norm of the full four-index tensor.
    pub fn frobenius(&self) -> f64 {
        let s: f64 = self.m.iter().flatten().map(|v| v.to_f64().powi(2)).sum();
        (4.0 * s).sqrt()
    }

    /// Linear combination `sum_k coeffs[k] * acts[k]`.
    pub fn combination(acts: &[Act<T>], coeffs: &[T]) -> Self {
        let mut out = Self::zero();
        for (a, c) in acts.iter().zip(coeffs) {
            out = out.add(&a.scale(c));
        }
        out
    }
}

impl<T: Field> Act<T> {
    /// Rescaled to unit Frobenius norm (float only makes sense; exact input is converted).
    pub fn normalized_f64(&self) -> Act<f64> {
        let f = self.to_f64();
        let n = f.frobenius();
        if n == 0.0 {
            f
        } else {
            f.scale(&(1.0 / n))
        }
    }
}

impl Act<Rational> {
    /// Slots that are nonzero, as one-based labels with exact values.
    pub fn nonzero_slots(&self) -> Vec<(String, Rational)> {
        self.slots()
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !num::Zero::is_zero(v))
            .map(|(s, v)| (slot_label(s), v))
            .collect()
    }

    /// Multiplies by the common denominator so every component is an integer.
    pub fn to_integer(&self) -> Act<num::BigInt> {
        let den = crate::scalar::common_denominator(self.m.iter().flatten());
        let den = Rational::from_integer(den);
        self.map(|v| (v * &den).to_integer())
    }
}

impl<T: Ring> fmt::Debug for Act<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_map();
        for (s, v) in self.slots().iter().enumerate() {
            if !v.is_zero() {
                d.entry(&format!("C{}", slot_label(s)), v);
            }
        }
        d.finish()
    }
}

impl fmt::Display for Act<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.nonzero_slots().into_iter().map(|(l, v)| format!("C{l}={}", format_rational(&v))).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(", "))
        }
    }
}

/// Builds the unique ACT matching the stated entries (one-based indices); unstated
/// independent slots are zero and C1423 follows from the Bianchi identity unless stated.
pub fn act_from_components<T: Ring>(entries: &[([usize; 4], T)]) -> Result<Act<T>> {
    let mut m: Vec<Vec<Option<T>>> = vec![vec![None; 6]; 6];
    for (idx, v) in entries {
        if idx.iter().any(|&d| !(1..=4).contains(&d)) {
            return Err(Error::IndexOutOfRange(*idx));
        }
        let [i, j, k, l] = idx.map(|d| d - 1);
        let label = format!("{}{}{}{}", idx[0], idx[1], idx[2], idx[3]);
        let (Some((a, s1)), Some((b, s2))) = (pair_index(i, j), pair_index(k, l)) else {
            if v.is_zero() {
                continue;
            }
            return Err(Error::ConflictingEntry(label));
        };
        let val = if s1 * s2 > 0 { v.clone() } else { -v.clone() };
        for (p, q) in [(a, b), (b, a)] {
            match &m[p][q] {
                Some(prev) if *prev != val => return Err(Error::ConflictingEntry(label)),
                _ => m[p][q] = Some(val.clone()),
            }
        }
    }
    let c1423_stated = m[2][3].clone();
    let mut out: Mat6<T> = std::array::from_fn(|a| std::array::from_fn(|b| m[a][b].clone().unwrap_or_else(T::zero)));
    let derived = out[1][4].clone() - out[0][5].clone();
    match c1423_stated {
        Some(v) if v != derived => {
            return Err(Error::BianchiViolation(format!("{:?}", out[0][5].clone() - out[1][4].clone() + v)))
        }
        _ => {
            out[2][3] = derived.clone();
            out[3][2] = derived;
        }
    }
    Ok(Act::from_pair_matrix_unchecked(out))
}

/// `K_ij(x) = 4 C_ikjl x^k x^l`.
pub fn kt_at<T: Ring>(c: &Act<T>, x: &Vec4<T>) -> Mat4<T> {
    let full = c.full();
    let four = T::from_i64(4);
    let mut xx: [[T; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| T::zero()));
    for k in 0..4 {
        for l in 0..4 {
            xx[k][l] = x[k].clone() * x[l].clone();
        }
    }
    let mut k_out: Mat4<T> = std::array::from_fn(|_| std::array::from_fn(|_| T::zero()));
    for i in 0..4 {
        for j in i..4 {
            let mut acc = T::zero();
            for k in 0..4 {
                for l in 0..4 {
                    let cv = &full[((i * 4 + k) * 4 + j) * 4 + l];
                    if !cv.is_zero() {
                        acc = acc + cv.clone() * xx[k][l].clone();
                    }
                }
            }
            let v = four.clone() * acc;
            k_out[j][i] = v.clone();
            k_out[i][j] = v;
        }
    }
    k_out
}

/// `dK[m][i][j] = d_m K_ij = 4 (C_imjl + C_iljm) x^l`.
pub fn kt_gradient<T: Ring>(c: &Act<T>, x: &Vec4<T>) -> [[[T; 4]; 4]; 4] {
    let full = c.full();
    let at = |i: usize, j: usize, k: usize, l: usize| &full[((i * 4 + j) * 4 + k) * 4 + l];
    let four = T::from_i64(4);
    std::array::from_fn(|m| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = T::zero();
                for l in 0..4 {
                    let s = at(i, m, j, l).clone() + at(i, l, j, m).clone();
                    if !s.is_zero() {
                        acc = acc + s * x[l].clone();
                    }
                }
                four.clone() * acc
            })
        })
    })
}

/// Casimir tensor: the ACT `(k/8)(d_ik d_jl - d_il d_jk)`, whose Killing tensor is
/// `(k/2)(|x|^2 d_ij - x_i x_j)`.
pub fn casimir<T: Field>(k: T) -> Act<T> {
    let lambda = k / T::from_i64(8);
    let m: Mat6<T> = std::array::from_fn(|a| std::array::from_fn(|b| if a == b { lambda.clone() } else { T::zero() }));
    Act::from_pair_matrix_unchecked(m)
}

/// `R_jl = sum_i C_ijil`.
pub fn ricci<T: Ring>(c: &Act<T>) -> Mat4<T> {
    std::array::from_fn(|j| std::array::from_fn(|l| (0..4).fold(T::zero(), |acc, i| acc + c.get(i, j, i, l))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn q(v: i64) -> Rational {
        int(v)
    }

    #[test]
    fn empty_input_is_zero() {
        let c: Act<Rational> = act_from_components(&[]).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn single_entry_completion() {
        let c = act_from_components(&[([1, 2, 1, 2], q(1))]).unwrap();
        assert_eq!(c.get(0, 1, 0, 1), q(1));
        assert_eq!(c.get(1, 0, 1, 0), q(1));
        assert_eq!(c.get(1, 0, 0, 1), q(-1));
        assert_eq!(c.get(0, 1, 1, 0), q(-1));
        let nonzero = c.full().iter().filter(|v| !num::Zero::is_zero(*v)).count();
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn pair_symmetry_conflict() {
        let r = act_from_components(&[([1, 2, 1, 3], q(1)), ([1, 3, 1, 2], q(2))]);
        assert!(matches!(r, Err(Error::ConflictingEntry(_))));
    }

    #[test]
    fn stated_1423_must_satisfy_bianchi() {
        let r = act_from_components(&[([1, 4, 2, 3], q(1))]);
        assert!(matches!(r, Err(Error::BianchiViolation(_))));
        let ok = act_from_components(&[([1, 2, 3, 4], q(1)), ([1, 3, 2, 4], q(3)), ([1, 4, 2, 3], q(2))]);
        assert!(ok.is_ok());
    }

    #[test]
    fn diagonal_entry_must_vanish() {
        assert!(act_from_components(&[([1, 1, 2, 3], q(1))]).is_err());
        assert!(act_from_components(&[([1, 1, 2, 3], q(0))]).is_ok());
    }

    #[test]
    fn slots_round_trip() {
        let v: Vec<Rational> = (0..20).map(|i| rat(i * 3 - 7, i + 1)).collect();
        let c = Act::from_slots(&v);
        assert_eq!(c.slots(), v);
        assert!(Act::from_pair_matrix(c.pair_matrix().clone()).is_ok());
    }

    #[test]
    fn casimir_pair_matrix_is_scalar() {
        let c = casimir(q(8));
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(c.pair_matrix()[a][b], if a == b { q(1) } else { q(0) });
            }
        }
    }
}
