//! Killing vectors and general valence-two Killing tensors of Euclidean 4-space.

use crate::error::{Error, Result};
use crate::mat::{Mat4, Vec4};
use crate::scalar::{Field, Ring};
use crate::tensor::act::{kt_at, Act};

/// `V^k = A^k + 2 B^{kj} x_j` with `B` skew.
#[derive(Clone, Debug, PartialEq)]
pub struct KillingVectorParams<T> {
    pub a: Vec4<T>,
    pub b: Mat4<T>,
}

impl<T: Field> KillingVectorParams<T> {
    pub fn new(a: Vec4<T>, b: Mat4<T>) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                if !(b[i][j].clone() + b[j][i].clone()).is_negligible(1e-12) {
                    return Err(Error::DegenerateInput("B must be skew".into()));
                }
            }
        }
        Ok(Self { a, b })
    }

    pub fn zero() -> Self {
        Self { a: std::array::from_fn(|_| T::zero()), b: crate::mat::zero4() }
    }

    /// Translation `X_i` (zero-based axis).
    pub fn translation(i: usize) -> Self {
        let mut v = Self::zero();
        v.a[i] = T::one();
        v
    }

    /// Rotation `R_ij = x_j d_i - x_i d_j` (zero-based axes).
    pub fn rotation(i: usize, j: usize) -> Self {
        let half = T::one() / T::from_i64(2);
        let mut v = Self::zero();
        v.b[i][j] = half.clone();
        v.b[j][i] = -half;
        v
    }

    /// From the affine field `V^k = A^k + M_kj x_j`; `M` must be skew.
    pub fn from_linear_field(a: Vec4<T>, m: Mat4<T>) -> Result<Self> {
        let half = T::one() / T::from_i64(2);
        let b = std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].clone() * half.clone()));
        Self::new(a, b)
    }

    /// Linear part `M_kj = 2 B^{kj}`.
    pub fn linear_part(&self) -> Mat4<T> {
        let two = T::from_i64(2);
        std::array::from_fn(|i| std::array::from_fn(|j| two.clone() * self.b[i][j].clone()))
    }

    pub fn at(&self, x: &Vec4<T>) -> Vec4<T> {
        let m = self.linear_part();
        std::array::from_fn(|k| (0..4).fold(self.a[k].clone(), |acc, j| acc + m[k][j].clone() * x[j].clone()))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            a: std::array::from_fn(|i| self.a[i].clone() + o.a[i].clone()),
            b: std::array::from_fn(|i| std::array::from_fn(|j| self.b[i][j].clone() + o.b[i][j].clone())),
        }
    }

    pub fn scale(&self, k: &T) -> Self {
        Self {
            a: std::array::from_fn(|i| self.a[i].clone() * k.clone()),
            b: std::array::from_fn(|i| std::array::from_fn(|j| self.b[i][j].clone() * k.clone())),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|v| v.is_zero()) && self.b.iter().flatten().all(|v| v.is_zero())
    }

    /// `sum c_ij R_ij + sum a_i X_i` as text; `show` renders coefficient magnitudes.
    pub fn label(&self, show: impl Fn(&T) -> String) -> String {
        let mut terms: Vec<(String, T)> = Vec::new();
        for (i, j) in crate::tensor::act::PAIRS {
            let c = self.b[i][j].clone() + self.b[i][j].clone();
            if !c.is_negligible(1e-12) {
                terms.push((format!("R{}{}", i + 1, j + 1), c));
            }
        }
        for i in 0..4 {
            if !self.a[i].is_negligible(1e-12) {
                terms.push((format!("X{}", i + 1), self.a[i].clone()));
            }
        }
        let mut s = String::new();
        for (k, (name, c)) in terms.iter().enumerate() {
            let neg = c.to_f64() < 0.0;
            match (k, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            let mag = if neg { T::zero() - c.clone() } else { c.clone() };
            let text = show(&mag);
            if text != "1" {
                s.push_str(&text);
                s.push(' ');
            }
            s.push_str(name);
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    /// Coordinates `(A^1..A^4, B^12, B^13, B^14, B^23, B^24, B^34)`.
    pub fn coords(&self) -> Vec<T> {
        let mut v: Vec<T> = self.a.to_vec();
        for (i, j) in crate::tensor::act::PAIRS {
            v.push(self.b[i][j].clone());
        }
        v
    }

    pub fn from_coords(v: &[T]) -> Self {
        let mut out = Self::zero();
        out.a.clone_from_slice(&v[..4]);
        for (idx, (i, j)) in crate::tensor::act::PAIRS.iter().enumerate() {
            out.b[*i][*j] = v[4 + idx].clone();
            out.b[*j][*i] = -v[4 + idx].clone();
        }
        out
    }

    pub fn to_f64(&self) -> KillingVectorParams<f64> {
        KillingVectorParams { a: std::array::from_fn(|i| self.a[i].to_f64()), b: crate::mat::to_f64_4(&self.b) }
    }
}

/// `K_ij = A_ij + 2 B_(ij)k x^k + 4 C_ikjl x^k x^l` on Euclidean 4-space.
#[derive(Clone, PartialEq)]
pub struct E4KillingTensor<T> {
    pub a: Mat4<T>,
    pub b: [[[T; 4]; 4]; 4],
    pub c: Act<T>,
}

impl<T: Ring> std::fmt::Debug for E4KillingTensor<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("E4KillingTensor").field("a", &self.a).field("b", &self.b).field("c", &self.c).finish()
    }
}

impl<T: Ring> E4KillingTensor<T> {
    /// Checks `A` symmetric, `B^{i(jk)} = 0` and `B^{[ijk]} = 0`.
    pub fn new(a: Mat4<T>, b: [[[T; 4]; 4]; 4], c: Act<T>) -> Result<Self> {
        let tol = 1e-12;
        for i in 0..4 {
            for j in 0..4 {
                if !(a[i][j].clone() - a[j][i].clone()).is_negligible(tol) {
                    return Err(Error::DegenerateInput("A must be symmetric".into()));
                }
                for k in 0..4 {
                    if !(b[i][j][k].clone() + b[i][k][j].clone()).is_negligible(tol) {
                        return Err(Error::DegenerateInput("B^{i(jk)} must vanish".into()));
                    }
                    let cyc = b[i][j][k].clone() + b[j][k][i].clone() + b[k][i][j].clone();
                    if !cyc.is_negligible(tol) {
                        return Err(Error::DegenerateInput("B^{[ijk]} must vanish".into()));
                    }
                }
            }
        }
        Ok(Self { a, b, c })
    }
}

pub fn e4_kt_at<T: Ring>(k: &E4KillingTensor<T>, x: &Vec4<T>) -> Mat4<T> {
    let quad = kt_at(&k.c, x);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let lin =
                (0..4).fold(T::zero(), |acc, m| acc + (k.b[i][j][m].clone() + k.b[j][i][m].clone()) * x[m].clone());
            k.a[i][j].clone() + lin + quad[i][j].clone()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    #[test]
    fn rotation_matches_vector_field() {
        let r: KillingVectorParams<Rational> = KillingVectorParams::rotation(0, 1);
        let x = [int(1), int(2), int(3), int(4)];
        // R12 = x2 d1 - x1 d2
        assert_eq!(r.at(&x), [int(2), int(-1), int(0), int(0)]);
    }

    #[test]
    fn labels() {
        let v = KillingVectorParams::<Rational>::rotation(0, 2)
            .add(&KillingVectorParams::rotation(1, 2).scale(&int(-1)))
            .add(&KillingVectorParams::translation(3).scale(&rat(-1, 2)));
        assert_eq!(v.label(crate::scalar::format_rational), "R13 - R23 - 1/2 X4");
    }

    #[test]
    fn b_block_symmetries_are_checked() {
        let mut b: [[[Rational; 4]; 4]; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| int(0))));
        b[0][1][1] = int(1);
        let r = E4KillingTensor::new(crate::mat::zero4(), b, Act::zero());
        assert!(r.is_err());
    }
}
