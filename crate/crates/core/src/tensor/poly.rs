//! Exact polynomials in `(x1..x4, p1..p4)` and the canonical Poisson bracket.

use std::collections::BTreeMap;
use std::fmt;

use num::Zero;

use crate::mat::Mat4;
use crate::scalar::{format_rational, int, Rational};
use crate::tensor::act::Act;

/// Exponents of `x1..x4, p1..p4`.
pub type Monomial = [u8; 8];

/// Sparse polynomial with rational coefficients; the zero polynomial has empty support.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MomentumPolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

pub type Poly = MomentumPolynomial;

impl MomentumPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial([0; 8], c)
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Variable `x_i` (zero-based).
    pub fn x(i: usize) -> Self {
        let mut m = [0; 8];
        m[i] = 1;
        Self::monomial(m, int(1))
    }

    /// Momentum `p_i` (zero-based).
    pub fn p(i: usize) -> Self {
        let mut m = [0; 8];
        m[4 + i] = 1;
        Self::monomial(m, int(1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, -c.clone());
        }
        r
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Monomial = std::array::from_fn(|k| m1[k] + m2[k]);
                r.add_term(m, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(int(1)), |acc, _| acc.mul(self))
    }

    /// Partial derivative in variable `v` (0..4 positions, 4..8 momenta).
    pub fn derivative(&self, v: usize) -> Self {
        let mut r = Self::zero();
        for (m, c) in &self.terms {
            if m[v] > 0 {
                let mut m2 = *m;
                m2[v] -= 1;
                r.add_term(m2, c * int(m[v] as i64));
            }
        }
        r
    }

    /// Evaluates at `(x, p)`.
    pub fn eval(&self, vals: &[Rational; 8]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t *= &vals[k];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, vals: &[f64; 8]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = crate::scalar::rational_to_f64(c);
                for (k, &e) in m.iter().enumerate() {
                    t *= vals[k].powi(e as i32);
                }
                t
            })
            .sum()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().map(|&e| e as u32).sum()).max()
    }
}

impl fmt::Debug for MomentumPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MomentumPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        const NAMES: [&str; 8] = ["x1", "x2", "x3", "x4", "p1", "p2", "p3", "p4"];
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut s = format_rational(c);
                for (k, &e) in m.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => s.push_str(&format!("*{}", NAMES[k])),
                        _ => s.push_str(&format!("*{}^{}", NAMES[k], e)),
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `{f, g} = sum_i (df/dx_i dg/dp_i - df/dp_i dg/dx_i)`.
pub fn poisson_bracket(f: &Poly, g: &Poly) -> Poly {
    let mut r = Poly::zero();
    for i in 0..4 {
        r = r.add(&f.derivative(i).mul(&g.derivative(4 + i)));
        r = r.sub(&f.derivative(4 + i).mul(&g.derivative(i)));
    }
    r
}

/// The Killing tensor `K_ij(x)` as exact polynomials in `x`.
pub fn kt_poly(c: &Act<Rational>) -> Mat4<Poly> {
    let x: [Poly; 4] = std::array::from_fn(Poly::x);
    let mut out: Mat4<Poly> = std::array::from_fn(|_| std::array::from_fn(|_| Poly::zero()));
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = Poly::zero();
            for k in 0..4 {
                for l in 0..4 {
                    let v = c.get(i, k, j, l);
                    if !v.is_zero() {
                        acc = acc.add(&x[k].mul(&x[l]).scale(&(v * int(4))));
                    }
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

/// The quadratic integral `K^{ij} p_i p_j`.
pub fn quadratic_integral(c: &Act<Rational>) -> Poly {
    let k = kt_poly(c);
    let p: [Poly; 4] = std::array::from_fn(Poly::p);
    let mut acc = Poly::zero();
    for i in 0..4 {
        for j in 0..4 {
            acc = acc.add(&k[i][j].mul(&p[i]).mul(&p[j]));
        }
    }
    acc
}

/// Evaluates the polynomial Killing tensor at a point; agrees with `kt_at`.
pub fn kt_poly_at(k: &Mat4<Poly>, x: &[Rational; 4]) -> Mat4<Rational> {
    let vals: [Rational; 8] = std::array::from_fn(|i| if i < 4 { x[i].clone() } else { Rational::zero() });
    std::array::from_fn(|i| std::array::from_fn(|j| k[i][j].eval(&vals)))
}
