//! Potentials on S³: exact rational functions of the ambient coordinates, or black boxes.

use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::mat::{Mat4, Vec4};
use crate::scalar::{int, parse_rational, Rational};
use crate::tensor::Poly;

/// Quotient of two polynomials in `x1..x4`.
#[derive(Clone, PartialEq)]
pub struct RationalFunction {
    pub num: Poly,
    pub den: Poly,
}

fn embed(x: &[Rational; 4]) -> [Rational; 8] {
    std::array::from_fn(|k| if k < 4 { x[k].clone() } else { Rational::zero() })
}

fn embed_f64(x: &[f64; 4]) -> [f64; 8] {
    std::array::from_fn(|k| if k < 4 { x[k] } else { 0.0 })
}

impl RationalFunction {
    pub fn constant(c: Rational) -> Self {
        Self { num: Poly::constant(c), den: Poly::constant(int(1)) }
    }

    pub fn var(i: usize) -> Self {
        Self { num: Poly::x(i), den: Poly::constant(int(1)) }
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::constant(Rational::zero());
        }
        if den.degree() == Some(0) {
            let d = den.coeff(&[0; 8]);
            return Self { num: num.scale(&(Rational::one() / d)), den: Poly::constant(int(1)) };
        }
        Self { num, den }
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::normalized(self.num.add(&o.num), self.den.clone());
        }
        Self::normalized(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.scale(&int(-1)), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::normalized(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.num.is_zero() {
            return Err(Error::InvalidPotential("division by zero".into()));
        }
        Ok(Self::normalized(self.num.mul(&o.den), self.den.mul(&o.num)))
    }

    pub fn powi(&self, n: i32) -> Result<Self> {
        let p = Self { num: self.num.pow(n.unsigned_abs()), den: self.den.pow(n.unsigned_abs()) };
        if n >= 0 {
            Ok(Self::normalized(p.num, p.den))
        } else {
            Self::constant(int(1)).div(&p)
        }
    }

    /// Partial derivative in `x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let dn = self.num.derivative(i);
        let dd = self.den.derivative(i);
        if dd.is_zero() {
            return Self::normalized(dn, self.den.clone());
        }
        Self::normalized(dn.mul(&self.den).sub(&self.num.mul(&dd)), self.den.mul(&self.den))
    }

    /// `None` where the denominator vanishes.
    pub fn eval(&self, x: &[Rational; 4]) -> Option<Rational> {
        let v = embed(x);
        let d = self.den.eval(&v);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(&v) / d)
    }

    pub fn eval_f64(&self, x: &[f64; 4]) -> f64 {
        let v = embed_f64(x);
        self.num.eval_f64(&v) / self.den.eval_f64(&v)
    }

    /// Parses an expression in `x, y, z, w` (or `x1..x4`) with `+ - * / ^` and parentheses.
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let r = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(r)
    }
}

fn poly_fmt(p: &Poly) -> String {
    let s = format!("{p:?}");
    if p.len() > 1 {
        format!("({s})")
    } else {
        s
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) && self.den.coeff(&[0; 8]).is_one() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "{}/{}", poly_fmt(&self.num), poly_fmt(&self.den))
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::InvalidPotential(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let t = self.unary()?;
            acc = if c == b'*' { acc.mul(&t) } else { acc.div(&t)? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let e = self.exponent()?;
        base.powi(e)
    }

    fn exponent(&mut self) -> Result<i32> {
        let paren = self.peek() == Some(b'(');
        if paren {
            self.pos += 1;
        }
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let n: i32 = std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .filter(|n| *n <= 64)
            .ok_or_else(|| self.err("expected an integer exponent up to 64"))?;
        if paren {
            if self.peek() != Some(b')') {
                return Err(self.err("expected ')'"));
            }
            self.pos += 1;
        }
        Ok(if neg { -n } else { n })
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.variable(),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<RationalFunction> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == digits {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        parse_rational(text).map(RationalFunction::constant).ok_or_else(|| self.err("malformed number"))
    }

    fn variable(&mut self) -> Result<RationalFunction> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let i = match name {
            "x" | "x1" => 0,
            "y" | "x2" => 1,
            "z" | "x3" => 2,
            "w" | "x4" => 3,
            _ => {
                self.pos = start;
                return Err(self.err(&format!("unknown variable '{name}'")));
            }
        };
        Ok(RationalFunction::var(i))
    }
}

/// A scalar function on S³ given through its ambient extension.
pub trait Potential: Send + Sync {
    fn value_f64(&self, x: &Vec4<f64>) -> f64;
    fn gradient_f64(&self, x: &Vec4<f64>) -> Vec4<f64>;
    fn hessian_f64(&self, x: &Vec4<f64>) -> Mat4<f64>;

    fn exact(&self) -> Option<&RationalPotential> {
        None
    }

    fn describe(&self) -> String;
}

/// Rational potential with its gradient and Hessian precomputed symbolically.
#[derive(Clone, Debug)]
pub struct RationalPotential {
    pub value: RationalFunction,
    gradient: [RationalFunction; 4],
    hessian: [[RationalFunction; 4]; 4],
}

impl RationalPotential {
    pub fn new(value: RationalFunction) -> Self {
        let gradient: [RationalFunction; 4] = std::array::from_fn(|i| value.derivative(i));
        let hessian = std::array::from_fn(|i| std::array::from_fn(|j| gradient[j].derivative(i)));
        Self { value, gradient, hessian }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Self::new(RationalFunction::parse(s)?))
    }

    pub fn is_constant(&self) -> bool {
        self.value.is_constant()
    }

    pub fn value(&self, x: &Vec4<Rational>) -> Option<Rational> {
        self.value.eval(x)
    }

    pub fn gradient(&self, x: &Vec4<Rational>) -> Option<Vec4<Rational>> {
        let g: Vec<Rational> = self.gradient.iter().map(|f| f.eval(x)).collect::<Option<_>>()?;
        Some(std::array::from_fn(|i| g[i].clone()))
    }

    pub fn hessian(&self, x: &Vec4<Rational>) -> Option<Mat4<Rational>> {
        let mut h: Mat4<Rational> = crate::mat::zero4();
        for i in 0..4 {
            for j in i..4 {
                let v = self.hessian[i][j].eval(x)?;
                h[j][i] = v.clone();
                h[i][j] = v;
            }
        }
        Some(h)
    }

    /// Whether the denominator is bounded away from zero relative to its size at `x`.
    pub fn is_regular_at(&self, x: &Vec4<f64>, rel: f64) -> bool {
        let v = embed_f64(x);
        let d = self.value.den.eval_f64(&v).abs();
        let scale: f64 = self.value.den.terms().map(|(_, c)| crate::scalar::rational_to_f64(c).abs()).sum();
        d > rel * scale.max(f64::MIN_POSITIVE)
    }
}

impl Potential for RationalPotential {
    fn value_f64(&self, x: &Vec4<f64>) -> f64 {
        self.value.eval_f64(x)
    }

    fn gradient_f64(&self, x: &Vec4<f64>) -> Vec4<f64> {
        std::array::from_fn(|i| self.gradient[i].eval_f64(x))
    }

    fn hessian_f64(&self, x: &Vec4<f64>) -> Mat4<f64> {
        std::array::from_fn(|i| std::array::from_fn(|j| self.hessian[i][j].eval_f64(x)))
    }

    fn exact(&self) -> Option<&RationalPotential> {
        Some(self)
    }

    fn describe(&self) -> String {
        format!("{:?}", self.value)
    }
}

type ScalarFn = dyn Fn(&Vec4<f64>) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&Vec4<f64>) -> Vec4<f64> + Send + Sync;

/// Black-box potential: value and analytic gradient; the Hessian is a central difference
/// of the gradient.
pub struct FnPotential {
    name: String,
    value: Box<ScalarFn>,
    gradient: Box<GradientFn>,
    pub step: f64,
}

impl FnPotential {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(&Vec4<f64>) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&Vec4<f64>) -> Vec4<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), value: Box::new(value), gradient: Box::new(gradient), step: 1e-4 }
    }
}

impl Potential for FnPotential {
    fn value_f64(&self, x: &Vec4<f64>) -> f64 {
        (self.value)(x)
    }

    fn gradient_f64(&self, x: &Vec4<f64>) -> Vec4<f64> {
        (self.gradient)(x)
    }

    fn hessian_f64(&self, x: &Vec4<f64>) -> Mat4<f64> {
        // Five-point stencil on the gradient.
        let mut h = [[0.0; 4]; 4];
        for i in 0..4 {
            let at = |k: f64| {
                let mut y = *x;
                y[i] += k * self.step;
                (self.gradient)(&y)
            };
            let (g2, g1, m1, m2) = (at(2.0), at(1.0), at(-1.0), at(-2.0));
            for j in 0..4 {
                h[i][j] = (8.0 * (g1[j] - m1[j]) - (g2[j] - m2[j])) / (12.0 * self.step);
            }
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let m = 0.5 * (h[i][j] + h[j][i]);
                h[i][j] = m;
                h[j][i] = m;
            }
        }
        h
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

impl fmt::Debug for FnPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnPotential").field("name", &self.name).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn parses_difference_potential() {
        let v = RationalPotential::parse("1/(x - y)^2").unwrap();
        let x = [rat(1, 2), rat(-1, 2), rat(1, 2), rat(1, 2)];
        assert_eq!(v.value(&x), Some(int(1)));
        assert_eq!(v.gradient(&x).unwrap(), [int(-2), int(2), int(0), int(0)]);
        assert_eq!(v.hessian(&x).unwrap()[0][1], int(-6));
    }

    #[test]
    fn parser_precedence_and_forms() {
        let a = RationalFunction::parse("2*x1^2 - 3/4*y + 0.5").unwrap();
        let x = [int(1), int(2), int(0), int(0)];
        assert_eq!(a.eval(&x), Some(rat(1, 1)));
        let b = RationalFunction::parse("x^(-2) * x^2").unwrap();
        assert_eq!(b.eval(&x), Some(int(1)));
        assert_eq!(
            RationalFunction::parse("-(z + w)^2").unwrap().eval(&[int(0), int(0), int(1), int(2)]),
            Some(int(-9))
        );
        assert_eq!(RationalFunction::parse("1e-2 * x").unwrap().eval(&x), Some(rat(1, 100)));
    }

    #[test]
    fn parser_rejects_junk() {
        for s in ["", "x +", "q", "x^y", "(x", "1/0", "x $ y"] {
            assert!(RationalFunction::parse(s).is_err(), "{s}");
        }
    }

    #[test]
    fn undefined_point() {
        let v = RationalPotential::parse("1/(x-y)^2").unwrap();
        assert!(v.value(&[int(1), int(1), int(0), int(0)]).is_none());
        assert!(!v.is_regular_at(&[0.5, 0.5, 0.5, 0.5], 1e-6));
    }

    #[test]
    fn fn_potential_hessian() {
        let v = FnPotential::new("x*y", |x| x[0] * x[1], |x| [x[1], x[0], 0.0, 0.0]);
        let h = v.hessian_f64(&[0.3, 0.1, 0.2, 0.4]);
        assert!((h[0][1] - 1.0).abs() < 1e-8 && h[0][0].abs() < 1e-8);
    }
}
