//! Separable coordinates `x = Lambda T(u)` for the rotational webs.

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::frames::{ExactFrame, WebClass};
use crate::mat::Vec4;
use crate::scalar::{format_rational, Rational};
use crate::tensor::action::Frame;

#[derive(Clone, Debug)]
pub struct CoordinateMap {
    pub web: WebClass,
    pub frame: Frame<f64>,
    pub exact_frame: Option<ExactFrame>,
}

impl CoordinateMap {
    pub fn names(&self) -> [&'static str; 3] {
        match self.web {
            WebClass::Cylindrical => ["t", "u", "v"],
            _ => ["chi", "theta", "phi"],
        }
    }

    /// Canonical parametrization `T(u)`.
    pub fn canonical(&self, u: &[f64; 3]) -> Vec4<f64> {
        canonical_point(self.web, u)
    }

    /// Symbolic components of `T`.
    pub fn canonical_terms(&self) -> [&'static str; 4] {
        match self.web {
            WebClass::Cylindrical => ["cos t cos u", "cos t sin u", "sin t cos v", "sin t sin v"],
            _ => ["sin chi sin theta cos phi", "sin chi sin theta sin phi", "sin chi cos theta", "cos chi"],
        }
    }

    pub fn point(&self, u: &[f64; 3]) -> Vec4<f64> {
        let t = self.canonical(u);
        let m = self.frame.matrix();
        std::array::from_fn(|i| (0..4).map(|j| m[i][j] * t[j]).sum())
    }

    /// Columns `d x / d u_a`.
    pub fn tangents(&self, u: &[f64; 3]) -> [Vec4<f64>; 3] {
        let m = self.frame.matrix();
        let dt = canonical_tangents(self.web, u);
        std::array::from_fn(|a| std::array::from_fn(|i| (0..4).map(|j| m[i][j] * dt[a][j]).sum()))
    }

    /// `x^i = sum_j Lambda_ij T^j`, with exact coefficients when the frame is rational up to
    /// column norms.
    pub fn expressions(&self) -> [String; 4] {
        let terms = self.canonical_terms();
        std::array::from_fn(|i| {
            let parts: Vec<(String, bool)> = (0..4)
                .filter_map(|j| {
                    let coef = match &self.exact_frame {
                        Some(ef) => {
                            let w = &ef.directions[j][i];
                            if w.is_zero() {
                                return None;
                            }
                            scaled_sqrt(w, &ef.norms_squared()[j])
                        }
                        None => {
                            let v = self.frame.matrix()[i][j];
                            if v.abs() < 1e-14 {
                                return None;
                            }
                            (format!("{:.12}", v.abs()), v < 0.0)
                        }
                    };
                    Some(join_coef(coef, terms[j]))
                })
                .collect();
            let mut s = String::new();
            for (k, (body, neg)) in parts.iter().enumerate() {
                match (k, neg) {
                    (0, true) => s.push('-'),
                    (0, false) => {}
                    (_, true) => s.push_str(" - "),
                    (_, false) => s.push_str(" + "),
                }
                s.push_str(body);
            }
            if s.is_empty() {
                s.push('0');
            }
            s
        })
    }
}

fn join_coef((c, neg): (String, bool), term: &str) -> (String, bool) {
    if c == "1" {
        (term.to_string(), neg)
    } else {
        (format!("{c} {term}"), neg)
    }
}

/// Magnitude of `w / sqrt(n)` written as `r` or `r sqrt(m)` with `m` squarefree, plus its sign.
fn scaled_sqrt(w: &Rational, n: &Rational) -> (String, bool) {
    let k: BigInt = n.numer() * n.denom();
    let (f, m) = square_split(&k);
    let r = w.abs() * Rational::from_integer(n.denom().clone()) / Rational::from_integer(&f * &m);
    let body = if m.is_one() {
        format_rational(&r)
    } else if r.is_one() {
        format!("sqrt({m})")
    } else if r.numer().is_one() {
        format!("sqrt({m})/{}", r.denom())
    } else {
        format!("{} sqrt({m})", format_rational(&r))
    };
    (body, w.is_negative())
}

/// `k = f^2 m` with `m` squarefree (trial division; the inputs are small).
fn square_split(k: &BigInt) -> (BigInt, BigInt) {
    let mut f = BigInt::one();
    let mut m = BigInt::one();
    let mut rest = k.clone();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            f *= &p;
        }
        if e % 2 == 1 {
            m *= &p;
        }
        p += 1;
    }
    (f, m * rest)
}

pub fn canonical_point(web: WebClass, u: &[f64; 3]) -> Vec4<f64> {
    let [a, b, c] = *u;
    match web {
        WebClass::Cylindrical => [a.cos() * b.cos(), a.cos() * b.sin(), a.sin() * c.cos(), a.sin() * c.sin()],
        _ => [a.sin() * b.sin() * c.cos(), a.sin() * b.sin() * c.sin(), a.sin() * b.cos(), a.cos()],
    }
}

fn canonical_tangents(web: WebClass, u: &[f64; 3]) -> [Vec4<f64>; 3] {
    let [a, b, c] = *u;
    let (sa, ca, sb, cb, sc, cc) = (a.sin(), a.cos(), b.sin(), b.cos(), c.sin(), c.cos());
    match web {
        WebClass::Cylindrical => {
            [[-sa * cb, -sa * sb, ca * cc, ca * sc], [-ca * sb, ca * cb, 0.0, 0.0], [0.0, 0.0, -sa * sc, sa * cc]]
        }
        _ => [
            [ca * sb * cc, ca * sb * sc, ca * cb, -sa],
            [sa * cb * cc, sa * cb * sc, -sa * sb, 0.0],
            [-sa * sb * sc, sa * sb * cc, 0.0, 0.0],
        ],
    }
}

/// Coordinates for the cylindrical and spherical webs; other webs are not parametrized.
pub fn separable_coordinates(
    web: WebClass,
    frame: &Frame<f64>,
    exact_frame: Option<&ExactFrame>,
) -> Result<CoordinateMap> {
    match web {
        WebClass::Cylindrical | WebClass::Spherical => {
            Ok(CoordinateMap { web, frame: frame.clone(), exact_frame: exact_frame.cloned() })
        }
        other => Err(Error::UnsupportedWeb(other.name().to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn sqrt_formatting() {
        assert_eq!(scaled_sqrt(&int(-1), &int(2)), ("sqrt(2)/2".to_string(), true));
        assert_eq!(scaled_sqrt(&int(3), &int(9)), ("1".to_string(), false));
        assert_eq!(scaled_sqrt(&int(2), &int(12)), ("sqrt(3)/3".to_string(), false));
    }

    #[test]
    fn tangents_match_differences() {
        for web in [WebClass::Cylindrical, WebClass::Spherical] {
            let u = [0.3, 1.1, -0.7];
            let t = canonical_tangents(web, &u);
            for a in 0..3 {
                let mut up = u;
                let mut um = u;
                up[a] += 1e-6;
                um[a] -= 1e-6;
                let (p, m) = (canonical_point(web, &up), canonical_point(web, &um));
                for i in 0..4 {
                    assert!(((p[i] - m[i]) / 2e-6 - t[a][i]).abs() < 1e-8);
                }
            }
        }
    }
}
