//! The six canonical forms of separable webs on S³.
//!
//! Each form is a combination of `R_ab ⊙ R_ab` terms. The coefficient `c` of `R_ab ⊙ R_ab`
//! is stored as `C_abab = c`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};
use crate::tensor::act::{pair_index, Act};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WebClass {
    Cylindrical,
    Spherical,
    Spheroelliptic,
    EllipticCylindrical1,
    EllipticCylindrical2,
    Ellipsoidal,
}

/// Symmetry categories: I two rotations; II one translation and one rotation; III one
/// translation; IV one rotation; V none.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    I,
    II,
    III,
    IV,
    V,
}

impl Category {
    pub const ALL: [Category; 5] = [Category::I, Category::II, Category::III, Category::IV, Category::V];

    pub fn webs(&self) -> &'static [WebClass] {
        match self {
            Category::I => &[WebClass::Cylindrical],
            Category::II => &[WebClass::Spherical],
            Category::III => &[WebClass::Spheroelliptic],
            Category::IV => &[WebClass::EllipticCylindrical1, WebClass::EllipticCylindrical2],
            Category::V => &[WebClass::Ellipsoidal],
        }
    }

    /// `(rotations, translations)`.
    pub fn signature(&self) -> (usize, usize) {
        match self {
            Category::I => (2, 0),
            Category::II => (1, 1),
            Category::III => (0, 1),
            Category::IV => (1, 0),
            Category::V => (0, 0),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl WebClass {
    pub const ALL: [WebClass; 6] = [
        WebClass::Cylindrical,
        WebClass::Spherical,
        WebClass::Spheroelliptic,
        WebClass::EllipticCylindrical1,
        WebClass::EllipticCylindrical2,
        WebClass::Ellipsoidal,
    ];

    pub fn category(&self) -> Category {
        match self {
            WebClass::Cylindrical => Category::I,
            WebClass::Spherical => Category::II,
            WebClass::Spheroelliptic => Category::III,
            WebClass::EllipticCylindrical1 | WebClass::EllipticCylindrical2 => Category::IV,
            WebClass::Ellipsoidal => Category::V,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WebClass::Cylindrical => "cylindrical",
            WebClass::Spherical => "spherical",
            WebClass::Spheroelliptic => "spheroelliptic",
            WebClass::EllipticCylindrical1 => "elliptic-cylindrical-1",
            WebClass::EllipticCylindrical2 => "elliptic-cylindrical-2",
            WebClass::Ellipsoidal => "ellipsoidal",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|w| w.name() == s)
    }

    pub fn form(&self) -> &'static CanonicalPattern {
        PATTERNS.iter().find(|p| p.web == *self).expect("every web has a pattern")
    }
}

impl fmt::Display for WebClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Static description of one canonical form.
#[derive(Debug, Serialize)]
pub struct CanonicalPattern {
    pub web: WebClass,
    /// Numbering of the form in the list of canonical forms.
    pub form_number: &'static str,
    /// `terms[k]` lists the one-based pairs `ab` whose `R_ab ⊙ R_ab` carries `c_{k+1}`.
    pub terms: &'static [&'static [(usize, usize)]],
    /// Whether the listed form may carry an additive Casimir term.
    pub includes_casimir: bool,
    /// `ricci[a][k]`: coefficient of `c_{k+1}` in the `a`-th diagonal Ricci entry.
    pub ricci: &'static [[i64; 6]; 4],
    pub essential: &'static [&'static str],
    /// Which generators span the web symmetries.
    pub generators: &'static [&'static str],
}

impl CanonicalPattern {
    pub fn n_params(&self) -> usize {
        self.terms.len()
    }

    /// The ACT `sum_k c_k sum_{ab in terms[k]} R_ab ⊙ R_ab`.
    pub fn act<T: Ring>(&self, c: &[T]) -> Act<T> {
        assert_eq!(c.len(), self.n_params(), "{} takes {} parameters", self.web, self.n_params());
        let mut m: crate::mat::Mat6<T> = std::array::from_fn(|_| std::array::from_fn(|_| T::zero()));
        for (k, pairs) in self.terms.iter().enumerate() {
            for &(a, b) in pairs.iter() {
                let (idx, _) = pair_index(a - 1, b - 1).expect("distinct axes");
                m[idx][idx] = m[idx][idx].clone() + c[k].clone();
            }
        }
        Act::from_pair_matrix(m).expect("diagonal pair matrices are ACTs")
    }

    /// Basis ACTs, one per parameter.
    pub fn basis<T: Ring>(&self) -> Vec<Act<T>> {
        (0..self.n_params())
            .map(|k| {
                let c: Vec<T> = (0..self.n_params()).map(|j| if j == k { T::one() } else { T::zero() }).collect();
                self.act(&c)
            })
            .collect()
    }

    /// Diagonal Ricci entries from the stored formula.
    pub fn ricci_diag<T: Ring>(&self, c: &[T]) -> [T; 4] {
        std::array::from_fn(|a| {
            (0..self.n_params()).fold(T::zero(), |acc, k| acc + T::from_i64(self.ricci[a][k]) * c[k].clone())
        })
    }
}

const P12: (usize, usize) = (1, 2);
const P13: (usize, usize) = (1, 3);
const P14: (usize, usize) = (1, 4);
const P23: (usize, usize) = (2, 3);
const P24: (usize, usize) = (2, 4);
const P34: (usize, usize) = (3, 4);

const EC_TERMS: &[&[(usize, usize)]] = &[&[P12], &[P13, P23], &[P14, P24], &[P34]];
const EC_RICCI: [[i64; 6]; 4] = [[1, 1, 1, 0, 0, 0], [1, 1, 1, 0, 0, 0], [0, 2, 0, 1, 0, 0], [0, 0, 2, 1, 0, 0]];

pub static PATTERNS: [CanonicalPattern; 6] = [
    CanonicalPattern {
        web: WebClass::Spherical,
        form_number: "I",
        terms: &[&[P12], &[P13, P23]],
        includes_casimir: false,
        ricci: &[[1, 1, 0, 0, 0, 0], [1, 1, 0, 0, 0, 0], [0, 2, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0]],
        essential: &[],
        generators: &["R12", "X4"],
    },
    CanonicalPattern {
        web: WebClass::Cylindrical,
        form_number: "II",
        terms: &[&[P12], &[P13, P14, P23, P24], &[P34]],
        includes_casimir: true,
        ricci: &[[1, 2, 0, 0, 0, 0], [1, 2, 0, 0, 0, 0], [0, 2, 1, 0, 0, 0], [0, 2, 1, 0, 0, 0]],
        essential: &[],
        generators: &["R12", "R34"],
    },
    CanonicalPattern {
        web: WebClass::EllipticCylindrical1,
        form_number: "III",
        terms: EC_TERMS,
        includes_casimir: true,
        ricci: &EC_RICCI,
        essential: &["k^2 = (c4 - c2)/(c4 - c3)"],
        generators: &["R12"],
    },
    CanonicalPattern {
        web: WebClass::EllipticCylindrical2,
        form_number: "IV",
        terms: EC_TERMS,
        includes_casimir: true,
        ricci: &EC_RICCI,
        essential: &["k^2 = (c4 - c3)/(c2 - c3)"],
        generators: &["R12"],
    },
    CanonicalPattern {
        web: WebClass::Spheroelliptic,
        form_number: "V",
        terms: &[&[P12], &[P13], &[P23]],
        includes_casimir: false,
        ricci: &[[1, 1, 0, 0, 0, 0], [1, 0, 1, 0, 0, 0], [0, 1, 1, 0, 0, 0], [0, 0, 0, 0, 0, 0]],
        essential: &["k'^2 = (c2 - c3)/(c1 - c3)"],
        generators: &["X4"],
    },
    CanonicalPattern {
        web: WebClass::Ellipsoidal,
        form_number: "VI",
        terms: &[&[P12], &[P13], &[P14], &[P23], &[P24], &[P34]],
        includes_casimir: true,
        ricci: &[[1, 1, 1, 0, 0, 0], [1, 0, 0, 1, 1, 0], [0, 1, 0, 1, 0, 1], [0, 0, 1, 0, 1, 1]],
        essential: &[
            "a = [c1(c2 - c4) + c6(c2 - c3) - c2(c3 + c4) + 2 c3 c4] / D",
            "b = [c2(c1 - c4) + c1(c5 - c4) - c3(c1 + c5) + 2 c3 c4] / D",
            "D = c1(c2 - c4) + c4(c6 - c2) + c5(c4 - c6)",
            "constraint: (c3 + c4)(c1 c6 - c2 c5) + (c2 + c5)(c3 c4 - c1 c6) + (c1 + c6)(c2 c5 - c3 c4) = 0",
        ],
        generators: &[],
    },
];

/// Named essential parameter values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EssentialParams<T> {
    pub values: Vec<(String, T)>,
}

impl<T> EssentialParams<T> {
    pub fn get(&self, name: &str) -> Option<&T> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

/// Ellipsoidal constraint polynomial; zero on genuine ellipsoidal forms.
pub fn ellipsoidal_constraint<T: Ring>(c: &[T]) -> T {
    let [c1, c2, c3, c4, c5, c6] = std::array::from_fn(|k| c[k].clone());
    (c3.clone() + c4.clone()) * (c1.clone() * c6.clone() - c2.clone() * c5.clone())
        + (c2.clone() + c5.clone()) * (c3.clone() * c4.clone() - c1.clone() * c6.clone())
        + (c1 + c6) * (c2 * c5 - c3 * c4)
}

fn ratio<T: Field>(num: T, den: T, what: &str, tol: f64) -> Result<T> {
    if den.is_negligible(tol) {
        return Err(Error::DegenerateParameters(format!("zero denominator in {what}")));
    }
    Ok(num / den)
}

/// Evaluates the essential-parameter formulas of `web` on its canonical parameters.
pub fn essential_params<T: Field>(web: WebClass, c: &[T], tol: f64) -> Result<EssentialParams<T>> {
    let form = web.form();
    if c.len() != form.n_params() {
        return Err(Error::DegenerateParameters(format!("{web} takes {} parameters", form.n_params())));
    }
    let values = match web {
        WebClass::Spherical | WebClass::Cylindrical => vec![],
        WebClass::EllipticCylindrical1 => {
            let k2 = ratio(c[3].clone() - c[1].clone(), c[3].clone() - c[2].clone(), "k^2", tol)?;
            vec![("k^2".to_string(), k2)]
        }
        WebClass::EllipticCylindrical2 => {
            let k2 = ratio(c[3].clone() - c[2].clone(), c[1].clone() - c[2].clone(), "k^2", tol)?;
            vec![("k^2".to_string(), k2)]
        }
        WebClass::Spheroelliptic => {
            let k2 = ratio(c[1].clone() - c[2].clone(), c[0].clone() - c[2].clone(), "k'^2", tol)?;
            vec![("k'^2".to_string(), k2)]
        }
        WebClass::Ellipsoidal => {
            let g = ellipsoidal_constraint(c);
            let scale = c.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max).max(1e-300);
            if !g.is_negligible(tol * scale.powi(3)) {
                return Err(Error::ConstraintViolated(g.to_f64()));
            }
            let [c1, c2, c3, c4, c5, c6] = std::array::from_fn(|k| c[k].clone());
            let two = T::from_i64(2);
            let d = c1.clone() * (c2.clone() - c4.clone())
                + c4.clone() * (c6.clone() - c2.clone())
                + c5.clone() * (c4.clone() - c6.clone());
            let an = c1.clone() * (c2.clone() - c4.clone()) + c6 * (c2.clone() - c3.clone())
                - c2.clone() * (c3.clone() + c4.clone())
                + two.clone() * c3.clone() * c4.clone();
            let bn = c2 * (c1.clone() - c4.clone()) + c1.clone() * (c5.clone() - c4.clone()) - c3.clone() * (c1 + c5)
                + two * c3 * c4;
            let a = ratio(an, d.clone(), "a", tol)?;
            let b = ratio(bn, d, "b", tol)?;
            vec![("a".to_string(), a), ("b".to_string(), b)]
        }
    };
    Ok(EssentialParams { values })
}

/// Whether the essential parameter sits on the boundary of its natural range (0 or 1).
pub fn on_range_boundary<T: Field>(p: &EssentialParams<T>, tol: f64) -> bool {
    p.values.iter().any(|(n, v)| {
        (n == "k^2" || n == "k'^2") && (v.is_negligible(tol) || (v.clone() - T::one()).is_negligible(tol))
    })
}

/// Three generic parameter sets per web. Distinct primes where possible; ellipsoidal sets
/// are `c_ab = (b_a - b_b)/(a_a - a_b)`, which satisfies the constraint identically. The
/// elliptic-cylindrical sets put `k^2` inside (0, 1) for their own web.
pub fn sample_parameters(web: WebClass) -> Vec<Vec<crate::scalar::Rational>> {
    use crate::scalar::{int, rat};
    let ints = |sets: &[&[i64]]| sets.iter().map(|s| s.iter().map(|&v| int(v)).collect()).collect();
    match web {
        WebClass::Spherical => ints(&[&[3, 2], &[7, 5], &[2, 11]]),
        WebClass::Cylindrical => ints(&[&[2, 3, 5], &[7, 3, 2], &[11, 13, 5]]),
        WebClass::EllipticCylindrical1 => ints(&[&[2, 5, 3, 7], &[17, 7, 5, 13], &[3, 11, 13, 2]]),
        WebClass::EllipticCylindrical2 => ints(&[&[2, 7, 3, 5], &[19, 5, 11, 7], &[3, 2, 17, 5]]),
        WebClass::Spheroelliptic => ints(&[&[3, 2, 1], &[7, 5, 2], &[11, 3, 7]]),
        WebClass::Ellipsoidal => {
            let build = |a: [i64; 4], b: [i64; 4]| -> Vec<crate::scalar::Rational> {
                crate::tensor::act::PAIRS.iter().map(|&(i, j)| rat(b[i] - b[j], a[i] - a[j])).collect()
            };
            vec![
                build([0, 1, 3, 7], [0, 2, -1, 5]),
                build([0, 2, 5, 6], [1, -3, 4, 2]),
                build([0, 1, 4, 9], [3, 0, -2, 7]),
            ]
        }
    }
}

/// Serializable form of the database for export.
#[derive(Debug, Serialize)]
pub struct CanonicalFormEntry {
    pub web: String,
    pub category: String,
    pub form_number: &'static str,
    pub generator_terms: Vec<String>,
    pub includes_casimir: bool,
    pub ricci_diagonal: Vec<String>,
    pub essential_parameters: Vec<&'static str>,
    pub symmetry_generators: Vec<&'static str>,
}

pub fn database_entries() -> Vec<CanonicalFormEntry> {
    PATTERNS
        .iter()
        .map(|p| {
            let generator_terms = p
                .terms
                .iter()
                .enumerate()
                .map(|(k, pairs)| {
                    let s: Vec<String> = pairs.iter().map(|(a, b)| format!("R{a}{b}^2")).collect();
                    format!("c{} ({})", k + 1, s.join(" + "))
                })
                .collect();
            let ricci_diagonal = (0..4)
                .map(|a| {
                    let parts: Vec<String> = (0..p.n_params())
                        .filter(|&k| p.ricci[a][k] != 0)
                        .map(|k| {
                            if p.ricci[a][k] == 1 {
                                format!("c{}", k + 1)
                            } else {
                                format!("{}c{}", p.ricci[a][k], k + 1)
                            }
                        })
                        .collect();
                    if parts.is_empty() {
                        "0".to_string()
                    } else {
                        parts.join(" + ")
                    }
                })
                .collect();
            CanonicalFormEntry {
                web: p.web.name().to_string(),
                category: p.web.category().to_string(),
                form_number: p.form_number,
                generator_terms,
                includes_casimir: p.includes_casimir,
                ricci_diagonal,
                essential_parameters: p.essential.to_vec(),
                symmetry_generators: p.generators.to_vec(),
            }
        })
        .collect()
}
