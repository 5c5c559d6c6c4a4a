//! The CKT decision: Haantjes vanishing plus simple tangential spectrum away from singular points.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ckt::conditions::{h_condition, tsn_report, TsnReport};
use crate::ckt::eigen::eigen_structure_at;
use crate::ckt::torsion::{haantjes_at, max_abs3};
use crate::exec;
use crate::scalar::Rational;
use crate::tensor::act::Act;
use crate::tensor::action::random_sphere_point;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CktOptions {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    /// Fraction of samples allowed to sit on the singular set.
    pub singular_fraction: f64,
}

impl Default for CktOptions {
    fn default() -> Self {
        Self { samples: 64, tol: 1e-10, seed: 0, singular_fraction: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSample {
    pub point: [f64; 4],
    pub tangential: [f64; 3],
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CktVerdict {
    pub is_ckt: bool,
    pub haantjes_max: f64,
    /// Sample where the Haantjes tensor was largest, when it exceeded tolerance.
    pub haantjes_witness: Option<[f64; 4]>,
    pub eigen_report: Vec<EigenSample>,
    /// Indices of samples whose tangential gap is at or below tolerance.
    pub degenerate_samples: Vec<usize>,
    /// Simple spectrum fails at more than the allowed fraction of samples.
    pub degenerate: bool,
    pub tsn_report: Option<TsnReport>,
    pub exact: bool,
}

/// Deterministic uniform samples on S³.
pub fn sample_points(n: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_sphere_point(&mut rng)).collect()
}

struct Sampled {
    haantjes_max: f64,
    witness: [f64; 4],
    eigen: Vec<EigenSample>,
    degenerate_samples: Vec<usize>,
}

fn sample(c: &Act<f64>, opts: &CktOptions) -> Sampled {
    let n = c.frobenius();
    let cn = if n == 0.0 { c.clone() } else { c.scale(&(1.0 / n)) };
    let pts = sample_points(opts.samples.max(1), opts.seed);
    let per: Vec<(f64, EigenSample)> = exec::map(&pts, |x| {
        let h = max_abs3(&haantjes_at(&cn, x));
        let e = eigen_structure_at(&cn, x, 1e-8).map(|e| (e.tangential, e.gap)).unwrap_or(([f64::NAN; 3], 0.0));
        (h, EigenSample { point: *x, tangential: e.0, gap: e.1 })
    });
    let mut haantjes_max = 0.0;
    let mut witness = pts[0];
    for (h, s) in &per {
        if *h > haantjes_max {
            haantjes_max = *h;
            witness = s.point;
        }
    }
    let eigen: Vec<EigenSample> = per.into_iter().map(|(_, s)| s).collect();
    let degenerate_samples = eigen
        .iter()
        .enumerate()
        .filter(|(_, s)| s.gap.partial_cmp(&opts.tol) != Some(std::cmp::Ordering::Greater))
        .map(|(i, _)| i)
        .collect();
    Sampled { haantjes_max, witness, eigen, degenerate_samples }
}

fn assemble(s: Sampled, haantjes_ok: bool, opts: &CktOptions, tsn: Option<TsnReport>, exact: bool) -> CktVerdict {
    let allowed = (opts.singular_fraction * s.eigen.len() as f64).floor() as usize;
    let degenerate = s.degenerate_samples.len() > allowed;
    CktVerdict {
        is_ckt: haantjes_ok && !degenerate,
        haantjes_max: s.haantjes_max,
        haantjes_witness: if haantjes_ok { None } else { Some(s.witness) },
        eigen_report: s.eigen,
        degenerate_samples: s.degenerate_samples,
        degenerate,
        tsn_report: tsn,
        exact,
    }
}

/// Float verdict: Haantjes at most `tol` at every sample of the normalized tensor.
pub fn is_ckt_f64(c: &Act<f64>, opts: &CktOptions) -> CktVerdict {
    let s = sample(c, opts);
    let ok = s.haantjes_max <= opts.tol;
    assemble(s, ok, opts, None, false)
}

/// Exact verdict: the Haantjes polynomial must vanish identically; TSN report attached.
pub fn is_ckt(c: &Act<Rational>, opts: &CktOptions) -> CktVerdict {
    let s = sample(&c.to_f64(), opts);
    let ok = h_condition(c);
    assemble(s, ok, opts, Some(tsn_report(c)), true)
}

/// Exact Haantjes verdict without the TSN report (cheaper).
pub fn is_ckt_exact_h(c: &Act<Rational>, opts: &CktOptions) -> CktVerdict {
    let s = sample(&c.to_f64(), opts);
    let ok = h_condition(c);
    assemble(s, ok, opts, None, true)
}
