//! The separation algorithm as a sequential state machine.

use serde::Serialize;

use crate::error::Error;
use crate::frames::{
    canonical_match, canonical_match_f64, frame_from_ricci, ricci_frame, Category, FrameResult, MatchOptions,
};
use crate::mat::Mat4;
use crate::scalar::{format_rational, Rational};
use crate::separation::compat::{compatibility_constraints, CompatibleSpace};
use crate::separation::coords::{separable_coordinates, CoordinateMap};
use crate::separation::integral::{first_integral_check, FirstIntegralCheck, IntegralOptions};
use crate::separation::potential::Potential;
use crate::separation::subfamily::{ckt_subfamily, subfamily_from_relations, CktSubfamily, SubfamilyOptions};
use crate::symmetry::{symmetry_algebra, symmetry_algebra_f64, web_category};
use crate::tensor::act::{ricci, Act};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PipelineStatus {
    Ok,
    MultipleWebs,
    NotFound,
    NotCkt,
    NoCanonicalMatch,
    UnsupportedWeb,
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub samples: usize,
    pub seed: u64,
    pub exact: bool,
    pub relations: Option<Vec<String>>,
    pub others_zero: bool,
    pub subfamily: SubfamilyOptions,
    pub matching: MatchOptions,
    pub integral: IntegralOptions,
    pub symmetry_tol: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            samples: 64,
            seed: 0,
            exact: true,
            relations: None,
            others_zero: false,
            subfamily: SubfamilyOptions::default(),
            matching: MatchOptions::default(),
            integral: IntegralOptions::default(),
            symmetry_tol: 1e-9,
        }
    }
}

/// Linear form in the family parameters: `(parameter, coefficient)` pairs.
pub type LinearForm = Vec<(String, Rational)>;

#[derive(Clone, Debug, Serialize)]
pub struct SignatureSummary {
    pub rotations: usize,
    pub translations: usize,
    /// Each generator as a combination of `R_ij` and `X_i`.
    pub generators: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SeparationReport {
    pub status: PipelineStatus,
    pub message: Option<String>,
    pub potential: String,
    pub compatible_space: Option<CompatibleSpace>,
    pub subfamily: Option<CktSubfamily>,
    pub signature: Option<SignatureSummary>,
    pub category: Option<Category>,
    /// Ricci matrix of the family as linear forms in its parameters (exact families only).
    pub ricci_symbolic: Option<Mat4<LinearForm>>,
    pub ricci_witness: Option<Mat4<f64>>,
    pub frame: Option<FrameResult>,
    /// `Lambda^T R Lambda` diagonal as linear forms, when the exact frame works for the whole family.
    pub canonical_ricci_symbolic: Option<[LinearForm; 4]>,
    pub coordinates: Option<CoordinateMap>,
    pub first_integral: Option<FirstIntegralCheck>,
}

impl SeparationReport {
    fn new(potential: String) -> Self {
        Self {
            status: PipelineStatus::Ok,
            message: None,
            potential,
            compatible_space: None,
            subfamily: None,
            signature: None,
            category: None,
            ricci_symbolic: None,
            ricci_witness: None,
            frame: None,
            canonical_ricci_symbolic: None,
            coordinates: None,
            first_integral: None,
        }
    }

    fn stop(mut self, status: PipelineStatus, message: String) -> Self {
        self.status = status;
        self.message = Some(message);
        self
    }
}

pub fn format_linear_form(f: &LinearForm) -> String {
    if f.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (name, c)) in f.iter().enumerate() {
        let neg = c < &Rational::from_integer(0.into());
        let mag = if neg { -c.clone() } else { c.clone() };
        match (k, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        if mag != Rational::from_integer(1.into()) {
            s.push_str(&format_rational(&mag));
            s.push('*');
        }
        s.push_str(name);
    }
    s
}

fn linear_form(params: &[String], values: &[Rational]) -> LinearForm {
    params.iter().zip(values).filter(|(_, v)| !num::Zero::is_zero(*v)).map(|(p, v)| (p.clone(), v.clone())).collect()
}

fn symbolic_ricci(params: &[String], basis: &[Act<Rational>]) -> Mat4<LinearForm> {
    let rs: Vec<Mat4<Rational>> = basis.iter().map(ricci).collect();
    std::array::from_fn(|i| {
        std::array::from_fn(|j| linear_form(params, &rs.iter().map(|r| r[i][j].clone()).collect::<Vec<_>>()))
    })
}

/// Diagonal of `W^T R W / |w|^2` for every basis tensor, if `W` diagonalizes each of them.
fn symbolic_canonical_ricci(params: &[String], basis: &[Act<Rational>], fr: &FrameResult) -> Option<[LinearForm; 4]> {
    let ef = fr.exact_frame.as_ref()?;
    let w = ef.direction_matrix();
    let n = ef.norms_squared();
    let mut diag: Vec<[Rational; 4]> = Vec::new();
    for b in basis {
        let r = ricci(b);
        let mut d: [Rational; 4] = std::array::from_fn(|_| Rational::from_integer(0.into()));
        for a in 0..4 {
            for c in 0..4 {
                let v: Rational =
                    (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| &w[i][a] * &r[i][j] * &w[j][c]).sum();
                if a == c {
                    d[a] = v / &n[a];
                } else if !num::Zero::is_zero(&v) {
                    return None;
                }
            }
        }
        diag.push(d);
    }
    Some(std::array::from_fn(|a| linear_form(params, &diag.iter().map(|d| d[a].clone()).collect::<Vec<_>>())))
}

fn signature_summary<T: crate::scalar::Field>(
    sig: &crate::symmetry::SymmetrySignature<T>,
    format_num: impl Fn(&T) -> String + Copy,
) -> SignatureSummary {
    let generators = sig.generators.iter().map(|g| g.kv.label(format_num)).collect();
    SignatureSummary { rotations: sig.n_rotations, translations: sig.n_translations, generators }
}

/// Runs compatibility, CKT search, classification, framing, coordinates and the
/// first-integral check, stopping at the first stage that cannot proceed.
pub fn pipeline(v: &dyn Potential, opts: &PipelineOptions) -> SeparationReport {
    let mut report = SeparationReport::new(v.describe());
    let exact = opts.exact && v.exact().is_some();
    let space = match compatibility_constraints(v, opts.samples, opts.seed, exact) {
        Ok(s) => s,
        Err(e) => return report.stop(PipelineStatus::NotFound, e.to_string()),
    };
    let everything = space.is_everything();
    report.compatible_space = Some(space.clone());
    if everything && opts.relations.is_none() {
        return report.stop(
            PipelineStatus::MultipleWebs,
            "every Killing tensor is compatible; every web separates this potential".into(),
        );
    }
    let sub_opts = SubfamilyOptions { seed: opts.seed, exact, ..opts.subfamily.clone() };
    let fam = match &opts.relations {
        Some(rel) => subfamily_from_relations(&space, rel, opts.others_zero, &sub_opts),
        None => ckt_subfamily(&space, &sub_opts),
    };
    let fam = match fam {
        Ok(f) => f,
        Err(e) => return report.stop(PipelineStatus::NotFound, e.to_string()),
    };
    let is_ckt = fam.verdict.is_ckt;
    report.ricci_witness = Some(ricci(&fam.witness));
    if let Some(b) = &fam.exact_basis {
        report.ricci_symbolic = Some(symbolic_ricci(&fam.parameters, b));
    }
    report.subfamily = Some(fam.clone());
    if !is_ckt {
        return report.stop(PipelineStatus::NotCkt, "the family's generic member is not characteristic".into());
    }

    let sig = match &fam.exact_witness {
        Some(w) => symmetry_algebra(w).map(|s| signature_summary(&s, format_rational)),
        None => symmetry_algebra_f64(&fam.witness, opts.symmetry_tol)
            .map(|s| signature_summary(&s, |v: &f64| crate::scalar::format_float(*v))),
    };
    let sig = match sig {
        Ok(s) => s,
        Err(e) => return report.stop(PipelineStatus::NoCanonicalMatch, e.to_string()),
    };
    let (rot, trans) = (sig.rotations, sig.translations);
    report.signature = Some(sig);
    let category = match web_category(rot, trans) {
        Ok((c, _)) => c,
        Err(e) => return report.stop(PipelineStatus::NoCanonicalMatch, e.to_string()),
    };
    report.category = Some(category);

    let matched = match &fam.exact_witness {
        Some(w) => canonical_match(w, &ricci_frame(w), Some(category), &opts.matching),
        None => {
            let rf = frame_from_ricci(&ricci(&fam.witness));
            canonical_match_f64(&fam.witness, &rf, Some(category), &opts.matching)
        }
    };
    let fr = match matched {
        Ok(f) => f,
        Err(e) => return report.stop(PipelineStatus::NoCanonicalMatch, e.to_string()),
    };
    if let Some(b) = &fam.exact_basis {
        report.canonical_ricci_symbolic = symbolic_canonical_ricci(&fam.parameters, b, &fr);
    }
    let web = fr.web;
    let frame = fr.frame.clone();
    let exact_frame = fr.exact_frame.clone();
    report.frame = Some(fr);

    let check_opts = IntegralOptions { seed: opts.seed, ..opts.integral.clone() };
    match separable_coordinates(web, &frame, exact_frame.as_ref()) {
        Ok(map) => {
            report.coordinates = Some(map);
            report.first_integral = Some(first_integral_check(&fam.witness, v, &check_opts));
            report
        }
        Err(Error::UnsupportedWeb(name)) => {
            report.first_integral =
                Some(first_integral_check(&fam.witness, v, &IntegralOptions { trajectories: 0, ..check_opts }));
            report.stop(
                PipelineStatus::UnsupportedWeb,
                format!("no coordinate parametrization for the {name} web; frame and essential parameters reported"),
            )
        }
        Err(e) => report.stop(PipelineStatus::UnsupportedWeb, e.to_string()),
    }
}

/// Checks that the category's webs include the matched web.
pub fn consistent(report: &SeparationReport) -> bool {
    match (&report.category, &report.frame) {
        (Some(c), Some(f)) => c.webs().contains(&f.web),
        _ => true,
    }
}
