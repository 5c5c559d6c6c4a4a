//! Matching a transformed tensor against the canonical-form database.

use nalgebra::{DMatrix, DVector};
use num::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::frames::database::{essential_params, Category, WebClass};
use crate::frames::ricci::{frame_from_ricci, ricci_frame, ExactFrame, RicciFrame};
use crate::linalg;
use crate::mat::{mul4, Mat4};
use crate::scalar::{int, Rational, Ring};
use crate::tensor::act::{Act, PAIRS};
use crate::tensor::action::{frame_unchecked, so4_act, Frame};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchOptions {
    /// Accepted residual, relative to the Frobenius norm of the input.
    pub tol: f64,
    /// Angle step of the eigenspace sweep.
    pub sweep_step: f64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self { tol: 1e-8, sweep_step: 1e-4 }
    }
}

/// Outcome of canonical matching. `frame` is `Λ` with `so4_act(C, Λᵀ)` in canonical form.
#[derive(Clone, Debug)]
pub struct FrameResult {
    pub web: WebClass,
    pub frame: Frame<f64>,
    pub exact_frame: Option<ExactFrame>,
    pub params: Vec<f64>,
    pub params_exact: Option<Vec<Rational>>,
    /// Casimir coefficient `k` split off for forms that list no Casimir term.
    pub casimir: f64,
    pub casimir_exact: Option<Rational>,
    pub essential: Vec<(String, f64)>,
    pub essential_exact: Option<Vec<(String, Rational)>>,
    pub residual: f64,
    /// Every candidate web when the essential parameters do not single one out.
    pub ambiguous: Vec<WebClass>,
    /// An essential modulus lies outside the open interval (0, 1).
    pub out_of_range: bool,
    /// The frame was refined by the eigenspace angle sweep.
    pub swept: bool,
    /// Axis relabeling applied to the Ricci frame columns.
    pub permutation: [usize; 4],
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j])) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn pair_slot(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    PAIRS.iter().position(|&p| p == (a, b)).expect("distinct axes")
}

/// Pair diagonal after relabeling axes: new axis `k` is old axis `perm[k]`.
fn permute_diag<T: Clone>(d: &[T; 6], perm: [usize; 4]) -> [T; 6] {
    std::array::from_fn(|s| {
        let (i, j) = PAIRS[s];
        d[pair_slot(perm[i], perm[j])].clone()
    })
}

/// Fit columns: the pattern basis, then a constant column when the Casimir is not in its span.
fn fit_columns(web: WebClass) -> Vec<[i64; 6]> {
    let form = web.form();
    let mut cols: Vec<[i64; 6]> = (0..form.n_params())
        .map(|k| {
            let mut v = [0i64; 6];
            for &(a, b) in form.terms[k] {
                v[pair_slot(a - 1, b - 1)] += 1;
            }
            v
        })
        .collect();
    if !form.includes_casimir {
        cols.push([1; 6]);
    }
    cols
}

struct Fit<T> {
    params: Vec<T>,
    casimir: T,
    residual: f64,
}

fn fit_exact(web: WebClass, d: &[Rational; 6]) -> Option<Fit<Rational>> {
    let cols = fit_columns(web);
    let m: Vec<Vec<Rational>> = (0..6).map(|r| cols.iter().map(|c| int(c[r])).collect()).collect();
    let x = linalg::solve(&m, d)?;
    let n = web.form().n_params();
    let casimir = if web.form().includes_casimir { int(0) } else { &x[n] * int(8) };
    Some(Fit { params: x[..n].to_vec(), casimir, residual: 0.0 })
}

fn fit_f64(web: WebClass, d: &[f64; 6]) -> Fit<f64> {
    let cols = fit_columns(web);
    let a = DMatrix::from_fn(6, cols.len(), |r, c| cols[c][r] as f64);
    let b = DVector::from_column_slice(d);
    let x = linalg::lstsq(&a, &b);
    let residual = (&a * &x - &b).amax();
    let n = web.form().n_params();
    let casimir = if web.form().includes_casimir { 0.0 } else { 8.0 * x[n] };
    Fit { params: x.iter().take(n).copied().collect(), casimir, residual }
}

fn in_unit_interval(v: f64, tol: f64) -> bool {
    v > tol && v < 1.0 - tol
}

struct Candidate {
    web: WebClass,
    perm: [usize; 4],
    frame: Frame<f64>,
    exact_frame: Option<ExactFrame>,
    params: Vec<f64>,
    params_exact: Option<Vec<Rational>>,
    casimir: f64,
    casimir_exact: Option<Rational>,
    essential: Vec<(String, f64)>,
    essential_exact: Option<Vec<(String, Rational)>>,
    residual: f64,
    in_range: bool,
    closeness: f64,
    inversions: usize,
}

/// Pairs of frame columns whose Ricci eigenvalues increase.
fn inversions(eig: &[f64; 4], perm: [usize; 4]) -> usize {
    let scale = eig.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut n = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if eig[perm[j]] - eig[perm[i]] > 1e-9 * scale {
                n += 1;
            }
        }
    }
    n
}

fn essential_in_range(values: &[(String, f64)], tol: f64) -> bool {
    values.iter().filter(|(n, _)| n == "k^2" || n == "k'^2").all(|(_, v)| in_unit_interval(*v, tol))
}

/// Column signs chosen so the diagonal is nonnegative, then the last column fixes det +1.
fn permuted_frame(m: &Mat4<f64>, perm: [usize; 4]) -> Frame<f64> {
    let mut out: Mat4<f64> = std::array::from_fn(|i| std::array::from_fn(|k| m[i][perm[k]]));
    for k in 0..4 {
        if out[k][k] < 0.0 {
            for row in out.iter_mut() {
                row[k] = -row[k];
            }
        }
    }
    if crate::mat::det4(&out) < 0.0 {
        for row in out.iter_mut() {
            row[3] = -row[3];
        }
    }
    frame_unchecked(out)
}

fn trace(m: &Mat4<f64>) -> f64 {
    (0..4).map(|i| m[i][i]).sum()
}

fn oriented(mut ef: ExactFrame) -> ExactFrame {
    for k in 0..4 {
        if ef.directions[k][k].is_negative() {
            ef.directions[k] = ef.directions[k].clone().map(|v| -v);
        }
    }
    ef.permuted([0, 1, 2, 3])
}

/// Candidates from an exactly diagonal transformed tensor.
fn exact_candidates(ex: &ExactFrame, d: &[Rational; 6], webs: &[WebClass], tol: f64) -> Vec<Candidate> {
    let eig: [f64; 4] = std::array::from_fn(|k| ex.eigenvalues[k].to_f64());
    let mut out = Vec::new();
    for &web in webs {
        for perm in permutations4() {
            let dp = permute_diag(d, perm);
            let Some(fit) = fit_exact(web, &dp) else { continue };
            let essential = match essential_params(web, &fit.params, 0.0) {
                Ok(e) => Some(e.values),
                Err(Error::ConstraintViolated(_)) => continue,
                Err(_) => None,
            };
            let ef = oriented(ex.permuted(perm));
            let frame = ef.to_frame();
            let ess_f: Vec<(String, f64)> = essential.iter().flatten().map(|(n, v)| (n.clone(), v.to_f64())).collect();
            let in_range = essential.is_some() && essential_in_range(&ess_f, tol);
            out.push(Candidate {
                web,
                perm,
                closeness: trace(frame.matrix()),
                inversions: inversions(&eig, perm),
                frame,
                exact_frame: Some(ef),
                params: fit.params.iter().map(|v| v.to_f64()).collect(),
                casimir: fit.casimir.to_f64(),
                casimir_exact: Some(fit.casimir),
                params_exact: Some(fit.params),
                essential: ess_f,
                essential_exact: essential,
                residual: 0.0,
                in_range,
            });
        }
    }
    out
}

/// Candidates from a float transformed tensor; `off` is its largest off-diagonal pair entry.
fn float_candidates(
    lam: &Mat4<f64>,
    eig: &[f64; 4],
    d: &[f64; 6],
    off: f64,
    norm: f64,
    webs: &[WebClass],
    tol: f64,
) -> (Vec<Candidate>, f64) {
    let mut out = Vec::new();
    let mut best = f64::INFINITY;
    for &web in webs {
        for perm in permutations4() {
            let dp = permute_diag(d, perm);
            let fit = fit_f64(web, &dp);
            let residual = fit.residual.max(off) / norm;
            best = best.min(residual);
            if residual > tol {
                continue;
            }
            let essential = match essential_params(web, &fit.params, tol * norm) {
                Ok(e) => Some(e.values),
                Err(Error::ConstraintViolated(_)) => continue,
                Err(_) => None,
            };
            let frame = permuted_frame(lam, perm);
            let ess = essential.unwrap_or_default();
            let in_range = !ess.is_empty() || web.form().essential.is_empty();
            let in_range = in_range && essential_in_range(&ess, tol);
            out.push(Candidate {
                web,
                perm,
                closeness: trace(frame.matrix()),
                inversions: inversions(eig, perm),
                frame,
                exact_frame: None,
                params: fit.params,
                params_exact: None,
                casimir: fit.casimir,
                casimir_exact: None,
                essential: ess,
                essential_exact: None,
                residual,
                in_range,
            });
        }
    }
    (out, best)
}

/// Picks the first web (in candidate order) that matched, resolving webs that share a
/// pattern through the range of their essential parameters.
fn select(mut cands: Vec<Candidate>, webs: &[WebClass]) -> Option<FrameResult> {
    let first_web = webs.iter().find(|w| cands.iter().any(|c| c.web == **w))?;
    let pattern = first_web.form().terms;
    let tied: Vec<WebClass> =
        webs.iter().copied().filter(|w| w.form().terms == pattern && cands.iter().any(|c| c.web == *w)).collect();
    cands.retain(|c| tied.contains(&c.web));
    let valid: Vec<WebClass> =
        tied.iter().copied().filter(|w| cands.iter().any(|c| c.web == *w && c.in_range)).collect();
    let ambiguous = if tied.len() > 1 && valid.len() != 1 { tied.clone() } else { vec![] };
    if valid.len() == 1 {
        cands.retain(|c| c.web == valid[0]);
    }
    cands.sort_by(|a, b| {
        b.in_range
            .cmp(&a.in_range)
            .then(webs.iter().position(|w| *w == a.web).cmp(&webs.iter().position(|w| *w == b.web)))
            .then((b.closeness > 4.0 - 1e-9).cmp(&(a.closeness > 4.0 - 1e-9)))
            .then(a.inversions.cmp(&b.inversions))
            .then(b.closeness.total_cmp(&a.closeness))
            .then(a.residual.total_cmp(&b.residual))
    });
    let c = cands.into_iter().next()?;
    Some(FrameResult {
        web: c.web,
        frame: c.frame,
        exact_frame: c.exact_frame,
        out_of_range: !c.in_range,
        params: c.params,
        params_exact: c.params_exact,
        casimir: c.casimir,
        casimir_exact: c.casimir_exact,
        essential: c.essential,
        essential_exact: c.essential_exact,
        residual: c.residual,
        ambiguous,
        swept: false,
        permutation: c.perm,
    })
}

fn candidate_webs(category: Option<Category>) -> Vec<WebClass> {
    match category {
        Some(cat) => cat.webs().to_vec(),
        None => Category::ALL.iter().flat_map(|c| c.webs().iter().copied()).collect(),
    }
}

fn pair_split(c: &Act<f64>) -> ([f64; 6], f64) {
    let m = c.pair_matrix();
    let mut off: f64 = 0.0;
    for a in 0..6 {
        for b in 0..6 {
            if a != b {
                off = off.max(m[a][b].abs());
            }
        }
    }
    (std::array::from_fn(|a| m[a][a]), off)
}

fn transformed(c: &Act<f64>, lam: &Mat4<f64>) -> Act<f64> {
    so4_act(c, &frame_unchecked(crate::mat::transpose4(lam)))
}

fn off_diagonal_energy(c: &Act<f64>, lam: &Mat4<f64>) -> f64 {
    let m = transformed(c, lam);
    let p = m.pair_matrix();
    let mut s = 0.0;
    for a in 0..6 {
        for b in 0..6 {
            if a != b {
                s += p[a][b] * p[a][b];
            }
        }
    }
    s
}

fn rotate_columns(lam: &Mat4<f64>, p: usize, q: usize, theta: f64) -> Mat4<f64> {
    let mut g: Mat4<f64> = crate::mat::identity4();
    let (s, co) = theta.sin_cos();
    g[p][p] = co;
    g[q][q] = co;
    g[p][q] = -s;
    g[q][p] = s;
    mul4(lam, &g)
}

/// Minimizes the off-diagonal pair energy over rotations inside each two-dimensional
/// Ricci eigenspace: a dense sweep followed by golden-section refinement.
fn sweep(c: &Act<f64>, lam: &Mat4<f64>, multiplicities: &[usize], step: f64) -> Mat4<f64> {
    let mut planes = Vec::new();
    let mut start = 0;
    for &m in multiplicities {
        if m == 2 {
            planes.push((start, start + 1));
        }
        start += m;
    }
    let mut cur = *lam;
    let n = (std::f64::consts::PI / step).ceil() as usize;
    for _ in 0..2 {
        for &(p, q) in &planes {
            let vals = exec::map_range(n, |k| off_diagonal_energy(c, &rotate_columns(&cur, p, q, k as f64 * step)));
            let k = (0..n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
            let f = |t: f64| off_diagonal_energy(c, &rotate_columns(&cur, p, q, t));
            let (mut a, mut b) = ((k as f64 - 1.0) * step, (k as f64 + 1.0) * step);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..80 {
                let x1 = b - g * (b - a);
                let x2 = a + g * (b - a);
                if f(x1) <= f(x2) {
                    b = x2;
                } else {
                    a = x1;
                }
            }
            cur = rotate_columns(&cur, p, q, 0.5 * (a + b));
        }
    }
    cur
}

fn no_match(best: f64, degenerate: bool, reason: &str) -> Error {
    Error::NoCanonicalMatch { reason: reason.to_string(), best_residual: best, degenerate }
}

/// Float matching against the database.
pub fn canonical_match_f64(
    c: &Act<f64>,
    rf: &RicciFrame,
    category: Option<Category>,
    opts: &MatchOptions,
) -> Result<FrameResult> {
    let norm = c.frobenius();
    if norm == 0.0 {
        return Err(no_match(0.0, true, "zero tensor"));
    }
    if rf.is_isotropic() || rf.max_multiplicity() > 2 {
        return Err(no_match(f64::INFINITY, true, "Ricci eigenspace of dimension above two"));
    }
    let webs = candidate_webs(category);
    let lam = *rf.frame.matrix();
    let (d, off) = pair_split(&transformed(c, &lam));
    let (cands, mut best) = float_candidates(&lam, &rf.eigenvalues, &d, off, norm, &webs, opts.tol);
    if let Some(r) = select(cands, &webs) {
        return Ok(r);
    }
    if rf.max_multiplicity() == 2 {
        let swept = sweep(c, &lam, &rf.multiplicities, opts.sweep_step);
        let (d, off) = pair_split(&transformed(c, &swept));
        let (cands, b) = float_candidates(&swept, &rf.eigenvalues, &d, off, norm, &webs, opts.tol);
        best = best.min(b);
        if let Some(mut r) = select(cands, &webs) {
            r.swept = true;
            return Ok(r);
        }
    }
    Err(no_match(best, false, "residual above tolerance for every candidate"))
}

/// Exact matching when the Ricci frame is rational, float matching otherwise.
pub fn canonical_match(
    c: &Act<Rational>,
    rf: &RicciFrame,
    category: Option<Category>,
    opts: &MatchOptions,
) -> Result<FrameResult> {
    if c.is_zero() {
        return Err(no_match(0.0, true, "zero tensor"));
    }
    if let Some(ex) = &rf.exact {
        if !(rf.is_isotropic() || rf.max_multiplicity() > 2) {
            let pd = ex.pair_diagonal(c);
            if pd.off_diagonal_zero {
                let webs = candidate_webs(category);
                if let Some(r) = select(exact_candidates(ex, &pd.diag, &webs, opts.tol), &webs) {
                    return Ok(r);
                }
            }
        }
    }
    canonical_match_f64(&c.to_f64(), rf, category, opts)
}

/// Ricci frame followed by matching.
pub fn match_tensor(c: &Act<Rational>, category: Option<Category>, opts: &MatchOptions) -> Result<FrameResult> {
    canonical_match(c, &ricci_frame(c), category, opts)
}

pub fn match_tensor_f64(c: &Act<f64>, category: Option<Category>, opts: &MatchOptions) -> Result<FrameResult> {
    let rf = frame_from_ricci(&crate::tensor::act::ricci(c));
    canonical_match_f64(c, &rf, category, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::database::sample_parameters;
    use crate::tensor::act::casimir;

    #[test]
    fn canonical_inputs_match_themselves() {
        for web in WebClass::ALL {
            let p = &sample_parameters(web)[0];
            let c = web.form().act(p);
            let r = match_tensor(&c, Some(web.category()), &MatchOptions::default()).unwrap();
            assert_eq!(r.web, web);
            assert_eq!(r.params_exact.as_ref(), Some(p), "{web}");
        }
    }

    #[test]
    fn casimir_is_degenerate() {
        let err = match_tensor(&casimir(int(1)), None, &MatchOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NoCanonicalMatch { degenerate: true, .. }));
    }

    #[test]
    fn permutations_are_distinct() {
        assert_eq!(permutations4().len(), 24);
        assert_eq!(permutations4()[0], [0, 1, 2, 3]);
    }
}
