//! Characteristic Killing tensors inside a compatible space.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ckt::verdict::is_ckt_exact_h;
use crate::ckt::{is_ckt_f64, CktOptions, CktVerdict};
use crate::error::{Error, Result};
use crate::exec;
use crate::frames::WebClass;
use crate::linalg::{self, RowReducer};
use crate::mat::mul4;
use crate::scalar::{format_rational, int, parse_rational, rationalize, Rational, Ring};
use crate::separation::compat::{pair_vector, unit_slot_acts, CompatibleSpace};
use crate::tensor::act::{casimir, slot_label, Act};
use crate::tensor::action::{cayley, frame_unchecked, random_frame, so4_act, Frame};

/// Coefficients given to the free parameters of a family to build its witness.
pub const WITNESS_PRIMES: [i64; 20] = [11, 7, 5, 3, 2, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];

#[derive(Clone, Debug)]
pub struct SubfamilyOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_den: i64,
    pub exact: bool,
    pub ckt: CktOptions,
}

impl Default for SubfamilyOptions {
    fn default() -> Self {
        Self { starts: 24, seed: 0, max_den: 1000, exact: true, ckt: CktOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubfamilySource {
    Generic,
    OrbitSearch(WebClass),
    Relations,
}

/// `slot = sum coefficient * parameter`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearRelation {
    pub slot: String,
    pub terms: Vec<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct CktSubfamily {
    pub source: SubfamilySource,
    pub parameters: Vec<String>,
    pub relations: Vec<LinearRelation>,
    pub basis: Vec<Act<f64>>,
    pub exact_basis: Option<Vec<Act<Rational>>>,
    pub witness: Act<f64>,
    pub exact_witness: Option<Act<Rational>>,
    pub verdict: CktVerdict,
    pub orbit_residual: Option<f64>,
}

impl CktSubfamily {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

fn float_verdict_opts(opts: &CktOptions) -> CktOptions {
    CktOptions { tol: opts.tol.max(1e-8), ..opts.clone() }
}

fn witness_coeffs(n: usize) -> Vec<i64> {
    (0..n).map(|k| WITNESS_PRIMES[k % WITNESS_PRIMES.len()] + 73 * (k / WITNESS_PRIMES.len()) as i64).collect()
}

fn describe_exact(rows: &[Vec<Rational>], pivots: &[usize]) -> (Vec<String>, Vec<LinearRelation>) {
    let params: Vec<String> = pivots.iter().map(|&p| format!("C{}", slot_label(p))).collect();
    let mut relations = Vec::new();
    for s in 0..20 {
        if pivots.contains(&s) {
            continue;
        }
        let terms: Vec<(String, String)> = rows
            .iter()
            .zip(&params)
            .filter(|(r, _)| !num::Zero::is_zero(&r[s]))
            .map(|(r, p)| (p.clone(), format_rational(&r[s])))
            .collect();
        relations.push(LinearRelation { slot: format!("C{}", slot_label(s)), terms });
    }
    (params, relations)
}

fn describe_f64(rows: &[Vec<f64>], pivots: &[usize]) -> (Vec<String>, Vec<LinearRelation>) {
    let params: Vec<String> = pivots.iter().map(|&p| format!("C{}", slot_label(p))).collect();
    let mut relations = Vec::new();
    for s in 0..20 {
        if pivots.contains(&s) {
            continue;
        }
        let terms: Vec<(String, String)> = rows
            .iter()
            .zip(&params)
            .filter(|(r, _)| r[s].abs() > 1e-12)
            .map(|(r, p)| (p.clone(), format!("{:.12}", r[s])))
            .collect();
        relations.push(LinearRelation { slot: format!("C{}", slot_label(s)), terms });
    }
    (params, relations)
}

/// Reduced row-echelon form with pivots in slot order.
fn rref_f64(mut rows: Vec<Vec<f64>>, tol: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, |r| r.len());
    let scale = rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let (best, val) =
            (r..rows.len()).map(|i| (i, rows[i][c].abs())).fold((r, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        if val <= tol * scale {
            continue;
        }
        rows.swap(r, best);
        let inv = 1.0 / rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= inv;
        }
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][c];
                if f != 0.0 {
                    for k in 0..ncols {
                        rows[i][k] -= f * rows[r][k];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

fn exact_rref(rows: &[Vec<Rational>]) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let rr = linalg::span_rref(rows, 20);
    let mut piv = rr.pivots().to_vec();
    piv.sort();
    (rr.rows(), piv)
}

fn build_exact(
    source: SubfamilySource,
    rows: &[Vec<Rational>],
    opts: &SubfamilyOptions,
    orbit_residual: Option<f64>,
) -> CktSubfamily {
    let (rows, pivots) = exact_rref(rows);
    let basis: Vec<Act<Rational>> = rows.iter().map(|r| Act::from_slots(r)).collect();
    let coeffs: Vec<Rational> = witness_coeffs(basis.len()).into_iter().map(int).collect();
    let witness = Act::combination(&basis, &coeffs);
    let verdict = is_ckt_exact_h(&witness, &opts.ckt);
    let (parameters, relations) = describe_exact(&rows, &pivots);
    CktSubfamily {
        source,
        parameters,
        relations,
        basis: basis.iter().map(|b| b.to_f64()).collect(),
        exact_basis: Some(basis),
        witness: witness.to_f64(),
        exact_witness: Some(witness),
        verdict,
        orbit_residual,
    }
}

fn build_f64(
    source: SubfamilySource,
    rows: Vec<Vec<f64>>,
    opts: &SubfamilyOptions,
    orbit_residual: Option<f64>,
) -> CktSubfamily {
    let (rows, pivots) = rref_f64(rows, 1e-8);
    let basis: Vec<Act<f64>> = rows.iter().map(|r| Act::from_slots(r)).collect();
    let coeffs: Vec<f64> = witness_coeffs(basis.len()).into_iter().map(|v| v as f64).collect();
    let witness = Act::combination(&basis, &coeffs);
    let verdict = is_ckt_f64(&witness, &float_verdict_opts(&opts.ckt));
    let (parameters, relations) = describe_f64(&rows, &pivots);
    CktSubfamily {
        source,
        parameters,
        relations,
        basis,
        exact_basis: None,
        witness,
        exact_witness: None,
        verdict,
        orbit_residual,
    }
}

/// Exact family from float rows when every RREF entry is a small rational and the result
/// lies in the compatible space.
fn reconstruct(rows: &[Vec<f64>], space: &CompatibleSpace, max_den: i64) -> Option<Vec<Vec<Rational>>> {
    let (rr, _) = rref_f64(rows.to_vec(), 1e-8);
    let exact: Vec<Vec<Rational>> = rr
        .iter()
        .map(|r| r.iter().map(|v| rationalize(*v, max_den, 1e-8)).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()?;
    let ok = exact.iter().all(|r| space.contains_exact(&Act::from_slots(r)).unwrap_or(false));
    ok.then_some(exact)
}

fn perp_residual(q: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    v - q * (q.transpose() * v)
}

/// Orthonormal non-Casimir directions spanned by a web's canonical basis.
fn web_directions(web: WebClass) -> Vec<Act<f64>> {
    let cas = casimir(8.0);
    let e = pair_vector(&cas).normalize();
    let mut out: Vec<Act<f64>> = Vec::new();
    for b in web.form().basis::<f64>() {
        let mut v = b.clone();
        let coef = pair_vector(&v).dot(&e) / pair_vector(&cas).norm();
        v = v.sub(&cas.scale(&coef));
        for u in &out {
            let d = pair_vector(&v).dot(&pair_vector(u));
            v = v.sub(&u.scale(&d));
        }
        let n = pair_vector(&v).norm();
        if n > 1e-10 {
            out.push(v.scale(&(1.0 / n)));
        }
    }
    out
}

fn residual_matrix(q: &DMatrix<f64>, dirs: &[Act<f64>], lam: &Frame<f64>) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = dirs.iter().map(|g| perp_residual(q, &pair_vector(&so4_act(g, lam)))).collect();
    DMatrix::from_columns(&cols)
}

fn smallest_right_singular(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let (k, s) =
        svd.singular_values.iter().enumerate().fold((0, f64::INFINITY), |a, (i, &s)| if s < a.1 { (i, s) } else { a });
    (s, vt.row(k).transpose())
}

fn rotate(lam: &Frame<f64>, theta: &[f64; 6]) -> Frame<f64> {
    frame_unchecked(mul4(lam.matrix(), cayley(theta).matrix()))
}

/// Levenberg-Marquardt on `|M(Lambda) c|` with `|c| = 1`; returns the polished frame and residual.
fn polish(q: &DMatrix<f64>, dirs: &[Act<f64>], start: Frame<f64>) -> (Frame<f64>, f64) {
    let r = dirs.len();
    let mut lam = start;
    let (mut best, mut c) = smallest_right_singular(&residual_matrix(q, dirs, &lam));
    let mut mu = 1e-3;
    let h = 1e-6;
    for _ in 0..200 {
        if best < 1e-14 {
            break;
        }
        let m0 = residual_matrix(q, dirs, &lam);
        let r0 = &m0 * &c;
        let mut jac = DMatrix::<f64>::zeros(37, 6 + r);
        for a in 0..6 {
            let mut tp = [0.0; 6];
            tp[a] = h;
            let mut tm = [0.0; 6];
            tm[a] = -h;
            let d = (residual_matrix(q, dirs, &rotate(&lam, &tp)) - residual_matrix(q, dirs, &rotate(&lam, &tm))) * &c
                / (2.0 * h);
            jac.view_mut((0, a), (36, 1)).copy_from(&d);
        }
        jac.view_mut((0, 6), (36, r)).copy_from(&m0);
        for k in 0..r {
            jac[(36, 6 + k)] = 2.0 * c[k];
        }
        let mut res = DVector::<f64>::zeros(37);
        res.rows_mut(0, 36).copy_from(&r0);
        res[36] = c.norm_squared() - 1.0;
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &res;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += mu * (1.0 + jtj[(i, i)]);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                mu *= 10.0;
                continue;
            };
            let theta: [f64; 6] = std::array::from_fn(|i| step[i]);
            let lam2 = rotate(&lam, &theta);
            let c2 = (&c + step.rows(6, r)).normalize();
            let val = (residual_matrix(q, dirs, &lam2) * &c2).norm();
            if val < best {
                lam = lam2;
                c = c2;
                best = val;
                mu = (mu / 3.0).max(1e-12);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (lam, best)
}

#[derive(Clone, Debug)]
struct OrbitHit {
    web: WebClass,
    rows: Vec<Vec<f64>>,
    residual: f64,
}

/// Family of tensors `Lambda . (canonical form of web) + multiple of Casimir` inside the space.
fn family_at(q: &DMatrix<f64>, web: WebClass, lam: &Frame<f64>) -> Vec<Vec<f64>> {
    let mut gens: Vec<Act<f64>> = web.form().basis::<f64>().iter().map(|b| so4_act(b, lam)).collect();
    gens.push(casimir(8.0));
    let cols: Vec<DVector<f64>> = gens.iter().map(|g| perp_residual(q, &pair_vector(g))).collect();
    let m = DMatrix::from_columns(&cols);
    let null = linalg::nullspace_f64(&m, 1e-7);
    let slots: Vec<DVector<f64>> =
        null.iter().map(|c| DVector::from_vec(Act::combination(&gens, c.as_slice()).slots())).collect();
    if slots.is_empty() {
        return Vec::new();
    }
    let on = linalg::orthonormal_columns(&DMatrix::from_columns(&slots), 1e-8);
    (0..on.ncols()).map(|j| on.column(j).iter().copied().collect()).collect()
}

fn orbit_search(space: &CompatibleSpace, opts: &SubfamilyOptions) -> Vec<OrbitHit> {
    let q = space.orthonormal();
    let mut webs: Vec<WebClass> = Vec::new();
    for w in WebClass::ALL {
        if !webs.iter().any(|u| u.form().terms == w.form().terms) {
            webs.push(w);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let jobs: Vec<(WebClass, Frame<f64>)> = webs
        .iter()
        .flat_map(|&w| (0..opts.starts).map(move |_| w).collect::<Vec<_>>())
        .map(|w| (w, random_frame(&mut rng)))
        .collect();
    let dirs: Vec<(WebClass, Vec<Act<f64>>)> = webs.iter().map(|&w| (w, web_directions(w))).collect();
    let results = exec::map(&jobs, |(w, start)| {
        let d = &dirs.iter().find(|(u, _)| u == w).expect("listed").1;
        let (lam, res) = polish(&q, d, start.clone());
        (*w, lam, res)
    });
    let mut hits: Vec<OrbitHit> = results
        .into_iter()
        .filter(|(_, _, r)| *r < 1e-9)
        .map(|(web, lam, residual)| OrbitHit { web, rows: family_at(&q, web, &lam), residual })
        .collect();
    let order = |w: WebClass| WebClass::ALL.iter().position(|u| *u == w).unwrap_or(usize::MAX);
    hits.sort_by(|a, b| {
        b.rows.len().cmp(&a.rows.len()).then(order(a.web).cmp(&order(b.web))).then(a.residual.total_cmp(&b.residual))
    });
    hits
}

/// Random element of the space, exact when possible.
fn generic_member(space: &CompatibleSpace, seed: u64) -> (Option<Act<Rational>>, Act<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e6e);
    let coeffs: Vec<i64> = (0..space.dimension).map(|_| rng.random_range(-9i64..=9).max(1)).collect();
    match &space.exact_basis {
        Some(b) => {
            let c = Act::combination(b, &coeffs.iter().map(|&v| int(v)).collect::<Vec<_>>());
            (Some(c.clone()), c.to_f64())
        }
        None => (None, Act::combination(&space.basis, &coeffs.iter().map(|&v| v as f64).collect::<Vec<_>>())),
    }
}

/// Searches the compatible space for a family of characteristic Killing tensors.
pub fn ckt_subfamily(space: &CompatibleSpace, opts: &SubfamilyOptions) -> Result<CktSubfamily> {
    if space.dimension == 0 {
        return Err(Error::NotFound("empty compatible space".into()));
    }
    let (exact, float) = generic_member(space, opts.seed);
    let generic_ok = match (&exact, opts.exact) {
        (Some(c), true) => is_ckt_exact_h(c, &opts.ckt).is_ckt,
        _ => is_ckt_f64(&float, &float_verdict_opts(&opts.ckt)).is_ckt,
    };
    if generic_ok {
        return Ok(match (&space.exact_basis, opts.exact) {
            (Some(b), true) => {
                build_exact(SubfamilySource::Generic, &b.iter().map(|a| a.slots()).collect::<Vec<_>>(), opts, None)
            }
            _ => build_f64(SubfamilySource::Generic, space.basis.iter().map(|a| a.slots()).collect(), opts, None),
        });
    }
    let hits = orbit_search(space, opts);
    let mut best_residual = f64::INFINITY;
    for hit in &hits {
        best_residual = best_residual.min(hit.residual);
        let source = SubfamilySource::OrbitSearch(hit.web);
        let exact_rows =
            if opts.exact && space.exact_basis.is_some() { reconstruct(&hit.rows, space, opts.max_den) } else { None };
        let fam = match exact_rows {
            Some(rows) => build_exact(source, &rows, opts, Some(hit.residual)),
            None => build_f64(source, hit.rows.clone(), opts, Some(hit.residual)),
        };
        if fam.verdict.is_ckt {
            return Ok(fam);
        }
    }
    Err(Error::NotFound(format!(
        "generic element is not characteristic and {} orbit candidates failed (best residual {best_residual:e})",
        hits.len()
    )))
}

/// Coefficients over the 20 slots of `lhs - rhs` for a relation such as `C1323 = C1212 - C1313`.
pub fn parse_relation(s: &str) -> Result<Vec<Rational>> {
    let bad = |m: &str| Error::InvalidPotential(format!("relation '{s}': {m}"));
    let (lhs, rhs) = s.split_once('=').ok_or_else(|| bad("missing '='"))?;
    let (l, lc) = parse_linear(lhs).map_err(|m| bad(&m))?;
    let (r, rc) = parse_linear(rhs).map_err(|m| bad(&m))?;
    if lc != rc {
        return Err(bad("constant terms must cancel"));
    }
    Ok(l.into_iter().zip(r).map(|(a, b)| a - b).collect())
}

fn component(indices: &str) -> std::result::Result<Vec<Rational>, String> {
    let idx: Vec<usize> = indices
        .chars()
        .map(|ch| ch.to_digit(10).filter(|d| (1..=4).contains(d)).map(|d| d as usize - 1))
        .collect::<Option<_>>()
        .filter(|v: &Vec<usize>| v.len() == 4)
        .ok_or_else(|| format!("bad component C{indices}"))?;
    let units: Vec<Act<Rational>> = unit_slot_acts();
    Ok(units.iter().map(|u| u.get(idx[0], idx[1], idx[2], idx[3])).collect())
}

fn parse_linear(s: &str) -> std::result::Result<(Vec<Rational>, Rational), String> {
    let mut acc = vec![Rational::from_integer(0.into()); 20];
    let mut constant = Rational::from_integer(0.into());
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err("empty side".into());
    }
    let mut i = 0;
    while i < chars.len() {
        let mut sign = int(1);
        while i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
            if chars[i] == '-' {
                sign = -sign;
            }
            i += 1;
        }
        let start = i;
        while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.' || chars[i] == '/') {
            i += 1;
        }
        let coef = if i > start {
            let text: String = chars[start..i].iter().collect();
            parse_rational(&text).ok_or_else(|| format!("bad coefficient '{text}'"))?
        } else {
            int(1)
        };
        if i < chars.len() && chars[i] == '*' {
            i += 1;
        }
        if i < chars.len() && chars[i] == 'C' {
            let idx: String = chars.get(i + 1..i + 5).ok_or("truncated component")?.iter().collect();
            let comp = component(&idx)?;
            for (a, c) in acc.iter_mut().zip(comp) {
                *a += &sign * &coef * c;
            }
            i += 5;
        } else if i > start {
            constant += sign * coef;
        } else {
            return Err(format!("unexpected '{}'", chars.get(i).copied().unwrap_or(' ')));
        }
        if i < chars.len() && chars[i] != '+' && chars[i] != '-' {
            return Err(format!("unexpected '{}'", chars[i]));
        }
    }
    Ok((acc, constant))
}

/// Family cut out by linear relations; with `others_zero`, slots no relation mentions vanish.
pub fn relation_family(relations: &[String], others_zero: bool) -> Result<Vec<Vec<Rational>>> {
    let rows: Vec<Vec<Rational>> = relations.iter().map(|r| parse_relation(r)).collect::<Result<_>>()?;
    let mut rr = RowReducer::new(20);
    let mut mentioned = [false; 20];
    for r in &rows {
        for (s, v) in r.iter().enumerate() {
            if !num::Zero::is_zero(v) {
                mentioned[s] = true;
            }
        }
        rr.push(r.clone());
    }
    if others_zero {
        for (s, m) in mentioned.iter().enumerate() {
            if !m {
                let mut e = vec![int(0); 20];
                e[s] = int(1);
                rr.push(e);
            }
        }
    }
    Ok(rr.nullspace())
}

/// The family given by user relations, checked against the compatible space.
pub fn subfamily_from_relations(
    space: &CompatibleSpace,
    relations: &[String],
    others_zero: bool,
    opts: &SubfamilyOptions,
) -> Result<CktSubfamily> {
    let rows = relation_family(relations, others_zero)?;
    if rows.is_empty() {
        return Err(Error::NotFound("relations leave only the zero tensor".into()));
    }
    let inside = match space.exact_basis {
        Some(_) => rows.iter().all(|r| space.contains_exact(&Act::from_slots(r)) == Some(true)),
        None => {
            let q = space.orthonormal();
            rows.iter().all(|r| {
                let v = pair_vector(&Act::from_slots(r).to_f64());
                perp_residual(&q, &v).norm() <= 1e-7 * v.norm()
            })
        }
    };
    if !inside {
        return Err(Error::NotFound("the relation family leaves the compatible space".into()));
    }
    Ok(if opts.exact {
        build_exact(SubfamilySource::Relations, &rows, opts, None)
    } else {
        build_f64(
            SubfamilySource::Relations,
            rows.iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect(),
            opts,
            None,
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_parsing() {
        let r = parse_relation("C1323 = C1212 - 1/2*C1313").unwrap();
        let nz: Vec<(String, Rational)> = Act::from_slots(&r).nonzero_slots();
        assert_eq!(nz.len(), 3);
        assert!(parse_relation("C1212 = C3434 + 1").is_err());
        assert!(parse_relation("C1252 = 0").is_err());
        assert!(parse_relation("C1212").is_err());
        // C1423 is not a slot but is determined by Bianchi.
        assert_eq!(Act::from_slots(&parse_relation("C1423 = 0").unwrap()).nonzero_slots().len(), 2);
    }

    #[test]
    fn rref_orders_pivots() {
        let (r, p) = rref_f64(vec![vec![0.0, 2.0, 4.0], vec![1.0, 1.0, 1.0]], 1e-12);
        assert_eq!(p, vec![0, 1]);
        assert!((r[0][2] + 1.0).abs() < 1e-12 && (r[1][2] - 2.0).abs() < 1e-12);
    }
}
