//! Small dense linear algebra: exact row reduction over the rationals and SVD-based
//! nullspaces in floating point.

use nalgebra::{DMatrix, DVector};
use num::{One, Signed, Zero};

use crate::scalar::Rational;

/// Incremental reduced row-echelon form. Rows can be streamed in; the basis stays reduced.
#[derive(Clone, Debug)]
pub struct RowReducer {
    ncols: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl RowReducer {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Rows sorted by pivot column.
    pub fn rows(&self) -> Vec<Vec<Rational>> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&i| self.pivots[i]);
        idx.into_iter().map(|i| self.rows[i].clone()).collect()
    }

    fn reduce(&self, row: &mut [Rational]) {
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (c, v) in r.iter().enumerate() {
                    if !v.is_zero() {
                        row[c] -= &f * v;
                    }
                }
            }
        }
    }

    /// Returns true if the row increased the rank.
    pub fn push(&mut self, mut row: Vec<Rational>) -> bool {
        assert_eq!(row.len(), self.ncols);
        self.reduce(&mut row);
        let Some(p) = row.iter().position(|v| !v.is_zero()) else {
            return false;
        };
        let inv = Rational::one() / row[p].clone();
        for v in row.iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        for r in self.rows.iter_mut() {
            if !r[p].is_zero() {
                let f = r[p].clone();
                for (c, v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        r[c] -= &f * v;
                    }
                }
            }
        }
        self.rows.push(row);
        self.pivots.push(p);
        true
    }

    /// True if the row lies in the span of the pushed rows.
    pub fn contains(&self, row: &[Rational]) -> bool {
        let mut r = row.to_vec();
        self.reduce(&mut r);
        r.iter().all(|v| v.is_zero())
    }

    /// Basis of `{v : row . v = 0 for every pushed row}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut is_pivot = vec![None; self.ncols];
        for (i, &p) in self.pivots.iter().enumerate() {
            is_pivot[p] = Some(i);
        }
        let mut out = Vec::new();
        for free in 0..self.ncols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![Rational::zero(); self.ncols];
            v[free] = Rational::one();
            for (r, &p) in self.rows.iter().zip(&self.pivots) {
                v[p] = -r[free].clone();
            }
            out.push(v);
        }
        out
    }
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut rr = RowReducer::new(first.len());
    for r in rows {
        rr.push(r.clone());
        if rr.is_full() {
            break;
        }
    }
    rr.rank()
}

pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut rr = RowReducer::new(ncols);
    for r in rows {
        rr.push(r.clone());
        if rr.is_full() {
            break;
        }
    }
    rr.nullspace()
}

/// Reduced row-echelon basis of the span of `vectors`.
pub fn span_rref(vectors: &[Vec<Rational>], ncols: usize) -> RowReducer {
    let mut rr = RowReducer::new(ncols);
    for v in vectors {
        rr.push(v.clone());
    }
    rr
}

/// True if the two lists span the same subspace.
pub fn same_span(a: &[Vec<Rational>], b: &[Vec<Rational>], ncols: usize) -> bool {
    let ra = span_rref(a, ncols);
    let rb = span_rref(b, ncols);
    ra.rank() == rb.rank() && b.iter().all(|v| ra.contains(v))
}

/// Exact solve of a square or overdetermined consistent system `m x = rhs`.
pub fn solve(m: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.first()?.len();
    let mut rr = RowReducer::new(n + 1);
    for (row, b) in m.iter().zip(rhs) {
        let mut r = row.clone();
        r.push(b.clone());
        rr.push(r);
    }
    if rr.pivots().contains(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for r in rr.rows() {
        let p = r.iter().position(|v| !v.is_zero())?;
        x[p] = r[n].clone();
    }
    Some(x)
}

pub fn max_abs(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

/// Right singular vectors with singular value at most `rel_tol * sigma_max`.
pub fn nullspace_f64(a: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let (r, c) = a.shape();
    let padded;
    let a = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(a);
        padded = p;
        &padded
    } else {
        a
    };
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thresh = rel_tol * smax.max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= thresh {
            out.push(vt.row(i).transpose());
        }
    }
    out
}

/// Numerical rank with a relative singular-value threshold.
pub fn rank_f64(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let s = a.clone().svd(false, false).singular_values;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * smax).count()
}

/// Least-squares solution through the pseudo-inverse.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-13 * svd.singular_values.max().max(f64::MIN_POSITIVE)).expect("svd solve")
}

/// Orthonormal basis of the column span, dropping directions below `rel_tol`.
pub fn orthonormal_columns(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (r, c) = a.shape();
    if c == 0 {
        return DMatrix::zeros(r, 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * smax.max(f64::MIN_POSITIVE))
        .collect();
    DMatrix::from_fn(r, keep.len(), |i, j| u[(i, keep[j])])
}
