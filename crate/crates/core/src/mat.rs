//! Fixed-size 4x4 helpers over any ring.

use crate::scalar::{Field, Ring};

pub type Vec4<T> = [T; 4];
pub type Mat4<T> = [[T; 4]; 4];
pub type Mat6<T> = [[T; 6]; 6];

pub fn zero4<T: Ring>() -> Mat4<T> {
    std::array::from_fn(|_| std::array::from_fn(|_| T::zero()))
}

pub fn identity4<T: Ring>() -> Mat4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { T::one() } else { T::zero() }))
}

pub fn identity6<T: Ring>() -> Mat6<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { T::one() } else { T::zero() }))
}

pub fn transpose4<T: Ring>(a: &Mat4<T>) -> Mat4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn mul4<T: Ring>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..4).fold(T::zero(), |acc, k| acc + a[i][k].clone() * b[k][j].clone()))
    })
}

pub fn mul6<T: Ring>(a: &Mat6<T>, b: &Mat6<T>) -> Mat6<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..6).fold(T::zero(), |acc, k| acc + a[i][k].clone() * b[k][j].clone()))
    })
}

pub fn mat_vec4<T: Ring>(a: &Mat4<T>, x: &Vec4<T>) -> Vec4<T> {
    std::array::from_fn(|i| (0..4).fold(T::zero(), |acc, k| acc + a[i][k].clone() * x[k].clone()))
}

pub fn dot4<T: Ring>(a: &Vec4<T>, b: &Vec4<T>) -> T {
    (0..4).fold(T::zero(), |acc, k| acc + a[k].clone() * b[k].clone())
}

pub fn trace4<T: Ring>(a: &Mat4<T>) -> T {
    (0..4).fold(T::zero(), |acc, k| acc + a[k][k].clone())
}

pub fn det4<T: Ring>(a: &Mat4<T>) -> T {
    // Laplace expansion along the first row.
    let minor3 = |rows: [usize; 3], cols: [usize; 3]| -> T {
        let m = |r: usize, c: usize| a[rows[r]][cols[c]].clone();
        m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
    };
    let mut acc = T::zero();
    for c in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&k| k != c).collect();
        let term = a[0][c].clone() * minor3([1, 2, 3], [cols[0], cols[1], cols[2]]);
        acc = if c % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Gauss-Jordan inverse; `None` if singular.
pub fn inverse4<T: Field>(a: &Mat4<T>) -> Option<Mat4<T>> {
    let mut m: Vec<Vec<T>> = (0..4)
        .map(|i| {
            let mut r: Vec<T> = a[i].to_vec();
            r.extend((0..4).map(|j| if i == j { T::one() } else { T::zero() }));
            r
        })
        .collect();
    for col in 0..4 {
        let piv = (col..4).max_by(|&p, &q| {
            m[p][col].to_f64().abs().partial_cmp(&m[q][col].to_f64().abs()).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[piv][col].is_zero() || (!T::EXACT && m[piv][col].to_f64().abs() < 1e-300) {
            return None;
        }
        m.swap(piv, col);
        let inv = T::one() / m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for r in 0..4 {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..8 {
                    let sub = f.clone() * m[col][c].clone();
                    m[r][c] = m[r][c].clone() - sub;
                }
            }
        }
    }
    Some(std::array::from_fn(|i| std::array::from_fn(|j| m[i][j + 4].clone())))
}

pub fn to_f64_4<T: Ring>(a: &Mat4<T>) -> Mat4<f64> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].to_f64()))
}

pub fn max_abs_diff4(a: &Mat4<f64>, b: &Mat4<f64>) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

pub fn to_nalgebra(a: &Mat4<f64>) -> nalgebra::Matrix4<f64> {
    nalgebra::Matrix4::from_fn(|i, j| a[i][j])
}

pub fn from_nalgebra(a: &nalgebra::Matrix4<f64>) -> Mat4<f64> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[(i, j)]))
}
