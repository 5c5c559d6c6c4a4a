//! Quadratic first integrals `F = K(p, p)/2 + U` of `H = |p|^2/2 + V` on S³.
//!
//! With this normalization `dU = K dV`. The potential part is built by integrating the
//! 1-form along great-circle arcs, so it is a well-defined function only when the form is
//! closed; conservation along trajectories then tests closedness globally.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::exec;
use crate::mat::{mat_vec4, Vec4};
use crate::separation::compat::compatibility_residual_at;
use crate::separation::potential::Potential;
use crate::tensor::act::{kt_at, Act};
use crate::tensor::action::random_sphere_point;

#[derive(Clone, Debug)]
pub struct IntegralOptions {
    pub samples: usize,
    pub trajectories: usize,
    pub steps: usize,
    pub dt: f64,
    pub quad_tol: f64,
    pub seed: u64,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        Self { samples: 64, trajectories: 4, steps: 400, dt: 2.5e-3, quad_tol: 1e-10, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FirstIntegralCheck {
    /// Largest relative size of `x ^ d(K dV)` over the samples.
    pub closedness_residual: f64,
    /// Largest relative drift of `F` along the test trajectories.
    pub integral_drift: Option<f64>,
    /// Largest relative drift of `H`, as an integrator sanity check.
    pub energy_drift: Option<f64>,
    pub trajectories: usize,
}

fn dot(a: &Vec4<f64>, b: &Vec4<f64>) -> f64 {
    (0..4).map(|i| a[i] * b[i]).sum()
}

fn omega(c: &Act<f64>, v: &dyn Potential, x: &Vec4<f64>) -> Vec4<f64> {
    mat_vec4(&kt_at(c, x), &v.gradient_f64(x))
}

/// One adaptive step on `[a, b]` given `f` at both ends and the midpoint.
fn simpson(
    f: &dyn Fn(f64) -> f64,
    (a, b): (f64, f64),
    [fa, fm, fb]: [f64; 3],
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, (a, m), [fa, flm, fm], left, 0.5 * tol, depth - 1)
        + simpson(f, (m, b), [fm, frm, fb], right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, (a, b), [fa, fm, fb], whole, tol, 40)
}

/// `U(x) - U(base)` along the shorter great-circle arc.
pub fn potential_part(c: &Act<f64>, v: &dyn Potential, base: &Vec4<f64>, x: &Vec4<f64>, tol: f64) -> f64 {
    let cos = dot(base, x).clamp(-1.0, 1.0);
    let phi = cos.acos();
    if phi < 1e-14 {
        return 0.0;
    }
    let s = phi.sin();
    let f = |t: f64| {
        let (a, b) = (((1.0 - t) * phi).sin() / s, (t * phi).sin() / s);
        let (da, db) = (-phi * ((1.0 - t) * phi).cos() / s, phi * (t * phi).cos() / s);
        let g: Vec4<f64> = std::array::from_fn(|i| a * base[i] + b * x[i]);
        let dg: Vec4<f64> = std::array::from_fn(|i| da * base[i] + db * x[i]);
        dot(&omega(c, v, &g), &dg)
    };
    integrate(&f, 0.0, 1.0, tol)
}

type State = (Vec4<f64>, Vec4<f64>);

fn rhs(v: &dyn Potential, (x, p): &State) -> State {
    let g = v.gradient_f64(x);
    let xn = dot(x, x);
    let gr = dot(&g, x) / xn;
    let pp = dot(p, p) / xn;
    (*p, std::array::from_fn(|i| -(g[i] - gr * x[i]) - pp * x[i]))
}

fn rk4(v: &dyn Potential, s: &State, dt: f64) -> State {
    let add = |s: &State, k: &State, h: f64| -> State {
        (std::array::from_fn(|i| s.0[i] + h * k.0[i]), std::array::from_fn(|i| s.1[i] + h * k.1[i]))
    };
    let k1 = rhs(v, s);
    let k2 = rhs(v, &add(s, &k1, 0.5 * dt));
    let k3 = rhs(v, &add(s, &k2, 0.5 * dt));
    let k4 = rhs(v, &add(s, &k3, dt));
    (
        std::array::from_fn(|i| s.0[i] + dt / 6.0 * (k1.0[i] + 2.0 * k2.0[i] + 2.0 * k3.0[i] + k4.0[i])),
        std::array::from_fn(|i| s.1[i] + dt / 6.0 * (k1.1[i] + 2.0 * k2.1[i] + 2.0 * k3.1[i] + k4.1[i])),
    )
}

fn finite_state(s: &State) -> bool {
    s.0.iter().chain(s.1.iter()).all(|v| v.is_finite())
}

/// One trajectory: relative drift of `F` and of `H`, or `None` if it left the domain of `V`.
fn trajectory(
    c: &Act<f64>,
    v: &dyn Potential,
    x0: Vec4<f64>,
    p0: Vec4<f64>,
    opts: &IntegralOptions,
) -> Option<(f64, f64)> {
    let f_at =
        |s: &State| 0.5 * dot(&s.1, &mat_vec4(&kt_at(c, &s.0), &s.1)) + potential_part(c, v, &x0, &s.0, opts.quad_tol);
    let h_at = |s: &State| 0.5 * dot(&s.1, &s.1) + v.value_f64(&s.0);
    let mut s = (x0, p0);
    let (f0, h0) = (f_at(&s), h_at(&s));
    let k_scale = c.frobenius() * (dot(&p0, &p0) + h0.abs());
    let (mut df, mut dh) = (0.0f64, 0.0f64);
    let check = (opts.steps / 8).max(1);
    for step in 1..=opts.steps {
        s = rk4(v, &s, opts.dt);
        if !finite_state(&s) {
            return None;
        }
        if step % check == 0 || step == opts.steps {
            let (f, h) = (f_at(&s), h_at(&s));
            if !f.is_finite() || !h.is_finite() {
                return None;
            }
            df = df.max((f - f0).abs() / k_scale.max(f0.abs()).max(1e-300));
            dh = dh.max((h - h0).abs() / h0.abs().max(1e-300));
        }
    }
    Some((df, dh))
}

/// Closedness of `K dV` at samples, and conservation of `F` along trajectories.
pub fn first_integral_check(c: &Act<f64>, v: &dyn Potential, opts: &IntegralOptions) -> FirstIntegralCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xf1);
    let mut points = Vec::with_capacity(opts.samples);
    let mut tries = 0;
    while points.len() < opts.samples && tries < 50 * opts.samples + 100 {
        tries += 1;
        let x = random_sphere_point(&mut rng);
        let regular = v.exact().is_none_or(|rv| rv.is_regular_at(&x, 1e-2));
        if regular && v.gradient_f64(&x).iter().all(|g| g.is_finite()) {
            points.push(x);
        }
    }
    let closedness = exec::map(&points, |x| compatibility_residual_at(c, v, x)).into_iter().fold(0.0, f64::max);
    let starts: Vec<(Vec4<f64>, Vec4<f64>)> = points
        .iter()
        .take(opts.trajectories)
        .map(|x| {
            let g: Vec4<f64> = std::array::from_fn(|_| rng.sample(StandardNormal));
            let gx = dot(&g, x);
            let t: Vec4<f64> = std::array::from_fn(|i| g[i] - gx * x[i]);
            let n = dot(&t, &t).sqrt().max(1e-300);
            (*x, t.map(|e| 0.5 * e / n))
        })
        .collect();
    let runs: Vec<(f64, f64)> =
        exec::map(&starts, |(x, p)| trajectory(c, v, *x, *p, opts)).into_iter().flatten().collect();
    let (integral_drift, energy_drift) = if runs.is_empty() {
        (None, None)
    } else {
        (Some(runs.iter().map(|r| r.0).fold(0.0, f64::max)), Some(runs.iter().map(|r| r.1).fold(0.0, f64::max)))
    };
    FirstIntegralCheck { closedness_residual: closedness, integral_drift, energy_drift, trajectories: runs.len() }
}
