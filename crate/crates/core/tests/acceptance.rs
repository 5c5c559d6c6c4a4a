//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use killing_web::ckt::{h_condition, haantjes_at, is_ckt, tsn_conditions, CktOptions};
use killing_web::frames::{essential_params, match_tensor, match_tensor_f64, Category, MatchOptions, WebClass};
use killing_web::linalg;
use killing_web::mat::{mul4, transpose4, Mat4, Vec4};
use killing_web::scalar::{int, rat, Rational};
use killing_web::separation::subfamily::relation_family;
use killing_web::separation::{pipeline, LinearForm, PipelineOptions, PipelineStatus, RationalPotential};
use killing_web::symmetry::{symmetry_algebra, symmetry_algebra_f64, web_category};
use killing_web::tensor::act::{kt_at, kt_gradient, ricci};
use killing_web::tensor::action::{
    invariants, permutation_frame, random_frame, random_rational_frame, random_sphere_point_rational,
};
use killing_web::tensor::poly::{kt_poly, poisson_bracket, quadratic_integral};
use killing_web::tensor::{casimir, so4_act, Act, KillingVectorParams};
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RELATIONS: [&str; 5] =
    ["C1212 = C3434", "C1313 = C2323", "C1414 = C2424", "C1323 = C1212 - C1313", "C1424 = C1414 - C1212"];

fn q(n: i64, d: i64) -> Rational {
    rat(n, d)
}

fn form(pairs: &[(&str, i64)]) -> BTreeMap<String, Rational> {
    pairs.iter().map(|(k, v)| (k.to_string(), int(*v))).collect()
}

fn normalize(f: &LinearForm) -> BTreeMap<String, Rational> {
    let mut m = BTreeMap::new();
    for (k, v) in f {
        *m.entry(k.clone()).or_insert_with(Rational::zero) += v.clone();
    }
    m.retain(|_, v| !v.is_zero());
    m
}

fn random_act(rng: &mut ChaCha8Rng) -> Act<Rational> {
    let v: Vec<Rational> = (0..20).map(|_| int(rng.random_range(-9..=9))).collect();
    Act::from_slots(&v)
}

fn all_permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
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

/// Ricci diagonals of the canonical forms.
fn canonical_ricci(web: WebClass, c: &[Rational]) -> [Rational; 4] {
    let c = |k: usize| c[k - 1].clone();
    let z = Rational::zero;
    let two = int(2);
    match web {
        WebClass::Spherical => [c(1) + c(2), c(1) + c(2), &two * c(2), z()],
        WebClass::Cylindrical => [c(1) + &two * c(2), c(1) + &two * c(2), &two * c(2) + c(3), &two * c(2) + c(3)],
        WebClass::EllipticCylindrical1 | WebClass::EllipticCylindrical2 => {
            [c(1) + c(2) + c(3), c(1) + c(2) + c(3), &two * c(2) + c(4), &two * c(3) + c(4)]
        }
        WebClass::Spheroelliptic => [c(1) + c(2), c(1) + c(3), c(2) + c(3), z()],
        WebClass::Ellipsoidal => [c(1) + c(2) + c(3), c(1) + c(4) + c(5), c(2) + c(4) + c(6), c(3) + c(5) + c(6)],
    }
}

/// Essential parameters of the canonical forms.
fn canonical_essential(web: WebClass, c: &[Rational]) -> Vec<(&'static str, Rational)> {
    let c = |k: usize| c[k - 1].clone();
    match web {
        WebClass::Spherical | WebClass::Cylindrical => vec![],
        WebClass::EllipticCylindrical1 => vec![("k^2", (c(4) - c(2)) / (c(4) - c(3)))],
        WebClass::EllipticCylindrical2 => vec![("k^2", (c(4) - c(3)) / (c(2) - c(3)))],
        WebClass::Spheroelliptic => vec![("k'^2", (c(2) - c(3)) / (c(1) - c(3)))],
        WebClass::Ellipsoidal => {
            let two = int(2);
            let d = c(1) * (c(2) - c(4)) + c(4) * (c(6) - c(2)) + c(5) * (c(4) - c(6));
            let a = c(1) * (c(2) - c(4)) + c(6) * (c(2) - c(3)) - c(2) * (c(3) + c(4)) + &two * c(3) * c(4);
            let b = c(2) * (c(1) - c(4)) + c(1) * (c(5) - c(4)) - c(3) * (c(1) + c(5)) + &two * c(3) * c(4);
            assert!(!d.is_zero());
            vec![("a", a / d.clone()), ("b", b / d)]
        }
    }
}

fn ellipsoidal_constraint(c: &[Rational]) -> Rational {
    let c = |k: usize| c[k - 1].clone();
    (c(3) + c(4)) * (c(1) * c(6) - c(2) * c(5))
        + (c(2) + c(5)) * (c(3) * c(4) - c(1) * c(6))
        + (c(1) + c(6)) * (c(2) * c(5) - c(3) * c(4))
}

/// Symmetry counts `(rotations, translations)` per web.
fn table_counts(web: WebClass) -> (usize, usize) {
    match web {
        WebClass::Cylindrical => (2, 0),
        WebClass::Spherical => (1, 1),
        WebClass::Spheroelliptic => (0, 1),
        WebClass::EllipticCylindrical1 | WebClass::EllipticCylindrical2 => (1, 0),
        WebClass::Ellipsoidal => (0, 0),
    }
}

/// Ellipsoidal parameters `c_ab = (b_a - b_b)/(a_a - a_b)`.
fn ellipsoidal(a: [i64; 4], b: [i64; 4]) -> Vec<Rational> {
    [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].iter().map(|&(i, j)| q(b[i] - b[j], a[i] - a[j])).collect()
}

fn parameter_sets(web: WebClass) -> Vec<Vec<Rational>> {
    let v = |s: &[(i64, i64)]| s.iter().map(|&(n, d)| q(n, d)).collect::<Vec<_>>();
    match web {
        WebClass::Spherical => vec![v(&[(5, 1), (2, 1)]), v(&[(3, 2), (7, 3)]), v(&[(-4, 1), (9, 5)])],
        WebClass::Cylindrical => {
            vec![v(&[(2, 1), (3, 1), (7, 1)]), v(&[(5, 2), (-1, 3), (4, 1)]), v(&[(13, 1), (6, 5), (2, 7)])]
        }
        WebClass::EllipticCylindrical1 => {
            vec![
                v(&[(1, 1), (4, 1), (2, 1), (6, 1)]),
                v(&[(3, 2), (9, 1), (5, 1), (11, 1)]),
                v(&[(-2, 3), (7, 2), (1, 2), (9, 2)]),
            ]
        }
        WebClass::EllipticCylindrical2 => {
            vec![
                v(&[(1, 1), (6, 1), (2, 1), (4, 1)]),
                v(&[(5, 3), (12, 1), (3, 1), (7, 1)]),
                v(&[(-1, 1), (11, 2), (1, 3), (5, 2)]),
            ]
        }
        WebClass::Spheroelliptic => {
            vec![v(&[(3, 1), (2, 1), (1, 1)]), v(&[(9, 2), (5, 3), (-1, 1)]), v(&[(7, 1), (6, 1), (1, 4)])]
        }
        WebClass::Ellipsoidal => vec![
            ellipsoidal([0, 1, 2, 5], [1, 4, -2, 3]),
            ellipsoidal([0, 3, 4, 7], [2, -1, 5, 0]),
            ellipsoidal([1, 2, 6, 8], [0, 3, 1, -4]),
        ],
    }
}

fn criterion_1() {
    let v = RationalPotential::parse("1/(x - y)^2").unwrap();
    let rel: Vec<String> = RELATIONS.iter().map(|s| s.to_string()).collect();
    let r = pipeline(&v, &PipelineOptions { relations: Some(rel), others_zero: true, ..Default::default() });
    assert_eq!(r.status, PipelineStatus::Ok, "{:?}", r.message);
    assert_eq!(r.category, Some(Category::I));
    let sig = r.signature.as_ref().unwrap();
    assert_eq!((sig.rotations, sig.translations), (2, 0));
    let fr = r.frame.as_ref().unwrap();
    assert_eq!(fr.web, WebClass::Cylindrical);

    let diag = form(&[("C1212", 1), ("C1313", 1), ("C1414", 1)]);
    let off = form(&[("C1414", 1), ("C1313", -1)]);
    let zero = BTreeMap::new();
    let z = form(&[("C1313", 2), ("C1212", 1)]);
    let w = form(&[("C1414", 2), ("C1212", 1)]);
    let expected = [
        [diag.clone(), off.clone(), zero.clone(), zero.clone()],
        [off, diag, zero.clone(), zero.clone()],
        [zero.clone(), zero.clone(), z.clone(), zero.clone()],
        [zero.clone(), zero.clone(), zero, w.clone()],
    ];
    let sym = r.ricci_symbolic.as_ref().unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(normalize(&sym[i][j]), expected[i][j], "Ricci entry ({i},{j})");
        }
    }
    let canon = r.canonical_ricci_symbolic.as_ref().unwrap();
    let want = [z.clone(), z, w.clone(), w];
    for k in 0..4 {
        assert_eq!(normalize(&canon[k]), want[k], "canonical entry {k}");
    }

    // W^T R W / |w_k|^2 on independent family members.
    let ex = fr.exact_frame.as_ref().expect("rational frame");
    let wm = ex.direction_matrix();
    let n = ex.norms_squared();
    for (a, b, c) in [(11, 7, 5), (2, -3, 13), (1, 0, 0), (0, 1, 0), (0, 0, 1)] {
        let member = killing_web::tensor::act_from_components(&[
            ([1, 2, 1, 2], int(a)),
            ([3, 4, 3, 4], int(a)),
            ([1, 3, 1, 3], int(b)),
            ([2, 3, 2, 3], int(b)),
            ([1, 4, 1, 4], int(c)),
            ([2, 4, 2, 4], int(c)),
            ([1, 3, 2, 3], int(a - b)),
            ([1, 4, 2, 4], int(c - a)),
        ])
        .unwrap();
        let d = mul4(&mul4(&transpose4(&wm), &ricci(&member)), &wm);
        let expect = [int(a + 2 * b), int(a + 2 * b), int(a + 2 * c), int(a + 2 * c)];
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { expect[i].clone() * n[i].clone() } else { Rational::zero() };
                assert_eq!(d[i][j], e, "member ({a},{b},{c}) entry ({i},{j})");
            }
        }
    }

    // Displayed frame; ours must differ by a rotation or reflection inside each eigenplane.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let lp: Mat4<f64> = [[-s, 0.0, 0.0, s], [s, 0.0, 0.0, s], [0.0, -1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]];
    let coords = r.coordinates.as_ref().unwrap();
    assert_eq!(coords.web, WebClass::Cylindrical);
    let m = mul4(&transpose4(&lp), coords.frame.matrix());
    for i in 0..4 {
        for j in 0..4 {
            if i / 2 != j / 2 {
                assert!(m[i][j].abs() < 1e-12, "cross-block entry ({i},{j}) = {}", m[i][j]);
            }
        }
    }
    for b in [0, 2] {
        let det = m[b][b] * m[b + 1][b + 1] - m[b][b + 1] * m[b + 1][b];
        let c0 = m[b][b].powi(2) + m[b + 1][b].powi(2);
        let c1 = m[b][b + 1].powi(2) + m[b + 1][b + 1].powi(2);
        assert!((det.abs() - 1.0).abs() < 1e-12 && (c0 - 1.0).abs() < 1e-12 && (c1 - 1.0).abs() < 1e-12);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let [t, u, vv]: [f64; 3] = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
        let x = coords.point(&[t, u, vv]);
        assert!((x.iter().map(|e| e * e).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

fn displayed_field(c3: i64, c6: i64) -> Vec<Rational> {
    let mut m: Mat4<Rational> = std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero()));
    // (c3 z + c6 w, c6 w - c3 z, c3 y - c3 x, -c6 y - c6 x)
    m[0][2] = int(c3);
    m[0][3] = int(c6);
    m[1][2] = int(-c3);
    m[1][3] = int(c6);
    m[2][0] = int(-c3);
    m[2][1] = int(c3);
    m[3][0] = int(-c6);
    m[3][1] = int(-c6);
    let zero: Vec4<Rational> = std::array::from_fn(|_| Rational::zero());
    KillingVectorParams::from_linear_field(zero, m).unwrap().coords()
}

fn criterion_2() {
    let rel: Vec<String> = RELATIONS.iter().map(|s| s.to_string()).collect();
    let basis = relation_family(&rel, true).unwrap();
    assert_eq!(basis.len(), 3);
    let expected = [displayed_field(1, 0), displayed_field(0, 1)];
    for coeffs in [[3, 5, 11], [-2, 7, 1], [13, 1, -4]] {
        let slots: Vec<Rational> = (0..20)
            .map(|s| (0..3).fold(Rational::zero(), |acc, k| acc + int(coeffs[k]) * basis[k][s].clone()))
            .collect();
        let c = Act::from_slots(&slots);
        let sig = symmetry_algebra(&c).unwrap();
        assert_eq!(sig.counts(), (2, 0), "{coeffs:?}");
        let ours: Vec<Vec<Rational>> = sig.generators.iter().map(|g| g.kv.coords()).collect();
        let mut rr = linalg::span_rref(&ours, 10);
        for p in &expected {
            assert!(rr.contains(p), "displayed generator outside the algebra");
        }
        for p in &expected {
            rr.push(p.clone());
        }
        assert_eq!(rr.rank(), 2);
        assert!(linalg::same_span(&ours, &expected, 10));
    }
}

fn criterion_3() {
    for web in WebClass::ALL {
        for p in parameter_sets(web) {
            if web == WebClass::Ellipsoidal {
                assert!(ellipsoidal_constraint(&p).is_zero());
            }
            let c = web.form().act(&p);
            assert!(is_ckt(&c, &CktOptions::default()).is_ckt, "{web} {p:?}");
            let r = ricci(&c);
            let want = canonical_ricci(web, &p);
            for i in 0..4 {
                for j in 0..4 {
                    let e = if i == j { want[i].clone() } else { Rational::zero() };
                    assert_eq!(r[i][j], e, "{web} Ricci ({i},{j})");
                }
            }
            let sig = symmetry_algebra(&c).unwrap();
            assert_eq!(sig.counts(), table_counts(web), "{web} {p:?}");
            let got = essential_params(web, &p, 0.0).unwrap();
            let want = canonical_essential(web, &p);
            assert_eq!(got.values.len(), want.len());
            for (name, v) in want {
                assert_eq!(got.get(name), Some(&v), "{web} {name}");
            }
        }
    }
    let spot = essential_params(WebClass::Spheroelliptic, &[int(3), int(2), int(1)], 0.0).unwrap();
    assert_eq!(spot.get("k'^2"), Some(&q(1, 2)));
}

fn criterion_4() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..100 {
        let web = WebClass::ALL[k % 6];
        let sets = parameter_sets(web);
        let c = so4_act(&web.form().act(&sets[(k / 6) % 3]), &random_rational_frame(&mut rng));
        assert_eq!(tsn_conditions(&c), (true, true, true), "{web} trial {k}");
        assert!(h_condition(&c), "{web} trial {k}");
    }
    let failures = (0..100)
        .filter(|_| {
            let c = random_act(&mut rng);
            tsn_conditions(&c) != (true, true, true) || !h_condition(&c)
        })
        .count();
    assert!(failures >= 95, "only {failures} random tensors failed");
}

/// Haantjes tensor from the raw definition, over every index triple.
fn haantjes_reference(c: &Act<Rational>, x: &Vec4<Rational>) -> [[[Rational; 4]; 4]; 4] {
    let zero3 = || -> [[[Rational; 4]; 4]; 4] {
        std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero())))
    };
    let mut k: Mat4<Rational> = std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero()));
    let mut dk = zero3();
    for i in 0..4 {
        for j in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    k[i][j] += int(4) * c.get(i, a, j, b) * &x[a] * &x[b];
                    dk[a][i][j] += int(4) * (c.get(i, a, j, b) + c.get(i, b, j, a)) * &x[b];
                }
            }
        }
    }
    let mut n = zero3();
    for i in 0..4 {
        for j in 0..4 {
            for m in 0..4 {
                for l in 0..4 {
                    n[i][j][m] +=
                        &k[l][j] * &dk[l][i][m] - &k[l][m] * &dk[l][i][j] + &k[i][l] * (&dk[m][l][j] - &dk[j][l][m]);
                }
            }
        }
    }
    let mut h = zero3();
    for i in 0..4 {
        for j in 0..4 {
            for m in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        h[i][j][m] += &n[i][a][b] * &k[a][j] * &k[b][m]
                            - &k[i][a] * &n[a][j][b] * &k[b][m]
                            - &k[i][a] * &n[a][b][m] * &k[b][j]
                            + &k[i][a] * &k[a][b] * &n[b][j][m];
                    }
                }
            }
        }
    }
    h
}

fn criterion_5() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tensors: Vec<Act<Rational>> = WebClass::ALL.iter().map(|w| w.form().act(&parameter_sets(*w)[0])).collect();
    tensors.extend((0..4).map(|_| random_act(&mut rng)));
    let lattice = killing_web::ckt::conditions::lattice(3);
    for c in &tensors {
        for p in &lattice {
            let x: Vec4<Rational> = p.map(int);
            let k = kt_at(c, &x);
            for i in 0..4 {
                let s = (0..4).fold(Rational::zero(), |acc, j| acc + &x[j] * &k[i][j]);
                assert!(s.is_zero(), "x^j K_ij at {p:?}");
            }
            let dk = kt_gradient(c, &x);
            for a in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        assert!((&dk[a][i][j] + &dk[i][j][a] + &dk[j][a][i]).is_zero(), "Killing equation at {p:?}");
                    }
                }
            }
        }
        let kp = kt_poly(c);
        for a in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    let s = kp[i][j].derivative(a).add(&kp[j][a].derivative(i)).add(&kp[a][i].derivative(j));
                    assert!(s.is_zero(), "symbolic Killing equation");
                }
            }
        }
    }
    let cas = quadratic_integral(&casimir(int(8)));
    for c in &tensors {
        assert!(poisson_bracket(&quadratic_integral(c), &cas).is_zero());
    }
    for c in &tensors {
        for _ in 0..3 {
            let x = random_sphere_point_rational(&mut rng);
            let h = haantjes_reference(c, &x);
            let lib = haantjes_at(c, &x);
            for i in 0..4 {
                for j in 0..4 {
                    for m in 0..4 {
                        assert_eq!(h[i][j][m], -h[i][m][j].clone(), "antisymmetry");
                        assert_eq!(lib[i][j][m], h[i][j][m], "library Haantjes");
                    }
                }
            }
        }
    }
    for c in &tensors {
        for _ in 0..3 {
            let f = random_rational_frame(&mut rng);
            let l = f.matrix();
            assert_eq!(ricci(&so4_act(c, &f)), mul4(&mul4(l, &ricci(c)), &transpose4(l)));
        }
    }
}

/// `fit` describes the same tensor as `orig` after an axis relabeling.
fn same_up_to_relabeling(web: WebClass, orig: &[f64], fit: &[f64]) -> bool {
    let a = web.form().act(orig);
    let b = web.form().act(fit);
    let scale = a.frobenius();
    all_permutations().into_iter().any(|p| {
        let t = so4_act(&a, &permutation_frame::<f64>(p));
        t.slots().iter().zip(b.slots()).all(|(x, y)| (x - y).abs() <= 1e-8 * scale)
    })
}

fn in_unit_interval(v: f64) -> bool {
    v > 0.0 && v < 1.0
}

fn criterion_6() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = MatchOptions::default();
    let mut trials = 0;
    for web in WebClass::ALL {
        for k in 0..5 {
            let p: Vec<f64> = parameter_sets(web)[k % 3].iter().map(killing_web::scalar::rational_to_f64).collect();
            let c = so4_act(&web.form().act(&p), &random_frame(&mut rng));
            let sig = symmetry_algebra_f64(&c, 1e-9).unwrap();
            let (category, _) = web_category(sig.n_rotations, sig.n_translations).unwrap();
            assert_eq!(category, web.category(), "{web}");
            let r = match_tensor_f64(&c, Some(category), &opts).unwrap();
            assert_eq!(r.web, web, "trial {k}");
            assert!(r.residual <= 1e-8, "{web} residual {}", r.residual);
            assert!(r.casimir.abs() <= 1e-8 * c.frobenius());
            assert!(same_up_to_relabeling(web, &p, &r.params), "{web}: {p:?} vs {:?}", r.params);
            if category == Category::IV {
                let f = &r.params;
                let k1 = (f[3] - f[1]) / (f[3] - f[2]);
                let k2 = (f[3] - f[2]) / (f[1] - f[2]);
                if in_unit_interval(k1) != in_unit_interval(k2) {
                    assert!(r.ambiguous.is_empty());
                    let expect = if in_unit_interval(k1) {
                        WebClass::EllipticCylindrical1
                    } else {
                        WebClass::EllipticCylindrical2
                    };
                    assert_eq!(r.web, expect);
                }
            }
            trials += 1;
        }
    }
    assert_eq!(trials, 30);
    // k^2 = 1 for the first type and 0 for the second.
    let boundary = WebClass::EllipticCylindrical1.form().act(&[int(2), int(5), int(5), int(7)]);
    let r = match_tensor(&boundary, Some(Category::IV), &opts).unwrap();
    assert_eq!(r.ambiguous.len(), 2);
}

fn criterion_7() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3 {
        let c = random_act(&mut rng);
        let base = invariants(&c);
        for _ in 0..20 {
            assert_eq!(invariants(&so4_act(&c, &random_rational_frame(&mut rng))), base);
        }
        let cf = c.to_f64();
        let basef = invariants(&cf);
        let m = nalgebra::Matrix6::from_fn(|a, b| cf.pair_matrix()[a][b]);
        let eig = m.symmetric_eigen().eigenvalues;
        for _ in 0..20 {
            let got = invariants(&so4_act(&cf, &random_frame(&mut rng)));
            for k in 0..14 {
                let scale: f64 = eig.iter().map(|l| l.abs().powi(k as i32 + 1)).sum();
                let dev = (got[k] - basef[k]).abs() / scale;
                assert!(dev <= 1e-10, "invariant {} deviates by {dev:e}", k + 1);
            }
        }
    }
}

fn main() {
    let criteria: [(&str, fn(), Duration); 7] = [
        ("worked example end to end", criterion_1, Duration::from_secs(10)),
        ("symmetry family of the worked example", criterion_2, Duration::from_secs(5)),
        ("canonical form regression", criterion_3, Duration::from_secs(60)),
        ("TSN conditions imply H", criterion_4, Duration::from_secs(300)),
        ("exact structural identities", criterion_5, Duration::from_secs(600)),
        ("round-trip framing", criterion_6, Duration::from_secs(600)),
        ("invariant stability", criterion_7, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (n, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        let took = start.elapsed();
        let pass = outcome.is_ok() && took < *limit;
        if !pass {
            failed += 1;
        }
        let note =
            if outcome.is_ok() && !pass { format!(" over the {} s limit", limit.as_secs()) } else { String::new() };
        println!(
            "criterion {}: {} ({:.2} s) {name}{note}",
            n + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
