use killing_web::ckt::{is_ckt, CktOptions};
use killing_web::error::Error;
use killing_web::frames::WebClass;
use killing_web::mat::Vec4;
use killing_web::scalar::{int, Rational};
use killing_web::separation::compat;
use killing_web::separation::*;
use killing_web::tensor::action::{random_frame, random_rational_frame};
use killing_web::tensor::{act_from_components, casimir, kt_at, so4_act, Act};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn difference() -> RationalPotential {
    RationalPotential::parse("1/(x - y)^2").unwrap()
}

fn family(a: i64, b: i64, c: i64, mirrored: bool) -> Act<Rational> {
    let (s, t) = if mirrored { (b - a, a - c) } else { (a - b, c - a) };
    act_from_components(&[
        ([1, 2, 1, 2], int(a)),
        ([3, 4, 3, 4], int(a)),
        ([1, 3, 1, 3], int(b)),
        ([2, 3, 2, 3], int(b)),
        ([1, 4, 1, 4], int(c)),
        ([2, 4, 2, 4], int(c)),
        ([1, 3, 2, 3], int(s)),
        ([1, 4, 2, 4], int(t)),
    ])
    .unwrap()
}

const RELATIONS: [&str; 5] =
    ["C1212 = C3434", "C1313 = C2323", "C1414 = C2424", "C1323 = C1212 - C1313", "C1424 = C1414 - C1212"];

fn relations(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

#[test]
fn difference_potential_space() {
    let s = compatibility_constraints_exact(&difference(), 64, 0).unwrap();
    assert_eq!(s.dimension, 12);
    assert_eq!(s.contains_exact(&casimir(int(1))), Some(true));
    for (a, b, c) in [(1, 0, 0), (0, 1, 0), (0, 0, 1)] {
        assert_eq!(s.contains_exact(&family(a, b, c, false)), Some(true));
    }
    // Both sign choices of the two off-diagonal relations are compatible.
    assert_eq!(s.contains_exact(&family(11, 7, 5, true)), Some(true));
    assert_eq!(s.contains_exact(&outsider()), Some(false));
}

fn outsider() -> Act<Rational> {
    act_from_components(&[([1, 2, 1, 2], int(3)), ([1, 2, 3, 4], int(1)), ([1, 3, 1, 4], int(2))]).unwrap()
}

#[test]
fn float_space_agrees_with_exact() {
    let v = difference();
    let exact = compatibility_constraints_exact(&v, 64, 0).unwrap();
    let float = compatibility_constraints_f64(&v, 64, 3).unwrap();
    assert_eq!(float.dimension, exact.dimension);
    assert!(float.sample_residual <= 1e-7, "{}", float.sample_residual);
    let q = float.orthonormal();
    for b in exact.basis.iter() {
        let v = compat::pair_vector(b);
        let r = &v - &q * (q.transpose() * &v);
        assert!(r.norm() <= 1e-8 * v.norm());
    }
}

#[test]
fn black_box_potential() {
    let v = FnPotential::new(
        "1/(x-y)^2",
        |x: &Vec4<f64>| 1.0 / (x[0] - x[1]).powi(2),
        |x: &Vec4<f64>| {
            let d = -2.0 / (x[0] - x[1]).powi(3);
            [d, -d, 0.0, 0.0]
        },
    );
    let s = compatibility_constraints(&v, 64, 1, true).unwrap();
    assert!(!s.exact);
    assert_eq!(s.dimension, 12);
}

#[test]
fn constant_potential() {
    let v = RationalPotential::parse("3/2").unwrap();
    let s = compatibility_constraints_exact(&v, 60, 0).unwrap();
    assert_eq!(s.dimension, 20);
    let r = pipeline(&v, &PipelineOptions::default());
    assert_eq!(r.status, PipelineStatus::MultipleWebs);
    let c = family(11, 7, 5, false).to_f64();
    let fi = first_integral_check(&c, &v, &IntegralOptions::default());
    assert_eq!(fi.closedness_residual, 0.0);
    assert!(fi.integral_drift.unwrap() < 1e-9);
}

fn space_from(acts: Vec<Act<Rational>>) -> CompatibleSpace {
    CompatibleSpace {
        basis: acts.iter().map(|a| a.to_f64()).collect(),
        dimension: acts.len(),
        exact_basis: Some(acts),
        sample_residual: 0.0,
        samples: 0,
        exact: true,
    }
}

#[test]
fn casimir_alone_has_no_ckt() {
    let s = space_from(vec![casimir(int(8))]);
    let opts = SubfamilyOptions { starts: 4, ..Default::default() };
    assert!(matches!(ckt_subfamily(&s, &opts), Err(Error::NotFound(_))));
}

#[test]
fn canonical_form_plus_casimir_is_generic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_rational_frame(&mut rng);
    let c = so4_act(&WebClass::Cylindrical.form().act(&[int(2), int(3), int(7)]), &f);
    let s = space_from(vec![c, casimir(int(8))]);
    let fam = ckt_subfamily(&s, &SubfamilyOptions::default()).unwrap();
    assert_eq!(fam.source, SubfamilySource::Generic);
    assert!(is_ckt(fam.exact_witness.as_ref().unwrap(), &CktOptions::default()).is_ckt);
}

#[test]
fn relation_signs_fix_the_ricci_off_diagonal() {
    let v = difference();
    let printed = relations(&[
        "C1212 = C3434",
        "C1313 = C2323",
        "C1414 = C2424",
        "C1323 = C1313 - C1212",
        "C1424 = C1212 - C1414",
    ]);
    let off = |rel: Vec<String>| {
        let r = pipeline(&v, &PipelineOptions { relations: Some(rel), others_zero: true, ..Default::default() });
        assert_eq!(r.status, PipelineStatus::Ok, "{:?}", r.message);
        let fam = r.subfamily.unwrap();
        assert_eq!(fam.parameters, vec!["C1212", "C1313", "C1414"]);
        format_linear_form(&r.ricci_symbolic.unwrap()[0][1])
    };
    assert_eq!(off(relations(&RELATIONS)), "-C1313 + C1414");
    assert_eq!(off(printed), "C1313 - C1414");
}

#[test]
fn relations_outside_the_space_are_rejected() {
    let v = difference();
    let s = compatibility_constraints_exact(&v, 64, 0).unwrap();
    let bad = relations(&["C1212 = C3434", "C1234 = C1212"]);
    let err = subfamily_from_relations(&s, &bad, true, &SubfamilyOptions::default()).unwrap_err();
    assert!(matches!(err, Error::NotFound(_)));
}

#[test]
fn search_without_relations_finds_a_ckt() {
    let v = difference();
    let r = pipeline(&v, &PipelineOptions::default());
    let fam = r.subfamily.as_ref().unwrap();
    assert!(fam.verdict.is_ckt);
    assert!(matches!(r.status, PipelineStatus::Ok | PipelineStatus::UnsupportedWeb), "{:?}", r.status);
    assert!(r.first_integral.unwrap().closedness_residual < 1e-8);
}

#[test]
fn generic_quartic_has_no_ckt() {
    let v = RationalPotential::parse("x^4 + 2*x*y^3 - 3*y^2*z*w + 5*z^3*x - 7*w^4 + x*y*z*w + 11*x^2*z^2").unwrap();
    let s = compatibility_constraints_exact(&v, 64, 0).unwrap();
    assert_eq!(s.dimension, 1);
    let r = pipeline(
        &v,
        &PipelineOptions { subfamily: SubfamilyOptions { starts: 4, ..Default::default() }, ..Default::default() },
    );
    assert_eq!(r.status, PipelineStatus::NotFound);
}

#[test]
fn coordinates_land_on_sphere_and_separate() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (web, params) in [(WebClass::Cylindrical, vec![2.0, 3.0, 7.0]), (WebClass::Spherical, vec![2.0, 3.0, 7.0])] {
        let params = &params[..web.form().n_params()];
        let frame = random_frame(&mut rng);
        let c = so4_act(&web.form().act(params), &frame);
        let map = separable_coordinates(web, &frame, None).unwrap();
        for _ in 0..100 {
            let u: [f64; 3] = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
            let x = map.point(&u);
            assert!((x.iter().map(|e| e * e).sum::<f64>() - 1.0).abs() < 1e-12);
        }
        for _ in 0..20 {
            let u: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.2..1.3));
            let x = map.point(&u);
            let k = kt_at(&c, &x);
            let t = map.tangents(&u);
            for a in 0..3 {
                for b in 0..3 {
                    if a != b {
                        let v: f64 = (0..4).map(|i| (0..4).map(|j| t[a][i] * k[i][j] * t[b][j]).sum::<f64>()).sum();
                        assert!(v.abs() < 1e-8, "{web} {a} {b} {v}");
                    }
                }
            }
        }
    }
}

#[test]
fn other_webs_are_not_parametrized() {
    let f = killing_web::tensor::Frame::identity();
    assert!(matches!(separable_coordinates(WebClass::Ellipsoidal, &f, None), Err(Error::UnsupportedWeb(_))));
    assert!(matches!(separable_coordinates(WebClass::Spheroelliptic, &f, None), Err(Error::UnsupportedWeb(_))));
}

#[test]
fn cylindrical_parametrization_reproduces_displayed_coordinates() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let lam = [[-s, 0.0, 0.0, s], [s, 0.0, 0.0, s], [0.0, -1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]];
    let frame = killing_web::tensor::Frame::new_with_tol(lam, 1e-12).unwrap();
    let map = separable_coordinates(WebClass::Cylindrical, &frame, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let [t, u, v]: [f64; 3] = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
        let want = [
            -s * t.cos() * u.cos() + s * t.sin() * v.sin(),
            s * t.cos() * u.cos() + s * t.sin() * v.sin(),
            -t.cos() * u.sin(),
            t.sin() * v.cos(),
        ];
        let got = map.point(&[t, u, v]);
        for i in 0..4 {
            assert!((got[i] - want[i]).abs() < 1e-14);
        }
    }
}

#[test]
fn first_integral_detects_incompatible_tensor() {
    let v = difference();
    let good = family(11, 7, 5, false).to_f64();
    let bad = outsider().to_f64();
    let opts = IntegralOptions::default();
    let g = first_integral_check(&good, &v, &opts);
    let b = first_integral_check(&bad, &v, &opts);
    assert!(g.closedness_residual < 1e-10 && g.integral_drift.unwrap() < 1e-7, "{g:?}");
    assert!(b.closedness_residual > 1e-3 && b.integral_drift.unwrap() > 1e-4, "{b:?}");
    let shifted = good.add(&casimir(3.0));
    let h = first_integral_check(&shifted, &v, &opts);
    assert!(h.closedness_residual < 1e-10);
}

#[test]
fn relabelled_potential_gives_the_same_web() {
    // The even permutation (x, y, z, w) -> (z, w, x, y).
    let v = RationalPotential::parse("1/(z - w)^2").unwrap();
    let rel = relations(&[
        "C3434 = C1212",
        "C3131 = C4141",
        "C3232 = C4242",
        "C3141 = C3434 - C3131",
        "C3242 = C3232 - C3434",
    ]);
    let r = pipeline(&v, &PipelineOptions { relations: Some(rel), others_zero: true, ..Default::default() });
    assert_eq!(r.status, PipelineStatus::Ok, "{:?}", r.message);
    let base = pipeline(
        &difference(),
        &PipelineOptions { relations: Some(relations(&RELATIONS)), others_zero: true, ..Default::default() },
    );
    let (f, g) = (r.frame.unwrap(), base.frame.unwrap());
    assert_eq!(f.web, g.web);
    assert_eq!(f.params_exact, g.params_exact);
}
