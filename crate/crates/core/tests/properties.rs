use killing_web::ckt::haantjes_at;
use killing_web::mat::{mat_vec4, mul4, transpose4, Vec4};
use killing_web::scalar::{int, rat, Rational};
use killing_web::tensor::action::{cayley, invariants, sphere_point};
use killing_web::tensor::{casimir, kt_at, ricci, so4_act, Act, Frame};
use num::Zero;
use proptest::prelude::*;

fn act() -> impl Strategy<Value = Act<Rational>> {
    prop::collection::vec(-9i64..=9, 20).prop_map(|v| Act::from_slots(&v.into_iter().map(int).collect::<Vec<_>>()))
}

fn frame() -> impl Strategy<Value = Frame<Rational>> {
    prop::array::uniform6((-6i64..=6, 1i64..=4)).prop_map(|s| cayley(&s.map(|(n, d)| rat(n, d))))
}

fn point() -> impl Strategy<Value = Vec4<Rational>> {
    prop::array::uniform3((-5i64..=5, 1i64..=3)).prop_map(|t| sphere_point(&t.map(|(n, d)| rat(n, d))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn killing_tensor_is_tangent(c in act(), x in prop::array::uniform4(-4i64..=4)) {
        let x = x.map(int);
        let k = kt_at(&c, &x);
        for i in 0..4 {
            let s = (0..4).fold(Rational::zero(), |acc, j| acc + &k[i][j] * &x[j]);
            prop_assert!(s.is_zero());
        }
    }

    #[test]
    fn action_is_equivariant(c in act(), f in frame(), x in point()) {
        let l = f.matrix();
        let lt = transpose4(l);
        let moved = so4_act(&c, &f);
        prop_assert_eq!(kt_at(&moved, &mat_vec4(l, &x)), mul4(&mul4(l, &kt_at(&c, &x)), &lt));
        prop_assert_eq!(ricci(&moved), mul4(&mul4(l, &ricci(&c)), &lt));
        prop_assert_eq!(invariants(&moved), invariants(&c));
    }

    #[test]
    fn haantjes_is_equivariant(c in act(), f in frame(), x in point()) {
        let l = f.matrix();
        let h = haantjes_at(&c, &x);
        let moved = haantjes_at(&so4_act(&c, &f), &mat_vec4(l, &x));
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let mut want = Rational::zero();
                    for a in 0..4 {
                        for b in 0..4 {
                            for d in 0..4 {
                                want += &l[i][a] * &l[j][b] * &l[k][d] * &h[a][b][d];
                            }
                        }
                    }
                    prop_assert_eq!(&moved[i][j][k], &want);
                    prop_assert_eq!(&h[i][j][k], &-h[i][k][j].clone());
                }
            }
        }
    }

    #[test]
    fn casimir_is_fixed(f in frame(), k in -7i64..=7) {
        let c = casimir(int(k));
        prop_assert_eq!(so4_act(&c, &f), c);
    }

    #[test]
    fn slots_round_trip(c in act()) {
        prop_assert_eq!(Act::from_slots(&c.slots()), c.clone());
        prop_assert_eq!(Act::from_pair_matrix(c.pair_matrix().clone()).unwrap(), c);
    }
}
