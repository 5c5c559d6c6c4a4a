//! Default pool against a single worker on the sampling-heavy kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use killing_web::ckt::{h_condition, is_ckt, tsn_conditions, CktOptions};
use killing_web::exec;
use killing_web::frames::WebClass;
use killing_web::scalar::int;
use killing_web::separation::{compatibility_constraints_exact, compatibility_constraints_f64, RationalPotential};
use killing_web::tensor::action::random_rational_frame;
use killing_web::tensor::so4_act;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kernels(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let tensor =
        so4_act(&WebClass::Cylindrical.form().act(&[int(2), int(3), int(7)]), &random_rational_frame(&mut rng));
    let tensor_f = tensor.to_f64();
    let potential = RationalPotential::parse("1/(x - y)^2").unwrap();
    let opts = CktOptions::default();

    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for mode in ["pool", "single"] {
        let run = |f: &(dyn Fn() + Sync)| {
            if mode == "single" {
                exec::sequential(f)
            } else {
                f()
            }
        };
        group.bench_function(BenchmarkId::new("h_condition", mode), |b| {
            b.iter(|| run(&|| assert!(h_condition(&tensor))))
        });
        group.bench_function(BenchmarkId::new("tsn_conditions", mode), |b| {
            b.iter(|| run(&|| assert_eq!(tsn_conditions(&tensor), (true, true, true))))
        });
        group.bench_function(BenchmarkId::new("is_ckt_f64", mode), |b| {
            b.iter(|| run(&|| assert!(killing_web::ckt::is_ckt_f64(&tensor_f, &opts).is_ckt)))
        });
        group.bench_function(BenchmarkId::new("is_ckt_exact", mode), |b| {
            b.iter(|| run(&|| assert!(is_ckt(&tensor, &opts).is_ckt)))
        });
        group.bench_function(BenchmarkId::new("compat_exact", mode), |b| {
            b.iter(|| run(&|| assert_eq!(compatibility_constraints_exact(&potential, 64, 0).unwrap().dimension, 12)))
        });
        group.bench_function(BenchmarkId::new("compat_f64", mode), |b| {
            b.iter(|| run(&|| assert_eq!(compatibility_constraints_f64(&potential, 64, 0).unwrap().dimension, 12)))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
