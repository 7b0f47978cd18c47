mod common;

use cvteleport::montecarlo::{mc_bk_average_fidelity, mc_channel_fidelity};
use cvteleport::teleport::optimal_resource;
use cvteleport::{avg_fidelity, tmsv, ResourceSpec, RngStream, SteeringDirection};

fn run_with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn nested_bk_average_matches_channel_fidelity() {
    let lambda = 0.2;
    let v = tmsv(0.5);
    let specs = [
        ResourceSpec::from_standard_form(
            v.a()[(0, 0)],
            v.b()[(0, 0)],
            v.c()[(1, 1)],
            1.0,
            SteeringDirection::BToA,
        )
        .unwrap(),
        optimal_resource(0.8, 0.4, SteeringDirection::BToA).unwrap(),
        optimal_resource(1.2, 0.6, SteeringDirection::AToB).unwrap(),
    ];
    for (i, spec) in specs.iter().enumerate() {
        let ch = spec.channel().unwrap();
        let exact = avg_fidelity(ch.tau(), ch.y(), lambda).unwrap();
        let est =
            mc_bk_average_fidelity(spec, lambda, 10_000, 100, &RngStream::new(500 + i as u64))
                .unwrap();
        assert!(
            est.within(exact, 4.0),
            "resource {i}: {} ± {} vs {exact}",
            est.mean,
            est.std_error
        );
    }
}

#[test]
fn identical_seeds_give_identical_estimates() {
    let a = mc_channel_fidelity(0.8, 0.5, 0.3, 20_000, &RngStream::new(9)).unwrap();
    let b = mc_channel_fidelity(0.8, 0.5, 0.3, 20_000, &RngStream::new(9)).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    let c = mc_channel_fidelity(0.8, 0.5, 0.3, 20_000, &RngStream::new(10)).unwrap();
    assert_ne!(a.mean, c.mean);
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let spec = optimal_resource(1.0, 0.4, SteeringDirection::BToA).unwrap();
    let reference = run_with_threads(1, || {
        (
            mc_channel_fidelity(1.0, 0.7, 0.2, 30_000, &RngStream::new(3)).unwrap(),
            mc_bk_average_fidelity(&spec, 0.2, 9_000, 3, &RngStream::new(3)).unwrap(),
        )
    });
    for threads in [2, 3, 8] {
        let other = run_with_threads(threads, || {
            (
                mc_channel_fidelity(1.0, 0.7, 0.2, 30_000, &RngStream::new(3)).unwrap(),
                mc_bk_average_fidelity(&spec, 0.2, 9_000, 3, &RngStream::new(3)).unwrap(),
            )
        });
        assert_eq!(reference, other, "{threads} threads");
    }
}

#[test]
fn standard_error_scales_as_inverse_sqrt_n() {
    let sizes: Vec<usize> = (0..5).map(|k| 10_000 << k).collect();
    let points: Vec<(f64, f64)> = sizes
        .iter()
        .map(|&n| {
            let est = mc_channel_fidelity(0.7, 0.6, 0.2, n, &RngStream::new(1234)).unwrap();
            ((n as f64).ln(), est.std_error.ln())
        })
        .collect();
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    assert!((slope + 0.5).abs() <= 0.05, "slope {slope}");
}

#[test]
fn noiseless_identity_is_exact() {
    let est = mc_channel_fidelity(1.0, 0.0, 0.2, 100, &RngStream::new(1)).unwrap();
    assert_eq!(est.mean, 1.0);
    assert_eq!(est.std_error, 0.0);
}
