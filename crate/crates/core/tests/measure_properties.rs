//! Measure-level properties: embeddings, pushforwards, invariance on the torus.

use delayid::dynamics::{simulate, FlowIntegrator, Lorenz63, Lorenz63Field, Method, TorusRotation};
use delayid::measure::{
    delay_embed, delay_embed_ordered, observe, pushforward, state_measure, CoordOrder, DelayParams, EmpiricalMeasure,
    Observable, TimeSeries,
};
use delayid::metrics::{energy_mmd, MetricSpec};
use proptest::prelude::*;
use rand::Rng;

fn config() -> ProptestConfig {
    ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(48) }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn simultaneous_reversal_leaves_metrics_unchanged(
        a in prop::collection::vec(-3.0f64..3.0, 20..120),
        b in prop::collection::vec(-3.0f64..3.0, 20..120),
        m in 2usize..5,
        tau_bar in 1usize..4,
    ) {
        let params = DelayParams::new(m, tau_bar).unwrap();
        let sa = TimeSeries::scalar(a, 1.0, 0.0).unwrap();
        let sb = TimeSeries::scalar(b, 1.0, 0.0).unwrap();
        let (pa, pb) = (delay_embed(&sa, params).unwrap(), delay_embed(&sb, params).unwrap());
        let qa = delay_embed_ordered(&sa, params, CoordOrder::Ascending).unwrap();
        let qb = delay_embed_ordered(&sb, params, CoordOrder::Ascending).unwrap();
        let rev = pa.reversed_coordinates();
        prop_assert_eq!(qa.flat(), rev.flat());
        for metric in [MetricSpec::energy_mmd(), MetricSpec::sliced_wasserstein(25, 2), MetricSpec::sliced_wasserstein(40, 7)] {
            let d1 = metric.distance(&pa, &pb).unwrap();
            let d2 = metric.distance(&qa, &qb).unwrap();
            prop_assert!((d1 - d2).abs() < 1e-12, "{:?}: {} vs {}", metric.kind, d1, d2);
        }
    }

    #[test]
    fn pushforward_preserves_weights_and_count(
        pts in prop::collection::vec(-10.0f64..10.0, 2..200),
        raw in prop::collection::vec(0.01f64..1.0, 100),
    ) {
        let dim = 2;
        let pts = pts[..pts.len() / dim * dim].to_vec();
        let n = pts.len() / dim;
        let total: f64 = raw[..n].iter().sum();
        let mut w: Vec<f64> = raw[..n].iter().map(|v| v / total).collect();
        let head: f64 = w[..n - 1].iter().sum();
        w[n - 1] = 1.0 - head;
        let mu = EmpiricalMeasure::weighted_flat(dim, pts, w.clone()).unwrap();
        let pushed = pushforward(&mu, |x| Ok(vec![x[0] * x[1], x[0].sin(), 1.0])).unwrap();
        prop_assert_eq!(pushed.len(), n);
        prop_assert_eq!(pushed.weights(), &w[..]);
        prop_assert!((pushed.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

fn torus_orbit(alpha: f64, beta: f64, x0: [f64; 2], n: usize) -> Vec<Vec<f64>> {
    simulate(&TorusRotation::new(alpha, beta).unwrap(), &x0, n - 1).unwrap()
}

#[test]
fn torus_orbit_measure_approaches_uniform() {
    let (alpha, beta) = (2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0);
    let sizes = [1000, 2000, 4000, 8000];
    let mut mean = vec![0.0; sizes.len()];
    for seed in 0..5u64 {
        let mut r = delayid::rng::stream(seed, 0);
        let x0 = [r.random::<f64>(), r.random::<f64>()];
        for (k, &n) in sizes.iter().enumerate() {
            let orbit = state_measure(&torus_orbit(alpha, beta, x0, n), 0).unwrap();
            let iid: Vec<f64> = (0..2 * n).map(|_| r.random::<f64>()).collect();
            let iid = EmpiricalMeasure::uniform_flat(2, iid).unwrap();
            mean[k] += energy_mmd(&orbit, &iid).unwrap() / 5.0;
        }
    }
    assert!(mean.windows(2).all(|w| w[1] < w[0]), "{mean:?}");
}

#[test]
fn shifted_delay_measure_matches_unshifted() {
    let n = 10_000;
    let params = DelayParams::new(2, 1).unwrap();
    let obs = Observable::coordinate(0);
    let y = observe(&torus_orbit(2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0, [0.0, 0.0], n), &obs, 1.0).unwrap();
    let head = delay_embed(&y.slice(0, n - 1).unwrap(), params).unwrap();
    let tail = delay_embed(&y.slice(1, n).unwrap(), params).unwrap();
    let other = observe(&torus_orbit(0.6180339887498949, 0.14159265358979312, [0.0, 0.0], n), &obs, 1.0).unwrap();
    let other = delay_embed(&other, params).unwrap();
    let same = energy_mmd(&head, &tail).unwrap();
    let different = energy_mmd(&head, &other).unwrap();
    assert!(same < different, "{same} vs {different}");
}

#[test]
fn linear_observable_sums_lorenz_coordinates() {
    let model = Lorenz63::new(Lorenz63Field::default(), 1.0, FlowIntegrator::new(Method::Rk4, 0.01, 10)).unwrap();
    let traj = simulate(&model, &[1.0, 1.0, 1.0], 200).unwrap();
    let y = observe(&traj, &Observable::Linear { weights: vec![1.0, 1.0, 1.0] }, 0.1).unwrap();
    assert_eq!(y.len(), traj.len());
    for (i, x) in traj.iter().enumerate() {
        assert_eq!(y.sample(i)[0], x[0] + x[1] + x[2]);
    }
}

#[test]
fn identical_runs_are_bit_identical() {
    let model = Lorenz63::new(Lorenz63Field::default(), 1.0, FlowIntegrator::new(Method::Rk4, 0.01, 10)).unwrap();
    let a = simulate(&model, &[1.0, 2.0, 3.0], 500).unwrap();
    let b = simulate(&model, &[1.0, 2.0, 3.0], 500).unwrap();
    assert!(a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| x.to_bits() == y.to_bits()));
}
