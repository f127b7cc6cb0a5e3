//! Objective and optimizer properties on small systems.

use delayid::dynamics::{simulate, FlowIntegrator, Lorenz63Field, Method};
use delayid::identify::{
    grid_1d, multi_start, nelder_mead, product_grid, scan_landscape, self_distance_floor, ModelFamily,
    NelderMeadOptions, Objective, ObjectiveKind, ObjectiveSpec, ParamBox, DEFAULT_PENALTY,
};
use delayid::measure::{delay_embed_ordered, observe, state_measure, CoordOrder, DelayParams, Observable, TimeSeries};
use delayid::metrics::MetricSpec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(40) })]

    #[test]
    fn best_vertex_never_gets_worse(c in prop::collection::vec(-2.0f64..2.0, 3), w in 0.5f64..8.0, start in prop::collection::vec(-3.0f64..3.0, 3)) {
        let f = |x: &[f64]| Ok(x.iter().zip(&c).map(|(a, b)| (a - b).powi(2) - 0.3 * (w * (a - b)).cos()).sum::<f64>());
        let bounds = ParamBox::new(vec![-3.0; 3], vec![3.0; 3]).unwrap();
        let r = nelder_mead(f, &start, &bounds, &NelderMeadOptions { max_iter: 200, ..Default::default() }).unwrap();
        prop_assert!(r.best_history.windows(2).all(|p| p[1] <= p[0]));
        let min_trace = r.trace.iter().map(|e| e.loss).fold(f64::INFINITY, f64::min);
        prop_assert!((r.loss_star - min_trace).abs() <= 1e-15);
    }
}

fn lorenz_family(free: Vec<usize>) -> ModelFamily {
    ModelFamily::lorenz(Lorenz63Field::default(), 1.0, FlowIntegrator::new(Method::Euler, 0.01, 1), free)
}

fn lorenz_states(n: usize, x0: &[f64]) -> Vec<Vec<f64>> {
    let model = lorenz_family(vec![3]).build(&[1.0]).unwrap();
    simulate(model.as_ref(), x0, n).unwrap()
}

fn spec(kind: ObjectiveKind, family: ModelFamily, bounds: ParamBox) -> ObjectiveSpec {
    ObjectiveSpec {
        kind,
        family,
        bounds,
        metric: MetricSpec::energy_mmd(),
        delay: DelayParams::new(3, 10).unwrap(),
        observables: vec![Observable::coordinate(0)],
        sim_length: None,
        initial_state: None,
        initial_jitter: 0.0,
        burn_in: 1000,
        n_samples: 500,
        init_window: None,
        unbiased_init: true,
        divergence_penalty: DEFAULT_PENALTY,
        seed: 17,
    }
}

#[test]
fn truth_terms_stay_within_twice_the_floor() {
    let states = lorenz_states(100_000, &[1.0, 1.0, 1.0]);
    let data = TimeSeries::new(states.clone(), 0.01, 0.0).unwrap();
    let mu = state_measure(&states, 1000).unwrap();
    let y = observe(&states[1000..], &Observable::coordinate(0), 0.01).unwrap();
    let delay_mu = delay_embed_ordered(&y, DelayParams::new(3, 10).unwrap(), CoordOrder::Ascending).unwrap();
    let metric = MetricSpec::energy_mmd();
    for n in [250, 500] {
        let s = ObjectiveSpec { n_samples: n, ..spec(ObjectiveKind::Alg2, lorenz_family(vec![3]), ParamBox::new(vec![0.0], vec![2.0]).unwrap()) };
        let b = Objective::new(s, &data).unwrap().breakdown(&[1.0]).unwrap();
        let floor = self_distance_floor(&mu, n, &metric, 3).unwrap();
        let delay_floor = self_distance_floor(&delay_mu, n, &metric, 4).unwrap();
        assert!(b.state <= 2.0 * floor, "n = {n}: state {} floor {floor}", b.state);
        assert!(b.delay[0] <= 2.0 * delay_floor, "n = {n}: delay {} floor {delay_floor}", b.delay[0]);
    }
}

#[test]
fn pointwise_loss_is_defeated_by_chaos() {
    let data_states = lorenz_states(20_000, &[1.0, 1.0, 1.0]);
    let y = observe(&data_states, &Observable::coordinate(0), 0.01).unwrap();
    let family = lorenz_family(vec![1]);
    let mut s = spec(ObjectiveKind::Pointwise, family, ParamBox::new(vec![20.0], vec![35.0]).unwrap());
    s.initial_state = Some(vec![1.001, 1.0, 1.0]);
    let obj = Objective::new(s, &y).unwrap();
    let at_truth = obj.eval(&[28.0]).unwrap();
    let grid: Vec<Vec<f64>> = grid_1d(20.0, 35.0, 0.5).unwrap().into_iter().map(|v| vec![v]).collect();
    let rows = scan_landscape(&obj, &grid).unwrap();
    let wrong_best = rows.iter().filter(|r| (r.theta[0] - 28.0).abs() > 0.25).map(|r| r.loss).fold(f64::INFINITY, f64::min);
    assert!(at_truth > wrong_best, "truth {at_truth} vs best wrong {wrong_best}");
}

fn torus_data(n: usize) -> TimeSeries {
    let model = ModelFamily::torus(0.0, 0.0).build(&[2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0]).unwrap();
    TimeSeries::new(simulate(model.as_ref(), &[0.1, 0.2], n).unwrap(), 1.0, 0.0).unwrap()
}

fn torus_spec(kind: ObjectiveKind) -> ObjectiveSpec {
    ObjectiveSpec {
        delay: DelayParams::new(3, 1).unwrap(),
        observables: vec![
            Observable::Linear { weights: vec![1.0, 0.0] },
            Observable::Linear { weights: vec![1.0, 1.0] },
        ],
        burn_in: 0,
        n_samples: 300,
        ..spec(kind, ModelFamily::torus(0.5, 0.5), ParamBox::new(vec![0.0, 0.0], vec![0.999, 0.999]).unwrap())
    }
}

#[test]
fn delay_terms_and_init_window_pin_down_the_rotation() {
    let data = torus_data(2000);
    let truth = [2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0];
    let full = Objective::new(torus_spec(ObjectiveKind::Alg2WithInit), &data).unwrap();
    let opts = NelderMeadOptions { max_iter: 400, x_tol: 1e-6, f_tol: 1e-12, ..Default::default() };
    let runs = multi_start(|x| full.eval(x), &full.spec().bounds, 8, 5, &opts).unwrap();
    let best = runs.iter().min_by(|a, b| a.loss_star.total_cmp(&b.loss_star)).unwrap();
    assert!(best.theta_star.iter().zip(&truth).all(|(a, b)| (a - b).abs() < 1e-3), "{:?}", best.theta_star);

    // The state measure alone is uniform and rotation-invariant: flat valley.
    let state_only = Objective::new(torus_spec(ObjectiveKind::StateOnly), &data).unwrap();
    let axis = grid_1d(0.05, 0.95, 0.1).unwrap();
    let grid = product_grid(&[axis.clone(), axis]);
    let flat = scan_landscape(&state_only, &grid).unwrap();
    let sharp = scan_landscape(&full, &grid).unwrap();
    let spread = |rows: &[delayid::identify::LandscapeRow]| {
        let v: Vec<f64> = rows.iter().map(|r| r.loss).collect();
        v.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let states: Vec<Vec<f64>> = data.samples().map(|s| s.to_vec()).collect();
    let floor = self_distance_floor(&state_measure(&states, 0).unwrap(), 300, &MetricSpec::energy_mmd(), 1).unwrap();
    let flat_max = flat.iter().map(|r| r.loss).fold(0.0, f64::max);
    assert!(flat_max < 3.0 * floor, "state-only max {flat_max} floor {floor}");
    assert!(spread(&sharp) > 5.0 * spread(&flat), "spreads {} vs {}", spread(&sharp), spread(&flat));
}

#[test]
fn penalty_keeps_the_optimizer_running() {
    let data = TimeSeries::new(lorenz_states(5000, &[1.0, 1.0, 1.0]), 0.01, 0.0).unwrap();
    let s = spec(ObjectiveKind::Alg2Unbiased, lorenz_family(vec![3]), ParamBox::new(vec![0.5], vec![80.0]).unwrap());
    let obj = Objective::new(ObjectiveSpec { n_samples: 200, ..s }, &data).unwrap();
    assert!(obj.eval(&[75.0]).unwrap() >= DEFAULT_PENALTY);
    let r = nelder_mead(|x| obj.eval(x), &[2.0], &obj.spec().bounds, &NelderMeadOptions { initial_step: 0.3, ..Default::default() })
        .unwrap();
    assert!(r.loss_star < 1.0 && (r.theta_star[0] - 1.0).abs() < 1e-3, "{:?}", r.theta_star);
}
