use proptest::prelude::*;
use swarmkit::dynamics::run;
use swarmkit::metrics::metric_series;
use swarmkit::{random_connected_init, Microstate, SimConfig, SwarmParams};

fn max_pose_gap(a: &Microstate, b: &Microstate) -> f64 {
    a.agents
        .iter()
        .zip(&b.agents)
        .map(|(p, q)| {
            let dth = swarmkit::wrap_angle(p.theta - q.theta).abs();
            (p.x - q.x).abs().max((p.y - q.y).abs()).max(dth)
        })
        .fold(0.0, f64::max)
}

fn params_strategy() -> impl Strategy<Value = SwarmParams> {
    (0.5..2.0f64, 0.1..1.0f64, 0.5..2.0f64, 0.2..3.0f64, 3usize..12)
        .prop_map(|(g, v, w, phi, n)| SwarmParams::new(g, v, w, phi, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn speed_is_conserved(p in params_strategy(), seed in any::<u64>()) {
        let init = random_connected_init(&p, 0.4 * p.gamma() * (p.n() as f64).sqrt(), seed).unwrap();
        let cfg = SimConfig::for_params(&p, 10.0 / p.omega(), seed, 100).unwrap();
        let traj = run(&init, &p, &cfg).unwrap();
        for m in metric_series(&traj) {
            // |v (cos, sin)| is v up to the rounding of one hypot
            prop_assert!((m.v_bar - p.v()).abs() <= 4.0 * f64::EPSILON * p.v(), "{} vs {}", m.v_bar, p.v());
        }
    }

    #[test]
    fn rigid_motion_equivariance(p in params_strategy(), seed in any::<u64>(),
                                 angle in -3.14..3.14f64, dx in -5.0..5.0f64, dy in -5.0..5.0f64) {
        let init = random_connected_init(&p, 0.4 * p.gamma() * (p.n() as f64).sqrt(), seed).unwrap();
        let cfg = SimConfig::for_params(&p, 10.0 / p.omega(), seed, 50).unwrap();
        let a = run(&init, &p, &cfg).unwrap();
        let b = run(&init.transformed(angle, dx, dy), &p, &cfg).unwrap();
        for (sa, sb) in a.samples.iter().zip(&b.samples) {
            prop_assert!(max_pose_gap(&sa.transformed(angle, dx, dy), sb) < 1e-9);
        }
    }

    #[test]
    fn permutation_equivariance(p in params_strategy(), seed in any::<u64>(), shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        let init = random_connected_init(&p, 0.4 * p.gamma() * (p.n() as f64).sqrt(), seed).unwrap();
        let mut perm: Vec<usize> = (0..p.n()).collect();
        perm.shuffle(&mut swarmkit::seed::rng_from_seed(shuffle));
        let cfg = SimConfig::for_params(&p, 10.0 / p.omega(), seed, 50).unwrap();
        let a = run(&init, &p, &cfg).unwrap();
        let b = run(&init.permuted(&perm), &p, &cfg).unwrap();
        for (sa, sb) in a.samples.iter().zip(&b.samples) {
            prop_assert!(max_pose_gap(&sa.permuted(&perm), sb) < 1e-9);
        }
    }
}

#[test]
fn halving_the_step_barely_moves_a_polygon_mill() {
    let p = SwarmParams::critical(1.0, 0.4, 1.0, 8).unwrap();
    let rm = swarmkit::mill::predicted_radius(1.0, 8).unwrap();
    let init = swarmkit::regular_polygon_mill(&p, rm, swarmkit::Point::ORIGIN, swarmkit::Spin::MILL).unwrap();
    let coarse = SimConfig::new(0.01, 20.0, 0, 100).unwrap();
    let fine = SimConfig::new(0.005, 20.0, 0, 200).unwrap();
    let a = swarmkit::metrics::mean_radius(run(&init, &p, &coarse).unwrap().last());
    let b = swarmkit::metrics::mean_radius(run(&init, &p, &fine).unwrap().last());
    assert!((a - b).abs() / rm < 5e-3, "{a} vs {b}");
}
