use swarmkit::dynamics::run_observed;
use swarmkit::metrics::circliness;
use swarmkit::mill::predicted_radius;
use swarmkit::{counterexample_config, SimConfig, SwarmParams};

#[test]
fn counterexample_starts_circular_and_leaves_it() {
    for n in [4, 6, 8] {
        let rm = predicted_radius(1.0, n).unwrap();
        // turning radius equal to the mill radius, the case the layout relies on
        let p = SwarmParams::critical(1.0, rm, 1.0, n).unwrap();
        let init = counterexample_config(&p, rm).unwrap();
        assert!(circliness(&init) < 1e-12, "n={n}");
        let cfg = SimConfig::for_params(&p, 100.0 / p.omega(), 0, 1000).unwrap();
        let mut peak: f64 = 0.0;
        run_observed(&init, &p, &cfg, |_, s| peak = peak.max(circliness(s))).unwrap();
        assert!(peak > 0.05, "n={n} peak circliness {peak}");
    }
}
