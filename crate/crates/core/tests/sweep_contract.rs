use swarmkit::sweep::*;
use swarmkit::{classify_run, Macrostate};

fn small_spec(trials: usize) -> SweepSpec {
    SweepSpec {
        axis_x: Axis {
            param: ParamName::N,
            values: vec![3.0, 5.0, 7.0],
        },
        axis_y: Some(Axis {
            param: ParamName::Phi,
            values: vec![30f64.to_radians(), 72f64.to_radians()],
        }),
        fixed: FixedParams {
            gamma: 1.0,
            v: 0.3,
            omega: 1.0,
            phi: PhiSetting::Critical,
            n: 3,
        },
        trials_per_cell: trials,
        init: InitKind::RandomConnected,
        spread: Spread::Scaled(0.3),
        base_seed: 2024,
        sim: SimTemplate {
            horizon: 40.0,
            per_omega: true,
            dt: None,
            samples: 80,
        },
        thresholds: ThresholdOverrides::default(),
    }
}

#[test]
fn worker_count_does_not_change_the_diagram() {
    let spec = small_spec(3);
    let one = run_sweep_with_workers(&spec, Some(1)).unwrap();
    let many = run_sweep_with_workers(&spec, Some(4)).unwrap();
    assert_eq!(one, many);
    assert_eq!(
        swarmkit::io::csv::phase_csv(&one),
        swarmkit::io::csv::phase_csv(&many)
    );
}

#[test]
fn extra_trials_leave_earlier_ones_alone() {
    let a = run_sweep_with_workers(&small_spec(2), Some(2)).unwrap();
    let b = run_sweep_with_workers(&small_spec(3), Some(2)).unwrap();
    for (ca, cb) in a.cells.iter().zip(&b.cells) {
        assert_eq!(ca.trial_labels[..], cb.trial_labels[..2]);
    }
}

#[test]
fn single_cell_matches_a_direct_run() {
    let mut spec = small_spec(1);
    spec.axis_x.values = vec![5.0];
    spec.axis_y = None;
    let d = run_sweep(&spec).unwrap();
    assert_eq!(d.cells.len(), 1);

    let p = spec.cell_params(0, 0).unwrap();
    let seed = trial_seed(spec.base_seed, 0, 0, 0);
    let s = spec.settings();
    let init = initial_state(&p, &s, seed).unwrap();
    let direct = classify_run(&init, &p, &s.sim.config_for(&p, seed).unwrap(), &s.thresholds.resolve(&p)).unwrap();
    assert_eq!(d.cells[0].label, Some(direct.label));
}

#[test]
fn counts_and_majority_agree_with_a_recount() {
    let d = run_sweep(&small_spec(3)).unwrap();
    assert_eq!(d.cells.len(), 6);
    for c in &d.cells {
        let mut counts = [0usize; 6];
        for l in c.trial_labels.iter().flatten() {
            counts[Macrostate::ALL.iter().position(|m| m == l).unwrap()] += 1;
        }
        assert_eq!(counts, c.label_counts);
        assert_eq!(counts.iter().sum::<usize>() + c.failed, 3);
        let best = *counts.iter().max().unwrap();
        if c.failed <= best {
            let first = Macrostate::ALL.iter().zip(counts).find(|(_, k)| *k == best).unwrap().0;
            assert_eq!(c.label, Some(*first));
        }
    }
}

#[test]
fn polygon_sweep_mills_along_the_critical_angle() {
    let mut spec = small_spec(1);
    spec.init = InitKind::Polygon;
    spec.axis_y = None;
    spec.sim.horizon = 60.0;
    let d = run_sweep(&spec).unwrap();
    for c in &d.cells {
        assert_eq!(c.label, Some(Macrostate::M), "n={}", c.params.n());
    }
}
