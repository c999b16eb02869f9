use std::path::Path;

use ezpath::{
    circumnavigate, plan, resample_and_verify, standard_specs, CircumnavLabel, Point2,
    PursuerThreat, Scenario, ScenarioFile, Threat, TurretThreat,
};
use proptest::prelude::*;

fn golden() -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/golden.json");
    ScenarioFile::load(&path).unwrap().to_scenario()
}

fn baseline(s: &Scenario, label: CircumnavLabel) -> f64 {
    let Threat::Pursuer(p) = &s.threats[0] else {
        panic!("pursuer expected")
    };
    let spec = standard_specs(p)
        .into_iter()
        .find(|x| x.label == label)
        .unwrap();
    circumnavigate(
        s.agent.start,
        s.agent.goal,
        p.position,
        &spec,
        s.agent.speed,
    )
    .unwrap()
    .t_f
}

#[test]
fn golden_plan_lies_between_apol_and_reach() {
    let s = golden();
    let res = plan(&s).unwrap();
    assert!(res.converged);
    assert!(baseline(&s, CircumnavLabel::Apol) < res.t_f);
    assert!(res.t_f < baseline(&s, CircumnavLabel::Reach));
    assert!(res.min_clearance >= -s.options.constraint_tolerance);
    assert_eq!(res.t_f, *res.trajectory.times.last().unwrap());
    res.trajectory.validate(s.agent.speed).unwrap();
}

#[test]
fn golden_plan_rides_the_boundary_in_one_contiguous_run() {
    let s = golden();
    let res = plan(&s).unwrap();
    let active: Vec<usize> = res.node_clearances[0]
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() <= 1e-4)
        .map(|(k, _)| k)
        .collect();
    assert!(active.len() >= 10, "only {} active nodes", active.len());
    assert!(
        active.windows(2).all(|w| w[1] == w[0] + 1),
        "active nodes {active:?}"
    );
}

#[test]
fn node_count_sweep_verifies_densely() {
    let mut s = golden();
    for n in [10, 100] {
        s.options.n_nodes = n;
        let res = plan(&s).unwrap();
        assert!(res.converged, "n_nodes {n}");
        let report = resample_and_verify(&res, &s, 10).unwrap();
        assert!(
            report.worst_clearance >= -10.0 * s.options.constraint_tolerance,
            "n_nodes {n}: {}",
            report.worst_clearance
        );
        assert_eq!(report.oracle_disagreements, 0);
    }
}

#[test]
fn pursuer_and_turret_together() {
    let mut s = golden();
    s.threats.push(
        TurretThreat::new(Point2::new(2.0, 1.8), 3.0, 0.5, 0.6)
            .unwrap()
            .into(),
    );
    s.options.n_nodes = 60;
    let res = plan(&s).unwrap();
    assert!(res.converged);
    let turret_min = res.node_clearances[1]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    assert!(
        turret_min.abs() < 1e-4,
        "turret constraint inactive: {turret_min}"
    );
    let report = resample_and_verify(&res, &s, 10).unwrap();
    assert!(
        report.worst_clearance >= -10.0 * s.options.constraint_tolerance,
        "{report:?}"
    );
    assert_eq!(res.node_clearances.len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn converged_plans_are_sound(
        y in -0.6f64..0.6,
        mu in 0.3f64..0.95,
        speed in 0.5f64..2.0,
    ) {
        let threat = PursuerThreat::new(Point2::new(0.0, y), mu, 0.8, 0.2).unwrap();
        let mut s = golden();
        s.agent.speed = speed;
        s.threats = vec![threat.into()];
        s.options.n_nodes = 40;
        let res = plan(&s).unwrap();
        prop_assume!(res.converged);
        let tol = s.options.constraint_tolerance;
        let chord = (s.agent.goal - s.agent.start).norm() / speed;
        prop_assert!(res.t_f >= chord);
        prop_assert!(res.min_clearance >= -tol);
        res.trajectory.validate(speed).unwrap();
        prop_assert!((res.trajectory.end() - s.agent.goal).norm() <= 10.0 * tol);
        let reach = baseline(&s, CircumnavLabel::Reach);
        prop_assert!(res.t_f <= reach + s.options.opt_tolerance, "{} vs reach {}", res.t_f, reach);
    }
}
