use std::f64::consts::{FRAC_PI_2, PI, TAU};

use oscnet::analytic;
use oscnet::experiments::{
    first_local_max, parse_pair, run_time_series, sweep_delta, sweep_r, Evaluation, ExperimentConfig, PrepOverride,
    SweepResult, TimeGrid, TopologySpec,
};

fn interferometric(m: usize, c: f64) -> ExperimentConfig {
    ExperimentConfig::new(TopologySpec::Interferometric { m, c })
}

fn negativities(result: &SweepResult) -> Vec<f64> {
    result.rows().map(|r| r.negativity).collect()
}

#[test]
fn sweep_is_symmetric_under_delta_reflection() {
    let mut config = interferometric(38, 0.3);
    config.deltas = (0..63).map(|k| 0.1 * k as f64).collect();
    let forward = negativities(&sweep_delta(&config).unwrap());
    config.deltas = config.deltas.iter().map(|d| TAU - d).collect();
    let mirrored = negativities(&sweep_delta(&config).unwrap());
    for (a, b) in forward.iter().zip(&mirrored) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn fixed_time_sweep_zero_region() {
    for (r, lo) in [(1.0, 1.41005), (1.75, 0.68822)] {
        let mut config = interferometric(38, 0.3);
        config.squeezing = vec![r];
        config.deltas = (0..629).map(|k| 0.01 * k as f64).collect();
        let result = sweep_delta(&config).unwrap();
        for row in result.rows() {
            let d = row.sweep_value;
            if d > lo + 0.01 && d < TAU - lo - 0.01 {
                assert!(row.negativity < 1e-9, "r={r} δ={d} N={}", row.negativity);
            }
        }
        // Entanglement at ct = 58 is present somewhere below the threshold.
        assert!(result.rows().any(|row| row.sweep_value < lo && row.negativity > 1e-3));
    }
}

#[test]
fn time_series_is_stable_under_step_halving() {
    let mut config = interferometric(10, 0.3);
    config.deltas = vec![0.0, 0.9, 2.5];
    config.pairs = vec![parse_pair("1,M").unwrap(), parse_pair("r1,5").unwrap()];
    config.grid = TimeGrid::new(30.0, 0.1).unwrap();
    let coarse = run_time_series(&config).unwrap();
    config.grid = TimeGrid::new(30.0, 0.05).unwrap();
    let fine = run_time_series(&config).unwrap();
    let fine_rows: Vec<_> = fine.rows().collect();
    let mut matched = 0;
    for row in coarse.rows() {
        let twin = fine_rows
            .iter()
            .find(|f| f.sweep_value == row.sweep_value && f.pair == row.pair && (f.ct - row.ct).abs() < 1e-9)
            .expect("coarse sample present in fine grid");
        assert!((twin.negativity - row.negativity).abs() < 1e-9);
        matched += 1;
    }
    assert_eq!(matched, 3 * 2 * 301);
}

#[test]
fn rows_are_physical() {
    let mut config = interferometric(4, 1.0);
    config.deltas = vec![0.0, 1.0, PI];
    config.grid = TimeGrid::new(20.0, 0.1).unwrap();
    config.pairs = vec![
        parse_pair("1,M").unwrap(),
        parse_pair("r1,r2").unwrap(),
        parse_pair("2,3").unwrap(),
    ];
    for row in run_time_series(&config).unwrap().rows() {
        assert!(row.negativity >= 0.0);
        assert!(row.nu_min > 0.0);
    }
}

#[test]
fn far_ends_need_time_to_entangle() {
    let mut config = interferometric(38, 1.0);
    config.grid = TimeGrid::new(80.0, 0.05).unwrap();
    let result = run_time_series(&config).unwrap();
    let onset = result
        .rows()
        .find(|r| r.negativity >= 1e-9)
        .map(|r| r.ct)
        .expect("ends entangle before ct = 80");
    assert!(onset > 1.0, "onset at ct = {onset}");
    assert!(result.rows().take_while(|r| r.ct < onset).all(|r| r.negativity < 1e-9));
}

#[test]
fn peak_near_fifty_eight() {
    let mut config = interferometric(38, 1.0);
    let series: Vec<(f64, f64)> = run_time_series(&config)
        .unwrap()
        .rows()
        .map(|r| (r.ct, r.negativity))
        .collect();
    let (ct_max, n_max) = series
        .iter()
        .copied()
        .fold((0.0, 0.0), |best, s| if s.1 > best.1 { s } else { best });
    assert!(
        (ct_max - 58.0).abs() <= 1.0,
        "global maximum at ct = {ct_max}, N = {n_max}"
    );

    // The earliest strict peak comes well before the global one.
    let first = first_local_max(&series, 80.0).unwrap();
    assert!(first.strict);
    assert!(first.ct < ct_max && first.value > 0.0);

    config.evaluation = Evaluation::FirstLocalMax;
    let row = sweep_delta(&config).unwrap().rows().next().unwrap().clone();
    assert_eq!((row.ct, row.negativity), (first.ct, first.value));
}

#[test]
fn ring_time_series_reaches_one() {
    let mut config = interferometric(2, 1.0);
    config.pairs = vec![parse_pair("1,2").unwrap()];
    config.grid = TimeGrid::new(4.0, FRAC_PI_2 / 16.0).unwrap();
    let max = negativities(&run_time_series(&config).unwrap())
        .into_iter()
        .fold(0.0, f64::max);
    assert!((max - 1.0).abs() < 1e-9);
}

#[test]
fn vacuum_everywhere_gives_nothing() {
    let mut config = interferometric(10, 0.5);
    config.overrides = vec![
        PrepOverride::parse("r1=vacuum").unwrap(),
        PrepOverride::parse("r2=coherent").unwrap(),
    ];
    config.grid = TimeGrid::new(40.0, 0.1).unwrap();
    assert!(negativities(&run_time_series(&config).unwrap())
        .iter()
        .all(|&n| n == 0.0));
}

#[test]
fn squeezing_has_an_upper_bound_at_fixed_angle() {
    let mut config = interferometric(2, 1.0);
    config.pairs = vec![parse_pair("1,2").unwrap()];
    config.evaluation = Evaluation::At(1.0);
    config.squeezing = (0..=40).map(|k| 0.05 * k as f64).collect();
    config.deltas = vec![0.0, 1.0, PI];
    let result = sweep_r(&config).unwrap();
    assert_eq!(result.sections.len(), 3);

    for row in &result.sections[0].rows {
        // δ = 0 entangles for every r > 0.
        assert_eq!(row.negativity > 0.0, row.sweep_value > 0.0, "r = {}", row.sweep_value);
    }
    let bound = analytic::r_upper_bound(1.0).unwrap();
    for row in &result.sections[1].rows {
        let r = row.sweep_value;
        if r > 0.0 && r < bound - 1e-6 {
            assert!(row.negativity > 0.0, "r = {r}");
        } else if r > bound + 1e-6 || r == 0.0 {
            assert!(row.negativity < 1e-12, "r = {r}");
        }
    }
    // δ = π: tanh r ≥ |cos(π/2)| = 0 always, no entanglement.
    assert!(result.sections[2].rows.iter().all(|row| row.negativity < 1e-12));
}

#[test]
fn small_angle_entangles_far_ends() {
    let mut config = interferometric(38, 0.3);
    config.deltas = vec![0.5];
    let series = negativities(&run_time_series(&config).unwrap());
    assert!(series.iter().any(|&n| n > 1e-6));
}

#[test]
fn dsl_topology_uses_its_own_time_unit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring.dsl");
    std::fs::write(&path, oscnet::network::build_interferometric(2, 0.5).unwrap().to_dsl()).unwrap();
    let mut from_file = ExperimentConfig::new(TopologySpec::File { path, c: 0.5 });
    from_file.pairs = vec![parse_pair("1,2").unwrap()];
    from_file.grid = TimeGrid::new(5.0, 0.25).unwrap();
    let mut built = interferometric(2, 0.5);
    built.pairs = from_file.pairs.clone();
    built.grid = from_file.grid;
    assert_eq!(
        negativities(&run_time_series(&from_file).unwrap()),
        negativities(&run_time_series(&built).unwrap())
    );
}
