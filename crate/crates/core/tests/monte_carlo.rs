use frec::{
    run_power_sweep, run_record_law, run_size_power, McConfig, ModelKind, NoiseSpec, RecordLaw,
};

fn cfg(model: ModelKind, n: usize, replicates: usize) -> McConfig {
    let mut c = McConfig::new(model, NoiseSpec::brownian_motion(), n);
    c.replicates = replicates;
    c
}

#[test]
fn random_walk_size_at_n_1000() {
    let cell = &run_size_power(&cfg(ModelKind::M1RandomWalk, 1000, 500))
        .unwrap()
        .cells[0];
    assert!(cell.rejection_rate <= 0.07, "size {}", cell.rejection_rate);
}

#[test]
fn iid_power_at_n_500() {
    let cell = &run_size_power(&cfg(ModelKind::M3Iid, 500, 500))
        .unwrap()
        .cells[0];
    assert!(cell.rejection_rate >= 0.99, "power {}", cell.rejection_rate);
}

#[test]
fn iid_record_counts_grow_like_log_n() {
    let n = 1000;
    let RecordLaw::Stationary {
        totals,
        log_reference,
        ..
    } = run_record_law(&cfg(ModelKind::M3Iid, n, 60), n).unwrap()
    else {
        panic!("expected trajectories");
    };
    let mut ratios: Vec<f64> = totals
        .iter()
        .map(|t| t[n - 1] as f64 / (2.0 * log_reference[n - 1]))
        .collect();
    ratios.sort_by(f64::total_cmp);
    let median = ratios[ratios.len() / 2];
    assert!((0.5..=2.0).contains(&median), "median {median}");
}

#[test]
fn power_collapses_at_unit_norm() {
    let mut c = cfg(ModelKind::M4Far1, 500, 200);
    c.sweep = Some(vec![1.0]);
    let rows = run_power_sweep(&c).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(
        rows[0].1.rejection_rate <= 0.10,
        "rate {}",
        rows[0].1.rejection_rate
    );
}

#[test]
fn reruns_are_bit_identical() {
    let c = cfg(ModelKind::M6OperatorBreak, 120, 16);
    let a = run_size_power(&c).unwrap();
    let b = run_size_power(&c).unwrap();
    for (x, y) in a.cells.iter().zip(&b.cells) {
        assert_eq!(x.replicates, y.replicates);
        assert_eq!(x.rejection_rate, y.rejection_rate);
    }
}
