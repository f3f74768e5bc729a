//! Qualitative structure of the sweeps, convergence tables and modal diagnostics.

use lpg_core::experiments::{
    dt_grid, energy_beyond, hypothesis_frontier_gap, initial_modal_spectrum, modal_spectrum_diagnostics,
    spatial_convergence_study, sweep_alpha_beta, sweep_beta_dt, temporal_convergence_study, StudyBase, SweepGrid,
};

fn base() -> StudyBase {
    StudyBase::default()
}

#[test]
fn temporal_errors_shrink_with_dt() {
    let table = temporal_convergence_study(&[0.0, 0.4, 0.8], &dt_grid(), base()).unwrap();
    for beta in [0.0, 0.4, 0.8] {
        let mut rows: Vec<_> = table.rows_for(beta).collect();
        rows.sort_by(|a, b| a.param.total_cmp(&b.param));
        for w in rows.windows(2) {
            assert!(w[0].eps_l1l2 < w[1].eps_l1l2, "beta {beta}: dt {} -> {:e}, dt {} -> {:e}", w[0].param, w[0].eps_l1l2, w[1].param, w[1].eps_l1l2);
            assert!(w[0].eps_l1l1 < w[1].eps_l1l1);
        }
    }
}

#[test]
fn dispersive_case_is_more_accurate_at_every_degree() {
    let degrees = [14, 16, 18, 20, 22, 24, 26];
    let table = spatial_convergence_study(&[0.0, 0.8], &degrees, base()).unwrap();
    for n in degrees {
        let e = |b: f64| table.rows_for(b).find(|r| r.param == n as f64).unwrap().eps_l1l2;
        println!("N={n}: eps(0) = {:.6e}, eps(0.8) = {:.6e}", e(0.0), e(0.8));
        assert!(e(0.0) < e(0.8), "N={n}: {:e} vs {:e}", e(0.0), e(0.8));
    }
}

/// Shape, finiteness and the expected dB envelope; returns failed checks.
fn check_grid(grid: &SweepGrid, failures: &mut Vec<String>) {
    assert_eq!(grid.shape(), (20, 20));
    assert_eq!(grid.cells.len(), 400);
    assert!(grid.cells.iter().all(|c| c.eps.is_finite() && c.eps > 0.0));
    let lo = grid.cells.iter().map(|c| c.eps_db).fold(f64::INFINITY, f64::min);
    let hi = grid.cells.iter().map(|c| c.eps_db).fold(f64::NEG_INFINITY, f64::max);
    println!("{:?} dB range [{lo:.2}, {hi:.2}]", grid.kind);
    if lo < -100.0 || hi > 0.0 {
        failures.push(format!("{:?}: dB range [{lo:.2}, {hi:.2}] leaves [-100, 0]", grid.kind));
    }
}

#[test]
fn beta_dt_sweep_structure() {
    let mut failures = Vec::new();
    let grid = sweep_beta_dt(base()).unwrap();
    check_grid(&grid, &mut failures);
    // row 0 is dt = 2e-4; beta = 0 in the lowest quarter of that row
    let mut row: Vec<f64> = (0..20).map(|j| grid.cell(0, j).eps_db).collect();
    let first = row[0];
    row.sort_by(f64::total_cmp);
    println!("dt=2e-4 row dB range [{:.3}, {:.3}], beta=0 at {first:.3}", row[0], row[19]);
    if first > row[4] {
        failures.push(format!("beta = 0 cell {first:.3} dB not among the lowest of its row"));
    }
    assert_eq!(grid, sweep_beta_dt(base()).unwrap());
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn alpha_beta_sweeps_structure() {
    let mut failures = Vec::new();
    let fine = sweep_alpha_beta(base(), 1e-4).unwrap();
    let coarse = sweep_alpha_beta(base(), 1e-3).unwrap();
    check_grid(&fine, &mut failures);
    check_grid(&coarse, &mut failures);
    let darker = fine.cells.iter().zip(&coarse.cells).filter(|(f, c)| f.eps_db >= c.eps_db).count();
    println!("cells where dt=1e-4 is not lighter than dt=1e-3: {darker}");
    if darker > 0 {
        failures.push(format!("{darker} cells not lighter at dt = 1e-4"));
    }
    // small alpha with large beta is the worst region
    let (mut corner, mut rest) = (Vec::new(), Vec::new());
    for c in &fine.cells {
        if c.alpha < 1.0 / 3.0 && c.beta >= 0.325 {
            corner.push(c.eps_db);
        } else {
            rest.push(c.eps_db);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!("corner mean {:.3} dB, rest mean {:.3} dB", mean(&corner), mean(&rest));
    if mean(&corner) <= mean(&rest) {
        failures.push("small-alpha/large-beta corner is not the worst region".into());
    }
    let gap = hypothesis_frontier_gap(&fine, 1e-3, 1e-3).unwrap();
    println!("frontier median gap {gap:.3} dB");
    if gap < 10.0 {
        failures.push(format!("median gap across the hypothesis frontier is {gap:.3} dB"));
    }
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn modal_concentration_and_source_artifact() {
    for n in [32, 64, 80] {
        let d = modal_spectrum_diagnostics(n, 1000, 1e-5, 1.0, 0.3).unwrap();
        println!(
            "N={n}: exact beyond 22 {:.2e}, top-5 exact {:.2e}, projected source {:.2e}, modal source {:.2e}, numerical {:.2e}",
            d.exact_beyond_22, d.exact_top5, d.projected_source_top5, d.modal_source_top5, d.numerical_top5
        );
        assert!(d.exact_beyond_22 < 1e-2);
        assert!(d.projected_source_top5 > 10.0 * d.exact_top5, "N={n}: C F top-5 share {:.2e}", d.projected_source_top5);
    }
    let init = initial_modal_spectrum(80).unwrap();
    assert!(energy_beyond(&init, 22) < 1e-2);
}

#[test]
fn second_order_in_time_once_space_is_resolved() {
    let base = StudyBase { degree: 40, ..StudyBase::default() };
    let dts = [2e-3, 1e-3, 5e-4, 2.5e-4];
    let table = temporal_convergence_study(&[0.0, 0.8], &dts, base).unwrap();
    for f in &table.fits {
        println!("N=40 beta={}: order {:.3}", f.beta, f.l1l2.order);
        assert!((f.l1l2.order - 2.0).abs() < 0.1);
    }
}
