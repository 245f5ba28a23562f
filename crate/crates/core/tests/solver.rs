use approx::assert_relative_eq;
use ewi_core::harness::acceptance::{TABLE_ALPHA_1_2, TABLE_ALPHA_1_5, TABLE_ALPHA_2};
use ewi_core::harness::data::{builtin_initial_data, InitialData};
use ewi_core::harness::oracle::Rk4Oracle;
use ewi_core::harness::reference::ReferenceCache;
use ewi_core::harness::spec::StudySpec;
use ewi_core::harness::studies::run_temporal_study;
use ewi_core::{h_alpha_half_error, solve, ModelParams, SolveConfig, SpectralField};

fn small_temporal(alpha: f64, eps: f64) -> StudySpec {
    let mut spec = StudySpec::temporal(alpha, eps).unwrap();
    spec.steps = (4..=7).map(|k| 2f64.powi(-k)).collect();
    spec.sizes = vec![32];
    spec.reference.tau = 1e-3;
    spec.reference.n = 32;
    spec
}

#[test]
fn temporal_error_is_second_order() {
    for alpha in [2.0, 1.4] {
        let curves = run_temporal_study(&small_temporal(alpha, 0.5), &ReferenceCache::in_memory()).unwrap();
        let records = &curves[0].records;
        assert!(records[0].order.is_none());
        for r in &records[1..] {
            let order = r.order.unwrap();
            assert!((1.8..=2.2).contains(&order), "alpha {alpha} tau {}: order {order}", r.tau);
        }
        assert!(records.last().unwrap().e1 < 1e-4);
    }
}

#[test]
fn on_disk_reference_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_temporal(1.6, 0.5);
    let first = run_temporal_study(&spec, &ReferenceCache::on_disk(dir.path())).unwrap();
    let cache = ReferenceCache::on_disk(dir.path());
    let second = run_temporal_study(&spec, &cache).unwrap();
    assert_eq!(first[0].reference_checksum, second[0].reference_checksum);
    assert_eq!(first[0].records, second[0].records);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn short_run_matches_rk4_oracle() {
    let data = InitialData::Complex1d;
    let grid = data.grid(&[16]).unwrap();
    let initial = builtin_initial_data(&data, &grid).unwrap();
    let (a, b) = data.domain().unwrap()[0];
    let params = ModelParams::complex_power(1.3, 1.0, 0.8, 1).unwrap();
    let oracle = Rk4Oracle::new(a, b, 16, &params);
    let (psi, _) = oracle.integrate(initial.psi.coeffs(), initial.eta.coeffs(), 1e-3, 200);
    let ewi = solve(&SolveConfig::new(params, 1e-4, 0.2), &initial).unwrap();
    let exact = SpectralField::from_coeffs(&grid, psi).unwrap();
    let err = h_alpha_half_error(&ewi.final_state.psi, &exact, 1.3).unwrap();
    assert!(err < 1e-7, "{err:e}");
}

#[test]
fn energy_is_nearly_conserved() {
    let data = InitialData::Smooth1d;
    let grid = data.grid(&[64]).unwrap();
    let initial = builtin_initial_data(&data, &grid).unwrap();
    let mut cfg = SolveConfig::new(ModelParams::real_cubic(1.5, 1.0, 1.0).unwrap(), 1e-2, 5.0);
    cfg.record_energy = true;
    let traj = solve(&cfg, &initial).unwrap();
    assert_eq!(traj.energy.len(), 2);
    assert!(traj.max_energy_deviation() < 1e-3);
}

#[test]
fn reference_table_rows_refine_by_sixteen() {
    for table in [TABLE_ALPHA_2, TABLE_ALPHA_1_5, TABLE_ALPHA_1_2] {
        for (i, row) in table.iter().enumerate() {
            for j in i..3 {
                let order = (row[j] / row[j + 1]).ln() / 4f64.ln();
                assert!((1.9..=2.1).contains(&order), "row {i} col {j}: {order}");
            }
        }
        // Below the diagonal the method has not resolved the oscillation yet.
        assert!(table[3][0] > 1.0 && table[4][1] > 1.0);
    }
    assert_relative_eq!(TABLE_ALPHA_2[0][0], 1.11e-2);
    assert_relative_eq!(TABLE_ALPHA_1_2[4][4], 2.64e-4);
}
