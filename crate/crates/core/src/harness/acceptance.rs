//! The built-in acceptance suite. Each criterion returns an [`Outcome`]
//! instead of panicking so the CLI and the test target can both print one
//! line per criterion.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::grid::{forward_transform, inverse_transform, sobolev_norm, SpectralField, SpectralGrid};
use crate::harness::data::{builtin_initial_data, InitialData};
use crate::harness::oracle::Rk4Oracle;
use crate::harness::reference::ReferenceCache;
use crate::harness::spec::StudySpec;
use crate::harness::studies::{
    run_energy_study, run_field_dump_2d, run_long_time_study, run_oscillatory_table, run_spatial_study,
    OscillatoryTable,
};
use crate::observables::h_alpha_half_error;
use crate::ops::{make_symbol, nabla_alpha, nabla_alpha_inv, propagator, ModelParams};
use crate::solver::{solve, Integrator, SolveConfig};
use crate::state::{from_nls, to_nls, KgeState};

/// Published `e1(r=1)` values, rows `eps = 1 .. 1/16`, columns
/// `lambda = 0.05 .. 0.05/4^4`.
pub const TABLE_ALPHA_2: [[f64; 5]; 5] = [
    [1.11e-2, 6.90e-4, 4.31e-5, 2.65e-6, 1.24e-7],
    [5.90e-2, 3.22e-3, 2.00e-4, 1.25e-5, 7.67e-7],
    [7.41e-1, 1.66e-2, 9.86e-4, 6.14e-5, 3.84e-6],
    [1.43, 3.10e-1, 1.60e-2, 9.90e-4, 6.19e-5],
    [2.03, 3.74, 7.76e-2, 4.25e-3, 2.64e-4],
];

pub const TABLE_ALPHA_1_5: [[f64; 5]; 5] = [
    [1.22e-2, 7.60e-4, 4.74e-5, 2.92e-6, 1.37e-7],
    [5.91e-2, 3.23e-3, 2.00e-4, 1.25e-5, 7.69e-7],
    [7.41e-1, 1.66e-2, 9.88e-4, 6.15e-5, 3.84e-6],
    [1.43, 3.09e-1, 1.60e-2, 9.91e-4, 6.19e-5],
    [2.03, 3.74, 7.75e-2, 4.25e-3, 2.64e-4],
];

pub const TABLE_ALPHA_1_2: [[f64; 5]; 5] = [
    [1.03e-2, 6.46e-4, 4.03e-5, 2.48e-6, 1.16e-7],
    [5.95e-2, 3.25e-3, 2.01e-4, 1.26e-5, 7.74e-7],
    [7.42e-1, 1.66e-2, 9.86e-4, 6.14e-5, 3.83e-6],
    [1.43, 3.10e-1, 1.60e-2, 9.91e-4, 6.19e-5],
    [2.03, 3.74, 7.76e-2, 4.25e-3, 2.64e-4],
];

pub const CELL_TOLERANCE: f64 = 0.15;
pub const ORDER_RANGE: (f64, f64) = (1.85, 2.25);

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(id: u8, name: &'static str, passed: bool, detail: String) -> Self {
        Outcome {
            id,
            name,
            passed,
            detail,
        }
    }

    fn from_result(id: u8, name: &'static str, result: Result<(bool, String)>) -> Self {
        match result {
            Ok((passed, detail)) => Outcome::new(id, name, passed, detail),
            Err(err) => Outcome::new(id, name, false, format!("error: {err}")),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {verdict} {}: {}", self.id, self.name, self.detail)
    }
}

fn relative(value: f64, target: f64) -> f64 {
    ((value - target) / target).abs()
}

fn in_order_range(order: f64) -> bool {
    (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&order)
}

/// The table for one alpha at the published resolution.
pub fn oscillatory_table(alpha: f64, cache: &ReferenceCache) -> Result<OscillatoryTable> {
    let spec = StudySpec::oscillatory_table(alpha)?;
    Ok(run_oscillatory_table(&spec, cache)?.remove(0))
}

/// Upper-triangle orders outside the accepted range, as `(i, j, order)`.
fn bad_orders(table: &OscillatoryTable) -> Vec<(usize, usize, Option<f64>)> {
    let mut bad = Vec::new();
    for i in 0..table.eps.len() {
        for j in i.max(1)..table.lambdas.len() {
            let order = table.order(i, j);
            if !order.is_some_and(in_order_range) {
                bad.push((i, j, order));
            }
        }
    }
    bad
}

fn order_summary(table: &OscillatoryTable) -> String {
    let bad = bad_orders(table);
    if bad.is_empty() {
        "all upper-triangle orders in range".to_string()
    } else {
        let list: Vec<String> = bad
            .iter()
            .map(|(i, j, o)| format!("({i},{j})={}", o.map(|v| format!("{v:.2}")).unwrap_or("-".into())))
            .collect();
        format!("orders out of range: {}", list.join(" "))
    }
}

pub fn table_values(table: &OscillatoryTable, published: &[[f64; 5]; 5]) -> (bool, String) {
    let mut worst = (0.0f64, 0, 0);
    let mut matched = 0;
    let mut total = 0;
    for (i, row) in published.iter().enumerate() {
        for (j, &target) in row.iter().enumerate().skip(i) {
            total += 1;
            let dev = table.e1(i, j).map(|e| relative(e, target)).unwrap_or(f64::INFINITY);
            if dev <= CELL_TOLERANCE {
                matched += 1;
            }
            if dev > worst.0 {
                worst = (dev, i, j);
            }
        }
    }
    let orders_ok = bad_orders(table).is_empty();
    let passed = matched == total && orders_ok;
    let detail = format!(
        "{matched}/{total} upper-triangle cells within 15% (worst ({},{}) off by {:.0}%; first cell {:.3e} vs {:.2e}); {}",
        worst.1,
        worst.2,
        100.0 * worst.0,
        table.e1(0, 0).unwrap_or(f64::NAN),
        published[0][0],
        order_summary(table)
    );
    (passed, detail)
}

/// Criterion 1 from a computed alpha = 2 table.
pub fn criterion_1(table: &OscillatoryTable) -> Outcome {
    let (passed, detail) = table_values(table, &TABLE_ALPHA_2);
    Outcome::new(1, "table alpha=2 values and orders", passed, detail)
}

/// Criterion 2 from the alpha = 1.5 and alpha = 1.2 tables.
pub fn criterion_2(table_1_5: &OscillatoryTable, table_1_2: &OscillatoryTable) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (table, published) in [(table_1_5, &TABLE_ALPHA_1_5), (table_1_2, &TABLE_ALPHA_1_2)] {
        let first = table.e1(0, 0).unwrap_or(f64::NAN);
        let dev = relative(first, published[0][0]);
        let cell_ok = dev <= CELL_TOLERANCE;
        let orders_ok = bad_orders(table).is_empty();
        passed &= cell_ok && orders_ok;
        parts.push(format!(
            "alpha={}: first cell {first:.3e} vs {:.2e} ({:.0}% off), {}",
            table.alpha,
            published[0][0],
            100.0 * dev,
            order_summary(table)
        ));
    }
    Outcome::new(2, "tables alpha=1.5,1.2 first cell and orders", passed, parts.join("; "))
}

/// Criterion 3: the large-lambda, small-eps cell has an O(1) error.
pub fn criterion_3(table: &OscillatoryTable) -> Outcome {
    let cell = &table.cells[3][0];
    let (passed, detail) = match (cell.e1, &cell.failure) {
        (Some(e), _) => (e > 0.5, format!("e1(eps0/8, lambda0) = {e:.3e}")),
        (None, Some(why)) => (true, format!("solve broke down: {why}")),
        (None, None) => (false, "cell missing".to_string()),
    };
    Outcome::new(3, "sub-diagonal degradation", passed, detail)
}

/// Criterion 4: successive `e1_max` ratios between eps and eps/2.
pub fn criterion_4() -> Outcome {
    let run = || -> Result<(bool, String)> {
        let spec = StudySpec::long_time(vec![2.0, 1.5, 1.2], vec![1.0, 0.5, 0.25])?;
        let study = run_long_time_study(&spec)?;
        let mut passed = true;
        let mut parts = Vec::new();
        for r in &study.ratios {
            let ok = r.ratio.is_some_and(|v| (8.0..=32.0).contains(&v));
            passed &= ok;
            parts.push(format!(
                "a={} {}->{}: {}",
                r.alpha,
                r.eps,
                r.eps_next,
                r.ratio.map(|v| format!("{v:.2}")).unwrap_or("-".into())
            ));
        }
        Ok((passed, format!("ratios (target [8,32]) {}", parts.join(", "))))
    };
    Outcome::from_result(4, "long-time eps scaling", run())
}

/// Errors at or below this are treated as having reached the floor.
pub const SPATIAL_FLOOR: f64 = 1e-10;

/// Criterion 5: spectral accuracy and eps-independence of spatial errors.
pub fn criterion_5(cache: &ReferenceCache) -> Outcome {
    let run = || -> Result<(bool, String)> {
        let spec = StudySpec::spatial(vec![2.0, 1.5, 1.2])?;
        let curves = run_spatial_study(&spec, cache)?;
        let mut passed = true;
        let mut parts = Vec::new();
        for pair in curves.chunks(spec.eps.len()) {
            let curve = &pair[0];
            let at_64 = curve.points.iter().find(|p| p.0 == 64).map(|p| p.1).unwrap_or(f64::INFINITY);
            // Super-algebraic: the gain per doubling keeps growing until the floor.
            let gains: Vec<f64> = curve
                .points
                .windows(2)
                .filter(|w| w[1].1 > SPATIAL_FLOOR)
                .map(|w| w[0].1 / w[1].1)
                .collect();
            let accelerating = gains.len() >= 2 && gains.windows(2).all(|g| g[1] > g[0]) && gains[0] > 1.0;
            let mut spread = 0.0f64;
            for (a, b) in pair[0].points.iter().zip(&pair[1].points) {
                if a.1 > SPATIAL_FLOOR && b.1 > SPATIAL_FLOOR {
                    spread = spread.max((a.1 - b.1).abs() / a.1.max(b.1));
                }
            }
            passed &= at_64 <= 1e-9 && accelerating && spread <= 0.1;
            let errors: Vec<String> = curve.points.iter().map(|p| format!("{:.1e}", p.1)).collect();
            let gains: Vec<String> = gains.iter().map(|g| format!("{g:.0}")).collect();
            parts.push(format!(
                "a={}: e1 [{}] gains [{}], eps {} vs {} spread {:.1}%",
                curve.alpha,
                errors.join(" "),
                gains.join(" "),
                pair[0].eps,
                pair[1].eps,
                100.0 * spread
            ));
        }
        Ok((passed, parts.join("; ")))
    };
    Outcome::from_result(5, "spatial spectral accuracy", run())
}

/// Linear solution `psi_l(t) = psi_l cos(delta t) + eta_l sin(delta t)/delta`.
fn exact_linear(initial: &KgeState, params: &ModelParams, t: f64) -> Result<SpectralField> {
    let grid = initial.psi.grid();
    let coeffs = grid
        .frequency_sq()
        .iter()
        .zip(initial.psi.coeffs().iter().zip(initial.eta.coeffs()))
        .map(|(w, (p, e))| {
            let delta = (w.powf(params.alpha / 2.0) + params.beta).sqrt();
            p * (delta * t).cos() + e * ((delta * t).sin() / delta)
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs)
}

/// Criterion 6: with eps = 0 the scheme is the exact flow.
pub fn criterion_6() -> Outcome {
    let run = || -> Result<(bool, String)> {
        let mut worst = 0.0f64;
        for data in [InitialData::Smooth1d, InitialData::Complex1d] {
            let grid = data.grid(&[64])?;
            let initial = builtin_initial_data(&data, &grid)?;
            for alpha in [2.0, 1.5, 1.2] {
                let params = if data.is_real() {
                    ModelParams::real_cubic(alpha, 1.0, 0.0)?
                } else {
                    ModelParams::complex_power(alpha, 1.0, 0.0, 1)?
                };
                let traj = solve(&SolveConfig::new(params, 1e-2, 10.0), &initial)?;
                let exact = exact_linear(&initial, &params, 10.0)?;
                worst = worst.max(h_alpha_half_error(&traj.final_state.psi, &exact, alpha)?);
            }
        }
        Ok((worst <= 1e-12, format!("max H^(alpha/2) deviation over 1000 steps {worst:.2e}")))
    };
    Outcome::from_result(6, "linear exactness", run())
}

/// Criterion 7: agreement with the RK4 oracle at `tau = 1e-4`, `t = 1`.
pub fn criterion_7() -> Outcome {
    let run = || -> Result<(bool, String)> {
        let mut worst = 0.0f64;
        let mut parts = Vec::new();
        for (data, real) in [(InitialData::Smooth1d, true), (InitialData::Complex1d, false)] {
            let grid = data.grid(&[32])?;
            let initial = builtin_initial_data(&data, &grid)?;
            let (a, b) = data.domain().expect("built-in")[0];
            for alpha in [2.0, 1.5, 1.2] {
                let params = if real {
                    ModelParams::real_cubic(alpha, 1.0, 0.5)?
                } else {
                    ModelParams::complex_power(alpha, 1.0, 0.5, 2)?
                };
                let oracle = Rk4Oracle::new(a, b, 32, &params);
                let (psi, _) = oracle.integrate(initial.psi.coeffs(), initial.eta.coeffs(), 1e-4, 10_000);
                let ewi = solve(&SolveConfig::new(params, 1e-4, 1.0), &initial)?;
                let err = h_alpha_half_error(&ewi.final_state.psi, &SpectralField::from_coeffs(&grid, psi)?, alpha)?;
                worst = worst.max(err);
                parts.push(format!("{}/a={alpha}: {err:.1e}", data.name()));
            }
        }
        Ok((worst <= 1e-7, parts.join(", ")))
    };
    Outcome::from_result(7, "RK4 oracle agreement", run())
}

/// Criterion 8: bounded energy drift that refines at second order.
pub fn criterion_8() -> Outcome {
    let run = || -> Result<(bool, String)> {
        let spec = StudySpec::energy(vec![2.0, 1.5, 1.2], 0.5)?;
        let series = run_energy_study(&spec)?;
        let mut passed = true;
        let mut parts = Vec::new();
        for s in &series {
            passed &= s.max_deviation <= 1e-2;
            if let Some(order) = s.order {
                passed &= (order - 2.0).abs() <= 0.3;
            }
            parts.push(format!(
                "a={} tau={}: {:.2e}{}",
                s.alpha,
                s.tau,
                s.max_deviation,
                s.order.map(|o| format!(" (order {o:.2})")).unwrap_or_default()
            ));
        }
        passed &= series.iter().skip(1).step_by(2).all(|s| s.order.is_some());
        Ok((passed, parts.join(", ")))
    };
    Outcome::from_result(8, "energy conservation", run())
}

fn random_field(grid: &Arc<SpectralGrid>, rng: &mut StdRng, decay: bool) -> SpectralField {
    let w = grid.frequency_sq();
    let coeffs = (0..grid.len())
        .map(|k| {
            let scale = if decay { (-0.05 * w[k]).exp() } else { 1.0 };
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs).expect("matching length")
}

/// Criterion 9: module invariants on seeded random fields.
pub fn criterion_9() -> Outcome {
    let run = || -> Result<(bool, String)> {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        let grids = [
            SpectralGrid::new_1d(0.0, 2.0 * PI, 32)?,
            SpectralGrid::new_1d(-1.0, 3.0, 16)?,
            SpectralGrid::new_2d((0.0, 1.0, 8), (0.0, 2.0 * PI, 16))?,
        ];
        let mut failures = Vec::new();
        let mut check = |name: &str, value: f64, tol: f64| {
            if !(value <= tol) {
                failures.push(format!("{name} {value:.1e} > {tol:.0e}"));
            }
        };
        let mut cases = 0;
        for grid in &grids {
            for _ in 0..20 {
                cases += 1;
                let alpha = rng.random_range(1.01..=2.0);
                let beta = rng.random_range(0.1..3.0);
                let params = ModelParams::complex_power(alpha, beta, 0.5, 1)?;
                let symbol = make_symbol(grid, &params);
                let f = random_field(grid, &mut rng, false);

                let values = inverse_transform(&f);
                check("transform roundtrip", forward_transform(&values, grid)?.max_coeff_diff(&f)?, 1e-13);

                let norm = sobolev_norm(&f, alpha / 2.0)?;
                let (t, s) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
                let moved = propagator(&f, &symbol, t, 1.0)?;
                check("propagator isometry", (sobolev_norm(&moved, alpha / 2.0)? - norm).abs() / norm, 1e-13);
                let composed = propagator(&moved, &symbol, s, 1.0)?;
                check(
                    "propagator group law",
                    composed.max_coeff_diff(&propagator(&f, &symbol, t + s, 1.0)?)?,
                    1e-12,
                );
                check(
                    "operator inverse",
                    nabla_alpha(&nabla_alpha_inv(&f, &symbol)?, &symbol)?.max_coeff_diff(&f)?,
                    1e-13,
                );

                let state = KgeState::new(f.clone(), random_field(grid, &mut rng, false), 0.0)?;
                let back = from_nls(&to_nls(&state, &symbol, false)?, &symbol)?;
                check(
                    "coupled roundtrip",
                    back.psi.max_coeff_diff(&state.psi)?.max(back.eta.max_coeff_diff(&state.eta)?),
                    1e-12,
                );
                let real = KgeState::new(state.psi.real_part(), state.eta.real_part(), 0.0)?;
                let back = from_nls(&to_nls(&real, &symbol, true)?, &symbol)?;
                check(
                    "real roundtrip",
                    back.psi.max_coeff_diff(&real.psi)?.max(back.eta.max_coeff_diff(&real.eta)?),
                    1e-12,
                );
            }
            // Reality preservation of the real scheme on smooth random data.
            let params = ModelParams::real_cubic(rng.random_range(1.01..=2.0), 1.0, 1.0)?;
            let psi = random_field(grid, &mut rng, true).real_part();
            let eta = random_field(grid, &mut rng, true).real_part();
            let mut integrator = Integrator::new(&SolveConfig::new(params, 1e-2, 1.0), &KgeState::new(psi, eta, 0.0)?)?;
            for _ in 0..50 {
                integrator.step()?;
            }
            let state = integrator.state()?;
            check(
                "reality preservation",
                state.psi.hermitian_defect().max(state.eta.hermitian_defect()),
                1e-12,
            );
        }
        let passed = failures.is_empty();
        let detail = if passed {
            format!("{cases} random cases x 6 identities plus reality checks held")
        } else {
            failures.join("; ")
        };
        Ok((passed, detail))
    };
    Outcome::from_result(9, "property suites", run())
}

/// Default eps for the 2D runs, chosen so that `1/eps^2` is the last dump time.
pub fn dump_eps() -> f64 {
    1.0 / 128f64.sqrt()
}

/// Criterion 10: the 2D real cubic problem to `T = 8`.
pub fn criterion_10() -> Outcome {
    let run = || -> Result<(bool, String)> {
        let mut spec = StudySpec::field_dump_2d(vec![2.0, 1.4], dump_eps())?;
        spec.dump_times = vec![0.0, 8.0];
        let dumps = run_field_dump_2d(&spec)?;
        let mut passed = dumps.len() == 4;
        let mut parts = Vec::new();
        for d in dumps.iter().filter(|d| d.time > 0.0) {
            passed &= d.max_imag <= 1e-10 && d.energy_deviation <= 1e-2;
            parts.push(format!(
                "a={}: |Im psi| {:.1e}, energy dev {:.1e}",
                d.alpha, d.max_imag, d.energy_deviation
            ));
        }
        Ok((passed, parts.join("; ")))
    };
    Outcome::from_result(10, "2D smoke", run())
}

/// Runs every criterion, sharing one reference cache.
pub fn run_all(cache: &ReferenceCache) -> Vec<Outcome> {
    let tables = [2.0, 1.5, 1.2].map(|alpha| oscillatory_table(alpha, cache));
    let mut out = Vec::new();
    match &tables {
        [Ok(t2), Ok(t15), Ok(t12)] => {
            out.push(criterion_1(t2));
            out.push(criterion_2(t15, t12));
            out.push(criterion_3(t2));
        }
        _ => {
            let why = tables
                .iter()
                .filter_map(|t| t.as_ref().err())
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            for (id, name) in [(1, "table alpha=2"), (2, "tables alpha=1.5,1.2"), (3, "sub-diagonal degradation")] {
                out.push(Outcome::new(id, name, false, format!("error: {why}")));
            }
        }
    }
    out.push(criterion_4());
    out.push(criterion_5(cache));
    out.push(criterion_6());
    out.push(criterion_7());
    out.push(criterion_8());
    out.push(criterion_9());
    out.push(criterion_10());
    out
}
