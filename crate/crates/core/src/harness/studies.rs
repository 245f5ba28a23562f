//! Study runners. Independent cells run on the rayon pool; results are
//! gathered by cell index so output never depends on scheduling.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{inverse_transform, SpectralGrid};
use crate::harness::csv::{format_number, CsvRow};
use crate::harness::data::builtin_initial_data;
use crate::harness::reference::{CachedReference, ReferenceCache, ReferenceKey};
use crate::harness::spec::{StudyKind, StudySpec};
use crate::observables::{convergence_order, energy, h_alpha_half_error, EnergyRecord, ErrorRecord};
use crate::ops::ModelParams;
use crate::solver::{rescale_state, solve, solve_oscillatory, Integrator, SolveConfig};
use crate::state::KgeState;

fn expect_kind(spec: &StudySpec, kind: StudyKind) -> Result<()> {
    spec.validate()?;
    if spec.kind != kind {
        return Err(Error::invalid("kind", format!("expected a {kind:?} study, got {:?}", spec.kind)));
    }
    Ok(())
}

fn initial_state(spec: &StudySpec, shape: &[usize]) -> Result<(Arc<SpectralGrid>, KgeState)> {
    let grid = spec.data.grid(shape)?;
    let state = builtin_initial_data(&spec.data, &grid)?;
    Ok((grid, state))
}

fn max_or_zero(iters: &[usize]) -> usize {
    iters.iter().copied().max().unwrap_or(0)
}

fn orders_along(errors: &[Option<f64>], steps: &[f64]) -> Vec<Option<f64>> {
    (0..errors.len())
        .map(|j| {
            if j == 0 {
                return None;
            }
            match (errors[j - 1], errors[j]) {
                (Some(c), Some(f)) => convergence_order(c, f, steps[j - 1] / steps[j]),
                _ => None,
            }
        })
        .collect()
}

/// Final-time reference for `(params, n_e, tau_e, t_final)`.
fn final_reference(
    spec: &StudySpec,
    cache: &ReferenceCache,
    params: ModelParams,
    tau: f64,
    t_final: f64,
) -> Result<Arc<CachedReference>> {
    let shape = vec![spec.reference.n];
    let key = ReferenceKey {
        params,
        data: spec.data.clone(),
        shape: shape.clone(),
        tau,
        t_final,
    };
    let (grid, initial) = initial_state(spec, &shape)?;
    cache.get_or_compute(&key, &grid, || {
        let cfg = SolveConfig::new(params, tau, t_final);
        if spec.kind == StudyKind::OscillatoryTable {
            let scaled = rescale_state(&initial, params.coupling(), false);
            Ok(solve_oscillatory(&cfg, &scaled)?.final_state)
        } else {
            Ok(solve(&cfg, &initial)?.final_state)
        }
    })
}

// ---------------------------------------------------------------- table

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCell {
    pub e1: Option<f64>,
    pub iters_max: Option<usize>,
    /// Why the solve failed, for cells that blew up.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillatoryTable {
    pub alpha: f64,
    pub beta: f64,
    pub p: u32,
    pub n: usize,
    pub eps: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// `cells[i][j]` is row `eps[i]`, column `lambdas[j]`.
    pub cells: Vec<Vec<TableCell>>,
    /// Order between columns `j-1` and `j` of each row; `None` in column 0.
    pub orders: Vec<Vec<Option<f64>>>,
    pub reference_checksums: Vec<String>,
}

impl OscillatoryTable {
    pub fn e1(&self, i: usize, j: usize) -> Option<f64> {
        self.cells.get(i)?.get(j)?.e1
    }

    pub fn order(&self, i: usize, j: usize) -> Option<f64> {
        *self.orders.get(i)?.get(j)?
    }

    /// The diagonal and everything right of it.
    pub fn in_upper_triangle(i: usize, j: usize) -> bool {
        j >= i
    }

    pub fn rows(&self) -> Vec<CsvRow> {
        let mut rows = Vec::new();
        for (i, &eps) in self.eps.iter().enumerate() {
            for (j, &lambda) in self.lambdas.iter().enumerate() {
                let cell = &self.cells[i][j];
                rows.push(CsvRow {
                    alpha: self.alpha,
                    beta: self.beta,
                    eps,
                    p: self.p,
                    tau: lambda,
                    n: self.n,
                    t_final: 1.0,
                    e1: cell.e1,
                    order: self.orders[i][j],
                    iters_max: cell.iters_max,
                    ..Default::default()
                });
            }
        }
        rows
    }

    /// Table layout: one error row and one order row per eps.
    pub fn layout_csv(&self, full_precision: bool) -> String {
        let f = |x: Option<f64>| x.map(|v| format_number(v, full_precision)).unwrap_or_else(|| "-".into());
        let mut out = String::from("e1(r=1)");
        for &lambda in &self.lambdas {
            out.push_str(&format!(",{}", format_number(lambda, full_precision)));
        }
        out.push('\n');
        for (i, &eps) in self.eps.iter().enumerate() {
            out.push_str(&format_number(eps, full_precision));
            for cell in &self.cells[i] {
                out.push(',');
                out.push_str(&match (&cell.e1, &cell.failure) {
                    (Some(e), _) => format_number(*e, full_precision),
                    (None, Some(_)) => "failed".into(),
                    (None, None) => "-".into(),
                });
            }
            out.push_str("\norder");
            for order in &self.orders[i] {
                out.push(',');
                out.push_str(&f(*order));
            }
            out.push('\n');
        }
        out
    }
}

/// Errors at `r = t_final` of the oscillatory equation for every
/// `(eps, lambda)`, against a reference with step `eps^{2p} * reference.tau`.
pub fn run_oscillatory_table(spec: &StudySpec, cache: &ReferenceCache) -> Result<Vec<OscillatoryTable>> {
    expect_kind(spec, StudyKind::OscillatoryTable)?;
    let n = spec.sizes[0];
    let r_final = spec.horizon(1.0);
    spec.alphas
        .iter()
        .map(|&alpha| {
            let (_, initial) = initial_state(spec, &[n])?;
            let references = spec
                .eps
                .par_iter()
                .map(|&eps| {
                    let params = spec.cell_params(alpha, eps)?;
                    final_reference(spec, cache, params, params.coupling() * spec.reference.tau, r_final)
                })
                .collect::<Result<Vec<_>>>()?;
            let jobs: Vec<(usize, usize)> = (0..spec.eps.len())
                .flat_map(|i| (0..spec.steps.len()).map(move |j| (i, j)))
                .collect();
            let results: Vec<TableCell> = jobs
                .par_iter()
                .map(|&(i, j)| {
                    let params = spec.cell_params(alpha, spec.eps[i])?;
                    let cfg = SolveConfig::new(params, spec.steps[j], r_final);
                    let scaled = rescale_state(&initial, params.coupling(), false);
                    let cell = match solve_oscillatory(&cfg, &scaled) {
                        Ok(traj) => {
                            let e1 = h_alpha_half_error(&traj.final_state.psi, &references[i].state.psi, alpha)?;
                            if e1.is_finite() {
                                TableCell {
                                    e1: Some(e1),
                                    iters_max: Some(traj.max_iterations()),
                                    failure: None,
                                }
                            } else {
                                TableCell {
                                    e1: None,
                                    iters_max: Some(traj.max_iterations()),
                                    failure: Some("non-finite solution".into()),
                                }
                            }
                        }
                        Err(err) => {
                            log::warn!("cell eps={} lambda={} failed: {err}", spec.eps[i], spec.steps[j]);
                            TableCell {
                                e1: None,
                                iters_max: None,
                                failure: Some(err.to_string()),
                            }
                        }
                    };
                    Ok(cell)
                })
                .collect::<Result<Vec<_>>>()?;
            let cols = spec.steps.len();
            let cells: Vec<Vec<TableCell>> = results.chunks(cols).map(|row| row.to_vec()).collect();
            let orders = cells
                .iter()
                .map(|row| orders_along(&row.iter().map(|c| c.e1).collect::<Vec<_>>(), &spec.steps))
                .collect();
            Ok(OscillatoryTable {
                alpha,
                beta: spec.params.beta,
                p: spec.params.p,
                n,
                eps: spec.eps.clone(),
                lambdas: spec.steps.clone(),
                cells,
                orders,
                reference_checksums: references.iter().map(|r| r.checksum.clone()).collect(),
            })
        })
        .collect()
}

// ------------------------------------------------------------- temporal

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorCurve {
    pub alpha: f64,
    pub eps: f64,
    pub n: usize,
    pub t_final: f64,
    /// One record per time step, coarsest first; `e1_max` equals `e1`.
    pub records: Vec<ErrorRecord>,
    pub iters_max: Vec<usize>,
    pub reference_checksum: String,
}

impl ErrorCurve {
    pub fn rows(&self, beta: f64) -> Vec<CsvRow> {
        self.records
            .iter()
            .zip(&self.iters_max)
            .map(|(r, &iters)| CsvRow {
                alpha: r.alpha,
                beta,
                eps: r.eps,
                p: r.p,
                tau: r.tau,
                n: self.n,
                t_final: self.t_final,
                e1: Some(r.e1),
                order: r.order,
                iters_max: Some(iters),
                ..Default::default()
            })
            .collect()
    }
}

/// Error at the final time for each `tau`, for every `(alpha, eps)`.
pub fn run_temporal_study(spec: &StudySpec, cache: &ReferenceCache) -> Result<Vec<ErrorCurve>> {
    expect_kind(spec, StudyKind::Temporal)?;
    let n = spec.sizes[0];
    let pairs: Vec<(f64, f64)> = spec
        .alphas
        .iter()
        .flat_map(|&a| spec.eps.iter().map(move |&e| (a, e)))
        .collect();
    pairs
        .par_iter()
        .map(|&(alpha, eps)| {
            let params = spec.cell_params(alpha, eps)?;
            let t_final = spec.horizon(eps);
            let reference = final_reference(spec, cache, params, spec.reference.tau, t_final)?;
            let (_, initial) = initial_state(spec, &[n])?;
            let runs = spec
                .steps
                .par_iter()
                .map(|&tau| {
                    let traj = solve(&SolveConfig::new(params, tau, t_final), &initial)?;
                    let e1 = h_alpha_half_error(&traj.final_state.psi, &reference.state.psi, alpha)?;
                    Ok((e1, traj.max_iterations()))
                })
                .collect::<Result<Vec<_>>>()?;
            let orders = orders_along(&runs.iter().map(|r| Some(r.0)).collect::<Vec<_>>(), &spec.steps);
            let records = spec
                .steps
                .iter()
                .zip(&runs)
                .zip(orders)
                .map(|((&tau, &(e1, _)), order)| ErrorRecord {
                    eps,
                    tau,
                    alpha,
                    p: params.p,
                    e1,
                    e1_max: e1,
                    order,
                })
                .collect();
            Ok(ErrorCurve {
                alpha,
                eps,
                n,
                t_final,
                records,
                iters_max: runs.iter().map(|r| r.1).collect(),
                reference_checksum: reference.checksum.clone(),
            })
        })
        .collect()
}

// ------------------------------------------------------------ long time

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorSample {
    pub time: f64,
    pub e1: f64,
    pub e1_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongTimeCurve {
    pub alpha: f64,
    pub eps: f64,
    pub tau: f64,
    pub n: usize,
    pub horizon: f64,
    /// Set when the step cap cut the horizon short.
    pub truncated: bool,
    pub samples: Vec<ErrorSample>,
    pub iters_max: usize,
}

impl LongTimeCurve {
    pub fn e1_max(&self) -> f64 {
        self.samples.last().map(|s| s.e1_max).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsRatio {
    pub alpha: f64,
    pub eps: f64,
    pub eps_next: f64,
    /// `e1_max(eps) / e1_max(eps_next)`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongTimeStudy {
    pub curves: Vec<LongTimeCurve>,
    pub ratios: Vec<EpsRatio>,
}

impl LongTimeStudy {
    pub fn rows(&self, beta: f64, p: u32) -> Vec<CsvRow> {
        let mut rows = Vec::new();
        for c in &self.curves {
            for s in &c.samples {
                rows.push(CsvRow {
                    alpha: c.alpha,
                    beta,
                    eps: c.eps,
                    p,
                    tau: c.tau,
                    n: c.n,
                    t_final: s.time,
                    e1: Some(s.e1),
                    e1_max: Some(s.e1_max),
                    iters_max: Some(c.iters_max),
                    ..Default::default()
                });
            }
        }
        rows
    }
}

fn long_time_curve(spec: &StudySpec, alpha: f64, eps: f64, tau: f64) -> Result<LongTimeCurve> {
    let params = spec.cell_params(alpha, eps)?;
    let n = spec.sizes[0];
    let horizon = spec.horizon(eps);
    let mut steps = (horizon / tau).round() as usize;
    let truncated = steps > spec.max_steps;
    if truncated {
        log::warn!("eps={eps}: {steps} steps exceed the cap, stopping after {}", spec.max_steps);
        steps = spec.max_steps;
    }
    let sub = (tau / spec.reference.tau).round() as usize;
    let (_, initial) = initial_state(spec, &[n])?;
    let (_, fine_initial) = initial_state(spec, &[spec.reference.n])?;
    let mut numeric = Integrator::new(&SolveConfig::new(params, tau, horizon), &initial)?;
    let mut reference = Integrator::new(&SolveConfig::new(params, spec.reference.tau, horizon), &fine_initial)?;
    let mut samples = Vec::new();
    let mut e1_max = 0.0f64;
    let mut sample = |numeric: &Integrator, reference: &Integrator| -> Result<()> {
        let e1 = h_alpha_half_error(&numeric.state()?.psi, &reference.state()?.psi, alpha)?;
        e1_max = e1_max.max(e1);
        samples.push(ErrorSample {
            time: numeric.time(),
            e1,
            e1_max,
        });
        Ok(())
    };
    sample(&numeric, &reference)?;
    for k in 1..=steps {
        numeric.step()?;
        for _ in 0..sub {
            reference.step()?;
        }
        if k % spec.sample_every == 0 || k == steps {
            sample(&numeric, &reference)?;
        }
    }
    Ok(LongTimeCurve {
        alpha,
        eps,
        tau,
        n,
        horizon: steps as f64 * tau,
        truncated,
        samples,
        iters_max: max_or_zero(numeric.iterations()),
    })
}

/// Runs numeric and reference solutions in lock step up to `1/eps^{2p}`,
/// recording `e1` and its running maximum.
pub fn run_long_time_study(spec: &StudySpec) -> Result<LongTimeStudy> {
    expect_kind(spec, StudyKind::LongTime)?;
    let tau = spec.steps[0];
    let jobs: Vec<(f64, f64)> = spec
        .alphas
        .iter()
        .flat_map(|&a| spec.eps.iter().map(move |&e| (a, e)))
        .collect();
    let curves = jobs
        .par_iter()
        .map(|&(alpha, eps)| long_time_curve(spec, alpha, eps, tau))
        .collect::<Result<Vec<_>>>()?;
    let mut ratios = Vec::new();
    for pair in curves.windows(2) {
        if pair[0].alpha == pair[1].alpha {
            let (a, b) = (pair[0].e1_max(), pair[1].e1_max());
            ratios.push(EpsRatio {
                alpha: pair[0].alpha,
                eps: pair[0].eps,
                eps_next: pair[1].eps,
                ratio: (a > 0.0 && b > 0.0).then(|| a / b),
            });
        }
    }
    Ok(LongTimeStudy { curves, ratios })
}

// -------------------------------------------------------------- spatial

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialCurve {
    pub alpha: f64,
    pub eps: f64,
    pub tau: f64,
    pub t_final: f64,
    /// `(N, e1)` in increasing N.
    pub points: Vec<(usize, f64)>,
    pub reference_checksum: String,
}

impl SpatialCurve {
    pub fn rows(&self, beta: f64, p: u32) -> Vec<CsvRow> {
        let errors: Vec<Option<f64>> = self.points.iter().map(|p| Some(p.1)).collect();
        let widths: Vec<f64> = self.points.iter().map(|p| 1.0 / p.0 as f64).collect();
        let orders = orders_along(&errors, &widths);
        self.points
            .iter()
            .zip(orders)
            .map(|(&(n, e1), order)| CsvRow {
                alpha: self.alpha,
                beta,
                eps: self.eps,
                p,
                tau: self.tau,
                n,
                t_final: self.t_final,
                e1: Some(e1),
                order,
                ..Default::default()
            })
            .collect()
    }
}

/// Error against N at a fixed time. Numeric and reference runs share the
/// time step so the temporal error cancels and only the spatial part is left.
pub fn run_spatial_study(spec: &StudySpec, cache: &ReferenceCache) -> Result<Vec<SpatialCurve>> {
    expect_kind(spec, StudyKind::Spatial)?;
    let tau = spec.steps[0];
    let mut sizes = spec.sizes.clone();
    sizes.sort_unstable();
    let pairs: Vec<(f64, f64)> = spec
        .alphas
        .iter()
        .flat_map(|&a| spec.eps.iter().map(move |&e| (a, e)))
        .collect();
    pairs
        .par_iter()
        .map(|&(alpha, eps)| {
            let params = spec.cell_params(alpha, eps)?;
            let t_final = spec.horizon(eps);
            let reference = final_reference(spec, cache, params, spec.reference.tau, t_final)?;
            let points = sizes
                .par_iter()
                .map(|&n| {
                    let (_, initial) = initial_state(spec, &[n])?;
                    let traj = solve(&SolveConfig::new(params, tau, t_final), &initial)?;
                    Ok((n, h_alpha_half_error(&traj.final_state.psi, &reference.state.psi, alpha)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SpatialCurve {
                alpha,
                eps,
                tau,
                t_final,
                points,
                reference_checksum: reference.checksum.clone(),
            })
        })
        .collect()
}

// --------------------------------------------------------------- energy

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergySeries {
    pub alpha: f64,
    pub eps: f64,
    pub tau: f64,
    pub n: usize,
    pub records: Vec<EnergyRecord>,
    pub max_deviation: f64,
    /// Order of `max_deviation` against the previous step size of the same alpha.
    pub order: Option<f64>,
    pub iters_max: usize,
}

impl EnergySeries {
    pub fn rows(&self, beta: f64, p: u32) -> Vec<CsvRow> {
        self.records
            .iter()
            .map(|r| CsvRow {
                alpha: self.alpha,
                beta,
                eps: self.eps,
                p,
                tau: self.tau,
                n: self.n,
                t_final: r.time,
                energy_dev: Some(r.relative_deviation),
                order: self.order,
                iters_max: Some(self.iters_max),
                ..Default::default()
            })
            .collect()
    }
}

fn energy_series(spec: &StudySpec, alpha: f64, eps: f64, tau: f64) -> Result<EnergySeries> {
    let params = spec.cell_params(alpha, eps)?;
    let n = spec.sizes[0];
    let horizon = spec.horizon(eps);
    let steps = ((horizon / tau).round() as usize).min(spec.max_steps);
    let (_, initial) = initial_state(spec, &[n])?;
    let mut integrator = Integrator::new(&SolveConfig::new(params, tau, horizon), &initial)?;
    let e0 = energy(&initial, &params);
    let mut records = vec![EnergyRecord::new(0.0, e0, e0)];
    for k in 1..=steps {
        integrator.step()?;
        if k % spec.sample_every == 0 || k == steps {
            let e = energy(&integrator.state()?, &params);
            records.push(EnergyRecord::new(integrator.time(), e, e0));
        }
    }
    let max_deviation = records.iter().map(|r| r.relative_deviation).fold(0.0, f64::max);
    Ok(EnergySeries {
        alpha,
        eps,
        tau,
        n,
        records,
        max_deviation,
        order: None,
        iters_max: max_or_zero(integrator.iterations()),
    })
}

/// Relative energy deviation over `[0, 1/eps^{2p}]` for every step size.
pub fn run_energy_study(spec: &StudySpec) -> Result<Vec<EnergySeries>> {
    expect_kind(spec, StudyKind::Energy)?;
    let jobs: Vec<(f64, f64, f64)> = spec
        .alphas
        .iter()
        .flat_map(|&a| spec.eps.iter().flat_map(move |&e| spec.steps.iter().map(move |&t| (a, e, t))))
        .collect();
    let mut series = jobs
        .par_iter()
        .map(|&(a, e, t)| energy_series(spec, a, e, t))
        .collect::<Result<Vec<_>>>()?;
    for k in 1..series.len() {
        let (prev, cur) = (&series[k - 1], &series[k]);
        if prev.alpha == cur.alpha && prev.eps == cur.eps {
            let order = convergence_order(prev.max_deviation, cur.max_deviation, prev.tau / cur.tau);
            series[k].order = order;
        }
    }
    Ok(series)
}

// ------------------------------------------------------------- 2D dumps

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldDump {
    pub alpha: f64,
    pub eps: f64,
    pub time: f64,
    pub shape: [usize; 2],
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `Re psi` at the nodes, row-major with `y` fastest.
    pub values: Vec<f64>,
    pub max_imag: f64,
    pub energy_deviation: f64,
}

impl FieldDump {
    pub fn to_csv(&self, full_precision: bool) -> String {
        let mut out = String::from("x,y,psi\n");
        for (i, &x) in self.x.iter().enumerate() {
            for (j, &y) in self.y.iter().enumerate() {
                let v = self.values[i * self.shape[1] + j];
                out.push_str(&format!(
                    "{},{},{}\n",
                    format_number(x, full_precision),
                    format_number(y, full_precision),
                    format_number(v, full_precision)
                ));
            }
        }
        out
    }
}

fn dump(state: &KgeState, alpha: f64, eps: f64, e0: f64, params: &ModelParams) -> FieldDump {
    let grid = state.psi.grid();
    let values = inverse_transform(&state.psi);
    let axes = grid.axes();
    FieldDump {
        alpha,
        eps,
        time: state.time,
        shape: [axes[0].n, axes[1].n],
        x: axes[0].nodes(),
        y: axes[1].nodes(),
        max_imag: values.iter().map(|v| v.im.abs()).fold(0.0, f64::max),
        values: values.iter().map(|v| v.re).collect(),
        energy_deviation: EnergyRecord::new(state.time, energy(state, params), e0).relative_deviation,
    }
}

/// Grid values of `psi` at each requested time, for each alpha.
pub fn run_field_dump_2d(spec: &StudySpec) -> Result<Vec<FieldDump>> {
    expect_kind(spec, StudyKind::FieldDump2d)?;
    let tau = spec.steps[0];
    let eps = spec.eps[0];
    let mut times = spec.dump_times.clone();
    times.sort_by(f64::total_cmp);
    let per_alpha = spec
        .alphas
        .par_iter()
        .map(|&alpha| {
            let params = spec.cell_params(alpha, eps)?;
            let (_, initial) = initial_state(spec, &spec.sizes)?;
            let e0 = energy(&initial, &params);
            let horizon = spec.horizon(eps);
            let mut integrator = Integrator::new(&SolveConfig::new(params, tau, horizon), &initial)?;
            let mut dumps = Vec::new();
            for &t in &times {
                let target = (t / tau).round() as usize;
                while integrator.steps_taken() < target {
                    integrator.step()?;
                }
                let state = if target == 0 { initial.clone() } else { integrator.state()? };
                dumps.push(dump(&state, alpha, eps, e0, &params));
            }
            Ok(dumps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_alpha.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_skip_missing_cells() {
        let errors = [Some(1.6e-3), Some(1e-4), None, Some(1e-6)];
        let orders = orders_along(&errors, &[1.0, 0.25, 0.0625, 0.015625]);
        assert_eq!(orders[0], None);
        assert!((orders[1].unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(orders[2], None);
        assert_eq!(orders[3], None);
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let spec = StudySpec::energy(vec![2.0], 0.5).unwrap();
        assert!(run_long_time_study(&spec).is_err());
    }

    #[test]
    fn small_temporal_study_is_second_order() {
        let mut spec = StudySpec::temporal(2.0, 1.0).unwrap();
        spec.steps = vec![0.1, 0.05, 0.025];
        spec.sizes = vec![16];
        spec.reference = crate::harness::spec::ReferenceSpec { tau: 1e-3, n: 16 };
        let cache = ReferenceCache::in_memory();
        let curves = run_temporal_study(&spec, &cache).unwrap();
        assert_eq!(curves.len(), 1);
        let order = curves[0].records[2].order.unwrap();
        assert!((order - 2.0).abs() < 0.2, "order {order}");
        // A second run hits the cache and is bit-identical.
        let again = run_temporal_study(&spec, &cache).unwrap();
        assert_eq!(curves, again);
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn dumps_start_from_the_data_and_stay_real() {
        let mut spec = StudySpec::field_dump_2d(vec![2.0], 1.0).unwrap();
        spec.sizes = vec![8, 16];
        spec.dump_times = vec![0.0, 0.1];
        let dumps = run_field_dump_2d(&spec).unwrap();
        assert_eq!(dumps.len(), 2);
        let (x, y) = (dumps[0].x[3], dumps[0].y[5]);
        let expected = 2.0 / (1.0 + (2.0 * std::f64::consts::PI * x + y).cos().powi(2));
        assert!((dumps[0].values[3 * 16 + 5] - expected).abs() < 1e-13);
        assert!(dumps.iter().all(|d| d.max_imag < 1e-10));
        assert_eq!(dumps[0].energy_deviation, 0.0);
    }
}
