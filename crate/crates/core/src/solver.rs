//! Second-order exponential wave integrator with trapezoidal (Deuflhard)
//! quadrature of the Duhamel integral.
//!
//! Real case, with `G(phi) = i <nabla>^{-1} g(phi)` and
//! `g(phi) = (phi + conj phi)^3 / 8`:
//!
//! ```text
//! phi^{n+1} = e^{i tau <nabla>} phi^n
//!           + (eps^2 tau / 2) [ G(phi^{n+1}) + e^{i tau <nabla>} G(phi^n) ]
//! ```
//!
//! The complex case applies the same rule to `phi_+` and `phi_-` with the
//! propagators `e^{+- i tau <nabla>}`, the source sign `+-` and
//! `f(psi) = |psi|^{2p} psi` evaluated at `psi = (phi_+ + phi_-)/2`.
//! Both implicit equations are solved by Picard iteration.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{forward_transform, inverse_transform, Axis, SpectralField, SpectralGrid};
use crate::observables::{energy, EnergyRecord};
use crate::ops::{make_symbol, ModelParams, Regime, Symbol};
use crate::state::{from_nls, to_nls, KgeState, NlsState};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub params: ModelParams,
    /// Time step. For oscillatory runs this is the step in the rescaled time.
    pub tau: f64,
    pub t_final: f64,
    /// Keep every `snapshot_stride`-th state; 0 keeps only the endpoints.
    pub snapshot_stride: usize,
    /// Picard stops once the coefficient update is below
    /// `fp_tol * max(1, max_l |c_l|)`.
    pub fp_tol: f64,
    pub fp_max_iter: usize,
    /// Evaluate nonlinearities on a 3/2-padded grid.
    pub dealias: bool,
    pub record_energy: bool,
}

impl SolveConfig {
    pub fn new(params: ModelParams, tau: f64, t_final: f64) -> Self {
        SolveConfig {
            params,
            tau,
            t_final,
            snapshot_stride: 0,
            fp_tol: 1e-13,
            fp_max_iter: 50,
            dealias: false,
            record_energy: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid("tau", format!("must be > 0, got {}", self.tau)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::invalid("t_final", format!("must be >= 0, got {}", self.t_final)));
        }
        if !(self.fp_tol > 0.0) || self.fp_max_iter == 0 {
            return Err(Error::invalid("fixed_point", "tolerance and iteration cap must be positive"));
        }
        Ok(())
    }

    /// Number of full steps and the length of a trailing partial step.
    pub fn step_plan(&self) -> (usize, f64) {
        step_plan(self.t_final, self.tau)
    }
}

fn step_plan(t_final: f64, tau: f64) -> (usize, f64) {
    let ratio = t_final / tau;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        (nearest as usize, 0.0)
    } else {
        let n = ratio.floor();
        (n as usize, t_final - n * tau)
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub state: KgeState,
    pub energy: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub final_state: KgeState,
    /// Picard iterations used by each step.
    pub iterations: Vec<usize>,
    pub energy: Vec<EnergyRecord>,
}

impl Trajectory {
    pub fn max_iterations(&self) -> usize {
        self.iterations.iter().copied().max().unwrap_or(0)
    }

    pub fn max_energy_deviation(&self) -> f64 {
        self.energy
            .iter()
            .map(|r| r.relative_deviation)
            .fold(0.0, f64::max)
    }
}

/// `g` (real case, evaluated on `phi`) or `f` (complex case, evaluated on
/// `psi`) at grid values.
pub fn eval_nonlinearity(values: &[Complex64], regime: Regime, p: u32) -> Vec<Complex64> {
    if regime.is_real() {
        values
            .iter()
            .map(|v| Complex64::new(v.re.powi(3), 0.0))
            .collect()
    } else {
        values
            .iter()
            .map(|v| v * v.norm_sqr().powi(p as i32))
            .collect()
    }
}

fn padded_grid(grid: &SpectralGrid) -> Result<Arc<SpectralGrid>> {
    let axes = grid
        .axes()
        .iter()
        .map(|ax| {
            let m = (3 * ax.n).div_ceil(2);
            Axis::new(ax.a, ax.b, m + m % 2)
        })
        .collect::<Result<Vec<_>>>()?;
    SpectralGrid::new(axes)
}

/// One time step of fixed length with precomputed phase tables.
#[derive(Debug, Clone)]
pub struct EwiStepper {
    params: ModelParams,
    grid: Arc<SpectralGrid>,
    tau: f64,
    phase_plus: Vec<Complex64>,
    phase_minus: Vec<Complex64>,
    /// `i / delta_l`
    source_weights: Vec<Complex64>,
    padded: Option<Arc<SpectralGrid>>,
    fp_tol: f64,
    fp_max_iter: usize,
}

impl EwiStepper {
    pub fn new(cfg: &SolveConfig, symbol: &Symbol, tau: f64) -> Result<Self> {
        let padded = if cfg.dealias {
            Some(padded_grid(symbol.grid())?)
        } else {
            None
        };
        Ok(EwiStepper {
            params: cfg.params,
            grid: Arc::clone(symbol.grid()),
            tau,
            phase_plus: symbol.phases(tau, 1.0),
            phase_minus: symbol.phases(tau, -1.0),
            source_weights: symbol.values().iter().map(|d| I / d).collect(),
            padded,
            fp_tol: cfg.fp_tol,
            fp_max_iter: cfg.fp_max_iter,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `i <nabla>^{-1}` applied to the pseudospectral nonlinearity of `field`.
    fn source(&self, field: &SpectralField) -> Result<Vec<Complex64>> {
        let nonlinear = match &self.padded {
            None => {
                let values = inverse_transform(field);
                let g = eval_nonlinearity(&values, self.params.regime, self.params.p);
                forward_transform(&g, &self.grid)?
            }
            Some(fine) => {
                let values = inverse_transform(&field.resample(fine)?);
                let g = eval_nonlinearity(&values, self.params.regime, self.params.p);
                forward_transform(&g, fine)?.resample(&self.grid)?
            }
        };
        Ok(nonlinear
            .into_coeffs()
            .into_iter()
            .zip(&self.source_weights)
            .map(|(c, w)| c * w)
            .collect())
    }

    fn field(&self, coeffs: Vec<Complex64>) -> SpectralField {
        SpectralField::from_coeffs(&self.grid, coeffs).expect("coefficient length fixed by grid")
    }

    /// Advances the real-case unknown by one step. Returns the new state
    /// and the number of Picard iterations.
    pub fn step_real(&self, phi: &SpectralField, step: usize) -> Result<(SpectralField, usize)> {
        let weight = 0.5 * self.params.coupling() * self.tau;
        let linear: Vec<Complex64> = mul(phi.coeffs(), &self.phase_plus);
        if weight == 0.0 {
            return Ok((self.field(linear), 0));
        }
        let old_source = mul(&self.source(phi)?, &self.phase_plus);
        let known = axpy(&linear, weight, &old_source);
        let mut guess = self.field(axpy(&linear, 2.0 * weight, &old_source));
        for iteration in 1..=self.fp_max_iter {
            let next = self.field(axpy(&known, weight, &self.source(&guess)?));
            let residual = next.max_coeff_diff(&guess)?;
            let scale = max_abs(next.coeffs()).max(1.0);
            guess = next;
            if residual <= self.fp_tol * scale {
                return Ok((guess, iteration));
            } else if iteration == self.fp_max_iter {
                return Err(Error::NonConvergence {
                    step,
                    residual,
                    iterations: iteration,
                });
            }
        }
        unreachable!("fp_max_iter is validated to be positive")
    }

    /// Advances `(phi_+, phi_-)` by one step.
    pub fn step_coupled(
        &self,
        plus: &SpectralField,
        minus: &SpectralField,
        step: usize,
    ) -> Result<(SpectralField, SpectralField, usize)> {
        let weight = 0.5 * self.params.coupling() * self.tau;
        let lin_plus = mul(plus.coeffs(), &self.phase_plus);
        let lin_minus = mul(minus.coeffs(), &self.phase_minus);
        if weight == 0.0 {
            return Ok((self.field(lin_plus), self.field(lin_minus), 0));
        }
        let mean = |p: &SpectralField, m: &SpectralField| -> Result<SpectralField> {
            Ok(p.add(m)?.scale(Complex64::new(0.5, 0.0)))
        };
        let old_source = self.source(&mean(plus, minus)?)?;
        let old_plus = mul(&old_source, &self.phase_plus);
        let old_minus = mul(&old_source, &self.phase_minus);
        let known_plus = axpy(&lin_plus, weight, &old_plus);
        let known_minus = axpy(&lin_minus, -weight, &old_minus);
        let mut guess_plus = self.field(axpy(&lin_plus, 2.0 * weight, &old_plus));
        let mut guess_minus = self.field(axpy(&lin_minus, -2.0 * weight, &old_minus));
        for iteration in 1..=self.fp_max_iter {
            let source = self.source(&mean(&guess_plus, &guess_minus)?)?;
            let next_plus = self.field(axpy(&known_plus, weight, &source));
            let next_minus = self.field(axpy(&known_minus, -weight, &source));
            let residual = next_plus
                .max_coeff_diff(&guess_plus)?
                .max(next_minus.max_coeff_diff(&guess_minus)?);
            let scale = max_abs(next_plus.coeffs()).max(max_abs(next_minus.coeffs())).max(1.0);
            guess_plus = next_plus;
            guess_minus = next_minus;
            if residual <= self.fp_tol * scale {
                return Ok((guess_plus, guess_minus, iteration));
            } else if iteration == self.fp_max_iter {
                return Err(Error::NonConvergence {
                    step,
                    residual,
                    iterations: iteration,
                });
            }
        }
        unreachable!("fp_max_iter is validated to be positive")
    }
}

fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// `x + s * y`
fn axpy(x: &[Complex64], s: f64, y: &[Complex64]) -> Vec<Complex64> {
    x.iter().zip(y).map(|(a, b)| a + b * s).collect()
}

/// `phi_0 = psi_0 - i <nabla>^{-1} psi_1` (or the pair `phi_pm`).
pub fn initial_nls(psi0: &SpectralField, psi1: &SpectralField, symbol: &Symbol, regime: Regime) -> Result<NlsState> {
    let state = KgeState::new(psi0.clone(), psi1.clone(), 0.0)?;
    to_nls(&state, symbol, regime.is_real())
}

/// Free-function form of one real-case step.
pub fn ewi_step_real(phi: &SpectralField, cfg: &SolveConfig, symbol: &Symbol) -> Result<SpectralField> {
    Ok(EwiStepper::new(cfg, symbol, cfg.tau)?.step_real(phi, 0)?.0)
}

/// Free-function form of one coupled step.
pub fn ewi_step_coupled(
    plus: &SpectralField,
    minus: &SpectralField,
    cfg: &SolveConfig,
    symbol: &Symbol,
) -> Result<(SpectralField, SpectralField)> {
    let (p, m, _) = EwiStepper::new(cfg, symbol, cfg.tau)?.step_coupled(plus, minus, 0)?;
    Ok((p, m))
}

/// Stateful time stepper for the unscaled equation.
#[derive(Debug, Clone)]
pub struct Integrator {
    cfg: SolveConfig,
    symbol: Symbol,
    stepper: EwiStepper,
    nls: NlsState,
    steps: usize,
    offset: f64,
    iterations: Vec<usize>,
}

impl Integrator {
    pub fn new(cfg: &SolveConfig, initial: &KgeState) -> Result<Self> {
        cfg.validate()?;
        if cfg.params.regime == Regime::Oscillatory {
            return Err(Error::invalid("regime", "oscillatory runs go through solve_oscillatory"));
        }
        if cfg.params.regime.is_real() && !initial.is_real_valued(1e-10) {
            return Err(Error::invalid("initial", "real-cubic regime needs real-valued data"));
        }
        let symbol = make_symbol(initial.psi.grid(), &cfg.params);
        let stepper = EwiStepper::new(cfg, &symbol, cfg.tau)?;
        let nls = to_nls(initial, &symbol, cfg.params.regime.is_real())?;
        Ok(Integrator {
            cfg: cfg.clone(),
            symbol,
            stepper,
            nls,
            steps: 0,
            offset: initial.time,
            iterations: Vec::new(),
        })
    }

    pub fn time(&self) -> f64 {
        self.nls.time()
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn iterations(&self) -> &[usize] {
        &self.iterations
    }

    pub fn nls_state(&self) -> &NlsState {
        &self.nls
    }

    pub fn state(&self) -> Result<KgeState> {
        from_nls(&self.nls, &self.symbol)
    }

    fn advance(&mut self, stepper: Option<&EwiStepper>, time: f64) -> Result<usize> {
        let stepper = stepper.unwrap_or(&self.stepper);
        let index = self.steps;
        let (next, iters) = match &self.nls {
            NlsState::Real { phi, .. } => {
                let (phi, iters) = stepper.step_real(phi, index)?;
                (NlsState::Real { phi, time }, iters)
            }
            NlsState::Coupled { plus, minus, .. } => {
                let (plus, minus, iters) = stepper.step_coupled(plus, minus, index)?;
                (NlsState::Coupled { plus, minus, time }, iters)
            }
        };
        self.nls = next;
        self.steps += 1;
        self.iterations.push(iters);
        Ok(iters)
    }

    /// One full step of length `tau`.
    pub fn step(&mut self) -> Result<usize> {
        let time = self.offset + (self.steps + 1) as f64 * self.cfg.tau;
        self.advance(None, time)
    }

    /// One step of arbitrary length (used for a trailing partial step).
    pub fn step_by(&mut self, dt: f64) -> Result<usize> {
        let stepper = EwiStepper::new(&self.cfg, &self.symbol, dt)?;
        let time = self.time() + dt;
        self.advance(Some(&stepper), time)
    }
}

/// Integrates from `initial.time` to `initial.time + cfg.t_final`.
pub fn solve(cfg: &SolveConfig, initial: &KgeState) -> Result<Trajectory> {
    let mut integrator = Integrator::new(cfg, initial)?;
    let (full, rest) = cfg.step_plan();
    let record = |state: &KgeState, energies: &mut Vec<EnergyRecord>| -> Option<f64> {
        if cfg.record_energy {
            let e = energy(state, &cfg.params);
            let e0 = energies.first().map(|r| r.energy).unwrap_or(e);
            energies.push(EnergyRecord::new(state.time, e, e0));
            Some(e)
        } else {
            None
        }
    };
    let mut energies = Vec::new();
    let first = integrator.state()?;
    let mut snapshots = vec![Snapshot {
        energy: record(&first, &mut energies),
        state: first,
    }];
    for n in 1..=full {
        integrator.step()?;
        let last = n == full && rest == 0.0;
        if last || (cfg.snapshot_stride > 0 && n % cfg.snapshot_stride == 0) {
            let state = integrator.state()?;
            snapshots.push(Snapshot {
                energy: record(&state, &mut energies),
                state,
            });
        }
    }
    if rest > 0.0 {
        integrator.step_by(rest)?;
        let state = integrator.state()?;
        snapshots.push(Snapshot {
            energy: record(&state, &mut energies),
            state,
        });
    }
    let final_state = snapshots.last().expect("at least the initial snapshot").state.clone();
    Ok(Trajectory {
        snapshots,
        final_state,
        iterations: integrator.iterations,
        energy: energies,
    })
}

/// Maps a state of the rescaled equation `(Phi, Upsilon)` at `r` to the
/// unscaled `(psi, eta)` at `t = r / eps^{2p}`, or back.
pub fn rescale_state(state: &KgeState, coupling: f64, to_unscaled: bool) -> KgeState {
    let (velocity, time) = if to_unscaled {
        (coupling, state.time / coupling)
    } else {
        (1.0 / coupling, state.time * coupling)
    };
    KgeState {
        psi: state.psi.clone(),
        eta: state.eta.scale(Complex64::new(velocity, 0.0)),
        time,
    }
}

/// Solves the oscillatory equation on `r in [0, t_final]` with step
/// `cfg.tau = lambda`. `initial` holds `(Phi(0), Upsilon(0))`; the returned
/// trajectory is expressed in the rescaled variables.
pub fn solve_oscillatory(cfg: &SolveConfig, initial: &KgeState) -> Result<Trajectory> {
    cfg.validate()?;
    if cfg.params.regime != Regime::Oscillatory {
        return Err(Error::invalid("regime", "solve_oscillatory needs the oscillatory regime"));
    }
    if cfg.params.eps <= 0.0 {
        return Err(Error::invalid("eps", "the oscillatory rescaling needs eps > 0"));
    }
    let coupling = cfg.params.coupling();
    let mut inner = cfg.clone();
    inner.params.regime = Regime::ComplexPower;
    inner.tau = cfg.tau / coupling;
    inner.t_final = cfg.t_final / coupling;
    let unscaled = rescale_state(initial, coupling, true);
    let mut traj = solve(&inner, &unscaled)?;
    for snap in &mut traj.snapshots {
        snap.state = rescale_state(&snap.state, coupling, false);
    }
    traj.final_state = rescale_state(&traj.final_state, coupling, false);
    for record in &mut traj.energy {
        record.time *= coupling;
    }
    Ok(traj)
}
