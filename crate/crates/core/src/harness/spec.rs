//! Study descriptions and their validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::data::InitialData;
use crate::ops::{ModelParams, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    Temporal,
    Spatial,
    LongTime,
    Energy,
    OscillatoryTable,
    FieldDump2d,
}

/// Resolution of the fine reference run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSpec {
    /// Time step in unscaled time, also for the oscillatory table.
    pub tau: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySpec {
    pub kind: StudyKind,
    /// Base parameters; `alpha` and `eps` are overridden per cell.
    pub params: ModelParams,
    pub alphas: Vec<f64>,
    pub eps: Vec<f64>,
    /// Time steps `tau` (or `lambda` for the oscillatory table).
    pub steps: Vec<f64>,
    /// Grid sizes; one entry per axis for 2D dumps, a refinement list otherwise.
    pub sizes: Vec<usize>,
    pub data: InitialData,
    pub reference: ReferenceSpec,
    /// Final time; `None` picks the study's natural horizon.
    pub t_final: Option<f64>,
    pub dump_times: Vec<f64>,
    /// Sample the long-time error every this many coarse steps.
    pub sample_every: usize,
    /// Horizons needing more coarse steps than this are truncated.
    pub max_steps: usize,
}

pub const DEFAULT_MAX_STEPS: usize = 10_000_000;

fn halvings(start: f64, count: usize, factor: f64) -> Vec<f64> {
    (0..count).map(|k| start / factor.powi(k as i32)).collect()
}

impl StudySpec {
    fn base(kind: StudyKind, params: ModelParams, data: InitialData) -> Self {
        StudySpec {
            kind,
            alphas: vec![params.alpha],
            eps: vec![params.eps],
            params,
            steps: Vec::new(),
            sizes: Vec::new(),
            data,
            reference: ReferenceSpec { tau: 1e-4, n: 128 },
            t_final: None,
            dump_times: Vec::new(),
            sample_every: 1,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    /// The 5x5 oscillatory table: `eps = 1, 1/2, ..., 1/16`,
    /// `lambda = 0.05, 0.05/4, ..., 0.05/4^4`, N = 128.
    pub fn oscillatory_table(alpha: f64) -> Result<Self> {
        let params = ModelParams::new(alpha, 1.0, 1.0, 1, Regime::Oscillatory)?;
        let mut spec = Self::base(StudyKind::OscillatoryTable, params, InitialData::Complex1d);
        spec.eps = halvings(1.0, 5, 2.0);
        spec.steps = halvings(0.05, 5, 4.0);
        spec.sizes = vec![128];
        spec.t_final = Some(1.0);
        Ok(spec)
    }

    /// Second-order check at `t = 1` with `tau = 2^-4 .. 2^-8`.
    pub fn temporal(alpha: f64, eps: f64) -> Result<Self> {
        let params = ModelParams::complex_power(alpha, 1.0, eps, 2)?;
        let mut spec = Self::base(StudyKind::Temporal, params, InitialData::Smooth1d);
        spec.steps = halvings(1.0 / 16.0, 5, 2.0);
        spec.sizes = vec![64];
        spec.reference = ReferenceSpec { tau: 1e-4, n: 64 };
        spec.t_final = Some(1.0);
        Ok(spec)
    }

    /// Errors up to `1/eps^{2p}` with fixed `tau = 1e-2`.
    pub fn long_time(alphas: Vec<f64>, eps: Vec<f64>) -> Result<Self> {
        let params = ModelParams::complex_power(alphas.first().copied().unwrap_or(2.0), 1.0, 1.0, 2)?;
        let mut spec = Self::base(StudyKind::LongTime, params, InitialData::Smooth1d);
        spec.alphas = alphas;
        spec.eps = eps;
        spec.steps = vec![1e-2];
        spec.sizes = vec![64];
        spec.reference = ReferenceSpec { tau: 1e-3, n: 64 };
        Ok(spec)
    }

    /// Error against N at `t = 1` for two values of eps in the weakly
    /// nonlinear range, where the spatial curve no longer depends on eps.
    pub fn spatial(alphas: Vec<f64>) -> Result<Self> {
        let params = ModelParams::complex_power(alphas.first().copied().unwrap_or(2.0), 1.0, 1.0, 2)?;
        let mut spec = Self::base(StudyKind::Spatial, params, InitialData::Smooth1d);
        spec.alphas = alphas;
        spec.eps = vec![0.125, 0.0625];
        spec.steps = vec![1e-3];
        spec.sizes = vec![8, 16, 32, 64];
        spec.reference = ReferenceSpec { tau: 1e-3, n: 128 };
        spec.t_final = Some(1.0);
        Ok(spec)
    }

    /// Energy series up to `1/eps^{2p}` at two step sizes.
    pub fn energy(alphas: Vec<f64>, eps: f64) -> Result<Self> {
        let params = ModelParams::complex_power(alphas.first().copied().unwrap_or(2.0), 1.0, eps, 2)?;
        let mut spec = Self::base(StudyKind::Energy, params, InitialData::Smooth1d);
        spec.alphas = alphas;
        spec.steps = vec![1e-2, 5e-3];
        spec.sizes = vec![64];
        spec.sample_every = 10;
        Ok(spec)
    }

    /// Snapshots of the real cubic 2D problem at `T = 0, 2, 8, 32, 128`.
    pub fn field_dump_2d(alphas: Vec<f64>, eps: f64) -> Result<Self> {
        let params = ModelParams::real_cubic(alphas.first().copied().unwrap_or(2.0), 1.0, eps)?;
        let mut spec = Self::base(StudyKind::FieldDump2d, params, InitialData::Smooth2d);
        spec.alphas = alphas;
        spec.steps = vec![1e-2];
        spec.sizes = vec![32, 64];
        spec.dump_times = vec![0.0, 2.0, 8.0, 32.0, 128.0];
        Ok(spec)
    }

    /// Parameters for one cell.
    pub fn cell_params(&self, alpha: f64, eps: f64) -> Result<ModelParams> {
        ModelParams::new(alpha, self.params.beta, eps, self.params.p, self.params.regime)
    }

    /// The horizon for a given eps.
    pub fn horizon(&self, eps: f64) -> f64 {
        if let Some(t) = self.t_final {
            return t;
        }
        let coupling = eps.powi(2 * self.params.p as i32);
        match self.kind {
            StudyKind::LongTime | StudyKind::Energy | StudyKind::Spatial if coupling > 0.0 => 1.0 / coupling,
            StudyKind::FieldDump2d => self.dump_times.iter().copied().fold(0.0, f64::max),
            _ => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        use StudyKind::*;
        let nonempty = |field: &'static str, len: usize| {
            if len == 0 {
                Err(Error::invalid(field, "must not be empty"))
            } else {
                Ok(())
            }
        };
        nonempty("alphas", self.alphas.len())?;
        nonempty("eps", self.eps.len())?;
        nonempty("steps", self.steps.len())?;
        nonempty("sizes", self.sizes.len())?;
        for &alpha in &self.alphas {
            for &eps in &self.eps {
                self.cell_params(alpha, eps)?;
            }
        }
        if self.steps.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::invalid("steps", "time steps must be positive"));
        }
        if self.sizes.iter().any(|&n| n < 4 || n % 2 != 0) {
            return Err(Error::invalid("sizes", "grid sizes must be even and at least 4"));
        }
        if let Some(t) = self.t_final {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::invalid("t_final", "must be positive"));
            }
        }
        if self.sample_every == 0 {
            return Err(Error::invalid("sample_every", "must be at least 1"));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps", "must be at least 1"));
        }
        let dims = self.data.domain().map(|d| d.len()).unwrap_or(1);
        match self.kind {
            FieldDump2d => {
                if self.sizes.len() != dims || dims != 2 {
                    return Err(Error::invalid("sizes", "2D dumps need one size per axis on 2D data"));
                }
                nonempty("dump_times", self.dump_times.len())?;
                if self.dump_times.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
                    return Err(Error::invalid("dump_times", "times must be non-negative"));
                }
                let tau = self.steps[0];
                if self.dump_times.iter().any(|t| ((t / tau).round() * tau - t).abs() > 1e-9 * t.max(1.0)) {
                    return Err(Error::invalid("dump_times", "times must be multiples of the time step"));
                }
            }
            _ if dims != 1 => return Err(Error::invalid("data", "this study runs on 1D data")),
            _ => {}
        }
        if self.kind == OscillatoryTable {
            if self.params.regime != Regime::Oscillatory {
                return Err(Error::invalid("regime", "the table solves the oscillatory equation"));
            }
            if self.eps.iter().any(|&e| e <= 0.0) {
                return Err(Error::invalid("eps", "the oscillatory rescaling needs eps > 0"));
            }
        } else if self.params.regime == Regime::Oscillatory {
            return Err(Error::invalid("regime", "only the oscillatory table uses the oscillatory regime"));
        }
        let max_n = *self.sizes.iter().max().expect("nonempty");
        let min_tau = self.steps.iter().copied().fold(f64::INFINITY, f64::min);
        match self.kind {
            Temporal | LongTime | OscillatoryTable => {
                // The table step is in rescaled time; compare like with like.
                let scale = if self.kind == OscillatoryTable {
                    self.eps.iter().map(|e| e.powi(2 * self.params.p as i32)).fold(0.0, f64::max)
                } else {
                    1.0
                };
                if !(self.reference.tau > 0.0 && self.reference.tau * scale < min_tau) {
                    return Err(Error::invalid("reference.tau", "must be strictly finer than every step"));
                }
                if self.reference.n < max_n {
                    return Err(Error::invalid("reference.n", "must be at least the largest N"));
                }
                if self.kind == LongTime {
                    // Lock-step comparison: the reference must land on every coarse step.
                    let tau_e = self.reference.tau;
                    if self.steps.iter().any(|t| ((t / tau_e).round() * tau_e - t).abs() > 1e-9 * t) {
                        return Err(Error::invalid("reference.tau", "must divide every step"));
                    }
                }
            }
            Spatial => {
                if self.reference.n < 2 * max_n {
                    return Err(Error::invalid("reference.n", "must be at least twice the largest N"));
                }
                if self.reference.tau <= 0.0 {
                    return Err(Error::invalid("reference.tau", "must be positive"));
                }
            }
            Energy | FieldDump2d => {}
        }
        Ok(())
    }
}
