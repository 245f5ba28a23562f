//! Fourier multipliers: the fractional Laplacian family, the relativistic
//! operator `<nabla>_alpha = sqrt(beta + (-Delta)^{alpha/2})` and its
//! exponential propagator.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{SpectralField, SpectralGrid};

/// Which form of the equation is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Real states, nonlinearity `eps^2 psi^3`.
    RealCubic,
    /// Complex states, nonlinearity `eps^{2p} |psi|^{2p} psi`.
    ComplexPower,
    /// The time-rescaled complex equation on `r = eps^{2p} t`.
    Oscillatory,
}

impl Regime {
    pub fn is_real(self) -> bool {
        matches!(self, Regime::RealCubic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub eps: f64,
    pub p: u32,
    pub regime: Regime,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, eps: f64, p: u32, regime: Regime) -> Result<Self> {
        let params = ModelParams {
            alpha,
            beta,
            eps,
            p,
            regime,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn real_cubic(alpha: f64, beta: f64, eps: f64) -> Result<Self> {
        Self::new(alpha, beta, eps, 1, Regime::RealCubic)
    }

    pub fn complex_power(alpha: f64, beta: f64, eps: f64, p: u32) -> Result<Self> {
        Self::new(alpha, beta, eps, p, Regime::ComplexPower)
    }

    /// Checks parameter ranges. `eps = 0` is accepted as the linear limit.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(Error::invalid("alpha", format!("must lie in (1, 2], got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid("beta", format!("must be > 0, got {}", self.beta)));
        }
        if !(self.eps >= 0.0 && self.eps <= 1.0) {
            return Err(Error::invalid("eps", format!("must lie in [0, 1], got {}", self.eps)));
        }
        if self.p < 1 {
            return Err(Error::invalid("p", "must be a positive integer"));
        }
        if self.regime == Regime::RealCubic && self.p != 1 {
            return Err(Error::invalid("p", "the real-cubic regime requires p = 1"));
        }
        Ok(())
    }

    /// Nonlinearity strength `eps^{2p}`.
    pub fn coupling(&self) -> f64 {
        self.eps.powi(2 * self.p as i32)
    }
}

/// Per-mode values `delta_l = sqrt(beta + |mu_l|^alpha)`.
#[derive(Debug, Clone)]
pub struct Symbol {
    grid: Arc<SpectralGrid>,
    values: Vec<f64>,
    alpha: f64,
    beta: f64,
}

pub fn make_symbol(grid: &Arc<SpectralGrid>, params: &ModelParams) -> Symbol {
    let values = grid
        .frequency_sq()
        .into_iter()
        .map(|w| (params.beta + w.powf(0.5 * params.alpha)).sqrt())
        .collect();
    Symbol {
        grid: Arc::clone(grid),
        values,
        alpha: params.alpha,
        beta: params.beta,
    }
}

impl Symbol {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn inverse(&self) -> Vec<f64> {
        self.values.iter().map(|d| 1.0 / d).collect()
    }

    /// `exp(i sign t delta_l)` for every mode.
    pub fn phases(&self, t: f64, sign: f64) -> Vec<Complex64> {
        self.values
            .iter()
            .map(|d| Complex64::from_polar(1.0, sign * t * d))
            .collect()
    }

    fn check(&self, field: &SpectralField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, field.grid()) || *self.grid == **field.grid() {
            Ok(())
        } else {
            Err(Error::GridMismatch("symbol built on a different grid".into()))
        }
    }
}

/// Per-mode weights accepted by [`apply_multiplier`].
pub trait Weight: Copy {
    fn as_complex(self) -> Complex64;
}

impl Weight for f64 {
    fn as_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Weight for Complex64 {
    fn as_complex(self) -> Complex64 {
        self
    }
}

pub fn apply_multiplier<W: Weight>(field: &SpectralField, weights: &[W]) -> Result<SpectralField> {
    if weights.len() != field.coeffs().len() {
        return Err(Error::Dimension {
            expected: field.coeffs().len(),
            got: weights.len(),
        });
    }
    let mut out = field.clone();
    multiply_in_place(out.coeffs_mut(), weights);
    Ok(out)
}

pub(crate) fn multiply_in_place<W: Weight>(coeffs: &mut [Complex64], weights: &[W]) {
    coeffs
        .iter_mut()
        .zip(weights)
        .for_each(|(c, w)| *c *= w.as_complex());
}

pub fn nabla_alpha(field: &SpectralField, symbol: &Symbol) -> Result<SpectralField> {
    symbol.check(field)?;
    apply_multiplier(field, &symbol.values)
}

pub fn nabla_alpha_inv(field: &SpectralField, symbol: &Symbol) -> Result<SpectralField> {
    symbol.check(field)?;
    let mut out = field.clone();
    out.coeffs_mut()
        .iter_mut()
        .zip(&symbol.values)
        .for_each(|(c, d)| *c /= d);
    Ok(out)
}

/// `(-Delta)^{alpha/4}`: multiplies by `|mu_l|^{alpha/2}`.
pub fn half_laplacian_quarter(field: &SpectralField, params: &ModelParams) -> SpectralField {
    let weights: Vec<f64> = field
        .grid()
        .frequency_sq()
        .into_iter()
        .map(|w| w.powf(0.25 * params.alpha))
        .collect();
    let mut out = field.clone();
    multiply_in_place(out.coeffs_mut(), &weights);
    out
}

/// `exp(i sign t <nabla>_alpha)`.
pub fn propagator(field: &SpectralField, symbol: &Symbol, t: f64, sign: f64) -> Result<SpectralField> {
    symbol.check(field)?;
    apply_multiplier(field, &symbol.phases(t, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sobolev_norm;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> Arc<SpectralGrid> {
        SpectralGrid::new_1d(0.0, 2.0 * PI, 16).unwrap()
    }

    fn params(alpha: f64) -> ModelParams {
        ModelParams::complex_power(alpha, 1.0, 0.5, 1).unwrap()
    }

    fn delta_at(symbol: &Symbol, l: i64) -> f64 {
        symbol.values()[symbol.grid().slot_of([l, 0]).unwrap()]
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::real_cubic(2.0, 1.0, 1.0).is_ok());
        assert!(ModelParams::real_cubic(1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::real_cubic(2.0, 0.0, 1.0).is_err());
        assert!(ModelParams::real_cubic(2.0, 1.0, 1.5).is_err());
        assert!(ModelParams::new(1.5, 1.0, 0.5, 2, Regime::RealCubic).is_err());
        assert!(ModelParams::new(1.5, 1.0, 0.5, 0, Regime::ComplexPower).is_err());
        assert_eq!(ModelParams::complex_power(1.5, 1.0, 0.5, 2).unwrap().coupling(), 0.0625);
    }

    #[test]
    fn symbol_examples() {
        let g = grid();
        assert_eq!(delta_at(&make_symbol(&g, &params(1.3)), 0), 1.0);
        assert_relative_eq!(delta_at(&make_symbol(&g, &params(2.0)), 2), 5f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(delta_at(&make_symbol(&g, &params(1.5)), 1), 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn symbol_is_even_and_bounded_below() {
        let g = SpectralGrid::new_2d((0.0, 1.0, 8), (0.0, 2.0 * PI, 6)).unwrap();
        let p = ModelParams::complex_power(1.4, 0.3, 1.0, 1).unwrap();
        let s = make_symbol(&g, &p);
        for k in 0..g.len() {
            assert!(s.values()[k] >= 0.3f64.sqrt());
            let [l1, l2] = g.modes_of(k);
            if let Some(m) = g.slot_of([-l1, -l2]) {
                assert_eq!(s.values()[k], s.values()[m]);
            }
        }
    }

    #[test]
    fn classical_symbol_at_alpha_two() {
        let g = grid();
        let s = make_symbol(&g, &params(2.0));
        for k in 0..g.len() {
            let mu = g.axes()[0].frequency(g.modes_of(k)[0]);
            assert_relative_eq!(s.values()[k], (1.0 + mu * mu).sqrt(), epsilon = 1e-14);
        }
    }

    #[test]
    fn multiplier_identities() {
        let g = grid();
        let f = SpectralField::from_coeffs(&g, (0..16).map(|k| c(k as f64, 1.0 - k as f64)).collect()).unwrap();
        let same = apply_multiplier(&f, &[1.0; 16]).unwrap();
        assert_eq!(same.coeffs(), f.coeffs());
        let zero = apply_multiplier(&f, &[0.0; 16]).unwrap();
        assert!(zero.coeffs().iter().all(|c| c.norm() == 0.0));
        let s = make_symbol(&g, &params(1.7));
        let back = apply_multiplier(&apply_multiplier(&f, s.values()).unwrap(), &s.inverse()).unwrap();
        assert!(back.max_coeff_diff(&f).unwrap() < 1e-14 * 16.0);
        assert!(apply_multiplier(&f, &[1.0; 3]).is_err());
    }

    #[test]
    fn nabla_examples() {
        let g = grid();
        let s = make_symbol(&g, &params(2.0));
        let constant = SpectralField::single_mode(&g, [0, 0], c(3.0, -1.0)).unwrap();
        assert_eq!(nabla_alpha(&constant, &s).unwrap().coeffs(), constant.coeffs());
        let two = SpectralField::single_mode(&g, [2, 0], c(1.0, 0.0)).unwrap();
        let scaled = nabla_alpha(&two, &s).unwrap();
        assert_relative_eq!(scaled.coeff([2, 0]).unwrap().re, 5f64.sqrt(), epsilon = 1e-15);
        let other = SpectralGrid::new_1d(0.0, 1.0, 16).unwrap();
        assert!(nabla_alpha(&SpectralField::zeros(&other), &s).is_err());
    }

    #[test]
    fn quarter_laplacian_examples() {
        let g = grid();
        let constant = SpectralField::single_mode(&g, [0, 0], c(2.0, 0.0)).unwrap();
        assert!(half_laplacian_quarter(&constant, &params(1.5))
            .coeffs()
            .iter()
            .all(|c| c.norm() == 0.0));
        let one = SpectralField::single_mode(&g, [1, 0], c(1.0, 0.0)).unwrap();
        assert_relative_eq!(
            half_laplacian_quarter(&one, &params(2.0)).coeff([1, 0]).unwrap().re,
            1.0,
            epsilon = 1e-15
        );
        let three = SpectralField::single_mode(&g, [3, 0], c(1.0, 0.0)).unwrap();
        assert_relative_eq!(
            half_laplacian_quarter(&three, &params(1.2)).coeff([3, 0]).unwrap().re,
            3f64.powf(0.6),
            epsilon = 1e-14
        );
    }

    #[test]
    fn propagator_single_mode_phase() {
        let g = grid();
        let s = make_symbol(&g, &params(1.5));
        let f = SpectralField::single_mode(&g, [3, 0], c(0.5, 0.5)).unwrap();
        assert_eq!(propagator(&f, &s, 0.0, 1.0).unwrap().coeffs(), f.coeffs());
        let moved = propagator(&f, &s, 0.7, -1.0).unwrap();
        let want = c(0.5, 0.5) * Complex64::from_polar(1.0, -0.7 * delta_at(&s, 3));
        assert!((moved.coeff([3, 0]).unwrap() - want).norm() < 1e-15);
    }

    fn random_field(g: &Arc<SpectralGrid>, seed: &[f64]) -> SpectralField {
        let coeffs = (0..g.len())
            .map(|k| c(seed[(2 * k) % seed.len()], seed[(2 * k + 1) % seed.len()]))
            .collect();
        SpectralField::from_coeffs(g, coeffs).unwrap()
    }

    proptest! {
        #[test]
        fn propagator_is_isometric_group(
            seed in prop::collection::vec(-1.0f64..1.0, 32),
            alpha in 1.05f64..2.0,
            t1 in -5.0f64..5.0,
            t2 in -5.0f64..5.0,
        ) {
            let g = grid();
            let s = make_symbol(&g, &params(alpha));
            let f = random_field(&g, &seed);
            for m in [0.0, alpha / 2.0, 2.0] {
                let before = sobolev_norm(&f, m).unwrap();
                let after = sobolev_norm(&propagator(&f, &s, t1, 1.0).unwrap(), m).unwrap();
                prop_assert!((after - before).abs() <= 1e-12 * before.max(1e-300));
            }
            let composed = propagator(&propagator(&f, &s, t2, 1.0).unwrap(), &s, t1, 1.0).unwrap();
            let direct = propagator(&f, &s, t1 + t2, 1.0).unwrap();
            prop_assert!(composed.max_coeff_diff(&direct).unwrap() <= 1e-12);
        }

        #[test]
        fn inverse_operator_identities(
            seed in prop::collection::vec(-1.0f64..1.0, 32),
            alpha in 1.05f64..2.0,
            beta in 0.1f64..3.0,
        ) {
            let g = grid();
            let p = ModelParams::complex_power(alpha, beta, 1.0, 1).unwrap();
            let s = make_symbol(&g, &p);
            let f = random_field(&g, &seed);
            let back = nabla_alpha_inv(&nabla_alpha(&f, &s).unwrap(), &s).unwrap();
            prop_assert!(back.max_coeff_diff(&f).unwrap() <= 1e-13);
            let smoothed = nabla_alpha_inv(&f, &s).unwrap();
            for m in [0.0, 1.0] {
                prop_assert!(
                    sobolev_norm(&smoothed, m).unwrap()
                        <= sobolev_norm(&f, m).unwrap() / beta.sqrt() * (1.0 + 1e-14)
                );
            }
        }
    }
}
