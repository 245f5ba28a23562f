//! Built-in initial data sets.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{forward_transform, SpectralField, SpectralGrid};
use crate::state::KgeState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialData {
    /// `psi0 = 3/(2+cos^2 x)`, `psi1 = 3/(4+cos^2 x)` on `(0, 2 pi)`.
    #[serde(rename = "smooth-1d")]
    Smooth1d,
    /// `psi0 = 2/(1+cos^2(2 pi x + y))`, `psi1 = 3/(2+2cos^2(2 pi x + y))`
    /// on `(0,1) x (0, 2 pi)`.
    #[serde(rename = "smooth-2d")]
    Smooth2d,
    /// `psi0 = x^2 (x-1)^2 + 3`, `psi1 = x(x-1)(2x-1) + 3i cos(2 pi x)` on `(0,1)`.
    #[serde(rename = "complex-1d")]
    Complex1d,
    /// Explicit coefficients (FFT order) for `psi0` and `psi1`.
    Custom {
        psi: Vec<(f64, f64)>,
        eta: Vec<(f64, f64)>,
    },
}

impl InitialData {
    pub fn name(&self) -> &'static str {
        match self {
            InitialData::Smooth1d => "smooth-1d",
            InitialData::Smooth2d => "smooth-2d",
            InitialData::Complex1d => "complex-1d",
            InitialData::Custom { .. } => "custom",
        }
    }

    /// Domain bounds `(a, b)` per axis, `None` for custom data.
    pub fn domain(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            InitialData::Smooth1d => Some(vec![(0.0, 2.0 * PI)]),
            InitialData::Smooth2d => Some(vec![(0.0, 1.0), (0.0, 2.0 * PI)]),
            InitialData::Complex1d => Some(vec![(0.0, 1.0)]),
            InitialData::Custom { .. } => None,
        }
    }

    /// A grid over the data's own domain with `n` modes per axis.
    pub fn grid(&self, shape: &[usize]) -> Result<Arc<SpectralGrid>> {
        let domain = self
            .domain()
            .ok_or_else(|| Error::invalid("initial_data", "custom data carries no domain"))?;
        if domain.len() != shape.len() {
            return Err(Error::Dimension {
                expected: domain.len(),
                got: shape.len(),
            });
        }
        let axes = domain
            .iter()
            .zip(shape)
            .map(|(&(a, b), &n)| crate::grid::Axis::new(a, b, n))
            .collect::<Result<Vec<_>>>()?;
        SpectralGrid::new(axes)
    }

    pub fn is_real(&self) -> bool {
        match self {
            InitialData::Smooth1d | InitialData::Smooth2d => true,
            InitialData::Complex1d => false,
            InitialData::Custom { psi, eta } => psi.iter().chain(eta).all(|&(_, im)| im == 0.0),
        }
    }

    /// Values of `(psi0, psi1)` at a point.
    pub fn point_values(&self, x: [f64; 2]) -> Option<(Complex64, Complex64)> {
        let re = |v: f64| Complex64::new(v, 0.0);
        match self {
            InitialData::Smooth1d => {
                let c2 = x[0].cos().powi(2);
                Some((re(3.0 / (2.0 + c2)), re(3.0 / (4.0 + c2))))
            }
            InitialData::Smooth2d => {
                let c2 = (2.0 * PI * x[0] + x[1]).cos().powi(2);
                Some((re(2.0 / (1.0 + c2)), re(3.0 / (2.0 + 2.0 * c2))))
            }
            InitialData::Complex1d => {
                let s = x[0];
                Some((
                    re(s * s * (s - 1.0).powi(2) + 3.0),
                    Complex64::new(s * (s - 1.0) * (2.0 * s - 1.0), 3.0 * (2.0 * PI * s).cos()),
                ))
            }
            InitialData::Custom { .. } => None,
        }
    }
}

/// Samples the selected data on `grid` and transforms to coefficients.
pub fn builtin_initial_data(selector: &InitialData, grid: &Arc<SpectralGrid>) -> Result<KgeState> {
    if let InitialData::Custom { psi, eta } = selector {
        let to_field = |v: &[(f64, f64)]| {
            SpectralField::from_coeffs(grid, v.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
        };
        return KgeState::new(to_field(psi)?, to_field(eta)?, 0.0);
    }
    let domain = selector.domain().expect("built-in data has a domain");
    if domain.len() != grid.dims() {
        return Err(Error::Dimension {
            expected: domain.len(),
            got: grid.dims(),
        });
    }
    for (&(a, b), ax) in domain.iter().zip(grid.axes()) {
        if (ax.a - a).abs() > 1e-12 || (ax.b - b).abs() > 1e-12 {
            return Err(Error::GridMismatch(format!(
                "{} lives on ({a}, {b}), grid axis is ({}, {})",
                selector.name(),
                ax.a,
                ax.b
            )));
        }
    }
    let values: Vec<(Complex64, Complex64)> = (0..grid.len())
        .map(|k| selector.point_values(grid.node_of(k)).expect("built-in"))
        .collect();
    let psi: Vec<Complex64> = values.iter().map(|v| v.0).collect();
    let eta: Vec<Complex64> = values.iter().map(|v| v.1).collect();
    KgeState::new(forward_transform(&psi, grid)?, forward_transform(&eta, grid)?, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::inverse_transform;

    fn at_origin(data: &InitialData, shape: &[usize]) -> (Complex64, Complex64) {
        let grid = data.grid(shape).unwrap();
        let state = builtin_initial_data(data, &grid).unwrap();
        (inverse_transform(&state.psi)[0], inverse_transform(&state.eta)[0])
    }

    #[test]
    fn values_at_the_origin() {
        let (p, e) = at_origin(&InitialData::Smooth1d, &[32]);
        assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((e - Complex64::new(0.6, 0.0)).norm() < 1e-14);
        let (p, _) = at_origin(&InitialData::Smooth2d, &[16, 32]);
        assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let (p, e) = at_origin(&InitialData::Complex1d, &[32]);
        assert!((p - Complex64::new(3.0, 0.0)).norm() < 1e-14);
        assert!((e - Complex64::new(0.0, 3.0)).norm() < 1e-14);
    }

    #[test]
    fn domain_and_dimension_checks() {
        let wrong = SpectralGrid::new_1d(0.0, 1.0, 16).unwrap();
        assert!(builtin_initial_data(&InitialData::Smooth1d, &wrong).is_err());
        assert!(builtin_initial_data(&InitialData::Smooth2d, &wrong).is_err());
        assert!(InitialData::Smooth2d.grid(&[16]).is_err());
    }

    #[test]
    fn real_data_has_hermitian_coefficients() {
        let grid = InitialData::Smooth2d.grid(&[8, 16]).unwrap();
        assert!(builtin_initial_data(&InitialData::Smooth2d, &grid)
            .unwrap()
            .is_real_valued(1e-12));
        assert!(!InitialData::Complex1d.is_real());
    }

    #[test]
    fn custom_coefficients() {
        let grid = SpectralGrid::new_1d(0.0, 1.0, 4).unwrap();
        let data = InitialData::Custom {
            psi: vec![(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
            eta: vec![(0.0, 0.0); 4],
        };
        let state = builtin_initial_data(&data, &grid).unwrap();
        assert_eq!(state.psi.coeff([0, 0]).unwrap(), Complex64::new(1.0, 0.0));
        let short = InitialData::Custom {
            psi: vec![(1.0, 0.0)],
            eta: vec![],
        };
        assert!(builtin_initial_data(&short, &grid).is_err());
    }
}
