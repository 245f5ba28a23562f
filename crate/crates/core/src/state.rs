//! Klein-Gordon states `(psi, eta)` and their Schrodinger-type unknowns.
//!
//! Real case: `phi = psi - i <nabla>^{-1} eta`, recovered by
//! `psi = (phi + conj phi)/2`, `eta = (i/2) <nabla> (phi - conj phi)`.
//! Complex case: `phi_pm = psi -/+ i <nabla>^{-1} eta`, recovered by
//! `psi = (phi_+ + phi_-)/2`, `eta = (i/2) <nabla> (phi_+ - phi_-)`.

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::SpectralField;
use crate::ops::{nabla_alpha, nabla_alpha_inv, Symbol};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct KgeState {
    pub psi: SpectralField,
    pub eta: SpectralField,
    pub time: f64,
}

impl KgeState {
    pub fn new(psi: SpectralField, eta: SpectralField, time: f64) -> Result<Self> {
        psi.check_grid(&eta)?;
        Ok(KgeState { psi, eta, time })
    }

    pub fn is_real_valued(&self, tol: f64) -> bool {
        self.psi.is_real_valued(tol) && self.eta.is_real_valued(tol)
    }
}

#[derive(Debug, Clone)]
pub enum NlsState {
    Real {
        phi: SpectralField,
        time: f64,
    },
    Coupled {
        plus: SpectralField,
        minus: SpectralField,
        time: f64,
    },
}

impl NlsState {
    pub fn time(&self) -> f64 {
        match self {
            NlsState::Real { time, .. } | NlsState::Coupled { time, .. } => *time,
        }
    }
}

pub fn to_nls(state: &KgeState, symbol: &Symbol, real: bool) -> Result<NlsState> {
    let shift = nabla_alpha_inv(&state.eta, symbol)?.scale(I);
    Ok(if real {
        NlsState::Real {
            phi: state.psi.sub(&shift)?,
            time: state.time,
        }
    } else {
        NlsState::Coupled {
            plus: state.psi.sub(&shift)?,
            minus: state.psi.add(&shift)?,
            time: state.time,
        }
    })
}

pub fn from_nls(state: &NlsState, symbol: &Symbol) -> Result<KgeState> {
    let (sum, diff, time) = match state {
        NlsState::Real { phi, time } => {
            let conj = phi.conj();
            (phi.add(&conj)?, phi.sub(&conj)?, *time)
        }
        NlsState::Coupled { plus, minus, time } => (plus.add(minus)?, plus.sub(minus)?, *time),
    };
    Ok(KgeState {
        psi: sum.scale(Complex64::new(0.5, 0.0)),
        eta: nabla_alpha(&diff, symbol)?.scale(0.5 * I),
        time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpectralGrid;
    use crate::ops::{make_symbol, ModelParams};
    use proptest::prelude::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn setup() -> (Arc<SpectralGrid>, Symbol) {
        let grid = SpectralGrid::new_1d(0.0, 2.0 * PI, 16).unwrap();
        let symbol = make_symbol(&grid, &ModelParams::real_cubic(1.5, 1.0, 1.0).unwrap());
        (grid, symbol)
    }

    fn field(grid: &Arc<SpectralGrid>, seed: &[f64]) -> SpectralField {
        let coeffs = (0..grid.len())
            .map(|k| Complex64::new(seed[2 * k], seed[2 * k + 1]))
            .collect();
        SpectralField::from_coeffs(grid, coeffs).unwrap()
    }

    #[test]
    fn zero_velocity_gives_phi_equal_psi() {
        let (grid, symbol) = setup();
        let psi = SpectralField::single_mode(&grid, [2, 0], Complex64::new(1.0, 0.5)).unwrap();
        let state = KgeState::new(psi.clone(), SpectralField::zeros(&grid), 0.0).unwrap();
        match to_nls(&state, &symbol, true).unwrap() {
            NlsState::Real { phi, .. } => assert_eq!(phi.coeffs(), psi.coeffs()),
            _ => unreachable!(),
        }
        match to_nls(&state, &symbol, false).unwrap() {
            NlsState::Coupled { plus, minus, .. } => {
                assert_eq!(plus.coeffs(), psi.coeffs());
                assert_eq!(minus.coeffs(), psi.coeffs());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn pure_velocity_mode() {
        let (grid, symbol) = setup();
        let eta = SpectralField::single_mode(&grid, [3, 0], Complex64::new(1.0, 0.0)).unwrap();
        let state = KgeState::new(SpectralField::zeros(&grid), eta, 0.0).unwrap();
        let delta = symbol.values()[grid.slot_of([3, 0]).unwrap()];
        match to_nls(&state, &symbol, true).unwrap() {
            NlsState::Real { phi, .. } => {
                assert!((phi.coeff([3, 0]).unwrap() - Complex64::new(0.0, -1.0 / delta)).norm() < 1e-16)
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn hermitian_phi_has_no_velocity() {
        let (grid, symbol) = setup();
        let phi = SpectralField::single_mode(&grid, [0, 0], Complex64::new(2.0, 0.0)).unwrap();
        let kge = from_nls(&NlsState::Real { phi, time: 0.0 }, &symbol).unwrap();
        assert!(kge.eta.coeffs().iter().all(|c| c.norm() == 0.0));
        let plus = SpectralField::single_mode(&grid, [1, 0], Complex64::new(0.3, 0.1)).unwrap();
        let kge = from_nls(
            &NlsState::Coupled {
                plus: plus.clone(),
                minus: plus.clone(),
                time: 1.0,
            },
            &symbol,
        )
        .unwrap();
        assert!(kge.eta.coeffs().iter().all(|c| c.norm() == 0.0));
        assert!(kge.psi.max_coeff_diff(&plus).unwrap() < 1e-16);
        assert_eq!(kge.time, 1.0);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let (grid, _) = setup();
        let other = SpectralGrid::new_1d(0.0, 1.0, 16).unwrap();
        assert!(KgeState::new(SpectralField::zeros(&grid), SpectralField::zeros(&other), 0.0).is_err());
    }

    proptest! {
        #[test]
        fn coupled_roundtrip(seed in prop::collection::vec(-2.0f64..2.0, 64)) {
            let (grid, symbol) = setup();
            let state = KgeState::new(field(&grid, &seed[..32]), field(&grid, &seed[32..]), 0.5).unwrap();
            let back = from_nls(&to_nls(&state, &symbol, false).unwrap(), &symbol).unwrap();
            prop_assert!(back.psi.max_coeff_diff(&state.psi).unwrap() <= 1e-13);
            prop_assert!(back.eta.max_coeff_diff(&state.eta).unwrap() <= 1e-13);
        }

        #[test]
        fn real_roundtrip_preserves_reality(seed in prop::collection::vec(-2.0f64..2.0, 64)) {
            let (grid, symbol) = setup();
            let psi = field(&grid, &seed[..32]).real_part();
            let eta = field(&grid, &seed[32..]).real_part();
            let state = KgeState::new(psi, eta, 0.0).unwrap();
            let nls = to_nls(&state, &symbol, true).unwrap();
            let back = from_nls(&nls, &symbol).unwrap();
            prop_assert!(back.psi.max_coeff_diff(&state.psi).unwrap() <= 1e-13);
            prop_assert!(back.eta.max_coeff_diff(&state.eta).unwrap() <= 1e-13);
            prop_assert!(back.is_real_valued(1e-15));
        }

        #[test]
        fn coupled_nls_roundtrip(seed in prop::collection::vec(-2.0f64..2.0, 64)) {
            let (grid, symbol) = setup();
            let nls = NlsState::Coupled { plus: field(&grid, &seed[..32]), minus: field(&grid, &seed[32..]), time: 0.0 };
            let again = to_nls(&from_nls(&nls, &symbol).unwrap(), &symbol, false).unwrap();
            match (nls, again) {
                (NlsState::Coupled { plus, minus, .. }, NlsState::Coupled { plus: p2, minus: m2, .. }) => {
                    prop_assert!(p2.max_coeff_diff(&plus).unwrap() <= 1e-13);
                    prop_assert!(m2.max_coeff_diff(&minus).unwrap() <= 1e-13);
                }
                _ => unreachable!(),
            }
        }
    }
}
