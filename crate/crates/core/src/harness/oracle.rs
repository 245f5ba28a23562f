//! Independent classical RK4 integrator for the first-order system
//! `psi_t = eta`, `eta_t = -(|mu|^alpha + beta) psi - eps^{2p} f(psi)` in
//! coefficient space. It builds its own frequencies and evaluates the
//! nonlinearity through an explicit O(N^2) DFT, sharing nothing with the
//! FFT-backed solver, so agreement between the two is meaningful.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::ops::ModelParams;

pub struct Rk4Oracle {
    n: usize,
    /// `|mu_l|^alpha + beta` in FFT slot order.
    stiffness: Vec<f64>,
    /// `e^{i mu_l h j}` for slot `l`, node `j`.
    table: Vec<Complex64>,
    coupling: f64,
    p: u32,
    real: bool,
}

impl Rk4Oracle {
    /// A 1D oracle on `(a, b)` with `n` nodes.
    pub fn new(a: f64, b: f64, n: usize, params: &ModelParams) -> Self {
        let ModelParams { alpha, beta, eps, p, .. } = *params;
        let length = b - a;
        let modes: Vec<f64> = (0..n)
            .map(|k| if k < n / 2 { k as f64 } else { k as f64 - n as f64 })
            .collect();
        let mu: Vec<f64> = modes.iter().map(|&l| 2.0 * PI * l / length).collect();
        let mut table = Vec::with_capacity(n * n);
        for &l in &modes {
            for j in 0..n {
                table.push(Complex64::from_polar(1.0, 2.0 * PI * l * j as f64 / n as f64));
            }
        }
        Rk4Oracle {
            n,
            stiffness: mu.iter().map(|m| m.abs().powf(alpha) + beta).collect(),
            table,
            coupling: eps.powi(2 * p as i32),
            p,
            real: params.regime.is_real(),
        }
    }

    /// Nodal values from coefficients.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|k| coeffs[k] * self.table[k * self.n + j]).sum())
            .collect()
    }

    /// Coefficients `(1/N) sum_j v_j e^{-i mu_l (x_j - a)}`.
    pub fn analyze(&self, values: &[Complex64]) -> Vec<Complex64> {
        let scale = 1.0 / self.n as f64;
        (0..self.n)
            .map(|k| {
                (0..self.n)
                    .map(|j| values[j] * self.table[k * self.n + j].conj())
                    .sum::<Complex64>()
                    * scale
            })
            .collect()
    }

    fn rhs(&self, psi: &[Complex64], eta: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let force = if self.coupling == 0.0 {
            vec![Complex64::default(); self.n]
        } else {
            let values = self.synthesize(psi);
            let f: Vec<Complex64> = values
                .iter()
                .map(|v| {
                    if self.real {
                        Complex64::new(v.re.powi(3), 0.0)
                    } else {
                        v * v.norm_sqr().powi(self.p as i32)
                    }
                })
                .collect();
            self.analyze(&f)
        };
        let deta = (0..self.n)
            .map(|k| -self.stiffness[k] * psi[k] - self.coupling * force[k])
            .collect();
        (eta.to_vec(), deta)
    }

    /// Integrates `steps` steps of size `tau` from coefficient data.
    pub fn integrate(&self, psi: &[Complex64], eta: &[Complex64], tau: f64, steps: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let axpy = |x: &[Complex64], s: f64, d: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(d).map(|(a, b)| a + b * s).collect()
        };
        let (mut u, mut v) = (psi.to_vec(), eta.to_vec());
        for _ in 0..steps {
            let (k1u, k1v) = self.rhs(&u, &v);
            let (k2u, k2v) = self.rhs(&axpy(&u, 0.5 * tau, &k1u), &axpy(&v, 0.5 * tau, &k1v));
            let (k3u, k3v) = self.rhs(&axpy(&u, 0.5 * tau, &k2u), &axpy(&v, 0.5 * tau, &k2v));
            let (k4u, k4v) = self.rhs(&axpy(&u, tau, &k3u), &axpy(&v, tau, &k3v));
            for k in 0..self.n {
                u[k] += tau / 6.0 * (k1u[k] + 2.0 * k2u[k] + 2.0 * k3u[k] + k4u[k]);
                v[k] += tau / 6.0 * (k1v[k] + 2.0 * k2v[k] + 2.0 * k3v[k] + k4v[k]);
            }
        }
        (u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dft_pair_round_trips() {
        let oracle = Rk4Oracle::new(0.0, 1.0, 8, &ModelParams::complex_power(2.0, 1.0, 0.0, 1).unwrap());
        let values: Vec<Complex64> = (0..8).map(|j| Complex64::new(j as f64, (j * j) as f64 * 0.1)).collect();
        let back = oracle.synthesize(&oracle.analyze(&values));
        for (a, b) in values.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn linear_mode_oscillates_at_its_frequency() {
        // A single mode of the linear equation: psi_l(t) = cos(delta t).
        let oracle = Rk4Oracle::new(0.0, 2.0 * PI, 8, &ModelParams::complex_power(1.5, 2.0, 0.0, 1).unwrap());
        let mut psi = vec![Complex64::default(); 8];
        psi[2] = Complex64::new(1.0, 0.0);
        let (u, _) = oracle.integrate(&psi, &[Complex64::default(); 8], 1e-3, 1000);
        let delta = (2f64.powf(1.5) + 2.0).sqrt();
        assert!((u[2].re - delta.cos()).abs() < 1e-10);
    }
}
