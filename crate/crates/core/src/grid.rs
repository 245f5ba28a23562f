//! Periodic tensor grids, the discrete Fourier pair and Sobolev norms.
//!
//! Coefficients are stored in FFT order: flat slot `k` on an axis of size `N`
//! holds the mode `l = k` for `k < N/2` and `l = k - N` otherwise, so the
//! index set is `{-N/2, ..., N/2-1}`. In 2D the layout is row-major with the
//! second axis contiguous.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// One periodic axis `(a, b)` sampled at `N` equispaced nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::invalid("domain", format!("need a < b, got ({a}, {b})")));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::invalid("N", format!("must be even and >= 4, got {n}")));
        }
        Ok(Axis { a, b, n })
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn h(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.a + j as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Mode number `l` stored at FFT slot `k`.
    pub fn mode(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// FFT slot of mode `l`, if `l` is in the index set.
    pub fn slot(&self, l: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if l < -half || l >= half {
            None
        } else if l >= 0 {
            Some(l as usize)
        } else {
            Some((l + self.n as i64) as usize)
        }
    }

    /// `mu_l = 2 pi l / (b - a)`.
    pub fn frequency(&self, l: i64) -> f64 {
        2.0 * PI * l as f64 / self.length()
    }

    /// Slot holding the mode `-l` for the mode at slot `k`. The unmatched
    /// `-N/2` mode maps to itself.
    fn mirror(&self, k: usize) -> usize {
        (self.n - k) % self.n
    }
}

struct AxisPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// A 1D or 2D periodic grid with precomputed FFT plans.
///
/// Plans are immutable and `Send + Sync`, so a grid can be shared between
/// concurrent solves through an `Arc`.
pub struct SpectralGrid {
    axes: Vec<Axis>,
    plans: Vec<AxisPlan>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid").field("axes", &self.axes).finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.axes == other.axes
    }
}

impl SpectralGrid {
    pub fn new(axes: Vec<Axis>) -> Result<Arc<Self>> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::invalid(
                "dims",
                format!("only 1D and 2D grids are supported, got {}", axes.len()),
            ));
        }
        let mut planner = FftPlanner::new();
        let plans = axes
            .iter()
            .map(|ax| AxisPlan {
                forward: planner.plan_fft_forward(ax.n),
                inverse: planner.plan_fft_inverse(ax.n),
            })
            .collect();
        Ok(Arc::new(SpectralGrid { axes, plans }))
    }

    pub fn new_1d(a: f64, b: f64, n: usize) -> Result<Arc<Self>> {
        Self::new(vec![Axis::new(a, b, n)?])
    }

    pub fn new_2d(x: (f64, f64, usize), y: (f64, f64, usize)) -> Result<Arc<Self>> {
        Self::new(vec![Axis::new(x.0, x.1, x.2)?, Axis::new(y.0, y.1, y.2)?])
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|ax| ax.n).collect()
    }

    /// Total number of nodes (and of coefficients).
    pub fn len(&self) -> usize {
        self.axes.iter().map(|ax| ax.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Measure of the domain, `prod (b_i - a_i)`.
    pub fn volume(&self) -> f64 {
        self.axes.iter().map(Axis::length).product()
    }

    /// Whether two grids share a domain (the mode counts may differ).
    pub fn same_domain(&self, other: &SpectralGrid) -> bool {
        self.dims() == other.dims()
            && self
                .axes
                .iter()
                .zip(&other.axes)
                .all(|(p, q)| p.a == q.a && p.b == q.b)
    }

    /// Per-axis mode numbers of a flat slot.
    pub fn modes_of(&self, flat: usize) -> [i64; 2] {
        match self.axes.as_slice() {
            [ax] => [ax.mode(flat), 0],
            [ax, ay] => [ax.mode(flat / ay.n), ay.mode(flat % ay.n)],
            _ => unreachable!(),
        }
    }

    /// Flat slot of a mode tuple, if representable.
    pub fn slot_of(&self, modes: [i64; 2]) -> Option<usize> {
        match self.axes.as_slice() {
            [ax] => ax.slot(modes[0]),
            [ax, ay] => Some(ax.slot(modes[0])? * ay.n + ay.slot(modes[1])?),
            _ => unreachable!(),
        }
    }

    /// `|mu_l|^2` for every flat slot.
    pub fn frequency_sq(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let modes = self.modes_of(k);
                self.axes
                    .iter()
                    .zip(modes)
                    .map(|(ax, l)| ax.frequency(l).powi(2))
                    .sum()
            })
            .collect()
    }

    /// Slot of the mirrored mode `-l` (used by conjugation).
    pub fn mirror(&self, flat: usize) -> usize {
        match self.axes.as_slice() {
            [ax] => ax.mirror(flat),
            [ax, ay] => ax.mirror(flat / ay.n) * ay.n + ay.mirror(flat % ay.n),
            _ => unreachable!(),
        }
    }

    /// Node coordinates of a flat node index.
    pub fn node_of(&self, flat: usize) -> [f64; 2] {
        match self.axes.as_slice() {
            [ax] => [ax.node(flat), 0.0],
            [ax, ay] => [ax.node(flat / ay.n), ay.node(flat % ay.n)],
            _ => unreachable!(),
        }
    }

    /// Samples `f` at every node.
    pub fn sample<F>(&self, f: F) -> Vec<Complex64>
    where
        F: Fn([f64; 2]) -> Complex64,
    {
        (0..self.len()).map(|k| f(self.node_of(k))).collect()
    }

    /// Unnormalized multidimensional DFT in place.
    fn transform(&self, data: &mut [Complex64], forward: bool) {
        let pick = |p: &AxisPlan| {
            if forward {
                Arc::clone(&p.forward)
            } else {
                Arc::clone(&p.inverse)
            }
        };
        match self.axes.as_slice() {
            [_] => pick(&self.plans[0]).process(data),
            [ax, ay] => {
                let (nx, ny) = (ax.n, ay.n);
                pick(&self.plans[1]).process(data);
                let plan = pick(&self.plans[0]);
                let mut column = vec![Complex64::new(0.0, 0.0); nx];
                let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                for j in 0..ny {
                    for i in 0..nx {
                        column[i] = data[i * ny + j];
                    }
                    plan.process_with_scratch(&mut column, &mut scratch);
                    for i in 0..nx {
                        data[i * ny + j] = column[i];
                    }
                }
            }
            _ => unreachable!(),
        }
    }
}

/// Complex Fourier coefficients of a periodic function on a [`SpectralGrid`].
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Arc<SpectralGrid>,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        SpectralField {
            grid: Arc::clone(grid),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Arc<SpectralGrid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Dimension {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(SpectralField {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    /// Field holding a single mode with the given coefficient.
    pub fn single_mode(grid: &Arc<SpectralGrid>, modes: [i64; 2], value: Complex64) -> Result<Self> {
        let slot = grid
            .slot_of(modes)
            .ok_or_else(|| Error::invalid("mode", format!("{modes:?} not representable")))?;
        let mut field = Self::zeros(grid);
        field.coeffs[slot] = value;
        Ok(field)
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, modes: [i64; 2]) -> Option<Complex64> {
        self.grid.slot_of(modes).map(|k| self.coeffs[k])
    }

    pub(crate) fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid.axes(),
                other.grid.axes()
            )))
        }
    }

    /// Coefficients of the pointwise complex conjugate: `c_l -> conj(c_{-l})`.
    pub fn conj(&self) -> Self {
        let coeffs = (0..self.coeffs.len())
            .map(|k| self.coeffs[self.grid.mirror(k)].conj())
            .collect();
        SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs,
        }
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|k| (self.coeffs[k] - self.coeffs[self.grid.mirror(k)].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real_valued(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Projects onto real-valued functions; the `-N/2` mode becomes real.
    pub fn real_part(&self) -> Self {
        let coeffs = (0..self.coeffs.len())
            .map(|k| 0.5 * (self.coeffs[k] + self.coeffs[self.grid.mirror(k)].conj()))
            .collect();
        SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs,
        }
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn zip_with<F>(&self, other: &SpectralField, f: F) -> Result<Self>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        self.check_grid(other)?;
        Ok(SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        })
    }

    /// Max-norm of the coefficient difference.
    pub fn max_coeff_diff(&self, other: &SpectralField) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    /// Transfers the coefficients to another grid on the same domain by
    /// mode number: shared modes are copied, the rest are dropped or zero.
    pub fn resample(&self, target: &Arc<SpectralGrid>) -> Result<Self> {
        if !self.grid.same_domain(target) {
            return Err(Error::GridMismatch(format!(
                "cannot resample {:?} onto {:?}",
                self.grid.axes(),
                target.axes()
            )));
        }
        let mut out = SpectralField::zeros(target);
        for (k, c) in self.coeffs.iter().enumerate() {
            if let Some(slot) = target.slot_of(self.grid.modes_of(k)) {
                out.coeffs[slot] = *c;
            }
        }
        Ok(out)
    }
}

/// `c_l = (1/N) sum_j v_j exp(-i mu_l (x_j - a))`, tensorized in 2D.
pub fn forward_transform(values: &[Complex64], grid: &Arc<SpectralGrid>) -> Result<SpectralField> {
    if values.len() != grid.len() {
        return Err(Error::Dimension {
            expected: grid.len(),
            got: values.len(),
        });
    }
    let mut data = values.to_vec();
    grid.transform(&mut data, true);
    let norm = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|c| *c *= norm);
    SpectralField::from_coeffs(grid, data)
}

/// `v_j = sum_l c_l exp(i mu_l (x_j - a))`.
pub fn inverse_transform(field: &SpectralField) -> Vec<Complex64> {
    let mut data = field.coeffs.clone();
    field.grid.transform(&mut data, false);
    data
}

/// `( sum_l (1 + |mu_l|^2)^m |c_l|^2 )^{1/2}` over the representable modes.
pub fn sobolev_norm(field: &SpectralField, m: f64) -> Result<f64> {
    if !(m >= 0.0) {
        return Err(Error::invalid("m", format!("Sobolev index must be >= 0, got {m}")));
    }
    let weights = field.grid.frequency_sq();
    let sum: f64 = field
        .coeffs
        .iter()
        .zip(&weights)
        .map(|(c, w)| (1.0 + w).powf(m) * c.norm_sqr())
        .sum();
    Ok(sum.sqrt())
}
