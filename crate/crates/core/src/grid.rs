//! Periodic 1D grid, sampled fields and the spectral toolkit built on them.
//!
//! Nodes sit at `x_j = j * dx` for `j = 0..n` on `[0, L)`. Wavenumbers follow the
//! standard DFT ordering `k_j = 2 pi j / L` for `j < n/2` and `2 pi (j - n) / L` above.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Real};

struct GridInner<T: Real> {
    n: usize,
    length: T,
    dx: T,
    wavenumbers: Vec<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

/// Uniform periodic grid. Cheap to clone; clones share FFT plans.
#[derive(Clone)]
pub struct Grid<T: Real>(Arc<GridInner<T>>);

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.0.n)
            .field("length", &self.0.length)
            .finish()
    }
}

impl<T: Real> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.n == other.0.n && self.0.length == other.0.length)
    }
}

impl<T: Real> Grid<T> {
    pub fn new(n: usize, length: T) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n = {n}: sample count must be even and n >= 8"
            )));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!("length L = {length} must be finite and > 0")));
        }
        let dx = length / T::from_count(n);
        let dk = T::TAU() / length;
        let wavenumbers = (0..n)
            .map(|j| {
                let signed = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                dk * T::lit(signed)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Grid(Arc::new(GridInner { n, length, dx, wavenumbers, forward, inverse })))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.n
    }

    #[inline]
    pub fn length(&self) -> T {
        self.0.length
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.0.dx
    }

    #[inline]
    pub fn wavenumbers(&self) -> &[T] {
        &self.0.wavenumbers
    }

    /// Node coordinate `j * dx`.
    #[inline]
    pub fn x(&self, j: usize) -> T {
        T::from_count(j) * self.0.dx
    }

    pub fn coordinates(&self) -> Vec<T> {
        (0..self.n()).map(|j| self.x(j)).collect()
    }

    /// Node coordinate folded into `[-L/2, L/2)`; used for kernels centred at the origin.
    #[inline]
    pub fn folded_x(&self, j: usize) -> T {
        let n = self.n();
        let j = j % n;
        if j < n / 2 {
            self.x(j)
        } else {
            T::from_count(j) * self.0.dx - self.0.length
        }
    }

    /// Largest absolute wavenumber (the Nyquist mode).
    pub fn k_max(&self) -> T {
        T::PI() / self.0.dx
    }

    /// Unnormalised forward DFT of real data.
    pub fn forward(&self, data: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = data.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.0.forward.process(&mut buf);
        buf
    }

    /// Unnormalised forward DFT of complex data.
    pub fn forward_complex(&self, data: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = data.to_vec();
        self.0.forward.process(&mut buf);
        buf
    }

    /// Inverse DFT including the `1/n` normalisation.
    pub fn inverse(&self, mut spectrum: Vec<Complex<T>>) -> Vec<Complex<T>> {
        self.0.inverse.process(&mut spectrum);
        let scale = T::one() / T::from_count(self.n());
        for c in spectrum.iter_mut() {
            *c = *c * scale;
        }
        spectrum
    }

    /// Inverse transform that must land on real values; the imaginary residue is checked
    /// against `1e-12` of the amplitude and then discarded. The amplitude is the larger of the
    /// output bound `sum |c_j| / n` and `reference`, the scale at which roundoff entered.
    pub fn inverse_real(&self, spectrum: Vec<Complex<T>>, reference: T) -> Result<Vec<T>> {
        let amplitude = ordered_sum(spectrum.iter().map(|c| c.norm())) / T::from_count(self.n());
        let out = self.inverse(spectrum);
        let residue = out.iter().fold(T::zero(), |m, c| m.max(c.im.abs()));
        let limit = T::tol(1e-12) * amplitude.max(reference).max(T::min_positive_value());
        if residue > limit {
            return Err(Error::NonReal { residue: residue.as_f64(), limit: limit.as_f64() });
        }
        Ok(out.into_iter().map(|c| c.re).collect())
    }

    /// Spectral multiplier for `d^order/dx^order`: `(i k)^order`, with the Nyquist mode
    /// dropped for odd orders so real input stays real.
    pub fn derivative_multiplier(&self, j: usize, order: u32) -> Complex<T> {
        let n = self.n();
        if order % 2 == 1 && j == n / 2 {
            return Complex::new(T::zero(), T::zero());
        }
        let k = self.0.wavenumbers[j];
        let mag = k.powi(order as i32);
        match order % 4 {
            0 => Complex::new(mag, T::zero()),
            1 => Complex::new(T::zero(), mag),
            2 => Complex::new(-mag, T::zero()),
            _ => Complex::new(T::zero(), -mag),
        }
    }

    /// Spectral derivative of raw samples.
    pub fn derivative_of(&self, samples: &[T], order: u32) -> Result<Vec<T>> {
        if order == 0 {
            return Ok(samples.to_vec());
        }
        let mut spec = self.forward(samples);
        let input = ordered_sum(spec.iter().map(|c| c.norm())) / T::from_count(self.n());
        for (j, c) in spec.iter_mut().enumerate() {
            *c = *c * self.derivative_multiplier(j, order);
        }
        self.inverse_real(spec, input * self.k_max().powi(order as i32))
    }

    /// Zero the top third of the spectrum (modes with `|j| > n/3`).
    pub fn dealias(&self, samples: &[T]) -> Vec<T> {
        let mut spec = self.forward(samples);
        let n = self.n();
        let cut = n / 3;
        for (j, c) in spec.iter_mut().enumerate() {
            let sj = if j <= n / 2 { j } else { n - j };
            if sj > cut {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
        self.inverse(spec).into_iter().map(|c| c.re).collect()
    }
}

fn check_finite<T: Real>(samples: &[T]) -> Result<()> {
    match samples.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Real scalar function sampled on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T: Real> {
    grid: Grid<T>,
    samples: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn new(grid: &Grid<T>, samples: Vec<T>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.n()
            )));
        }
        check_finite(&samples)?;
        Ok(Field { grid: grid.clone(), samples })
    }

    /// Samples produced by internal arithmetic; finiteness is the caller's business.
    pub(crate) fn from_vec_unchecked(grid: &Grid<T>, samples: Vec<T>) -> Self {
        debug_assert_eq!(samples.len(), grid.n());
        Field { grid: grid.clone(), samples }
    }

    pub fn from_fn(grid: &Grid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(grid, grid.coordinates().into_iter().map(f).collect())
    }

    pub fn constant(grid: &Grid<T>, value: T) -> Self {
        Field { grid: grid.clone(), samples: vec![value; grid.n()] }
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Field { grid: self.grid.clone(), samples: self.samples.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Field<T>, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Field {
            grid: self.grid.clone(),
            samples: self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn same_grid(&self, other: &Field<T>) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        check_finite(&self.samples)
    }

    pub fn max_abs(&self) -> T {
        self.samples.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> T {
        self.samples.iter().fold(T::infinity(), |m, &v| m.min(v))
    }

    pub fn max(&self) -> T {
        self.samples.iter().fold(T::neg_infinity(), |m, &v| m.max(v))
    }

    pub fn mean(&self) -> T {
        ordered_sum(self.samples.iter().copied()) / T::from_count(self.samples.len())
    }

    /// `max |self - other|`.
    pub fn max_abs_diff(&self, other: &Field<T>) -> Result<T> {
        self.same_grid(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())))
    }
}

/// Complex scalar function sampled on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField<T: Real> {
    grid: Grid<T>,
    samples: Vec<Complex<T>>,
}

impl<T: Real> ComplexField<T> {
    pub fn new(grid: &Grid<T>, samples: Vec<Complex<T>>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.n()
            )));
        }
        if let Some(index) = samples.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(ComplexField { grid: grid.clone(), samples })
    }

    pub(crate) fn from_vec_unchecked(grid: &Grid<T>, samples: Vec<Complex<T>>) -> Self {
        ComplexField { grid: grid.clone(), samples }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    /// `|psi|^2` as a real field.
    pub fn modulus_squared(&self) -> Field<T> {
        Field::from_vec_unchecked(&self.grid, self.samples.iter().map(|c| c.norm_sqr()).collect())
    }

    /// `integral |psi|^2 dx`.
    pub fn norm_squared(&self) -> T {
        ordered_sum(self.samples.iter().map(|c| c.norm_sqr())) * self.grid.dx()
    }
}

/// Spectral derivative of the given order.
pub fn derivative<T: Real>(f: &Field<T>, order: u32) -> Result<Field<T>> {
    if order == 0 {
        return Err(Error::InvalidParameter("derivative order must be >= 1".into()));
    }
    f.check_finite()?;
    let out = f.grid().derivative_of(f.samples(), order)?;
    Ok(Field::from_vec_unchecked(f.grid(), out))
}

/// Periodic convolution `(f * g)(x_i) = dx * sum_j f(x_j) g(x_i - x_j)`, computed via the DFT.
///
/// `g` is read with its origin at node 0, so a kernel with unit integral preserves the mean of `f`.
pub fn convolve<T: Real>(f: &Field<T>, g: &Field<T>) -> Result<Field<T>> {
    f.same_grid(g)?;
    let grid = f.grid();
    let fs = grid.forward(f.samples());
    let gs = grid.forward(g.samples());
    let dx = grid.dx();
    let n = T::from_count(grid.n());
    let reference = ordered_sum(fs.iter().map(|c| c.norm())) / n * ordered_sum(gs.iter().map(|c| c.norm())) / n * dx;
    let prod = fs.iter().zip(&gs).map(|(a, b)| a * b * dx).collect();
    Ok(Field::from_vec_unchecked(grid, grid.inverse_real(prod, reference)?))
}

/// Periodic rectangle (trapezoid) rule `dx * sum f_j`.
pub fn integrate<T: Real>(f: &Field<T>) -> T {
    ordered_sum(f.samples().iter().copied()) * f.grid().dx()
}

/// Spectral-side evaluation of `integral f^2 dx` via Parseval: `(dx / n) * sum |F_k|^2`.
pub fn parseval_integral<T: Real>(f: &Field<T>) -> T {
    let grid = f.grid();
    let spec = grid.forward(f.samples());
    ordered_sum(spec.iter().map(|c| c.norm_sqr())) * grid.dx() / T::from_count(grid.n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn grid(n: usize, l: f64) -> Grid<f64> {
        Grid::new(n, l).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(Grid::<f64>::new(7, 1.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::<f64>::new(6, 1.0), Err(Error::InvalidGrid(_))));
        assert!(Grid::<f64>::new(8, 0.0).is_err());
        let g = grid(64, 3.0);
        assert_eq!(g.dx() * 64.0, 3.0);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = grid(32, 2.0);
        let d = derivative(&Field::constant(&g, 4.2), 1).unwrap();
        assert!(d.max_abs() < 1e-14);
    }

    #[test]
    fn second_derivative_of_sine() {
        let l = TAU;
        let g = grid(32, l);
        let k = TAU / l;
        let f = Field::from_fn(&g, |x| (k * x).sin()).unwrap();
        let d2 = derivative(&f, 2).unwrap();
        let exact = Field::from_fn(&g, |x| -k * k * (k * x).sin()).unwrap();
        let err = d2.max_abs_diff(&exact).unwrap();
        assert!(err < 1e-12, "err {err:e}");
    }

    #[test]
    fn derivative_of_exp_cos_matches_symbolic() {
        let l = 2.0;
        let g = grid(128, l);
        let k = TAU / l;
        let f = Field::from_fn(&g, |x| (k * x).cos().exp()).unwrap();
        let d = derivative(&f, 1).unwrap();
        for (j, &v) in d.samples().iter().enumerate() {
            let x = g.x(j);
            let exact = -k * (k * x).sin() * (k * x).cos().exp();
            let scale = exact.abs().max(k * (-1.0f64).exp());
            assert!((v - exact).abs() / scale < 1e-10, "j={j}");
        }
    }

    #[test]
    fn convolve_with_delta_shifts() {
        let g = grid(16, 1.0);
        let f = Field::from_fn(&g, |x| (TAU * x).sin() + 0.3 * (2.0 * TAU * x).cos()).unwrap();
        let mut delta = vec![0.0; 16];
        delta[3] = 1.0 / g.dx();
        let delta = Field::new(&g, delta).unwrap();
        let out = convolve(&f, &delta).unwrap();
        for i in 0..16 {
            assert!((out.samples()[i] - f.samples()[(i + 16 - 3) % 16]).abs() < 1e-13);
        }
    }

    #[test]
    fn convolve_gaussian_multiplier() {
        let l = 10.0;
        let s = 0.3;
        let g = grid(128, l);
        let k = TAU / l;
        let f = Field::from_fn(&g, |x| (k * x).cos()).unwrap();
        let kern: Vec<f64> = (0..128)
            .map(|j| {
                let x = g.folded_x(j);
                (-x * x / (2.0 * s * s)).exp() / ((2.0 * PI).sqrt() * s)
            })
            .collect();
        let kern = Field::new(&g, kern).unwrap();
        let out = convolve(&f, &kern).unwrap();
        let damp = (-0.5 * k * k * s * s).exp();
        for (j, &v) in out.samples().iter().enumerate() {
            let exact = damp * (k * g.x(j)).cos();
            assert!((v - exact).abs() < 1e-8, "j={j}");
        }
        let c = convolve(&Field::constant(&g, 2.5), &kern).unwrap();
        assert!(c.samples().iter().all(|v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn integrate_examples() {
        let g = grid(16, 2.0);
        assert!((integrate(&Field::constant(&g, 1.0)) - 2.0).abs() < 1e-15);
        let s = Field::from_fn(&g, |x| (PI * x).sin()).unwrap();
        assert!(integrate(&s).abs() < 1e-14);

        // Well-contained Gaussian: erf(L/(2 sqrt 2 s)) is 1 to machine precision here.
        let l = 20.0;
        let sigma = 0.7;
        let g = grid(256, l);
        let bump = Field::from_fn(&g, |x| (-(x - l / 2.0).powi(2) / (2.0 * sigma * sigma)).exp()).unwrap();
        let area = sigma * (2.0 * PI).sqrt();
        assert!((integrate(&bump) - area).abs() < 1e-10);
    }

    #[test]
    fn nyquist_dropped_for_odd_orders() {
        let g = grid(8, 1.0);
        let alt = Field::new(&g, (0..8).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect()).unwrap();
        assert!(derivative(&alt, 1).unwrap().max_abs() < 1e-12);
        let d2 = derivative(&alt, 2).unwrap();
        let kn = PI / g.dx();
        assert!((d2.samples()[0] + kn * kn).abs() < 1e-9);
    }

    #[test]
    fn dealias_removes_top_third() {
        let g = grid(24, 1.0);
        let f = Field::from_fn(&g, |x| (TAU * x).cos() + (TAU * 10.0 * x).sin()).unwrap();
        let d = g.dealias(f.samples());
        for (j, &v) in d.iter().enumerate() {
            assert!((v - (TAU * g.x(j)).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let g = Grid::<f32>::new(32, 1.0).unwrap();
        let f = Field::from_fn(&g, |x| (std::f32::consts::TAU * x).sin()).unwrap();
        let d = derivative(&f, 1).unwrap();
        let exact = Field::from_fn(&g, |x| std::f32::consts::TAU * (std::f32::consts::TAU * x).cos()).unwrap();
        assert!(d.max_abs_diff(&exact).unwrap() < 1e-4);
    }

    #[test]
    fn binary_ops_need_same_grid() {
        let a = Field::constant(&grid(16, 1.0), 1.0);
        let b = Field::constant(&grid(16, 2.0), 1.0);
        assert_eq!(convolve(&a, &b).unwrap_err(), Error::GridMismatch);
        assert!(Field::new(&grid(8, 1.0), vec![f64::NAN; 8]).is_err());
    }
}
