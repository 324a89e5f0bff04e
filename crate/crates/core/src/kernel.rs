//! Non-local internal energy: interaction kernels, their moments, and truncated gradient
//! expansions of the kernel-weighted log-density.
//!
//! Kernels are sampled at the folded coordinate `x in [-L/2, L/2)` with the origin at node 0,
//! symmetrised and normalised to unit integral. Moments use the same rectangle rule, so the
//! series in `a^2` is exactly the Taylor expansion of the sampled kernel's Fourier multiplier.

use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{convolve, integrate, Field, Grid};
use crate::potentials::{internal_energy_log, log_density, PhysParams};
use crate::scalar::{factorial, ordered_sum, Real};
use crate::table::Table;

#[derive(Clone, Debug, PartialEq)]
pub enum KernelFamily<T: Real> {
    /// Zero-range kernel, `1/dx` at the origin.
    Delta,
    /// Normalised Gaussian of standard deviation `width` (`a^2 = -width^2`).
    Gaussian { width: T },
    /// `2 g_s - g_{2s}` with `s = width`; unit integral and `a^2 = 2 s^2 > 0`.
    DifferenceOfGaussians { width: T },
    /// `(x, u)` samples, linearly interpolated; zero outside the table.
    Tabulated(Table<T>),
}

impl<T: Real> KernelFamily<T> {
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Ok(KernelFamily::Tabulated(Table::from_path(path)?))
    }

    /// Difference-of-Gaussians kernel whose characteristic length is `a`.
    pub fn dog_with_length(a: T) -> Self {
        KernelFamily::DifferenceOfGaussians { width: a / T::lit(2.0).sqrt() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Delta => "delta",
            KernelFamily::Gaussian { .. } => "gaussian",
            KernelFamily::DifferenceOfGaussians { .. } => "difference-of-gaussians",
            KernelFamily::Tabulated(_) => "tabulated",
        }
    }
}

fn gaussian<T: Real>(x: T, s: T) -> T {
    (-(x * x) / (T::lit(2.0) * s * s)).exp() / (T::TAU().sqrt() * s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<T: Real> {
    family: KernelFamily<T>,
    samples: Field<T>,
}

impl<T: Real> Kernel<T> {
    pub fn family(&self) -> &KernelFamily<T> {
        &self.family
    }

    pub fn field(&self) -> &Field<T> {
        &self.samples
    }

    pub fn grid(&self) -> &Grid<T> {
        self.samples.grid()
    }

    /// Kernel value for the node separation `i - j` (mod n).
    #[inline]
    pub(crate) fn at_offset(&self, i: usize, j: usize) -> T {
        let n = self.grid().n();
        self.samples.samples()[(i + n - j) % n]
    }
}

pub fn make_kernel<T: Real>(family: &KernelFamily<T>, grid: &Grid<T>) -> Result<Kernel<T>> {
    let n = grid.n();
    let limit = grid.length() / T::lit(8.0);
    let check_width = |w: T| {
        if !(w > T::zero()) || !(w < limit) {
            Err(Error::InvalidKernel(format!(
                "width {w} must lie in (0, L/8) = (0, {limit}) to stay contained in the box"
            )))
        } else {
            Ok(())
        }
    };
    let raw: Vec<T> = match family {
        KernelFamily::Delta => {
            let mut v = vec![T::zero(); n];
            v[0] = T::one() / grid.dx();
            v
        }
        KernelFamily::Gaussian { width } => {
            check_width(*width)?;
            (0..n).map(|j| gaussian(grid.folded_x(j), *width)).collect()
        }
        KernelFamily::DifferenceOfGaussians { width } => {
            check_width(*width)?;
            check_width(T::lit(2.0) * *width)?;
            (0..n)
                .map(|j| {
                    let x = grid.folded_x(j);
                    T::lit(2.0) * gaussian(x, *width) - gaussian(x, T::lit(2.0) * *width)
                })
                .collect()
        }
        KernelFamily::Tabulated(table) => {
            (0..n).map(|j| table.interpolate(grid.folded_x(j)).unwrap_or_else(T::zero)).collect()
        }
    };
    let sym: Vec<T> = (0..n)
        .map(|j| (raw[j] + raw[(n - j) % n]) / T::lit(2.0))
        .collect();
    let field = Field::new(grid, sym)?;
    let total = integrate(&field);
    if !(total.abs() >= T::lit(1e-12)) {
        return Err(Error::InvalidKernel(format!("kernel integral {total:e} cannot be normalised")));
    }
    Ok(Kernel { family: family.clone(), samples: field.map(|v| v / total) })
}

/// `a^2` and the expansion coefficients `c_0, c_2, c_4, ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable<T> {
    pub a2: T,
    /// `c[n]` is `c_{2n}`.
    pub c: Vec<T>,
}

impl<T: Real> MomentTable<T> {
    /// `c_{2n}`.
    pub fn coefficient(&self, n: usize) -> Result<T> {
        self.c.get(n).copied().ok_or(Error::InsufficientMoments {
            requested: 2 * n,
            available: 2 * (self.c.len().saturating_sub(1)),
        })
    }

    /// Highest `n` with `c_{2n}` available.
    pub fn max_n(&self) -> usize {
        self.c.len() - 1
    }
}

/// `integral x^{2n} u dx` on the folded coordinate.
pub fn even_moment<T: Real>(u: &Kernel<T>, n: usize) -> T {
    let grid = u.grid();
    let terms = u
        .field()
        .samples()
        .iter()
        .enumerate()
        .map(|(j, &v)| grid.folded_x(j).powi(2 * n as i32) * v);
    ordered_sum(terms) * grid.dx()
}

/// `a^2 = -integral x^2 u`, `c_0 = 1`, and `c_{2n} = (-1)^n integral x^{2n} u / a^{2n}` for
/// `n = 1..=max_n`. `c_2 = 1` by construction; with `a^2 = 0` only `c_0, c_2` exist.
pub fn moments<T: Real>(u: &Kernel<T>, max_n: usize) -> Result<MomentTable<T>> {
    let a2 = -even_moment(u, 1);
    let l = u.grid().length();
    let degenerate = a2.abs() <= T::epsilon() * l * l;
    if degenerate && max_n >= 2 {
        return Err(Error::DegenerateKernel);
    }
    let mut c = vec![T::one()];
    for n in 1..=max_n {
        if degenerate {
            c.push(T::one());
            continue;
        }
        let sign = if n % 2 == 0 { T::one() } else { -T::one() };
        c.push(sign * even_moment(u, n) / a2.powi(n as i32));
    }
    Ok(MomentTable { a2: if degenerate { T::zero() } else { a2 }, c })
}

/// `U = (kT/m) (u * ln rho)`.
pub fn nonlocal_energy<T: Real>(rho: &Field<T>, u: &Kernel<T>, p: &PhysParams<T>) -> Result<Field<T>> {
    nonlocal_energy_log(&log_density(rho)?, u, p)
}

pub fn nonlocal_energy_log<T: Real>(lambda: &Field<T>, u: &Kernel<T>, p: &PhysParams<T>) -> Result<Field<T>> {
    let ktm = p.kt_over_m();
    Ok(convolve(lambda, u.field())?.map(|v| ktm * v))
}

/// Partial sum through `n = order` of `(kT/m) sum (-1)^n a^{2n} c_{2n}/(2n)! lap^n ln rho`.
/// `a2` is passed separately so the de Broglie value can be used without a kernel.
pub fn series_energy<T: Real>(
    rho: &Field<T>,
    table: &MomentTable<T>,
    a2: T,
    order: usize,
    p: &PhysParams<T>,
) -> Result<Field<T>> {
    series_energy_log(&log_density(rho)?, table, a2, order, p)
}

pub fn series_energy_log<T: Real>(
    lambda: &Field<T>,
    table: &MomentTable<T>,
    a2: T,
    order: usize,
    p: &PhysParams<T>,
) -> Result<Field<T>> {
    for n in 0..=order {
        table.coefficient(n)?;
    }
    let local = internal_energy_log(lambda, p);
    if order == 0 {
        return Ok(local);
    }
    // lap^n has multiplier (-k^2)^n, which cancels the (-1)^n.
    let grid = lambda.grid();
    let mut spec = grid.forward(lambda.samples());
    let reference = ordered_sum(spec.iter().map(|c| c.norm())) / T::from_count(grid.n());
    let mut max_mult = T::zero();
    for (j, s) in spec.iter_mut().enumerate() {
        let k2 = grid.wavenumbers()[j] * grid.wavenumbers()[j];
        let mult = ordered_sum((1..=order).map(|n| {
            table.c[n] * (a2 * k2).powi(n as i32) / factorial::<T>(2 * n)
        }));
        max_mult = max_mult.max(mult.abs());
        *s = *s * Complex::new(mult, T::zero());
    }
    let correction = grid.inverse_real(spec, reference * max_mult)?;
    let ktm = p.kt_over_m();
    Ok(Field::from_vec_unchecked(
        grid,
        local.samples().iter().zip(&correction).map(|(&u, &d)| u + ktm * d).collect(),
    ))
}

/// `O(n^2)` direct-sum evaluation of the non-local energy, independent of the FFT path.
pub fn nonlocal_energy_direct<T: Real>(rho: &Field<T>, u: &Kernel<T>, p: &PhysParams<T>) -> Result<Field<T>> {
    let lambda = log_density(rho)?;
    rho.same_grid(u.field())?;
    let grid = rho.grid();
    let n = grid.n();
    let ktm = p.kt_over_m();
    let out = (0..n)
        .map(|i| {
            let s = ordered_sum((0..n).map(|j| u.at_offset(i, j) * lambda.samples()[j]));
            ktm * s * grid.dx()
        })
        .collect();
    Ok(Field::from_vec_unchecked(grid, out))
}
