//! Scalar potential and energy fields (all per unit mass): thermodynamic internal energy,
//! enthalpy, pressure, external potentials and the Bohm quantum potential.
//!
//! Every density-based entry point has a `*_log` twin taking `lambda = ln rho`, which is what
//! the solver carries. Density-based versions reject `min rho <= 1e-12 * mean rho`.

use crate::error::{Error, Result};
use crate::grid::{integrate, Field, Grid};
use crate::kernel::MomentTable;
use crate::scalar::{factorial, Real};
use crate::table::Table;

/// How the characteristic length `a^2` is resolved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum A2Mode<T> {
    /// `a = hbar / sqrt(4 m kT)`, the thermal de Broglie length.
    DeBroglie,
    /// A user supplied (signed) `a^2`.
    Explicit(T),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysParams<T> {
    pub hbar: T,
    pub m: T,
    pub kt: T,
    pub a2_mode: A2Mode<T>,
    /// Signal speed, only used by the retarded operators.
    pub c: T,
}

impl<T: Real> PhysParams<T> {
    pub fn new(hbar: T, m: T, kt: T, a2_mode: A2Mode<T>, c: T) -> Result<Self> {
        let p = PhysParams { hbar, m, kt, a2_mode, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.hbar > T::zero()) {
            return bad("hbar must be > 0");
        }
        if !(self.m > T::zero()) {
            return bad("m must be > 0");
        }
        if !(self.kt >= T::zero()) {
            return bad("kT must be >= 0");
        }
        if !(self.c > T::zero()) {
            return bad("c must be > 0");
        }
        match self.a2_mode {
            A2Mode::DeBroglie if !(self.kt > T::zero()) => {
                bad("de_broglie mode needs kT > 0: a = hbar / sqrt(4 m kT) divides by kT")
            }
            A2Mode::Explicit(a2) if !a2.is_finite() => bad("explicit a^2 must be finite"),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn kt_over_m(&self) -> T {
        self.kt / self.m
    }

    /// Resolved `a^2`.
    pub fn a2(&self) -> T {
        match self.a2_mode {
            A2Mode::DeBroglie => self.hbar * self.hbar / (T::lit(4.0) * self.m * self.kt),
            A2Mode::Explicit(a2) => a2,
        }
    }

    /// `(kT/m) a^2`. In de Broglie mode this is `hbar^2 / (4 m^2)` exactly, independent of kT.
    pub fn quantum_coefficient(&self) -> T {
        match self.a2_mode {
            A2Mode::DeBroglie => self.hbar * self.hbar / (T::lit(4.0) * self.m * self.m),
            A2Mode::Explicit(a2) => self.kt_over_m() * a2,
        }
    }

    /// The Planck constant seen by the equivalent Schrodinger equation: `hbar` in de Broglie
    /// mode, `2 m sqrt((kT/m) a^2)` for an explicit `a^2`.
    pub fn hbar_eff(&self) -> Result<T> {
        match self.a2_mode {
            A2Mode::DeBroglie => Ok(self.hbar),
            A2Mode::Explicit(_) => {
                let q = self.quantum_coefficient();
                if q > T::zero() {
                    Ok(T::lit(2.0) * self.m * q.sqrt())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "explicit mode needs (kT/m) a^2 > 0 for an effective hbar, got {q}"
                    )))
                }
            }
        }
    }

    pub fn with_a2(&self, a2: T) -> Self {
        PhysParams { a2_mode: A2Mode::Explicit(a2), ..*self }
    }
}

/// External potential energy per unit mass.
#[derive(Clone, Debug, PartialEq)]
pub enum ExternalPotential<T: Real> {
    Zero,
    /// `0.5 omega^2 (x - L/2)^2` on the periodic coordinate; kinked at the box edge.
    Harmonic { omega: T },
    /// `v0 cos(2 pi x / L)`.
    Cosine { v0: T },
    /// Samples over `[0, L]` with equal end values.
    Tabulated(Table<T>),
}

impl<T: Real> ExternalPotential<T> {
    pub fn validate(&self, grid: &Grid<T>) -> Result<()> {
        if let ExternalPotential::Tabulated(table) = self {
            let (xs, ys) = (table.xs(), table.ys());
            let (first, last) = (ys[0], *ys.last().unwrap());
            let scale = ys.iter().fold(T::one(), |m, v| m.max(v.abs()));
            if (first - last).abs() > T::tol(1e-12) * scale {
                return Err(Error::InvalidParameter(format!(
                    "tabulated potential is not periodic: V(first) = {first}, V(last) = {last}"
                )));
            }
            let span_tol = T::tol(1e-9) * grid.length();
            if xs[0].abs() > span_tol || (*xs.last().unwrap() - grid.length()).abs() > span_tol {
                return Err(Error::InvalidParameter(format!(
                    "tabulated potential must span [0, L] = [0, {}]",
                    grid.length()
                )));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, grid: &Grid<T>) -> Result<Field<T>> {
        self.validate(grid)?;
        let l = grid.length();
        match self {
            ExternalPotential::Zero => Ok(Field::zeros(grid)),
            ExternalPotential::Harmonic { omega } => {
                let half = l / T::lit(2.0);
                Field::from_fn(grid, |x| T::lit(0.5) * *omega * *omega * (x - half) * (x - half))
            }
            ExternalPotential::Cosine { v0 } => Field::from_fn(grid, |x| *v0 * (T::TAU() * x / l).cos()),
            ExternalPotential::Tabulated(table) => {
                Field::from_fn(grid, |x| table.interpolate(x).unwrap_or_else(|| table.ys()[0]))
            }
        }
    }

    /// Curvature at the potential minimum, when the potential is a trap.
    pub fn trap_frequency(&self, grid: &Grid<T>) -> Option<T> {
        match self {
            ExternalPotential::Harmonic { omega } => Some(*omega),
            ExternalPotential::Cosine { v0 } if *v0 > T::zero() => {
                Some((*v0).sqrt() * T::TAU() / grid.length())
            }
            _ => None,
        }
    }
}

/// `ln rho` after checking `min rho > 1e-12 * mean rho`.
pub fn log_density<T: Real>(rho: &Field<T>) -> Result<Field<T>> {
    let mean = rho.mean();
    let floor = T::lit(1e-12) * mean;
    for (j, &v) in rho.samples().iter().enumerate() {
        if !(v > floor) || !(v > T::zero()) {
            return Err(Error::NonPositiveDensity { x: rho.grid().x(j).as_f64(), value: v.as_f64() });
        }
    }
    Ok(rho.map(|v| v.ln()))
}

pub fn internal_energy<T: Real>(rho: &Field<T>, p: &PhysParams<T>) -> Result<Field<T>> {
    Ok(internal_energy_log(&log_density(rho)?, p))
}

/// `(kT/m) lambda`.
pub fn internal_energy_log<T: Real>(lambda: &Field<T>, p: &PhysParams<T>) -> Field<T> {
    let ktm = p.kt_over_m();
    lambda.map(|l| ktm * l)
}

pub fn enthalpy<T: Real>(rho: &Field<T>, p: &PhysParams<T>) -> Result<Field<T>> {
    Ok(enthalpy_log(&log_density(rho)?, p))
}

/// `(kT/m)(lambda + 1)`.
pub fn enthalpy_log<T: Real>(lambda: &Field<T>, p: &PhysParams<T>) -> Field<T> {
    let ktm = p.kt_over_m();
    lambda.map(|l| ktm * (l + T::one()))
}

/// Isothermal ideal-gas pressure `(kT/m) rho`.
pub fn pressure<T: Real>(rho: &Field<T>, p: &PhysParams<T>) -> Result<Field<T>> {
    log_density(rho)?;
    let ktm = p.kt_over_m();
    Ok(rho.map(|r| ktm * r))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BohmForm {
    /// `-(kT/m) a^2 [lap ln rho + 0.5 (grad ln rho)^2]`
    Gradient,
    /// `-2 (kT/m) a^2 lap sqrt(rho) / sqrt(rho)`
    Sqrt,
}

pub fn bohm_potential<T: Real>(rho: &Field<T>, p: &PhysParams<T>, form: BohmForm) -> Result<Field<T>> {
    bohm_potential_log(&log_density(rho)?, p, form)
}

pub fn bohm_potential_log<T: Real>(lambda: &Field<T>, p: &PhysParams<T>, form: BohmForm) -> Result<Field<T>> {
    let coef = p.quantum_coefficient();
    let grid = lambda.grid();
    let out = match form {
        BohmForm::Gradient => {
            let d1 = grid.derivative_of(lambda.samples(), 1)?;
            let d2 = grid.derivative_of(lambda.samples(), 2)?;
            d1.iter()
                .zip(&d2)
                .map(|(&g, &l)| -coef * (l + T::lit(0.5) * g * g))
                .collect()
        }
        BohmForm::Sqrt => {
            let amp: Vec<T> = lambda.samples().iter().map(|&l| (l / T::lit(2.0)).exp()).collect();
            let lap = grid.derivative_of(&amp, 2)?;
            lap.iter()
                .zip(&amp)
                .map(|(&d, &r)| -T::lit(2.0) * coef * d / r)
                .collect()
        }
    };
    Ok(Field::from_vec_unchecked(grid, out))
}

/// `max |gradient form - sqrt form| / max |sqrt form|`, zero when the potential vanishes.
pub fn bohm_identity_residual<T: Real>(rho: &Field<T>, p: &PhysParams<T>) -> Result<T> {
    let lambda = log_density(rho)?;
    let g = bohm_potential_log(&lambda, p, BohmForm::Gradient)?;
    let s = bohm_potential_log(&lambda, p, BohmForm::Sqrt)?;
    let scale = s.max_abs();
    let k1 = T::TAU() / rho.grid().length();
    let negligible = T::lit(1e-8) * p.quantum_coefficient().abs() * k1 * k1;
    if !(scale > negligible) {
        return Ok(T::zero());
    }
    Ok(g.max_abs_diff(&s)? / scale)
}

/// Partial sum `n = 1..=order` of the generalized quantum potential
/// `(kT/m) sum (-1)^n a^{2n} c_{2n}/(2n)! (lap^n ln rho + lap^n rho / rho)`.
pub fn higher_order_uq<T: Real>(
    rho: &Field<T>,
    table: &MomentTable<T>,
    a2: T,
    order: usize,
    p: &PhysParams<T>,
) -> Result<Field<T>> {
    higher_order_uq_log(&log_density(rho)?, table, a2, order, p)
}

pub fn higher_order_uq_log<T: Real>(
    lambda: &Field<T>,
    table: &MomentTable<T>,
    a2: T,
    order: usize,
    p: &PhysParams<T>,
) -> Result<Field<T>> {
    if order == 0 {
        return Err(Error::InvalidParameter("quantum order must be >= 1".into()));
    }
    let grid = lambda.grid();
    let rho: Vec<T> = lambda.samples().iter().map(|l| l.exp()).collect();
    let ktm = p.kt_over_m();
    let mut acc = vec![T::zero(); grid.n()];
    for n in 1..=order {
        let c = table.coefficient(n)?;
        let sign = if n % 2 == 0 { T::one() } else { -T::one() };
        let weight = ktm * sign * a2.powi(n as i32) * c / factorial::<T>(2 * n);
        let dl = grid.derivative_of(lambda.samples(), 2 * n as u32)?;
        let dr = grid.derivative_of(&rho, 2 * n as u32)?;
        for j in 0..grid.n() {
            acc[j] = acc[j] + weight * (dl[j] + dr[j] / rho[j]);
        }
    }
    Ok(Field::from_vec_unchecked(grid, acc))
}

/// Quantum energy `integral 0.5 (kT/m) a^2 rho^{-1} (grad rho)^2 dx`, i.e. `-integral L_Q dx`.
pub(crate) fn quantum_energy_functional<T: Real>(rho: &[T], grid: &Grid<T>, coef: T) -> Result<T> {
    let d = grid.derivative_of(rho, 1)?;
    let density: Vec<T> = d.iter().zip(rho).map(|(&g, &r)| T::lit(0.5) * coef * g * g / r).collect();
    Ok(integrate(&Field::from_vec_unchecked(grid, density)))
}

/// Brute-force functional derivative of the quantum energy `-integral L_Q dx` with respect to
/// `rho`, by symmetric relative bumps of each node. The result is the quantum potential the
/// Euler-Lagrange relation for `rho` produces; it must agree with [`bohm_potential`].
pub fn euler_lagrange_oracle<T: Real>(rho: &Field<T>, a2: T, p: &PhysParams<T>, delta: T) -> Result<Field<T>> {
    if !(delta >= T::lit(1e-8) && delta <= T::lit(1e-4)) {
        return Err(Error::InvalidParameter(format!("delta = {delta} outside [1e-8, 1e-4]")));
    }
    log_density(rho)?;
    let grid = rho.grid();
    let coef = p.kt_over_m() * a2;
    let mut work = rho.samples().to_vec();
    let mut out = Vec::with_capacity(grid.n());
    for j in 0..grid.n() {
        let base = work[j];
        let h = delta * base;
        work[j] = base + h;
        let plus = quantum_energy_functional(&work, grid, coef)?;
        work[j] = base - h;
        let minus = quantum_energy_functional(&work, grid, coef)?;
        work[j] = base;
        out.push((plus - minus) / (T::lit(2.0) * h * grid.dx()));
    }
    Ok(Field::from_vec_unchecked(grid, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{make_kernel, moments, KernelFamily};
    use std::f64::consts::TAU;

    fn params(kt: f64, mode: A2Mode<f64>) -> PhysParams<f64> {
        PhysParams::new(1.0, 1.0, kt, mode, 1.0).unwrap()
    }

    /// Periodic Gaussian: `exp(-kappa (1 - cos(k0 (x - x0))))`, Gaussian of std `sigma` near `x0`.
    fn periodic_gaussian(g: &Grid<f64>, x0: f64, sigma: f64) -> Field<f64> {
        let k0 = TAU / g.length();
        let kappa = 1.0 / (k0 * k0 * sigma * sigma);
        Field::from_fn(g, |x| (-kappa * (1.0 - (k0 * (x - x0)).cos())).exp()).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(PhysParams::new(1.0, 1.0, 0.0, A2Mode::DeBroglie, 1.0).is_err());
        assert!(PhysParams::new(0.0, 1.0, 1.0, A2Mode::DeBroglie, 1.0).is_err());
        assert!(PhysParams::new(1.0, 1.0, 0.0, A2Mode::Explicit(0.1), 1.0).is_ok());
        let p = params(2.0, A2Mode::DeBroglie);
        assert!((p.a2() - 1.0 / 8.0).abs() < 1e-15);
        assert!((p.quantum_coefficient() - 0.25).abs() < 1e-15);
        let e = params(2.0, A2Mode::Explicit(0.125));
        assert!((e.hbar_eff().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn internal_energy_examples() {
        let g = Grid::<f64>::new(16, 1.0).unwrap();
        let p = params(1.0, A2Mode::Explicit(0.0));
        assert!(internal_energy(&Field::constant(&g, 1.0), &p).unwrap().max_abs() == 0.0);
        let u = internal_energy(&Field::constant(&g, std::f64::consts::E), &p).unwrap();
        assert!(u.samples().iter().all(|v| (v - 1.0).abs() < 1e-15));
        let rho = Field::from_fn(&g, |x| (-(TAU * x).cos()).exp()).unwrap();
        let u = internal_energy(&rho, &p).unwrap();
        for (j, v) in u.samples().iter().enumerate() {
            assert!((v + (TAU * g.x(j)).cos()).abs() < 1e-15);
        }
        assert!(matches!(
            internal_energy(&Field::constant(&g, 0.0), &p),
            Err(Error::NonPositiveDensity { .. })
        ));
    }

    #[test]
    fn enthalpy_and_pressure() {
        let g = Grid::<f64>::new(16, 1.0).unwrap();
        let p = params(1.0, A2Mode::Explicit(0.0));
        let h = enthalpy(&Field::constant(&g, 1.0), &p).unwrap();
        assert!(h.samples().iter().all(|&v| v == 1.0));
        let h = enthalpy(&Field::constant(&g, std::f64::consts::E.powi(2)), &p).unwrap();
        assert!(h.samples().iter().all(|v| (v - 3.0).abs() < 1e-15));

        let p = params(0.7, A2Mode::Explicit(0.0));
        let rho = Field::from_fn(&g, |x| 1.0 + 0.4 * (TAU * x).sin()).unwrap();
        let h = enthalpy(&rho, &p).unwrap();
        let u = internal_energy(&rho, &p).unwrap();
        let pr = pressure(&rho, &p).unwrap();
        for j in 0..16 {
            let lhs = h.samples()[j] - u.samples()[j];
            assert!((lhs - pr.samples()[j] / rho.samples()[j]).abs() < 1e-14);
        }
        let doubled = pressure(&rho.map(|r| 2.0 * r), &p).unwrap();
        for j in 0..16 {
            assert!((doubled.samples()[j] - 2.0 * pr.samples()[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn pressure_matches_thermodynamic_derivative() {
        // p = rho^2 dU/drho with U(rho) = (kT/m) ln rho, by central differences in rho.
        let p = params(1.3, A2Mode::Explicit(0.0));
        let g = Grid::<f64>::new(8, 1.0).unwrap();
        for &r in &[0.3, 1.0, 4.5] {
            let u = |rho: f64| internal_energy(&Field::constant(&g, rho), &p).unwrap().samples()[0];
            let h = 1e-5 * r;
            let fd = r * r * (u(r + h) - u(r - h)) / (2.0 * h);
            let exact = pressure(&Field::constant(&g, r), &p).unwrap().samples()[0];
            assert!((fd - exact).abs() / exact < 1e-6);
        }
    }

    #[test]
    fn bohm_of_constant_is_zero() {
        let g = Grid::<f64>::new(32, 2.0).unwrap();
        let p = params(1.0, A2Mode::DeBroglie);
        for form in [BohmForm::Gradient, BohmForm::Sqrt] {
            assert!(bohm_potential(&Field::constant(&g, 3.0), &p, form).unwrap().max_abs() < 1e-12);
        }
        assert_eq!(bohm_identity_residual(&Field::constant(&g, 3.0), &p).unwrap(), 0.0);
    }

    #[test]
    fn bohm_gaussian_centre_value() {
        // Near its centre the periodic Gaussian is exp(-x^2 / (2 s^2)): U_Q(0) = coef / s^2.
        // Exactly, lap ln rho = -kappa k0^2 cos, so U_Q(x0) = coef * kappa * k0^2 = coef / s^2.
        let g = Grid::<f64>::new(128, 12.0).unwrap();
        let p = params(0.5, A2Mode::DeBroglie);
        let s = 0.9;
        let rho = periodic_gaussian(&g, 6.0, s);
        let coef = p.quantum_coefficient();
        for form in [BohmForm::Gradient, BohmForm::Sqrt] {
            let uq = bohm_potential(&rho, &p, form).unwrap();
            assert!((uq.samples()[64] - coef / (s * s)).abs() < 1e-9, "{form:?}");
        }
        assert!(bohm_identity_residual(&rho, &p).unwrap() < 1e-8);
    }

    #[test]
    fn bohm_linearisation() {
        let l = 5.0;
        let g = Grid::<f64>::new(64, l).unwrap();
        let p = params(1.0, A2Mode::Explicit(0.3));
        let k = 2.0 * TAU / l;
        let eps = 1e-6;
        let rho = Field::from_fn(&g, |x| 1.0 + eps * (k * x).cos()).unwrap();
        let uq = bohm_potential(&rho, &p, BohmForm::Gradient).unwrap();
        for (j, v) in uq.samples().iter().enumerate() {
            let lin = p.quantum_coefficient() * k * k * eps * (k * g.x(j)).cos();
            assert!((v - lin).abs() < 1e-10, "{v} {lin}");
        }
    }

    #[test]
    fn de_broglie_mode_is_independent_of_kt() {
        let g = Grid::<f64>::new(64, 6.0).unwrap();
        let rho = periodic_gaussian(&g, 3.0, 0.7);
        let a = bohm_potential(&rho, &params(0.3, A2Mode::DeBroglie), BohmForm::Sqrt).unwrap();
        let b = bohm_potential(&rho, &params(7.0, A2Mode::DeBroglie), BohmForm::Sqrt).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() <= 1e-12 * a.max_abs());
    }

    #[test]
    fn higher_order_first_term_is_bohm() {
        let g = Grid::<f64>::new(64, 8.0).unwrap();
        let p = params(1.0, A2Mode::Explicit(0.2));
        let kern = make_kernel(&KernelFamily::DifferenceOfGaussians { width: 0.3 }, &g).unwrap();
        let table = moments(&kern, 2).unwrap();
        let rho = Field::from_fn(&g, |x| 1.0 + 0.3 * (TAU * x / 8.0).cos() + 0.1 * (2.0 * TAU * x / 8.0).sin()).unwrap();
        let hq = higher_order_uq(&rho, &table, 0.2, 1, &p).unwrap();
        let bohm = bohm_potential(&rho, &p, BohmForm::Gradient).unwrap();
        assert!(hq.max_abs_diff(&bohm).unwrap() < 1e-12 * bohm.max_abs().max(1.0));
        let flat = higher_order_uq(&Field::constant(&g, 2.0), &table, 0.2, 2, &p).unwrap();
        assert!(flat.max_abs() < 1e-12);
        assert!(matches!(
            higher_order_uq(&rho, &table, 0.2, 3, &p),
            Err(Error::InsufficientMoments { .. })
        ));
    }

    #[test]
    fn higher_order_second_term_linearisation() {
        let l = 8.0;
        let g = Grid::<f64>::new(16, l).unwrap();
        let p = params(1.0, A2Mode::Explicit(0.05));
        let kern = make_kernel(&KernelFamily::DifferenceOfGaussians { width: 0.2 }, &g).unwrap();
        let table = moments(&kern, 2).unwrap();
        let a2 = 0.05;
        let k = TAU / l;
        let eps = 1e-4;
        let rho = Field::from_fn(&g, |x| 1.0 + eps * (k * x).cos()).unwrap();
        let n1 = higher_order_uq(&rho, &table, a2, 1, &p).unwrap();
        let n2 = higher_order_uq(&rho, &table, a2, 2, &p).unwrap();
        let c4 = table.coefficient(2).unwrap();
        for j in 0..16 {
            let term = n2.samples()[j] - n1.samples()[j];
            let lin = a2 * a2 * c4 / 24.0 * 2.0 * k.powi(4) * eps * (k * g.x(j)).cos();
            assert!((term - lin).abs() < 1e-3 * lin.abs().max(a2 * a2 * c4.abs() * k.powi(4) * eps));
        }
    }

    #[test]
    fn euler_lagrange_oracle_matches_bohm() {
        let g = Grid::<f64>::new(64, 10.0).unwrap();
        let a2 = 0.15;
        let p = params(1.0, A2Mode::Explicit(a2));
        let rho = periodic_gaussian(&g, 5.0, 1.2);
        let el = euler_lagrange_oracle(&rho, a2, &p, 1e-6).unwrap();
        let bohm = bohm_potential(&rho, &p, BohmForm::Gradient).unwrap();
        let rel = el.max_abs_diff(&bohm).unwrap() / bohm.max_abs();
        assert!(rel < 1e-4, "rel {rel:e}");

        let doubled = euler_lagrange_oracle(&rho, 2.0 * a2, &p, 1e-6).unwrap();
        let twice = el.map(|v| 2.0 * v);
        assert!(doubled.max_abs_diff(&twice).unwrap() < 1e-10 * twice.max_abs());

        let flat = euler_lagrange_oracle(&Field::constant(&g, 1.5), a2, &p, 1e-6).unwrap();
        assert!(flat.max_abs() < 1e-8);
        assert!(euler_lagrange_oracle(&rho, a2, &p, 1e-2).is_err());
    }

    #[test]
    fn external_potentials() {
        let g = Grid::<f64>::new(16, 4.0).unwrap();
        let h = ExternalPotential::Harmonic { omega: 2.0 }.evaluate(&g).unwrap();
        assert_eq!(h.samples()[8], 0.0);
        assert!((h.samples()[0] - 8.0).abs() < 1e-14);
        let c = ExternalPotential::Cosine { v0: 1.5 }.evaluate(&g).unwrap();
        assert!((c.samples()[0] - 1.5).abs() < 1e-15);
        let t = Table::new(vec![(0.0, 1.0), (2.0, 3.0), (4.0, 1.0)]).unwrap();
        let v = ExternalPotential::Tabulated(t).evaluate(&g).unwrap();
        assert!((v.samples()[4] - 2.0).abs() < 1e-15);
        let bad = Table::new(vec![(0.0, 1.0), (4.0, 2.0)]).unwrap();
        assert!(ExternalPotential::Tabulated(bad).evaluate(&g).is_err());
    }
}
