//! Split-step spectral reference solver for the (logarithmic) Schrödinger equation
//! `i hbar_eff psi_t = [-(hbar_eff^2/2m) lap + m V_e + kT (ln|psi|^2 + 1)] psi`,
//! and the map between wavefunctions and `(lambda, phi)` states.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{integrate, ComplexField, Field, Grid};
use crate::madelung::{State, Trajectory};
use crate::potentials::PhysParams;
use crate::scalar::{ordered_sum, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct WaveState<T: Real> {
    pub t: T,
    pub psi: ComplexField<T>,
}

impl<T: Real> WaveState<T> {
    pub fn new(t: T, psi: ComplexField<T>) -> Result<Self> {
        if !(psi.norm_squared() > T::zero()) {
            return Err(Error::InvalidParameter("wavefunction has zero norm".into()));
        }
        Ok(WaveState { t, psi })
    }

    pub fn density(&self) -> Field<T> {
        self.psi.modulus_squared()
    }

    pub fn norm(&self) -> T {
        self.psi.norm_squared()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig<T> {
    pub dt: T,
    pub t_end: T,
    pub snapshot_stride: usize,
    /// Include the `kT (ln|psi|^2 + 1)` term.
    pub nonlinearity: bool,
    pub strang: bool,
}

impl<T: Real> OracleConfig<T> {
    pub fn new(dt: T, t_end: T, nonlinearity: bool) -> Self {
        OracleConfig { dt, t_end, snapshot_stride: 1, nonlinearity, strang: true }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter("oracle dt must be > 0".into()));
        }
        if !(self.t_end >= T::zero()) {
            return Err(Error::InvalidParameter("oracle t_end must be >= 0".into()));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidParameter("snapshot_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// `psi = exp(lambda/2) exp(-i m phi / hbar_eff)`.
pub fn to_wavefunction<T: Real>(s: &State<T>, p: &PhysParams<T>) -> Result<WaveState<T>> {
    let hbar = p.hbar_eff()?;
    let scale = p.m / hbar;
    let half = T::lit(0.5);
    let psi = s
        .lambda
        .samples()
        .iter()
        .zip(s.phi.samples())
        .map(|(&l, &ph)| Complex::from_polar((half * l).exp(), -scale * ph))
        .collect();
    Ok(WaveState { t: s.t, psi: ComplexField::from_vec_unchecked(s.grid(), psi) })
}

/// Inverse of [`to_wavefunction`]; the phase is unwrapped along the grid and shifted
/// to zero mean.
pub fn from_wavefunction<T: Real>(w: &WaveState<T>, p: &PhysParams<T>) -> Result<State<T>> {
    let g = w.psi.grid();
    let psi = w.psi.samples();
    let amps: Vec<T> = psi.iter().map(|z| z.norm()).collect();
    let amax = amps.iter().fold(T::zero(), |m, &a| m.max(a));
    let threshold = T::lit(1e-6) * amax;
    if let Some(j) = amps.iter().position(|&a| !(a > threshold)) {
        return Err(Error::PhaseUndefined { x: g.x(j).as_f64(), amplitude: (amps[j] / amax).as_f64() });
    }
    let pi = T::PI();
    let two_pi = T::lit(2.0) * pi;
    let wrap = |d: T| {
        let mut d = d;
        while d > pi {
            d = d - two_pi;
        }
        while d <= -pi {
            d = d + two_pi;
        }
        d
    };
    let mut theta = Vec::with_capacity(psi.len());
    theta.push(psi[0].arg());
    for j in 1..psi.len() {
        let prev = theta[j - 1];
        theta.push(prev + wrap(psi[j].arg() - psi[j - 1].arg()));
    }
    let closing = theta[psi.len() - 1] + wrap(psi[0].arg() - psi[psi.len() - 1].arg()) - theta[0];
    let winding = (closing / two_pi).round();
    if winding != T::zero() {
        return Err(Error::Topology { winding: winding.to_i64().unwrap_or(i64::MAX) });
    }
    let hbar = p.hbar_eff()?;
    let scale = -hbar / p.m;
    let mean = ordered_sum(theta.iter().copied()) / T::from_count(theta.len());
    let phi: Vec<T> = theta.iter().map(|&th| scale * (th - mean)).collect();
    let lambda: Vec<T> = amps.iter().map(|&a| T::lit(2.0) * a.ln()).collect();
    State::new(w.t, Field::new(g, lambda)?, Field::new(g, phi)?)
}

/// Potential energy `m V_e + kT (ln|psi|^2 + 1)` acting on `psi`.
fn potential<T: Real>(psi: &[Complex<T>], vext: &Field<T>, p: &PhysParams<T>, nonlinear: bool) -> Vec<T> {
    let tiny = T::min_positive_value();
    psi.iter()
        .zip(vext.samples())
        .map(|(z, &v)| {
            let mut w = p.m * v;
            if nonlinear {
                w = w + p.kt * (z.norm_sqr().max(tiny).ln() + T::one());
            }
            w
        })
        .collect()
}

fn rotate<T: Real>(psi: &mut [Complex<T>], w: &[T], dt: T, hbar: T) -> Result<()> {
    let limit = T::lit(0.5);
    for (z, &wj) in psi.iter_mut().zip(w) {
        let angle = wj * dt / hbar;
        if !(angle.abs() < limit) {
            return Err(Error::InvalidParameter(format!(
                "oracle dt too large: potential phase {} rad per step (limit 0.5)",
                angle.abs()
            )));
        }
        *z = *z * Complex::from_polar(T::one(), -angle);
    }
    Ok(())
}

fn kinetic<T: Real>(g: &Grid<T>, psi: &[Complex<T>], dt: T, hbar: T, m: T) -> Vec<Complex<T>> {
    let mut spec = g.forward_complex(psi);
    let c = hbar * dt / (T::lit(2.0) * m);
    for (s, &k) in spec.iter_mut().zip(g.wavenumbers()) {
        *s = *s * Complex::from_polar(T::one(), -c * k * k);
    }
    g.inverse(spec)
}

/// One split step (Strang by default, Lie otherwise).
pub fn oracle_step<T: Real>(
    w: &WaveState<T>,
    cfg: &OracleConfig<T>,
    p: &PhysParams<T>,
    vext: &Field<T>,
) -> Result<WaveState<T>> {
    step_by(w, cfg.dt, cfg, p, vext)
}

fn step_by<T: Real>(
    w: &WaveState<T>,
    dt: T,
    cfg: &OracleConfig<T>,
    p: &PhysParams<T>,
    vext: &Field<T>,
) -> Result<WaveState<T>> {
    let g = w.psi.grid();
    w.psi.modulus_squared().same_grid(vext)?;
    let hbar = p.hbar_eff()?;
    let mut psi = w.psi.samples().to_vec();
    let first = if cfg.strang { dt / T::lit(2.0) } else { dt };
    let w0 = potential(&psi, vext, p, cfg.nonlinearity);
    rotate(&mut psi, &w0, first, hbar)?;
    let mut psi = kinetic(g, &psi, dt, hbar, p.m);
    if cfg.strang {
        let w1 = potential(&psi, vext, p, cfg.nonlinearity);
        rotate(&mut psi, &w1, first, hbar)?;
    }
    let t = w.t + dt;
    if let Some(j) = psi.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Blowup { t: t.as_f64(), quantity: format!("wavefunction at x = {}", g.x(j)) });
    }
    Ok(WaveState { t, psi: ComplexField::from_vec_unchecked(g, psi) })
}

/// Integrates to `t_end` with the same schedule and snapshot rule as the hydrodynamic solver.
pub fn oracle_run<T: Real>(
    initial: &WaveState<T>,
    cfg: &OracleConfig<T>,
    p: &PhysParams<T>,
    vext: &Field<T>,
) -> Result<Vec<WaveState<T>>> {
    cfg.validate()?;
    let (steps, dt) = crate::madelung::SolverConfig::new(cfg.dt, cfg.t_end).schedule();
    let mut out = vec![initial.clone()];
    let mut w = initial.clone();
    for k in 1..=steps {
        w = step_by(&w, dt, cfg, p, vext)?;
        w.t = initial.t + T::from_count(k) * dt;
        if k % cfg.snapshot_stride == 0 || k == steps {
            out.push(w.clone());
        }
    }
    Ok(out)
}

/// Imaginary-time relaxation to the lowest state at fixed norm `mass`.
#[allow(clippy::too_many_arguments)]
pub fn ground_state<T: Real>(
    grid: &Grid<T>,
    p: &PhysParams<T>,
    vext: &Field<T>,
    nonlinearity: bool,
    mass: T,
    dtau: T,
    tol: T,
    max_iter: usize,
) -> Result<WaveState<T>> {
    let hbar = p.hbar_eff()?;
    let normalize = |psi: &mut Vec<Complex<T>>| {
        let norm = ordered_sum(psi.iter().map(|z| z.norm_sqr())) * grid.dx();
        let s = (mass / norm).sqrt();
        for z in psi.iter_mut() {
            *z = *z * s;
        }
    };
    let mut psi: Vec<Complex<T>> = vec![Complex::new(T::one(), T::zero()); grid.n()];
    normalize(&mut psi);
    let half = dtau / T::lit(2.0);
    let c = hbar * dtau / (T::lit(2.0) * p.m);
    for _ in 0..max_iter {
        let prev = psi.clone();
        let decay = |psi: &mut Vec<Complex<T>>| {
            let w = potential(psi, vext, p, nonlinearity);
            for (z, &wj) in psi.iter_mut().zip(&w) {
                *z = *z * (-wj * half / hbar).exp();
            }
        };
        decay(&mut psi);
        let mut spec = grid.forward_complex(&psi);
        for (s, &k) in spec.iter_mut().zip(grid.wavenumbers()) {
            *s = *s * (-c * k * k).exp();
        }
        psi = grid.inverse(spec);
        decay(&mut psi);
        normalize(&mut psi);
        let change = psi.iter().zip(&prev).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()));
        if change < tol {
            break;
        }
    }
    WaveState::new(T::zero(), ComplexField::from_vec_unchecked(grid, psi))
}

/// Width of a packet that starts as a minimum-uncertainty Gaussian of width `sigma0`.
pub fn free_gaussian_width<T: Real>(sigma0: T, t: T, hbar_eff: T, m: T) -> T {
    let r = hbar_eff * t / (T::lit(2.0) * m * sigma0 * sigma0);
    sigma0 * (T::one() + r * r).sqrt()
}

/// Standard deviation of a density about its centroid, measured on the periodic domain
/// unwrapped around `center`.
pub fn density_width<T: Real>(rho: &Field<T>, center: T) -> T {
    let g = rho.grid();
    let l = g.length();
    let half = l / T::lit(2.0);
    let offsets: Vec<T> = (0..g.n())
        .map(|j| {
            let mut d = g.x(j) - center;
            while d >= half {
                d = d - l;
            }
            while d < -half {
                d = d + l;
            }
            d
        })
        .collect();
    let r = rho.samples();
    let mass = ordered_sum(r.iter().copied());
    let mean = ordered_sum(r.iter().zip(&offsets).map(|(&a, &d)| a * d)) / mass;
    let var = ordered_sum(r.iter().zip(&offsets).map(|(&a, &d)| a * (d - mean) * (d - mean))) / mass;
    var.sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotError<T> {
    pub t: T,
    pub density_l2: T,
    pub phase: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison<T> {
    pub snapshots: Vec<SnapshotError<T>>,
    pub max_density_l2: T,
    pub max_phase: T,
}

impl<T: Real> Comparison<T> {
    fn from_snapshots(snapshots: Vec<SnapshotError<T>>) -> Self {
        let max_density_l2 = snapshots.iter().fold(T::zero(), |m, s| m.max(s.density_l2));
        let max_phase = snapshots.iter().fold(T::zero(), |m, s| m.max(s.phase));
        Comparison { snapshots, max_density_l2, max_phase }
    }
}

fn relative_l2<T: Real>(a: &Field<T>, b: &Field<T>) -> Result<T> {
    let diff = a.zip_map(b, |x, y| (x - y) * (x - y))?;
    let norm = integrate(&b.map(|y| y * y));
    Ok((integrate(&diff) / norm).sqrt())
}

fn check_times<T: Real>(a: &[T], b: &[T]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::TrajectoryMismatch(format!("{} vs {} snapshots", a.len(), b.len())));
    }
    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        if (x - y).abs() > T::tol(1e-9) * x.abs().max(T::one()) {
            return Err(Error::TrajectoryMismatch(format!("snapshot {i}: t = {x} vs {y}")));
        }
    }
    Ok(())
}

/// Per-snapshot relative L2 density error and max phase error after removing the mean
/// offset (`b` is the reference).
pub fn compare<T: Real>(a: &Trajectory<T>, b: &Trajectory<T>) -> Result<Comparison<T>> {
    check_times(&a.times(), &b.times())?;
    let mut out = Vec::with_capacity(a.snapshots.len());
    for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
        if sa.grid() != sb.grid() {
            return Err(Error::GridMismatch);
        }
        let density_l2 = relative_l2(&sa.density(), &sb.density())?;
        let d = sa.phi.zip_map(&sb.phi, |x, y| x - y)?;
        let mean = d.mean();
        let phase = d.samples().iter().fold(T::zero(), |m, &v| m.max((v - mean).abs()));
        out.push(SnapshotError { t: sa.t, density_l2, phase });
    }
    Ok(Comparison::from_snapshots(out))
}

/// Compares a hydrodynamic trajectory with oracle wavefunctions. The phase error is in
/// `phi` units, after removing the best-fit global phase, and only where the reference
/// density exceeds `1e-6` of its maximum.
pub fn compare_with_oracle<T: Real>(
    a: &Trajectory<T>,
    oracle: &[WaveState<T>],
    p: &PhysParams<T>,
) -> Result<Comparison<T>> {
    let tb: Vec<T> = oracle.iter().map(|w| w.t).collect();
    check_times(&a.times(), &tb)?;
    let hbar = p.hbar_eff()?;
    let mut out = Vec::with_capacity(oracle.len());
    for (s, w) in a.snapshots.iter().zip(oracle) {
        if s.grid() != w.psi.grid() {
            return Err(Error::GridMismatch);
        }
        let rho_b = w.density();
        let density_l2 = relative_l2(&s.density(), &rho_b)?;
        let psi_a = to_wavefunction(s, p)?;
        let overlap: Vec<Complex<T>> =
            psi_a.psi.samples().iter().zip(w.psi.samples()).map(|(x, y)| x * y.conj()).collect();
        let total = overlap.iter().fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z);
        let rotation = Complex::from_polar(T::one(), -total.arg());
        let rmax = rho_b.max();
        let phase = overlap
            .iter()
            .zip(rho_b.samples())
            .filter(|(_, &r)| r > T::lit(1e-6) * rmax)
            .fold(T::zero(), |m, (z, _)| m.max((z * rotation).arg().abs()))
            * hbar
            / p.m;
        out.push(SnapshotError { t: s.t, density_l2, phase });
    }
    Ok(Comparison::from_snapshots(out))
}
