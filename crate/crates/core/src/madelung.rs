//! Hydrodynamic (Madelung) evolution in `(lambda = ln rho, phi)` variables.
//!
//! With `v = -grad phi` the continuity equation becomes
//! `d lambda/dt = grad phi . grad lambda + lap phi`, and the Bernoulli / Hamilton-Jacobi
//! equation reads `d phi/dt = 0.5 (grad phi)^2 + H_th + U_Q + V_e`, each right-hand term
//! switchable through [`TermFlags`].

use crate::error::{Error, Result};
use crate::grid::{integrate, Field, Grid};
use crate::kernel::MomentTable;
use crate::potentials::{higher_order_uq_log, ExternalPotential, PhysParams};
use crate::scalar::{factorial, ordered_sum, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct State<T: Real> {
    pub t: T,
    pub lambda: Field<T>,
    pub phi: Field<T>,
}

impl<T: Real> State<T> {
    pub fn new(t: T, lambda: Field<T>, phi: Field<T>) -> Result<Self> {
        lambda.same_grid(&phi)?;
        lambda.check_finite()?;
        phi.check_finite()?;
        if !t.is_finite() {
            return Err(Error::InvalidParameter("state time must be finite".into()));
        }
        Ok(State { t, lambda, phi })
    }

    pub fn from_density(t: T, rho: &Field<T>, phi: Field<T>) -> Result<Self> {
        Self::new(t, crate::potentials::log_density(rho)?, phi)
    }

    pub fn grid(&self) -> &Grid<T> {
        self.lambda.grid()
    }

    pub fn density(&self) -> Field<T> {
        self.lambda.map(|l| l.exp())
    }
}

/// `v = -grad phi`.
pub fn velocity<T: Real>(s: &State<T>) -> Result<Field<T>> {
    let d = s.grid().derivative_of(s.phi.samples(), 1)?;
    Ok(Field::from_vec_unchecked(s.grid(), d.into_iter().map(|v| -v).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TermFlags {
    pub thermo: bool,
    pub quantum: bool,
    pub quantum_order: usize,
    pub external: bool,
}

impl TermFlags {
    pub fn classical() -> Self {
        TermFlags { thermo: true, quantum: false, quantum_order: 1, external: true }
    }

    pub fn quantum() -> Self {
        TermFlags { thermo: true, quantum: true, quantum_order: 1, external: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.quantum && self.quantum_order == 0 {
            return Err(Error::InvalidParameter("quantum_order must be >= 1 when quantum is on".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub dt: T,
    pub t_end: T,
    pub snapshot_stride: usize,
    pub dealias: bool,
    /// Relative to the mean density.
    pub density_floor: T,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(dt: T, t_end: T) -> Self {
        SolverConfig { dt, t_end, snapshot_stride: 1, dealias: true, density_floor: T::lit(1e-12) }
    }

    /// Number of steps and the step actually taken (`<= dt`) so that `t_end` is hit exactly.
    pub fn schedule(&self) -> (usize, T) {
        if self.t_end == T::zero() {
            return (0, self.dt);
        }
        let ratio = (self.t_end / self.dt - T::lit(1e-9)).ceil();
        let steps = ratio.to_usize().unwrap_or(1).max(1);
        (steps, self.t_end / T::from_count(steps))
    }
}

/// Everything that defines the right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct Model<T: Real> {
    pub params: PhysParams<T>,
    pub flags: TermFlags,
    pub external: ExternalPotential<T>,
    /// Needed only for `quantum_order >= 2`.
    pub moments: Option<MomentTable<T>>,
}

/// Per-snapshot diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics<T> {
    pub t: T,
    pub mass: T,
    pub energy: T,
    pub momentum: T,
    pub bernoulli_residual: T,
    /// Classical mode only.
    pub lagrangian_minus_pressure: Option<T>,
    pub min_density: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T: Real> {
    pub snapshots: Vec<State<T>>,
    pub diagnostics: Vec<Diagnostics<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn times(&self) -> Vec<T> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &State<T> {
        self.snapshots.last().expect("trajectory is never empty")
    }
}

/// Result of [`Solver::run`]: the (possibly partial) trajectory and how the run ended.
#[derive(Debug)]
pub struct RunOutcome<T: Real> {
    pub trajectory: Trajectory<T>,
    pub status: Result<()>,
}

/// Spectral derivative bundle for one state.
struct Derivatives<T> {
    dl: Vec<T>,
    d2l: Vec<T>,
    dp: Vec<T>,
    d2p: Vec<T>,
}

pub struct Solver<T: Real> {
    grid: Grid<T>,
    model: Model<T>,
    config: SolverConfig<T>,
    vext: Field<T>,
}

impl<T: Real> Solver<T> {
    pub fn new(grid: &Grid<T>, model: Model<T>, config: SolverConfig<T>) -> Result<Self> {
        model.params.validate()?;
        model.flags.validate()?;
        if !(config.dt > T::zero()) || !config.dt.is_finite() {
            return Err(Error::InvalidParameter("dt must be > 0".into()));
        }
        if !(config.t_end >= T::zero()) || !config.t_end.is_finite() {
            return Err(Error::InvalidParameter("t_end must be >= 0".into()));
        }
        if config.snapshot_stride == 0 {
            return Err(Error::InvalidParameter("snapshot_stride must be >= 1".into()));
        }
        if model.flags.quantum {
            let hbar_eff = model.params.hbar_eff()?;
            let bound = T::lit(0.5) * grid.dx() * grid.dx() * model.params.m / hbar_eff;
            if config.dt > bound {
                return Err(Error::InvalidParameter(format!(
                    "dt = {} exceeds the dispersive stability bound 0.5 dx^2 m / hbar_eff = {}",
                    config.dt, bound
                )));
            }
            if model.flags.quantum_order >= 2 {
                match &model.moments {
                    Some(t) if t.max_n() >= model.flags.quantum_order => {}
                    _ => {
                        return Err(Error::InsufficientMoments {
                            requested: 2 * model.flags.quantum_order,
                            available: model.moments.as_ref().map_or(0, |t| 2 * t.max_n()),
                        })
                    }
                }
            }
        }
        let vext = model.external.evaluate(grid)?;
        Ok(Solver { grid: grid.clone(), model, config, vext })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn model(&self) -> &Model<T> {
        &self.model
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.config
    }

    pub fn external_field(&self) -> &Field<T> {
        &self.vext
    }

    fn derivatives(&self, lambda: &[T], phi: &[T]) -> Result<Derivatives<T>> {
        let g = &self.grid;
        Ok(Derivatives {
            dl: g.derivative_of(lambda, 1)?,
            d2l: g.derivative_of(lambda, 2)?,
            dp: g.derivative_of(phi, 1)?,
            d2p: g.derivative_of(phi, 2)?,
        })
    }

    /// Pointwise product, dealiased by the 2/3 rule when enabled.
    fn product(&self, a: &[T], b: &[T]) -> Vec<T> {
        if !self.config.dealias {
            return a.iter().zip(b).map(|(&x, &y)| x * y).collect();
        }
        let g = &self.grid;
        let (fa, fb) = (g.dealias(a), g.dealias(b));
        let prod: Vec<T> = fa.iter().zip(&fb).map(|(&x, &y)| x * y).collect();
        g.dealias(&prod)
    }

    fn check_vacuum(&self, t: T, lambda: &[T]) -> Result<()> {
        let mean = ordered_sum(lambda.iter().map(|l| l.exp())) / T::from_count(lambda.len());
        let floor = self.config.density_floor * mean;
        let (j, lmin) = lambda
            .iter()
            .enumerate()
            .fold((0, T::infinity()), |(bj, bv), (j, &v)| if v < bv { (j, v) } else { (bj, bv) });
        let rho_min = lmin.exp();
        if !(rho_min >= floor) {
            return Err(Error::Vacuum {
                t: t.as_f64(),
                x: self.grid.x(j).as_f64(),
                density: rho_min.as_f64(),
                floor: floor.as_f64(),
            });
        }
        Ok(())
    }

    /// Quantum potential for the configured order.
    fn quantum_potential(&self, lambda: &[T], d: &Derivatives<T>) -> Result<Vec<T>> {
        let p = &self.model.params;
        if self.model.flags.quantum_order == 1 {
            let coef = p.quantum_coefficient();
            let sq = self.product(&d.dl, &d.dl);
            return Ok(d.d2l.iter().zip(&sq).map(|(&l2, &g2)| -coef * (l2 + T::lit(0.5) * g2)).collect());
        }
        let table = self.model.moments.as_ref().expect("checked at construction");
        let lf = Field::from_vec_unchecked(&self.grid, lambda.to_vec());
        Ok(higher_order_uq_log(&lf, table, p.a2(), self.model.flags.quantum_order, p)?.into_samples())
    }

    fn rates(&self, t: T, lambda: &[T], phi: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        self.check_vacuum(t, lambda)?;
        let d = self.derivatives(lambda, phi)?;
        let flags = &self.model.flags;
        let adv = self.product(&d.dp, &d.dl);
        let dlambda: Vec<T> = adv.iter().zip(&d.d2p).map(|(&a, &b)| a + b).collect();

        let half = T::lit(0.5);
        let kin = self.product(&d.dp, &d.dp);
        let mut dphi: Vec<T> = kin.iter().map(|&k| half * k).collect();
        if flags.thermo {
            let ktm = self.model.params.kt_over_m();
            for (r, &l) in dphi.iter_mut().zip(lambda) {
                *r = *r + ktm * (l + T::one());
            }
        }
        if flags.quantum {
            let uq = self.quantum_potential(lambda, &d)?;
            for (r, &u) in dphi.iter_mut().zip(&uq) {
                *r = *r + u;
            }
        }
        if flags.external {
            for (r, &v) in dphi.iter_mut().zip(self.vext.samples()) {
                *r = *r + v;
            }
        }
        Ok((dlambda, dphi))
    }

    /// The configured quantum potential of `s`, or zeros when the quantum term is off.
    pub fn quantum_field(&self, s: &State<T>) -> Result<Field<T>> {
        if !self.model.flags.quantum {
            return Ok(Field::zeros(&self.grid));
        }
        let d = self.derivatives(s.lambda.samples(), s.phi.samples())?;
        Ok(Field::from_vec_unchecked(&self.grid, self.quantum_potential(s.lambda.samples(), &d)?))
    }

    /// `(d lambda/dt, d phi/dt)`.
    pub fn rhs(&self, s: &State<T>) -> Result<(Field<T>, Field<T>)> {
        let (dl, dp) = self.rates(s.t, s.lambda.samples(), s.phi.samples())?;
        Ok((Field::from_vec_unchecked(&self.grid, dl), Field::from_vec_unchecked(&self.grid, dp)))
    }

    /// One classical fourth-order Runge-Kutta step of size `dt`.
    pub fn step_by(&self, s: &State<T>, dt: T) -> Result<State<T>> {
        let (l0, p0) = (s.lambda.samples(), s.phi.samples());
        let half = dt / T::lit(2.0);
        let axpy = |x: &[T], h: T, k: &[T]| -> Vec<T> { x.iter().zip(k).map(|(&a, &b)| a + h * b).collect() };

        let (k1l, k1p) = self.rates(s.t, l0, p0)?;
        let (k2l, k2p) = self.rates(s.t + half, &axpy(l0, half, &k1l), &axpy(p0, half, &k1p))?;
        let (k3l, k3p) = self.rates(s.t + half, &axpy(l0, half, &k2l), &axpy(p0, half, &k2p))?;
        let (k4l, k4p) = self.rates(s.t + dt, &axpy(l0, dt, &k3l), &axpy(p0, dt, &k3p))?;

        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        let combine = |x: &[T], a: &[T], b: &[T], c: &[T], d: &[T]| -> Vec<T> {
            (0..x.len()).map(|j| x[j] + sixth * (a[j] + two * b[j] + two * c[j] + d[j])).collect()
        };
        let lambda = combine(l0, &k1l, &k2l, &k3l, &k4l);
        let phi = combine(p0, &k1p, &k2p, &k3p, &k4p);
        let t = s.t + dt;
        for (name, values) in [("density (lambda)", &lambda), ("velocity potential (phi)", &phi)] {
            if let Some(j) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::Blowup {
                    t: t.as_f64(),
                    quantity: format!("{name} at x = {}", self.grid.x(j)),
                });
            }
        }
        Ok(State {
            t,
            lambda: Field::from_vec_unchecked(&self.grid, lambda),
            phi: Field::from_vec_unchecked(&self.grid, phi),
        })
    }

    pub fn step(&self, s: &State<T>) -> Result<State<T>> {
        self.step_by(s, self.config.dt)
    }

    /// Integrates to `t_end`, keeping every `snapshot_stride`-th state and the final one.
    pub fn run(&self, initial: &State<T>) -> RunOutcome<T> {
        let mut trajectory = Trajectory { snapshots: Vec::new(), diagnostics: Vec::new() };
        if let Err(e) = initial.lambda.same_grid(&self.vext) {
            return RunOutcome { trajectory, status: Err(e) };
        }
        match self.diagnostics(initial) {
            Ok(d) => {
                trajectory.snapshots.push(initial.clone());
                trajectory.diagnostics.push(d);
            }
            Err(e) => return RunOutcome { trajectory, status: Err(e) },
        }
        let (steps, dt) = self.config.schedule();
        let t0 = initial.t;
        let mut state = initial.clone();
        for k in 1..=steps {
            let next = match self.step_by(&state, dt) {
                Ok(mut s) => {
                    s.t = t0 + T::from_count(k) * dt;
                    s
                }
                Err(e) => return RunOutcome { trajectory, status: Err(e) },
            };
            state = next;
            if k % self.config.snapshot_stride == 0 || k == steps {
                match self.diagnostics(&state) {
                    Ok(d) => {
                        trajectory.snapshots.push(state.clone());
                        trajectory.diagnostics.push(d);
                    }
                    Err(e) => return RunOutcome { trajectory, status: Err(e) },
                }
            }
        }
        RunOutcome { trajectory, status: Ok(()) }
    }

    /// Pointwise quantum energy density, whose density-derivative is the configured `U_Q`.
    /// The `n = 1` term uses the sign-definite form `0.5 (kT/m) a^2 rho (grad ln rho)^2`.
    fn quantum_energy_density(&self, rho: &[T], lambda: &[T], dl: &[T]) -> Result<Vec<T>> {
        let p = &self.model.params;
        let half = T::lit(0.5);
        let coef = p.quantum_coefficient();
        let mut e: Vec<T> = rho.iter().zip(dl).map(|(&r, &g)| half * coef * r * g * g).collect();
        if self.model.flags.quantum_order >= 2 {
            let table = self.model.moments.as_ref().expect("checked at construction");
            let a2 = p.a2();
            for n in 2..=self.model.flags.quantum_order {
                let sign = if n % 2 == 0 { T::one() } else { -T::one() };
                let w = p.kt_over_m() * sign * a2.powi(n as i32) * table.coefficient(n)? / factorial::<T>(2 * n);
                let d = self.grid.derivative_of(lambda, 2 * n as u32)?;
                for j in 0..e.len() {
                    e[j] = e[j] + w * rho[j] * d[j];
                }
            }
        }
        Ok(e)
    }

    pub fn diagnostics(&self, s: &State<T>) -> Result<Diagnostics<T>> {
        let g = &self.grid;
        let flags = &self.model.flags;
        let p = &self.model.params;
        let lambda = s.lambda.samples();
        let rho: Vec<T> = lambda.iter().map(|l| l.exp()).collect();
        let d = self.derivatives(lambda, s.phi.samples())?;
        let half = T::lit(0.5);
        let ktm = p.kt_over_m();
        let v = &self.vext;
        let integral = |vals: Vec<T>| integrate(&Field::from_vec_unchecked(g, vals));

        let mass = integral(rho.clone());
        let momentum = integral(rho.iter().zip(&d.dp).map(|(&r, &gp)| -r * gp).collect());

        let mut energy_density: Vec<T> = rho.iter().zip(&d.dp).map(|(&r, &gp)| half * r * gp * gp).collect();
        if flags.thermo {
            for j in 0..rho.len() {
                energy_density[j] = energy_density[j] + rho[j] * ktm * lambda[j];
            }
        }
        if flags.external {
            for j in 0..rho.len() {
                energy_density[j] = energy_density[j] + rho[j] * v.samples()[j];
            }
        }
        if flags.quantum {
            let q = self.quantum_energy_density(&rho, lambda, &d.dl)?;
            for j in 0..rho.len() {
                energy_density[j] = energy_density[j] + q[j];
            }
        }
        let energy = integral(energy_density);

        // Bernoulli function 0.5 v^2 + U_th + p/rho + V_e (+ U_Q).
        let mut bern: Vec<T> = d.dp.iter().map(|&gp| half * gp * gp).collect();
        if flags.thermo {
            for j in 0..bern.len() {
                bern[j] = bern[j] + ktm * lambda[j] + ktm;
            }
        }
        if flags.external {
            for (b, &vj) in bern.iter_mut().zip(v.samples()) {
                *b = *b + vj;
            }
        }
        if flags.quantum {
            let uq = self.quantum_potential(lambda, &d)?;
            for j in 0..bern.len() {
                bern[j] = bern[j] + uq[j];
            }
        }
        let nb = T::from_count(bern.len());
        let mean = ordered_sum(bern.iter().copied()) / nb;
        let var = ordered_sum(bern.iter().map(|&b| (b - mean) * (b - mean))) / nb;
        let mean_mag = ordered_sum(bern.iter().map(|b| b.abs())) / nb;
        let bernoulli_residual = if var == T::zero() { T::zero() } else { var.sqrt() / mean_mag };

        let lagrangian_minus_pressure = if flags.quantum {
            None
        } else {
            let (_, phi_t) = self.rates(s.t, lambda, s.phi.samples())?;
            let mut worst = T::zero();
            let mut pmax = T::zero();
            for j in 0..rho.len() {
                let mut l = rho[j] * phi_t[j] - half * rho[j] * d.dp[j] * d.dp[j];
                if flags.thermo {
                    l = l - rho[j] * ktm * lambda[j];
                }
                if flags.external {
                    l = l - rho[j] * v.samples()[j];
                }
                let pr = ktm * rho[j];
                worst = worst.max((l - pr).abs());
                pmax = pmax.max(pr);
            }
            if pmax > T::zero() {
                Some(worst / pmax)
            } else {
                None
            }
        };

        Ok(Diagnostics {
            t: s.t,
            mass,
            energy,
            momentum,
            bernoulli_residual,
            lagrangian_minus_pressure,
            min_density: rho.iter().fold(T::infinity(), |m, &r| m.min(r)),
        })
    }

    /// Lagrangian density `rho phi_t - 0.5 rho (grad phi)^2 - rho (U_th + V_e) + L_Q` of one
    /// snapshot, given `phi_t`.
    fn lagrangian_density(&self, s: &State<T>, phi_t: &[T]) -> Result<Vec<T>> {
        let flags = &self.model.flags;
        let lambda = s.lambda.samples();
        let rho: Vec<T> = lambda.iter().map(|l| l.exp()).collect();
        let d = self.derivatives(lambda, s.phi.samples())?;
        let ktm = self.model.params.kt_over_m();
        let half = T::lit(0.5);
        let mut out: Vec<T> = (0..rho.len())
            .map(|j| rho[j] * phi_t[j] - half * rho[j] * d.dp[j] * d.dp[j])
            .collect();
        if flags.thermo {
            for j in 0..out.len() {
                out[j] = out[j] - rho[j] * ktm * lambda[j];
            }
        }
        if flags.external {
            for j in 0..out.len() {
                out[j] = out[j] - rho[j] * self.vext.samples()[j];
            }
        }
        if flags.quantum {
            let q = self.quantum_energy_density(&rho, lambda, &d.dl)?;
            for j in 0..out.len() {
                out[j] = out[j] - q[j];
            }
        }
        Ok(out)
    }

    /// Discrete action: exact-in-space, trapezoid-in-time, with `phi_t` from centred
    /// differences (second-order one-sided at the ends). Snapshots must be equally spaced.
    pub fn action(&self, traj: &Trajectory<T>) -> Result<T> {
        let snaps = &traj.snapshots;
        if snaps.len() < 3 {
            return Err(Error::TooFewSnapshots { needed: 3, have: snaps.len() });
        }
        let h = snaps[1].t - snaps[0].t;
        if !(h > T::zero()) {
            return Err(Error::TrajectoryMismatch("snapshot times must increase".into()));
        }
        for w in snaps.windows(2) {
            if ((w[1].t - w[0].t) - h).abs() > T::tol(1e-9) * h.max(T::one()) {
                return Err(Error::TrajectoryMismatch("snapshots are not equally spaced".into()));
            }
        }
        let last = snaps.len() - 1;
        let two_h = T::lit(2.0) * h;
        let phi = |i: usize| snaps[i].phi.samples();
        let mut per_snapshot = Vec::with_capacity(snaps.len());
        for (i, snap) in snaps.iter().enumerate() {
            let phi_t: Vec<T> = (0..self.grid.n())
                .map(|j| {
                    if i == 0 {
                        (-T::lit(3.0) * phi(0)[j] + T::lit(4.0) * phi(1)[j] - phi(2)[j]) / two_h
                    } else if i == last {
                        (T::lit(3.0) * phi(last)[j] - T::lit(4.0) * phi(last - 1)[j] + phi(last - 2)[j]) / two_h
                    } else {
                        (phi(i + 1)[j] - phi(i - 1)[j]) / two_h
                    }
                })
                .collect();
            let l = self.lagrangian_density(snap, &phi_t)?;
            per_snapshot.push(integrate(&Field::from_vec_unchecked(&self.grid, l)));
        }
        let half = T::lit(0.5);
        let interior = ordered_sum(per_snapshot[1..last].iter().copied());
        Ok(h * (half * per_snapshot[0] + interior + half * per_snapshot[last]))
    }

    /// `integral integral p dt dx` over the trajectory (trapezoid in time).
    pub fn pressure_integral(&self, traj: &Trajectory<T>) -> Result<T> {
        let snaps = &traj.snapshots;
        if snaps.len() < 2 {
            return Err(Error::TooFewSnapshots { needed: 2, have: snaps.len() });
        }
        let ktm = self.model.params.kt_over_m();
        let per: Vec<T> = snaps
            .iter()
            .map(|s| ktm * integrate(&s.density()))
            .collect();
        let mut total = T::zero();
        for i in 1..snaps.len() {
            total = total + (snaps[i].t - snaps[i - 1].t) * (per[i] + per[i - 1]) / T::lit(2.0);
        }
        Ok(total)
    }
}
