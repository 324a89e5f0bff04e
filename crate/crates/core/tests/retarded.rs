use qfluid::covariant::{retarded_energy, retarded_expansion, DensityHistory};
use qfluid::kernel::{make_kernel, moments, nonlocal_energy_log, Kernel, KernelFamily};
use qfluid::potentials::{A2Mode, PhysParams};
use qfluid::{derivative, Field, Grid};
use std::f64::consts::TAU;

const OMEGA: f64 = 0.7;

// Separable log-density g(x) + f(t): the lag contribution of the retarded sum is then
// exactly (kT/m) integral u(y) [f(t - |y|/c) - f(t)] dy.
fn lambda_at(g: &Grid<f64>, t: f64) -> Field<f64> {
    let k = TAU / g.length();
    Field::from_fn(g, |x| 0.2 * (k * x).cos() + 0.1 * (OMEGA * t).sin()).unwrap()
}

fn f_tt(t: f64) -> f64 {
    -0.1 * OMEGA * OMEGA * (OMEGA * t).sin()
}

fn history(grid: &Grid<f64>, c: f64) -> DensityHistory<f64> {
    let dt = 0.02;
    let count = ((grid.length() / (2.0 * c) / dt).ceil() as usize + 2).max(5);
    let mut h = DensityHistory::new(grid, dt, count).unwrap();
    for i in 0..count {
        let t = 1.0 + i as f64 * dt;
        h.push(t, lambda_at(grid, t)).unwrap();
    }
    h
}

/// (size of the lag contribution, error of the derived expansion, error of the box form).
fn lag_errors(u: &Kernel<f64>, c: f64) -> (f64, f64, f64) {
    let grid = u.grid().clone();
    let h = history(&grid, c);
    let p = PhysParams::new(1.0, 1.0, 0.5, A2Mode::DeBroglie, c).unwrap();
    let t = h.newest_time().unwrap();
    let a2 = moments(u, 1).unwrap().a2;
    let ktm = p.kt_over_m();
    let lam = lambda_at(&grid, t);

    let direct = retarded_energy(&h, u, &p).unwrap();
    let instantaneous = nonlocal_energy_log(&lam, u, &p).unwrap();
    let lag = direct.zip_map(&instantaneous, |a, b| a - b).unwrap();

    // Strip the spatial terms shared by both forms.
    let lap = derivative(&lam, 2).unwrap();
    let spatial = lam.zip_map(&lap, |l, d| ktm * (l - 0.5 * a2 * d)).unwrap();
    let derived = retarded_expansion(&h, u, &p).unwrap();
    let derived_lag = derived.zip_map(&spatial, |a, b| a - b).unwrap();
    let box_lag = Field::constant(&grid, ktm * 0.5 * a2 * f_tt(t) / (c * c));

    (lag.max_abs(), derived_lag.max_abs_diff(&lag).unwrap(), box_lag.max_abs_diff(&lag).unwrap())
}

#[test]
fn second_order_lag_has_the_sign_of_the_spatial_term() {
    // Difference of Gaussians: integral u |x| vanishes, so the a^2 lambda_tt / c^2 term leads.
    let grid = Grid::new(128, 10.0).unwrap();
    let u = make_kernel(&KernelFamily::DifferenceOfGaussians { width: 0.3 }, &grid).unwrap();
    for c in [5.0, 10.0] {
        let (size, derived, boxed) = lag_errors(&u, c);
        assert!(derived < 0.1 * size, "c = {c}: derived error {derived:e}, lag {size:e}");
        assert!(boxed > 1.5 * size, "c = {c}: box-form error {boxed:e}, lag {size:e}");
    }
}

#[test]
fn first_order_lag_follows_first_absolute_moment() {
    let grid = Grid::new(128, 10.0).unwrap();
    let u = make_kernel(&KernelFamily::Gaussian { width: 0.3 }, &grid).unwrap();
    for c in [5.0, 10.0] {
        let (size, derived, boxed) = lag_errors(&u, c);
        assert!(derived < 0.1 * size, "c = {c}: derived error {derived:e}, lag {size:e}");
        assert!(boxed > 0.5 * size, "c = {c}: box-form error {boxed:e}, lag {size:e}");
    }
}
