use qfluid::madelung::{Model, Solver, SolverConfig, State, TermFlags};
use qfluid::potentials::{A2Mode, ExternalPotential, PhysParams};
use qfluid::schrodinger::{compare_with_oracle, oracle_run, to_wavefunction, OracleConfig};
use qfluid::{Field, Grid};
use std::f64::consts::TAU;

fn periodic_gaussian(g: &Grid<f64>, x0: f64, sigma: f64) -> Field<f64> {
    let k0 = TAU / g.length();
    let kappa = 1.0 / (k0 * k0 * sigma * sigma);
    Field::from_fn(g, |x| -kappa * (1.0 - (k0 * (x - x0)).cos())).unwrap()
}

fn run_pair(kt: f64, g: &Grid<f64>, flags: TermFlags, ext: ExternalPotential<f64>, lambda: Field<f64>, dt: f64, t_end: f64) -> f64 {
    let params = PhysParams::new(1.0, 1.0, kt, A2Mode::DeBroglie, 1.0).unwrap();
    let model = Model { params, flags, external: ext, moments: None };
    let mut cfg = SolverConfig::new(dt, t_end);
    cfg.snapshot_stride = 100;
    let solver = Solver::new(g, model, cfg).unwrap();
    let s0 = State::new(0.0, lambda, Field::zeros(g)).unwrap();
    let out = solver.run(&s0);
    out.status.unwrap();
    let mut ocfg = OracleConfig::new(dt, t_end, flags.thermo);
    ocfg.snapshot_stride = 100;
    let w0 = to_wavefunction(&s0, &params).unwrap();
    let vext = if flags.external { solver.external_field().clone() } else { Field::zeros(g) };
    let traj = oracle_run(&w0, &ocfg, &params, &vext).unwrap();
    let c = compare_with_oracle(&out.trajectory, &traj, &params).unwrap();
    c.max_density_l2
}

#[test]
fn trap_agrees_with_log_oracle() {
    let g = Grid::new(256, 12.0).unwrap();
    let v0 = (12.0f64 / TAU).powi(2);
    let kt = 2.0;
    let lam = Field::from_fn(&g, |x| -v0 * (TAU * (x - 0.3) / 12.0).cos() / kt).unwrap();
    let e1 = run_pair(kt, &g, TermFlags::quantum(), ExternalPotential::Cosine { v0 }, lam.clone(), 1e-3, TAU);
    assert!(e1 < 1e-3);
}

#[test]
fn free_packet_agrees_with_linear_oracle() {
    let g = Grid::new(256, 20.0).unwrap();
    let mut flags = TermFlags::quantum();
    flags.thermo = false;
    flags.external = false;
    let lam = periodic_gaussian(&g, 10.0, 2.5);
    let e = run_pair(0.5, &g, flags, ExternalPotential::Zero, lam, 2e-3, 4.0);
    assert!(e < 1e-3);
}
