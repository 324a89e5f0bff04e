//! Run orchestration and on-disk outputs: CSV tables, a JSON manifest and optional
//! SVG line plots.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde_json::json;

use crate::error::{Error, Result};
use crate::madelung::{velocity, Diagnostics, Solver, State, Trajectory};
use crate::scenario::Scenario;
use crate::schrodinger::{compare_with_oracle, oracle_run, to_wavefunction, Comparison};

/// Seventeen significant digits: lossless for `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn io_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Columns `x, rho, phi, v, U_Q, V_e`.
pub fn write_snapshot(path: &Path, state: &State<f64>, solver: &Solver<f64>) -> Result<()> {
    let g = state.grid();
    let rho = state.density();
    let v = velocity(state)?;
    let uq = solver.quantum_field(state)?;
    let ve = solver.external_field();
    let mut w = csv_writer(path)?;
    w.write_record(["x", "rho", "phi", "v", "U_Q", "V_e"]).map_err(io_err)?;
    for j in 0..g.n() {
        w.write_record([
            fmt_f64(g.x(j)),
            fmt_f64(rho.samples()[j]),
            fmt_f64(state.phi.samples()[j]),
            fmt_f64(v.samples()[j]),
            fmt_f64(uq.samples()[j]),
            fmt_f64(ve.samples()[j]),
        ])
        .map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `t, mass, energy, momentum, bernoulli_residual, lagrangian_minus_pressure,
/// min_density`; the Lagrangian column is `NA` outside classical mode.
pub fn write_diagnostics(path: &Path, diags: &[Diagnostics<f64>]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "t",
        "mass",
        "energy",
        "momentum",
        "bernoulli_residual",
        "lagrangian_minus_pressure",
        "min_density",
    ])
    .map_err(io_err)?;
    for d in diags {
        w.write_record([
            fmt_f64(d.t),
            fmt_f64(d.mass),
            fmt_f64(d.energy),
            fmt_f64(d.momentum),
            fmt_f64(d.bernoulli_residual),
            d.lagrangian_minus_pressure.map_or_else(|| "NA".to_string(), fmt_f64),
            fmt_f64(d.min_density),
        ])
        .map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `t, l2_density_error, phase_error`.
pub fn write_comparison(path: &Path, cmp: &Comparison<f64>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "l2_density_error", "phase_error"]).map_err(io_err)?;
    for s in &cmp.snapshots {
        w.write_record([fmt_f64(s.t), fmt_f64(s.density_l2), fmt_f64(s.phase)]).map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Minimal standalone SVG: axes, tick labels at the extremes, one polyline per series.
pub fn svg_line_plot(title: &str, x: &[f64], series: &[(&str, &[f64])]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let (x0, x1) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (mut y0, mut y1) = series
        .iter()
        .flat_map(|(_, ys)| ys.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |v: f64| M + (v - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * (W - 2.0 * M);
    let sy = |v: f64| H - M - (v - y0) / (y1 - y0) * (H - 2.0 * M);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{M} {M} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = H - M,
        r = W - M
    );
    for (v, anchor, px, py) in [
        (x0, "start", M, H - M + 16.0),
        (x1, "end", W - M, H - M + 16.0),
    ] {
        let _ = writeln!(s, r#"<text x="{px}" y="{py}" font-size="11" text-anchor="{anchor}">{v:.4}</text>"#);
    }
    for (v, py) in [(y0, H - M), (y1, M + 4.0)] {
        let _ = writeln!(s, r#"<text x="{}" y="{py}" font-size="11" text-anchor="end">{v:.4e}</text>"#, M - 4.0);
    }
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = x.iter().zip(ys.iter()).map(|(&a, &b)| format!("{:.2},{:.2}", sx(a), sy(b))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" points="{}"/>"#, points.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
            W - M - 100.0,
            M + 16.0 * (k as f64 + 1.0),
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `error.json` describing a failed run.
pub fn write_error_record(dir: &Path, err: &Error) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut record = json!({ "status": err.kind(), "message": err.to_string() });
    match err {
        Error::Vacuum { t, x, density, floor } => {
            record["t"] = json!(t);
            record["x"] = json!(x);
            record["density"] = json!(density);
            record["floor"] = json!(floor);
        }
        Error::Blowup { t, quantity } => {
            record["t"] = json!(t);
            record["quantity"] = json!(quantity);
        }
        Error::Config { line: Some(l), .. } => record["line"] = json!(l),
        _ => {}
    }
    fs::write(dir.join("error.json"), serde_json::to_string_pretty(&record).expect("json"))?;
    Ok(())
}

#[derive(Debug)]
pub struct RunReport {
    pub trajectory: Trajectory<f64>,
    /// How the integration ended; outputs up to the failure are on disk either way.
    pub status: Result<()>,
}

fn resolved_physics(scenario: &Scenario, solver: &Solver<f64>) -> serde_json::Value {
    let p = &solver.model().params;
    let (steps, dt) = solver.config().schedule();
    json!({
        "kt_over_m": p.kt_over_m(),
        "a2": p.a2(),
        "quantum_coefficient": p.quantum_coefficient(),
        "hbar_eff": p.hbar_eff().ok(),
        "steps": steps,
        "dt_effective": dt,
        "scenario_text": scenario.to_toml(),
    })
}

/// Runs the hydrodynamic solver and writes `snapshots/`, `diagnostics.csv` and
/// `manifest.json` (plus `error.json` on failure) into `out_dir`.
pub fn execute_run(scenario: &Scenario, out_dir: &Path) -> Result<RunReport> {
    let started = Instant::now();
    fs::create_dir_all(out_dir.join("snapshots"))?;
    let setup = || -> Result<(Solver<f64>, State<f64>)> {
        let grid = scenario.grid::<f64>()?;
        let solver = Solver::new(&grid, scenario.model()?, scenario.solver_config())?;
        Ok((solver, scenario.initial_state()?))
    };
    let (solver, initial) = match setup() {
        Ok(v) => v,
        Err(e) => {
            write_error_record(out_dir, &e)?;
            return Err(e);
        }
    };
    log::info!("running '{}' on n = {}", scenario.name, scenario.grid.n);
    let outcome = solver.run(&initial);
    let traj = outcome.trajectory;
    let mut files = Vec::new();
    for (i, s) in traj.snapshots.iter().enumerate() {
        let name = format!("snapshots/snap_{i:05}.csv");
        write_snapshot(&out_dir.join(&name), s, &solver)?;
        files.push(name);
        if scenario.output.svg {
            let x = s.grid().coordinates();
            let rho = s.density();
            let v = velocity(s)?;
            let svg = svg_line_plot(
                &format!("{} t = {:.4}", scenario.name, s.t),
                &x,
                &[("rho", rho.samples()), ("v", v.samples())],
            );
            let name = format!("snapshots/snap_{i:05}.svg");
            fs::write(out_dir.join(&name), svg)?;
            files.push(name);
        }
    }
    write_diagnostics(&out_dir.join("diagnostics.csv"), &traj.diagnostics)?;
    files.push("diagnostics.csv".into());
    if let Err(e) = &outcome.status {
        log::warn!("run stopped: {e}");
        write_error_record(out_dir, e)?;
        files.push("error.json".into());
    }
    let manifest = json!({
        "name": scenario.name,
        "version": env!("CARGO_PKG_VERSION"),
        "status": outcome.status.as_ref().map_or_else(|e| e.kind(), |_| "ok"),
        "scenario": serde_json::to_value(scenario).expect("scenario serializes"),
        "resolved": resolved_physics(scenario, &solver),
        "snapshots": traj.snapshots.len(),
        "files": files,
        "wall_time_seconds": started.elapsed().as_secs_f64(),
    });
    fs::write(out_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).expect("json"))?;
    Ok(RunReport { trajectory: traj, status: outcome.status })
}

/// Runs both solvers on a scenario and writes `compare.csv` and `summary.json`.
pub fn execute_compare(scenario: &Scenario, out_dir: &Path) -> Result<Comparison<f64>> {
    fs::create_dir_all(out_dir)?;
    let run = || -> Result<Comparison<f64>> {
        let grid = scenario.grid::<f64>()?;
        let model = scenario.model::<f64>()?;
        let params = model.params;
        let solver = Solver::new(&grid, model, scenario.solver_config())?;
        let initial = scenario.initial_state::<f64>()?;
        let outcome = solver.run(&initial);
        outcome.status?;
        let vext = if solver.model().flags.external {
            solver.external_field().clone()
        } else {
            crate::grid::Field::zeros(&grid)
        };
        let w0 = to_wavefunction(&initial, &params)?;
        let oracle = oracle_run(&w0, &scenario.oracle_config(), &params, &vext)?;
        compare_with_oracle(&outcome.trajectory, &oracle, &params)
    };
    let cmp = match run() {
        Ok(c) => c,
        Err(e) => {
            write_error_record(out_dir, &e)?;
            return Err(e);
        }
    };
    write_comparison(&out_dir.join("compare.csv"), &cmp)?;
    let summary = json!({
        "name": scenario.name,
        "max_l2_density_error": cmp.max_density_l2,
        "max_phase_error": cmp.max_phase,
        "snapshots": cmp.snapshots.len(),
    });
    fs::write(out_dir.join("summary.json"), serde_json::to_string_pretty(&summary).expect("json"))?;
    Ok(cmp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_lossless() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn svg_is_well_formed() {
        let x = [0.0, 1.0, 2.0];
        let svg = svg_line_plot("a < b", &x, &[("rho", &[1.0, 2.0, 1.5])]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
