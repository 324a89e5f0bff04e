//! Retarded non-local energy and the d'Alembertian quantum potential, evaluated on a
//! stored history of densities.

use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::kernel::{moments, Kernel};
use crate::potentials::PhysParams;
use crate::scalar::{ordered_sum, Real};

/// Equally spaced `(t, lambda)` snapshots; the oldest entry is dropped once full.
#[derive(Clone, Debug)]
pub struct DensityHistory<T: Real> {
    grid: Grid<T>,
    dt: T,
    capacity: usize,
    entries: VecDeque<(T, Field<T>)>,
}

impl<T: Real> DensityHistory<T> {
    pub fn new(grid: &Grid<T>, dt: T, capacity: usize) -> Result<Self> {
        if capacity < 5 {
            return Err(Error::History(format!("capacity must be >= 5, got {capacity}")));
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::History("history spacing must be > 0".into()));
        }
        Ok(DensityHistory { grid: grid.clone(), dt, capacity, entries: VecDeque::with_capacity(capacity) })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn spacing(&self) -> T {
        self.dt
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stored snapshots, oldest first.
    pub fn iter(&self) -> impl Iterator<Item = (T, &Field<T>)> {
        self.entries.iter().map(|(t, f)| (*t, f))
    }

    pub fn newest_time(&self) -> Option<T> {
        self.entries.back().map(|e| e.0)
    }

    pub fn push(&mut self, t: T, lambda: Field<T>) -> Result<()> {
        if lambda.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        lambda.check_finite()?;
        if let Some(&(last, _)) = self.entries.back() {
            let expected = last + self.dt;
            if (t - expected).abs() > T::tol(1e-9) * self.dt.max(expected.abs()) {
                return Err(Error::History(format!(
                    "snapshot at t = {t} breaks uniform spacing (expected {expected})"
                )));
            }
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((t, lambda));
        Ok(())
    }

    fn lambda(&self, i: usize) -> &Field<T> {
        &self.entries[i].1
    }

    /// Writes `snap_XXXX.csv` files (`x, lambda`) plus `history.json` into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut files = Vec::with_capacity(self.len());
        for (i, (t, lambda)) in self.entries.iter().enumerate() {
            let name = format!("snap_{i:04}.csv");
            let mut w = csv::Writer::from_path(dir.join(&name)).map_err(|e| Error::Io(e.to_string()))?;
            w.write_record(["x", "lambda"]).map_err(|e| Error::Io(e.to_string()))?;
            for (j, v) in lambda.samples().iter().enumerate() {
                w.write_record([format!("{:.16e}", self.grid.x(j)), format!("{:.16e}", v)])
                    .map_err(|e| Error::Io(e.to_string()))?;
            }
            w.flush()?;
            files.push(HistoryEntry { t: t.as_f64(), file: name });
        }
        let manifest = HistoryManifest {
            n: self.grid.n(),
            length: self.grid.length().as_f64(),
            spacing: self.dt.as_f64(),
            capacity: self.capacity,
            snapshots: files,
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(dir.join("history.json"), text)?;
        Ok(())
    }

    pub fn read_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let text = fs::read_to_string(dir.join("history.json"))?;
        let manifest: HistoryManifest =
            serde_json::from_str(&text).map_err(|e| Error::History(format!("history.json: {e}")))?;
        let grid = Grid::new(manifest.n, T::lit(manifest.length))?;
        let mut h = DensityHistory::new(&grid, T::lit(manifest.spacing), manifest.capacity)?;
        for entry in &manifest.snapshots {
            let mut rdr = csv::Reader::from_path(dir.join(&entry.file)).map_err(|e| Error::Io(e.to_string()))?;
            let mut values = Vec::with_capacity(manifest.n);
            for (i, rec) in rdr.records().enumerate() {
                let line = i + 2;
                let rec = rec.map_err(|e| Error::Csv { line, message: e.to_string() })?;
                let v: f64 = rec
                    .get(1)
                    .ok_or_else(|| Error::Csv { line, message: "missing lambda column".into() })?
                    .trim()
                    .parse()
                    .map_err(|e| Error::Csv { line, message: format!("{e}") })?;
                values.push(T::lit(v));
            }
            h.push(T::lit(entry.t), Field::new(&grid, values)?)?;
        }
        Ok(h)
    }
}

#[derive(Serialize, Deserialize)]
struct HistoryEntry {
    t: f64,
    file: String,
}

#[derive(Serialize, Deserialize)]
struct HistoryManifest {
    n: usize,
    length: f64,
    spacing: f64,
    capacity: usize,
    snapshots: Vec<HistoryEntry>,
}

/// Index of the snapshot where [`dalembert_uq`] is evaluated.
pub fn center_index<T: Real>(h: &DensityHistory<T>) -> usize {
    h.len() / 2
}

/// `2 (kT/m) a^2 box R / R` with `R = sqrt(rho)` and `box = (1/c^2) d_tt - lap`, at the
/// centre snapshot. A static history reproduces the square-root Bohm form exactly.
pub fn dalembert_uq<T: Real>(h: &DensityHistory<T>, p: &PhysParams<T>) -> Result<Field<T>> {
    if h.len() < 3 {
        return Err(Error::TooFewSnapshots { needed: 3, have: h.len() });
    }
    let m = center_index(h);
    let amp = |i: usize| -> Vec<T> { h.lambda(i).samples().iter().map(|&l| (l / T::lit(2.0)).exp()).collect() };
    let (prev, mid, next) = (amp(m - 1), amp(m), amp(m + 1));
    let lap = h.grid.derivative_of(&mid, 2)?;
    let coef = p.quantum_coefficient();
    let two = T::lit(2.0);
    let inv = T::one() / (p.c * p.c * h.dt * h.dt);
    let out = (0..mid.len())
        .map(|j| {
            let rtt = (next[j] - two * mid[j] + prev[j]) * inv;
            -two * coef * lap[j] / mid[j] + two * coef * rtt / mid[j]
        })
        .collect();
    Ok(Field::from_vec_unchecked(&h.grid, out))
}

fn periodic_distance<T: Real>(g: &Grid<T>, i: usize, j: usize) -> T {
    let n = g.n();
    let d = i.abs_diff(j);
    T::from_count(d.min(n - d)) * g.dx()
}

/// `(kT/m) sum_j dx u(x_i - x_j) ln rho(x_j, t - |x_i - x_j|/c)` at the newest stored time,
/// with linear interpolation between snapshots.
pub fn retarded_energy<T: Real>(h: &DensityHistory<T>, u: &Kernel<T>, p: &PhysParams<T>) -> Result<Field<T>> {
    if h.is_empty() {
        return Err(Error::TooFewSnapshots { needed: 1, have: 0 });
    }
    let g = &h.grid;
    if u.grid() != g {
        return Err(Error::GridMismatch);
    }
    let needed = g.length() / (T::lit(2.0) * p.c);
    let available = T::from_count(h.len() - 1) * h.dt;
    if needed > available {
        return Err(Error::HorizonNotCovered { needed: needed.as_f64(), available: available.as_f64() });
    }
    let n = g.n();
    let newest = h.len() - 1;
    let ktm = p.kt_over_m();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut terms = Vec::with_capacity(n);
        for j in 0..n {
            let lag = periodic_distance(g, i, j) / p.c / h.dt;
            let k = lag.floor().to_usize().unwrap_or(usize::MAX);
            let w = lag - lag.floor();
            if k > newest || (k == newest && w > T::zero()) {
                return Err(Error::History(format!(
                    "retarded time t - {} is older than the buffer",
                    (lag * h.dt).as_f64()
                )));
            }
            let a = h.lambda(newest - k).samples()[j];
            let value = if w > T::zero() { a + w * (h.lambda(newest - k - 1).samples()[j] - a) } else { a };
            terms.push(u.at_offset(i, j) * value);
        }
        out.push(ktm * ordered_sum(terms) * g.dx());
    }
    Ok(Field::from_vec_unchecked(g, out))
}

/// Small-width, slow-motion expansion of [`retarded_energy`] at the newest time:
/// `(kT/m) [lambda - (m1/c) lambda_t - 0.5 a^2 (lap lambda + lambda_tt / c^2)]`,
/// where `m1 = int u |x| dx`. Time derivatives are one-sided, second order.
pub fn retarded_expansion<T: Real>(h: &DensityHistory<T>, u: &Kernel<T>, p: &PhysParams<T>) -> Result<Field<T>> {
    if h.len() < 4 {
        return Err(Error::TooFewSnapshots { needed: 4, have: h.len() });
    }
    let g = &h.grid;
    let table = moments(u, 1)?;
    let a2 = table.a2;
    let m1 = ordered_sum(
        u.field().samples().iter().enumerate().map(|(j, &v)| v * g.folded_x(j).abs()),
    ) * g.dx();
    let last = h.len() - 1;
    let l = |k: usize| h.lambda(last - k).samples();
    let lap = g.derivative_of(l(0), 2)?;
    let (dt, c) = (h.dt, p.c);
    let ktm = p.kt_over_m();
    let half = T::lit(0.5);
    let out = (0..g.n())
        .map(|j| {
            let lt = (T::lit(3.0) * l(0)[j] - T::lit(4.0) * l(1)[j] + l(2)[j]) / (T::lit(2.0) * dt);
            let ltt = (T::lit(2.0) * l(0)[j] - T::lit(5.0) * l(1)[j] + T::lit(4.0) * l(2)[j] - l(3)[j]) / (dt * dt);
            ktm * (l(0)[j] - m1 / c * lt - half * a2 * (lap[j] + ltt / (c * c)))
        })
        .collect();
    Ok(Field::from_vec_unchecked(g, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{make_kernel, nonlocal_energy_log, KernelFamily};
    use crate::potentials::{bohm_potential_log, A2Mode, BohmForm};
    use std::f64::consts::TAU;

    fn params(c: f64) -> PhysParams<f64> {
        PhysParams::new(1.0, 1.0, 0.5, A2Mode::DeBroglie, c).unwrap()
    }

    fn lambda_at(g: &Grid<f64>, t: f64) -> Field<f64> {
        let k = TAU / g.length();
        Field::from_fn(g, |x| 0.2 * (k * x).cos() + 0.1 * (k * x - 0.7 * t).sin()).unwrap()
    }

    fn history(g: &Grid<f64>, dt: f64, count: usize, cap: usize) -> DensityHistory<f64> {
        let mut h = DensityHistory::new(g, dt, cap).unwrap();
        for i in 0..count {
            let t = i as f64 * dt;
            h.push(t, lambda_at(g, t)).unwrap();
        }
        h
    }

    #[test]
    fn static_history_reduces_to_bohm() {
        let g = Grid::<f64>::new(64, 10.0).unwrap();
        let mut h = DensityHistory::new(&g, 0.1, 5).unwrap();
        let lam = lambda_at(&g, 0.0);
        for i in 0..5 {
            h.push(i as f64 * 0.1, lam.clone()).unwrap();
        }
        let p = params(3.0);
        let a = dalembert_uq(&h, &p).unwrap();
        let b = bohm_potential_log(&lam, &p, BohmForm::Sqrt).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() <= 1e-12 * b.max_abs());
    }

    #[test]
    fn buffer_rules() {
        let g = Grid::<f64>::new(16, 1.0).unwrap();
        assert!(DensityHistory::new(&g, 0.1, 4).is_err());
        let mut h = history(&g, 0.1, 7, 5);
        assert_eq!(h.len(), 5);
        assert!((h.iter().next().unwrap().0 - 0.2).abs() < 1e-12);
        assert!(h.push(1.0, Field::zeros(&g)).is_err());
        let short = history(&g, 0.1, 2, 5);
        assert!(matches!(dalembert_uq(&short, &params(1.0)), Err(Error::TooFewSnapshots { .. })));
    }

    #[test]
    fn retarded_limits() {
        let g = Grid::<f64>::new(32, 8.0).unwrap();
        let u = make_kernel(&KernelFamily::DifferenceOfGaussians { width: 0.4 }, &g).unwrap();
        let h = history(&g, 0.05, 10, 10);
        let inst = nonlocal_energy_log(h.lambda(h.len() - 1), &u, &params(1.0)).unwrap();
        // horizon L/2c = 4/c needs c >= 4 / 0.45
        assert!(matches!(retarded_energy(&h, &u, &params(5.0)), Err(Error::HorizonNotCovered { .. })));
        let fast = retarded_energy(&h, &u, &params(1e9)).unwrap();
        assert!(fast.max_abs_diff(&inst).unwrap() < 1e-10);

        let mut stat = DensityHistory::new(&g, 0.05, 10).unwrap();
        for i in 0..10 {
            stat.push(i as f64 * 0.05, lambda_at(&g, 0.0)).unwrap();
        }
        let s = retarded_energy(&stat, &u, &params(10.0)).unwrap();
        let si = nonlocal_energy_log(&lambda_at(&g, 0.0), &u, &params(10.0)).unwrap();
        assert!(s.max_abs_diff(&si).unwrap() < 1e-10);
    }

    #[test]
    fn history_round_trip() {
        let g = Grid::<f64>::new(16, 2.0).unwrap();
        let h = history(&g, 0.25, 6, 6);
        let dir = tempfile::tempdir().unwrap();
        h.write_dir(dir.path()).unwrap();
        let back = DensityHistory::<f64>::read_dir(dir.path()).unwrap();
        assert_eq!(back.len(), 6);
        for ((ta, a), (tb, b)) in h.iter().zip(back.iter()) {
            assert_eq!(ta, tb);
            assert_eq!(a, b);
        }
    }
}
