//! Scenario files (TOML) and their translation into solver inputs.
//!
//! ```toml
//! name = "trap"
//!
//! [grid]
//! n = 256
//! length = 12.0
//!
//! [physics]
//! hbar = 1.0
//! m = 1.0
//! kt = 2.0
//! a2 = "de_broglie"      # or a number
//! c = 1.0
//!
//! [terms]
//! thermo = true
//! quantum = true
//! quantum_order = 1
//! external = true
//!
//! [initial]
//! kind = "equilibrium"
//! shift = 0.3
//!
//! [external]
//! kind = "cosine"
//! v0 = 3.6476
//!
//! [solver]
//! dt = 1e-3
//! t_end = 6.283185307179586
//! ```
//!
//! Unknown keys are rejected. Every optional key has a default that is written back
//! out by [`Scenario::to_toml`], so a serialized scenario is fully explicit.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::kernel::{make_kernel, moments, KernelFamily};
use crate::madelung::{Model, SolverConfig, State, TermFlags};
use crate::potentials::{log_density, A2Mode, ExternalPotential, PhysParams};
use crate::scalar::Real;
use crate::schrodinger::{from_wavefunction, ground_state, OracleConfig};
use crate::table::Table;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub grid: GridSpec,
    pub physics: PhysicsSpec,
    #[serde(default)]
    pub terms: TermsSpec,
    pub initial: InitialSpec,
    #[serde(default)]
    pub external: ExternalSpec,
    pub solver: SolverSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub output: OutputSpec,
    /// Directory that relative table paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum A2Keyword {
    DeBroglie,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum A2Setting {
    Keyword(A2Keyword),
    Value(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSpec {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub m: f64,
    pub kt: f64,
    #[serde(default = "de_broglie")]
    pub a2: A2Setting,
    #[serde(default = "one")]
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermsSpec {
    #[serde(default = "yes")]
    pub thermo: bool,
    #[serde(default = "yes")]
    pub quantum: bool,
    #[serde(default = "one_usize")]
    pub quantum_order: usize,
    #[serde(default = "yes")]
    pub external: bool,
    /// Kernel whose moments supply the higher-order coefficients (`quantum_order >= 2`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
}

impl Default for TermsSpec {
    fn default() -> Self {
        TermsSpec { thermo: true, quantum: true, quantum_order: 1, external: true, kernel: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Gaussian { width: f64 },
    DifferenceOfGaussians { width: f64 },
    Tabulated { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Periodic Gaussian `exp(-(1 - cos k0 (x - center)) / (k0 width)^2)` with peak
    /// `peak`; `boost` sets `v = boost cos(k0 (x - center))`.
    Gaussian {
        center: f64,
        width: f64,
        #[serde(default = "one")]
        peak: f64,
        #[serde(default)]
        boost: f64,
    },
    /// `rho = mean (1 + amplitude cos(mode k0 x))`, `v = velocity cos(mode k0 x)`.
    Cosine {
        #[serde(default = "one")]
        mean: f64,
        amplitude: f64,
        #[serde(default = "one_usize")]
        mode: usize,
        #[serde(default)]
        velocity: f64,
    },
    /// Classical Boltzmann profile `exp(-V_e(x - shift) / (kT/m))`, mean density `mean`.
    Equilibrium {
        #[serde(default)]
        shift: f64,
        #[serde(default = "one")]
        mean: f64,
    },
    /// Imaginary-time ground state of the wave equation with the scenario's terms.
    GroundState {
        #[serde(default = "one")]
        mean: f64,
        #[serde(default = "ground_dtau")]
        dtau: f64,
        #[serde(default = "ground_tol")]
        tol: f64,
        #[serde(default = "ground_iter")]
        max_iter: usize,
    },
    /// CSV columns `x, rho[, phi]` on `[0, L]`.
    Tabulated { path: PathBuf },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExternalSpec {
    #[default]
    Zero,
    Harmonic { omega: f64 },
    Cosine { v0: f64 },
    Tabulated { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one_usize")]
    pub snapshot_stride: usize,
    #[serde(default = "yes")]
    pub dealias: bool,
    #[serde(default = "floor")]
    pub density_floor: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    /// Defaults to the solver step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Defaults to the thermal flag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonlinearity: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strang: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub svg: bool,
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn yes() -> bool {
    true
}
fn floor() -> f64 {
    1e-12
}
fn de_broglie() -> A2Setting {
    A2Setting::Keyword(A2Keyword::DeBroglie)
}
fn ground_dtau() -> f64 {
    1e-3
}
fn ground_tol() -> f64 {
    1e-13
}
fn ground_iter() -> usize {
    200_000
}

/// Line (1-based) of `key = ...` inside `[section]`, or of the section header itself.
fn locate(text: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut current = String::new();
    let mut header_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if current == section && header_line.is_none() {
                header_line = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some(k) = key {
                if let Some((lhs, _)) = line.split_once('=') {
                    if lhs.trim() == k {
                        return Some(i + 1);
                    }
                }
            }
        }
    }
    header_line
}

fn config_error(text: &str, section: &str, key: Option<&str>, message: impl Into<String>) -> Error {
    Error::Config { line: locate(text, section, key), message: message.into() }
}

/// Parses and validates a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut scenario: Scenario = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        Error::Config { line, message: e.message().to_string() }
    })?;
    scenario.resolve();
    scenario.validate_located(text)?;
    Ok(scenario)
}

/// Reads a scenario file; relative table paths resolve against its directory.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut s = parse_scenario(&text)?;
    s.base_dir = path.parent().map(Path::to_path_buf);
    Ok(s)
}

impl Scenario {
    /// Fills every defaulted optional value so the serialized form is explicit.
    fn resolve(&mut self) {
        self.oracle.dt.get_or_insert(self.solver.dt);
        self.oracle.nonlinearity.get_or_insert(self.terms.thermo);
        self.oracle.strang.get_or_insert(true);
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    fn validate_located(&self, text: &str) -> Result<()> {
        let err = |section: &str, key: &str, msg: String| Err(config_error(text, section, Some(key), msg));
        let g = &self.grid;
        if g.n < 8 || !g.n.is_multiple_of(2) {
            return err("grid", "n", format!("n = {} is invalid: n must be even and >= 8", g.n));
        }
        if !(g.length > 0.0) || !g.length.is_finite() {
            return err("grid", "length", format!("length = {} must be > 0", g.length));
        }
        let p = &self.physics;
        for (key, v) in [("hbar", p.hbar), ("m", p.m), ("c", p.c)] {
            if !(v > 0.0) || !v.is_finite() {
                return err("physics", key, format!("{key} = {v} must be > 0"));
            }
        }
        if !(p.kt >= 0.0) || !p.kt.is_finite() {
            return err("physics", "kt", format!("kt = {} must be >= 0", p.kt));
        }
        if matches!(p.a2, A2Setting::Keyword(A2Keyword::DeBroglie)) && p.kt == 0.0 {
            let explicit_a2 = text.lines().any(|l| l.split_once('=').is_some_and(|(k, _)| k.trim() == "a2"));
            return err(
                "physics",
                if explicit_a2 { "a2" } else { "kt" },
                "a2 = \"de_broglie\" requires kt > 0: the de Broglie length a^2 = hbar^2 / (4 m kT) diverges at kt = 0"
                    .into(),
            );
        }
        if let A2Setting::Value(a2) = p.a2 {
            if !a2.is_finite() {
                return err("physics", "a2", "a2 must be finite".into());
            }
            if self.terms.quantum && !(a2 * p.kt > 0.0) {
                return err("physics", "a2", format!("quantum term needs (kT/m) a^2 > 0, got a2 = {a2}, kt = {}", p.kt));
            }
        }
        let t = &self.terms;
        if t.quantum && t.quantum_order == 0 {
            return err("terms", "quantum_order", "quantum_order must be >= 1".into());
        }
        if t.quantum && t.quantum_order >= 2 && t.kernel.is_none() {
            return Err(config_error(text, "terms.kernel", None, "quantum_order >= 2 needs a [terms.kernel] section"));
        }
        let s = &self.solver;
        if !(s.dt > 0.0) || !s.dt.is_finite() {
            return err("solver", "dt", format!("dt = {} must be > 0", s.dt));
        }
        if !(s.t_end >= 0.0) || !s.t_end.is_finite() {
            return err("solver", "t_end", format!("t_end = {} must be >= 0", s.t_end));
        }
        if s.snapshot_stride == 0 {
            return err("solver", "snapshot_stride", "snapshot_stride must be >= 1".into());
        }
        if !(s.density_floor > 0.0 && s.density_floor < 1.0) {
            return err("solver", "density_floor", "density_floor must lie in (0, 1)".into());
        }
        if let Some(dt) = self.oracle.dt {
            if !(dt > 0.0) {
                return err("oracle", "dt", format!("oracle dt = {dt} must be > 0"));
            }
        }
        match &self.initial {
            InitialSpec::Gaussian { width, peak, .. } => {
                if !(*width > 0.0) {
                    return err("initial", "width", "width must be > 0".into());
                }
                if !(*peak > 0.0) {
                    return err("initial", "peak", "peak must be > 0".into());
                }
            }
            InitialSpec::Cosine { mean, amplitude, mode, .. } => {
                if !(*mean > 0.0) {
                    return err("initial", "mean", "mean must be > 0".into());
                }
                if !(amplitude.abs() < 1.0) {
                    return err("initial", "amplitude", "|amplitude| must be < 1 for a positive density".into());
                }
                if *mode == 0 || *mode >= g.n / 2 {
                    return err("initial", "mode", format!("mode must lie in 1..{}", g.n / 2));
                }
            }
            InitialSpec::Equilibrium { mean, .. } | InitialSpec::GroundState { mean, .. } => {
                if !(*mean > 0.0) {
                    return err("initial", "mean", "mean must be > 0".into());
                }
                if matches!(self.initial, InitialSpec::Equilibrium { .. }) && p.kt == 0.0 {
                    return err("initial", "kind", "an equilibrium initial state needs kt > 0".into());
                }
            }
            InitialSpec::Tabulated { .. } => {}
        }
        Ok(())
    }

    fn resolve_path(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn grid<T: Real>(&self) -> Result<Grid<T>> {
        Grid::new(self.grid.n, T::lit(self.grid.length))
    }

    pub fn params<T: Real>(&self) -> Result<PhysParams<T>> {
        let p = &self.physics;
        let mode = match p.a2 {
            A2Setting::Keyword(A2Keyword::DeBroglie) => A2Mode::DeBroglie,
            A2Setting::Value(v) => A2Mode::Explicit(T::lit(v)),
        };
        PhysParams::new(T::lit(p.hbar), T::lit(p.m), T::lit(p.kt), mode, T::lit(p.c))
    }

    pub fn flags(&self) -> TermFlags {
        TermFlags {
            thermo: self.terms.thermo,
            quantum: self.terms.quantum,
            quantum_order: self.terms.quantum_order,
            external: self.terms.external,
        }
    }

    pub fn external<T: Real>(&self) -> Result<ExternalPotential<T>> {
        Ok(match &self.external {
            ExternalSpec::Zero => ExternalPotential::Zero,
            ExternalSpec::Harmonic { omega } => ExternalPotential::Harmonic { omega: T::lit(*omega) },
            ExternalSpec::Cosine { v0 } => ExternalPotential::Cosine { v0: T::lit(*v0) },
            ExternalSpec::Tabulated { path } => ExternalPotential::Tabulated(Table::from_path(self.resolve_path(path))?),
        })
    }

    pub fn kernel_family<T: Real>(&self) -> Result<Option<KernelFamily<T>>> {
        Ok(match &self.terms.kernel {
            None => None,
            Some(KernelSpec::Gaussian { width }) => Some(KernelFamily::Gaussian { width: T::lit(*width) }),
            Some(KernelSpec::DifferenceOfGaussians { width }) => {
                Some(KernelFamily::DifferenceOfGaussians { width: T::lit(*width) })
            }
            Some(KernelSpec::Tabulated { path }) => Some(KernelFamily::from_csv_path(self.resolve_path(path))?),
        })
    }

    pub fn model<T: Real>(&self) -> Result<Model<T>> {
        let grid = self.grid::<T>()?;
        let moments = match self.kernel_family::<T>()? {
            Some(family) if self.terms.quantum_order >= 2 => {
                Some(moments(&make_kernel(&family, &grid)?, self.terms.quantum_order)?)
            }
            _ => None,
        };
        Ok(Model { params: self.params()?, flags: self.flags(), external: self.external()?, moments })
    }

    pub fn solver_config<T: Real>(&self) -> SolverConfig<T> {
        let s = &self.solver;
        SolverConfig {
            dt: T::lit(s.dt),
            t_end: T::lit(s.t_end),
            snapshot_stride: s.snapshot_stride,
            dealias: s.dealias,
            density_floor: T::lit(s.density_floor),
        }
    }

    pub fn oracle_config<T: Real>(&self) -> OracleConfig<T> {
        OracleConfig {
            dt: T::lit(self.oracle.dt.unwrap_or(self.solver.dt)),
            t_end: T::lit(self.solver.t_end),
            snapshot_stride: self.solver.snapshot_stride,
            nonlinearity: self.oracle.nonlinearity.unwrap_or(self.terms.thermo),
            strang: self.oracle.strang.unwrap_or(true),
        }
    }

    /// Builds and checks the initial state (`min rho >= 1e-10 mean rho`).
    pub fn initial_state<T: Real>(&self) -> Result<State<T>> {
        let grid = self.grid::<T>()?;
        let l = grid.length();
        let k0 = T::TAU() / l;
        let zero_phi = || Field::zeros(&grid);
        let state = match &self.initial {
            InitialSpec::Gaussian { center, width, peak, boost } => {
                let (c, w) = (T::lit(*center), T::lit(*width));
                let kappa = T::one() / (k0 * k0 * w * w);
                let lp = T::lit(*peak).ln();
                let lambda = Field::from_fn(&grid, |x| lp - kappa * (T::one() - (k0 * (x - c)).cos()))?;
                let b = T::lit(*boost);
                let phi = Field::from_fn(&grid, |x| -b / k0 * (k0 * (x - c)).sin())?;
                State::new(T::zero(), lambda, phi)?
            }
            InitialSpec::Cosine { mean, amplitude, mode, velocity } => {
                let k = k0 * T::from_count(*mode);
                let (m, a, v) = (T::lit(*mean), T::lit(*amplitude), T::lit(*velocity));
                let rho = Field::from_fn(&grid, |x| m * (T::one() + a * (k * x).cos()))?;
                let phi = Field::from_fn(&grid, |x| -v / k * (k * x).sin())?;
                State::from_density(T::zero(), &rho, phi)?
            }
            InitialSpec::Equilibrium { shift, mean } => {
                let p = self.params::<T>()?;
                let ext = self.external::<T>()?;
                let s = T::lit(*shift);
                let v = ext.evaluate(&grid)?;
                // Spectral translation keeps V(x - shift) periodic and smooth.
                let vs = translate(&v, s)?;
                let ktm = p.kt_over_m();
                let raw = vs.map(|u| -u / ktm);
                let mean_raw = raw.map(|q| q.exp()).mean();
                let offset = T::lit(*mean).ln() - mean_raw.ln();
                State::new(T::zero(), raw.map(|q| q + offset), zero_phi())?
            }
            InitialSpec::GroundState { mean, dtau, tol, max_iter } => {
                let p = self.params::<T>()?;
                let model = self.model::<T>()?;
                let v = if model.flags.external { model.external.evaluate(&grid)? } else { Field::zeros(&grid) };
                let mass = T::lit(*mean) * l;
                let w = ground_state(&grid, &p, &v, self.terms.thermo, mass, T::lit(*dtau), T::lit(*tol), *max_iter)?;
                let s = from_wavefunction(&w, &p)?;
                State::new(T::zero(), s.lambda, zero_phi())?
            }
            InitialSpec::Tabulated { path } => {
                let path = self.resolve_path(path);
                let file = std::fs::File::open(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let (rho_t, phi_t) = read_profile::<T>(file)?;
                let rho = Field::from_fn(&grid, |x| rho_t.interpolate(x).unwrap_or_else(|| rho_t.ys()[0]))?;
                let phi = match phi_t {
                    Some(t) => {
                        let ys = t.ys();
                        let scale = ys.iter().fold(T::one(), |m, v| m.max(v.abs()));
                        if (ys[0] - *ys.last().unwrap()).abs() > T::tol(1e-12) * scale {
                            return Err(Error::InvalidParameter(
                                "tabulated phi must be periodic (no net winding)".into(),
                            ));
                        }
                        Field::from_fn(&grid, |x| t.interpolate(x).unwrap_or_else(|| ys[0]))?
                    }
                    None => zero_phi(),
                };
                State::new(T::zero(), log_density(&rho)?, phi)?
            }
        };
        let rho = state.density();
        if rho.min() < T::lit(1e-10) * rho.mean() {
            return Err(Error::InvalidParameter(format!(
                "initial density minimum {} is below 1e-10 of the mean {}",
                rho.min(),
                rho.mean()
            )));
        }
        Ok(state)
    }
}

/// `f(x - s)` by a spectral phase shift.
fn translate<T: Real>(f: &Field<T>, s: T) -> Result<Field<T>> {
    let g = f.grid();
    let mut spec = g.forward(f.samples());
    let reference = f.max_abs();
    for (c, &k) in spec.iter_mut().zip(g.wavenumbers()) {
        *c = *c * num_complex::Complex::from_polar(T::one(), -k * s);
    }
    Ok(Field::from_vec_unchecked(g, g.inverse_real(spec, reference)?))
}

/// `x, rho[, phi]` columns; a non-numeric first row is a header.
fn read_profile<T: Real>(reader: impl std::io::Read) -> Result<(Table<T>, Option<Table<T>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let mut rho = Vec::new();
    let mut phi = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 1;
        let rec = rec.map_err(|e| Error::Csv { line, message: e.to_string() })?;
        let nums: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match nums {
            Ok(v) if v.len() >= 2 => {
                rho.push((T::lit(v[0]), T::lit(v[1])));
                if v.len() >= 3 {
                    phi.push((T::lit(v[0]), T::lit(v[2])));
                }
            }
            Ok(_) => return Err(Error::Csv { line, message: "expected at least two columns".into() }),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::Csv { line, message: e.to_string() }),
        }
    }
    let phi = if phi.is_empty() { None } else { Some(Table::new(phi)?) };
    Ok((Table::new(rho)?, phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "minimal"

[grid]
n = 64
length = 10.0

[physics]
kt = 0.5

[initial]
kind = "gaussian"
center = 5.0
width = 1.0

[solver]
dt = 1e-3
t_end = 0.01
"#;

    #[test]
    fn minimal_config_gets_explicit_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.physics.hbar, 1.0);
        assert_eq!(s.physics.a2, A2Setting::Keyword(A2Keyword::DeBroglie));
        assert!(s.terms.quantum && s.terms.thermo);
        assert_eq!(s.oracle.dt, Some(1e-3));
        let text = s.to_toml();
        for key in ["hbar", "density_floor", "snapshot_stride", "dealias", "nonlinearity", "strang", "svg"] {
            assert!(text.contains(key), "{key} missing from\n{text}");
        }
        let state = s.initial_state::<f64>().unwrap();
        assert!((state.density().max() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let s = parse_scenario(MINIMAL).unwrap();
        let again = parse_scenario(&s.to_toml()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn odd_grid_is_rejected_with_line() {
        let text = MINIMAL.replace("n = 64", "n = 7");
        match parse_scenario(&text) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, Some(5));
                assert!(message.contains("even") && message.contains(">= 8"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn de_broglie_needs_temperature() {
        let text = MINIMAL.replace("kt = 0.5", "kt = 0.0");
        match parse_scenario(&text) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, Some(9));
                assert!(message.contains("de_broglie") && message.contains("kt > 0"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_errors() {
        let text = MINIMAL.replace("kt = 0.5", "kt = 0.5\nhbarr = 2.0");
        match parse_scenario(&text) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, Some(10));
                assert!(message.contains("hbarr"));
            }
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("width = 1.0", "width = 1.0\nwidht = 2.0");
        assert!(parse_scenario(&text).is_err());
    }

    #[test]
    fn equilibrium_initial_state() {
        let text = MINIMAL
            .replace("kind = \"gaussian\"\ncenter = 5.0\nwidth = 1.0", "kind = \"equilibrium\"")
            + "\n[external]\nkind = \"cosine\"\nv0 = 0.4\n";
        let s = parse_scenario(&text).unwrap();
        let st = s.initial_state::<f64>().unwrap();
        let v = s.external::<f64>().unwrap().evaluate(&st.grid().clone()).unwrap();
        let spread = st.lambda.zip_map(&v, |l, u| l + u / 0.5).unwrap();
        assert!(spread.max() - spread.min() < 1e-12);
        assert!((st.density().mean() - 1.0).abs() < 1e-12);
    }
}
