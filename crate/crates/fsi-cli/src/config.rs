//! TOML run configuration.
//!
//! Every section and key is optional; missing values take the defaults
//! below. `load_config` reports every violation at once.

use crate::csvio::read_profile_csv;
use fsi_core::beam::{BeamParams, BeamState};
use fsi_core::coupling::{
    prepare_initial, ContinuationConfig, CoupledProblem, CoupledState, Nonlinearity, PicardConfig,
};
use fsi_core::geometry::{bump_shape, node_samples, BeamProfile};
use fsi_core::linalg::SolverOptions;
use fsi_core::stokes::FluidGrid;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io(String),
    /// TOML syntax or type error; the message carries line and column.
    Parse(String),
    /// One entry per violated constraint, prefixed by the key.
    Invalid(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Parse(m) => write!(f, "config parse error: {m}"),
            ConfigError::Invalid(v) => {
                writeln!(f, "invalid config ({} problem{}):", v.len(), if v.len() == 1 { "" } else { "s" })?;
                for e in v {
                    writeln!(f, "  - {e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMode {
    /// Flat reference channel.
    #[default]
    Rect,
    /// Reference profile given by `eta0`.
    Graph,
}

/// Beam-node field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    #[default]
    Zero,
    /// `amplitude * 16 x^2 (L - x)^2 / L^4`.
    Bump { amplitude: f64 },
    /// Ascending coefficients `c0 + c1 x + ...`.
    Polynomial { coeffs: Vec<f64> },
    /// Nodal values from a CSV column (first column if `column` is absent).
    Csv {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        column: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VelocitySpec {
    #[default]
    Zero,
    /// `u1 = 4 A z'(1 - z')`, `u2 = 0`, made compatible before the run.
    Poiseuille { amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physics {
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub length: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            nu: 0.05,
            alpha: 1.0,
            beta: 0.5,
            gamma: 0.1,
            length: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    pub mode: ReferenceMode,
    /// Reference profile (graph mode). Defaults to the initial displacement.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta0: Option<ProfileSpec>,
    /// Initial beam displacement.
    pub eta1: ProfileSpec,
    /// Initial beam velocity.
    pub eta2: ProfileSpec,
    pub u0: VelocitySpec,
    /// Accept an initial displacement that differs from the reference.
    pub allow_reference_offset: bool,
    /// Multiplies `eta1`, `eta2` and `u0`.
    pub data_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Discretization {
    pub nx: usize,
    pub nz: usize,
    /// Beam nodes; defaults to `nx + 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nb: Option<usize>,
    pub dt: f64,
    /// Relative tolerance of the iterative linear solvers.
    pub solver_tol: f64,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            nx: 32,
            nz: 32,
            nb: None,
            dt: 0.0125,
            solver_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Picard {
    /// Initial slab horizon.
    pub horizon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    pub kappa_target: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub nonlinearity: Nonlinearity,
}

impl Default for Picard {
    fn default() -> Self {
        Self {
            horizon: 0.2,
            t_min: None,
            radius: None,
            mu: None,
            kappa_target: 0.5,
            tol: 1e-9,
            max_iter: 40,
            nonlinearity: Nonlinearity::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Run {
    /// Total time `T0`.
    pub target: f64,
    pub rebuild_reference: bool,
    pub max_slabs: usize,
}

impl Default for Run {
    fn default() -> Self {
        Self {
            target: 1.0,
            rebuild_reference: true,
            max_slabs: 1000,
        }
    }
}

/// Constant external data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Forcing {
    /// Uniform beam load `h`.
    pub load: f64,
    /// Pressure data on the inlet and outlet.
    pub theta_in: f64,
    pub theta_out: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub dir: PathBuf,
    /// Snapshot every this many slabs (0: only the last one).
    pub snapshot_every: usize,
    pub beam_csv: bool,
    pub energy_csv: bool,
    /// CSV dumps of the final fields, only for grids up to 64 x 64.
    pub field_csv: bool,
}

impl Default for Output {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            snapshot_every: 1,
            beam_csv: true,
            energy_csv: true,
            field_csv: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub physics: Physics,
    pub geometry: Geometry,
    pub discretization: Discretization,
    pub picard: Picard,
    pub run: Run,
    pub forcing: Forcing,
    pub output: Output,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            mode: ReferenceMode::Rect,
            eta0: None,
            eta1: ProfileSpec::Zero,
            eta2: ProfileSpec::Zero,
            u0: VelocitySpec::Zero,
            allow_reference_offset: false,
            data_scale: 1.0,
        }
    }
}

fn positive(errs: &mut Vec<String>, key: &str, sym: &str, v: f64) {
    if !(v > 0.0 && v.is_finite()) {
        errs.push(format!("{key}: {sym} must be > 0 (got {v})"));
    }
}

impl SolverConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn nodes(&self) -> usize {
        self.discretization.nb.unwrap_or(self.discretization.nx + 1)
    }

    /// Range checks that need no file access.
    pub fn check(&self) -> Vec<String> {
        let mut e = Vec::new();
        let p = &self.physics;
        positive(&mut e, "physics.nu", "ν", p.nu);
        positive(&mut e, "physics.alpha", "α", p.alpha);
        positive(&mut e, "physics.gamma", "γ", p.gamma);
        positive(&mut e, "physics.length", "L", p.length);
        if !(p.beta >= 0.0 && p.beta.is_finite()) {
            e.push(format!("physics.beta: β must be >= 0 (got {})", p.beta));
        }
        let d = &self.discretization;
        if d.nx < 4 || d.nz < 4 {
            e.push(format!("discretization: nx and nz must be >= 4 (got {} x {})", d.nx, d.nz));
        }
        if d.nx > 4096 || d.nz > 4096 {
            e.push(format!("discretization: nx and nz must be <= 4096 (got {} x {})", d.nx, d.nz));
        }
        if !(7..=1 << 16).contains(&self.nodes()) {
            e.push(format!("discretization.nb: need 7 <= nb <= 65536 (got {})", self.nodes()));
        }
        positive(&mut e, "discretization.dt", "Δt", d.dt);
        positive(&mut e, "discretization.solver_tol", "solver tolerance", d.solver_tol);
        let pc = &self.picard;
        positive(&mut e, "picard.horizon", "T", pc.horizon);
        positive(&mut e, "picard.tol", "tol", pc.tol);
        if !(pc.kappa_target > 0.0 && pc.kappa_target < 1.0) {
            e.push(format!("picard.kappa_target: κ* must lie in (0, 1) (got {})", pc.kappa_target));
        }
        if pc.max_iter == 0 {
            e.push("picard.max_iter: must be >= 1".into());
        }
        if let Some(t) = pc.t_min {
            if !(t > 0.0 && t < pc.horizon) {
                e.push(format!("picard.t_min: T_min must lie in (0, T) (got {t})"));
            }
        }
        if let Some(r) = pc.radius {
            positive(&mut e, "picard.radius", "R", r);
        }
        if let Some(m) = pc.mu {
            positive(&mut e, "picard.mu", "μ", m);
        }
        if d.dt > 0.0 && pc.horizon > 0.0 {
            let r = pc.horizon / d.dt;
            if (r - r.round()).abs() > 1e-9 * r.max(1.0) || r.round() < 1.0 {
                e.push(format!("discretization.dt: Δt = {} must divide picard.horizon = {}", d.dt, pc.horizon));
            }
        }
        positive(&mut e, "run.target", "T0", self.run.target);
        if self.run.max_slabs == 0 {
            e.push("run.max_slabs: must be >= 1".into());
        }
        let g = &self.geometry;
        if !g.data_scale.is_finite() {
            e.push(format!("geometry.data_scale: must be finite (got {})", g.data_scale));
        }
        if g.mode == ReferenceMode::Rect {
            if let Some(s) = &g.eta0 {
                if *s != ProfileSpec::Zero {
                    e.push("geometry.eta0: rect mode uses the flat reference; leave eta0 unset or zero".into());
                }
            }
        }
        for (k, s) in [("geometry.eta0", g.eta0.as_ref()), ("geometry.eta1", Some(&g.eta1)), ("geometry.eta2", Some(&g.eta2))] {
            if let Some(ProfileSpec::Polynomial { coeffs }) = s {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    e.push(format!("{k}: polynomial needs finite coefficients"));
                }
            }
            if let Some(ProfileSpec::Bump { amplitude }) = s {
                if !amplitude.is_finite() {
                    e.push(format!("{k}: bump amplitude must be finite"));
                }
            }
        }
        if let VelocitySpec::Poiseuille { amplitude } = g.u0 {
            if !amplitude.is_finite() {
                e.push("geometry.u0: amplitude must be finite".into());
            }
        }
        for (k, v) in [("forcing.load", self.forcing.load), ("forcing.theta_in", self.forcing.theta_in), ("forcing.theta_out", self.forcing.theta_out)] {
            if !v.is_finite() {
                e.push(format!("{k}: must be finite"));
            }
        }
        e
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.discretization.solver_tol,
            ..SolverOptions::default()
        }
    }

    pub fn picard_config(&self, workers: usize) -> PicardConfig {
        let p = &self.picard;
        PicardConfig {
            horizon: p.horizon,
            dt: self.discretization.dt,
            t_min: p.t_min,
            radius: p.radius,
            mu: p.mu,
            kappa_target: p.kappa_target,
            max_iter: p.max_iter,
            tol: p.tol,
            allow_reference_offset: self.geometry.allow_reference_offset,
            nonlinearity: p.nonlinearity,
            workers: workers.max(1),
            ..PicardConfig::default()
        }
    }

    pub fn continuation(&self) -> ContinuationConfig {
        ContinuationConfig {
            target: self.run.target,
            rebuild_reference: self.run.rebuild_reference,
            max_slabs: self.run.max_slabs,
        }
    }

    /// Defaults made explicit, CSV paths made absolute and `mu` fixed from
    /// the reference gap. The result reloads to the same setup.
    pub fn effective(&self, base: &Path) -> Result<Self, ConfigError> {
        let setup = Setup::build(self, base)?;
        let mut c = self.clone();
        c.discretization.nb = Some(self.nodes());
        c.picard.t_min = Some(self.picard.t_min.unwrap_or(self.picard.horizon / 64.0));
        c.picard.mu = Some(setup.mu);
        let abs = |s: &mut ProfileSpec| {
            if let ProfileSpec::Csv { path, .. } = s {
                *path = base.join(&*path);
            }
        };
        if self.geometry.mode == ReferenceMode::Graph {
            c.geometry.eta0 = Some(self.geometry.eta0.clone().unwrap_or_else(|| self.geometry.eta1.clone()));
        }
        if let Some(s) = c.geometry.eta0.as_mut() {
            abs(s);
        }
        abs(&mut c.geometry.eta1);
        abs(&mut c.geometry.eta2);
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// Reads, parses and validates. Relative CSV paths resolve against the
/// directory of `path`.
pub fn load_config(path: &Path) -> Result<(SolverConfig, PathBuf), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    let cfg = SolverConfig::parse(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Setup::build(&cfg, &base)?;
    Ok((cfg, base))
}

fn sample(spec: &ProfileSpec, nodes: usize, length: f64, scale: f64, base: &Path, key: &str) -> Result<Vec<f64>, String> {
    let v = match spec {
        ProfileSpec::Zero => vec![0.0; nodes],
        ProfileSpec::Bump { amplitude } => node_samples(nodes, length, |x| amplitude * bump_shape(x, length)),
        ProfileSpec::Polynomial { coeffs } => {
            node_samples(nodes, length, |x| coeffs.iter().rev().fold(0.0, |a, c| a * x + c))
        }
        ProfileSpec::Csv { path, column } => {
            let full = base.join(path);
            let text = std::fs::read_to_string(&full).map_err(|e| format!("{key}: {}: {e}", full.display()))?;
            let v = read_profile_csv(&text, column.as_deref()).map_err(|e| format!("{key}: {}: {e}", full.display()))?;
            if v.len() != nodes {
                return Err(format!("{key}: {} has {} values, the beam has {nodes} nodes", full.display(), v.len()));
            }
            v
        }
    };
    Ok(v.into_iter().map(|x| x * scale).collect())
}

/// Constant forcing from the config.
#[derive(Debug, Clone, Copy)]
pub struct ConstForcing(pub Forcing);

impl fsi_core::coupling::Forcing for ConstForcing {
    fn level(&self, problem: &CoupledProblem, _t: f64) -> fsi_core::Result<fsi_core::nonlinear::RhsLevel> {
        let mut r = fsi_core::nonlinear::RhsLevel::zero(problem.grid(), problem.nodes());
        r.theta_in.iter_mut().for_each(|v| *v = self.0.theta_in);
        r.theta_out.iter_mut().for_each(|v| *v = self.0.theta_out);
        let n = problem.nodes();
        r.h[1..n - 1].iter_mut().for_each(|v| *v = self.0.load);
        Ok(r)
    }
}

/// Everything a run needs, built from a validated config.
#[derive(Debug, Clone)]
pub struct Setup {
    pub problem: CoupledProblem,
    pub x0: CoupledState,
    /// Size of the compatibility correction applied to the initial velocity.
    pub modification: f64,
    /// Gap parameter kept fixed over the whole run.
    pub mu: f64,
    pub forcing: ConstForcing,
}

impl Setup {
    pub fn build(cfg: &SolverConfig, base: &Path) -> Result<Self, ConfigError> {
        let mut errs = cfg.check();
        if !errs.is_empty() {
            return Err(ConfigError::Invalid(errs));
        }
        let (p, d, g) = (&cfg.physics, &cfg.discretization, &cfg.geometry);
        let nb = cfg.nodes();
        let s = g.data_scale;
        let eta1 = sample(&g.eta1, nb, p.length, s, base, "geometry.eta1");
        let eta2 = sample(&g.eta2, nb, p.length, s, base, "geometry.eta2");
        let eta0 = match (g.mode, &g.eta0) {
            (ReferenceMode::Rect, _) => Ok(vec![0.0; nb]),
            (ReferenceMode::Graph, Some(spec)) => sample(spec, nb, p.length, 1.0, base, "geometry.eta0"),
            (ReferenceMode::Graph, None) => eta1.clone(),
        };
        let (eta0, eta1, eta2) = match (eta0, eta1, eta2) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (a, b, c) => {
                errs.extend([a.err(), b.err(), c.err()].into_iter().flatten());
                return Err(ConfigError::Invalid(errs));
            }
        };
        let off = eta0.iter().zip(&eta1).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if off > 1e-12 && !g.allow_reference_offset {
            errs.push(match g.mode {
                ReferenceMode::Graph => format!(
                    "geometry.eta1: graph mode requires η₁⁰ = η⁰ (the X̃ condition: the reference is the initial \
                     configuration), but they differ by {off:.3e}; set geometry.allow_reference_offset = true \
                     to run the comparison experiment"
                ),
                ReferenceMode::Rect => format!(
                    "geometry.eta1: rect mode with a nonzero initial displacement (max {off:.3e}) leaves η̃(0) ≠ 0; \
                     set geometry.allow_reference_offset = true to run the comparison experiment"
                ),
            });
        }
        let profile = BeamProfile::from_values(p.length, eta0).map_err(|e| {
            errs.push(format!("geometry.eta0: {e}"));
            ConfigError::Invalid(errs.clone())
        })?;
        if !errs.is_empty() {
            return Err(ConfigError::Invalid(errs));
        }
        let invalid = |k: &str, e: fsi_core::FsiError| ConfigError::Invalid(vec![format!("{k}: {e}")]);
        let grid = FluidGrid::new(d.nx, d.nz, p.length).map_err(|e| invalid("discretization", e))?;
        let beam = BeamParams::new(p.alpha, p.beta, p.gamma, p.length, nb).map_err(|e| invalid("physics", e))?;
        let problem =
            CoupledProblem::new(&grid, &profile, p.nu, beam, cfg.solver_options()).map_err(|e| invalid("physics", e))?;
        let mut u = vec![0.0; grid.nvel()];
        if let VelocitySpec::Poiseuille { amplitude } = g.u0 {
            for j in 0..grid.nz {
                let z = grid.z_center(j);
                for i in 0..=grid.nx {
                    u[grid.u1(i, j)] = s * 4.0 * amplitude * z * (1.0 - z);
                }
            }
        }
        let b = BeamState {
            eta: eta1,
            eta_t: eta2,
            t: 0.0,
        };
        let prepared = prepare_initial(&problem, &u, &b).map_err(|e| invalid("geometry", e))?;
        let mu = cfg.picard.mu.unwrap_or_else(|| profile.inverse_gap());
        Ok(Self {
            problem,
            x0: prepared.state,
            modification: prepared.modification,
            mu,
            forcing: ConstForcing(cfg.forcing),
        })
    }
}
