//! Scenario files: one TOML document per scenario.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use tdho_core::wavefunctions::auto_grid_with;
use tdho_core::{
    alpha_of_g, build_grid, solve_linear, ClassicalTrajectory, Domain, Family, OscillatorSpec, Profile, QuadratureGrid,
};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default)]
    pub g: f64,
    #[serde(default = "sho")]
    pub family: Family,
    #[serde(default = "ground")]
    pub modes: Vec<usize>,
    /// Declared period of the coefficients, for `phase`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    /// Deliberate corruption used to check that `verify` catches it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    /// `w₀²(t)`
    pub frequency: Profile,
    #[serde(default = "unit_mass")]
    pub mass: Profile,
    #[serde(default = "no_gauge")]
    pub gauge: Profile,
    pub initial: Initial,
    #[serde(default)]
    pub u1: U1,
    pub time: TimeSpan,
    #[serde(default)]
    pub grid: GridSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    FlipDeltaSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub u: f64,
    pub du: f64,
    pub v: f64,
    pub dv: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct U1 {
    #[serde(default)]
    pub c_u: f64,
    #[serde(default)]
    pub c_v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpan {
    pub start: f64,
    pub end: f64,
    /// Classical samples over the span, endpoints included.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Time frames written by `evolve`.
    #[serde(default = "default_frames")]
    pub frames: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSettings {
    /// Half-width (full line) or extent (half line); automatic when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    /// Number of nodes; automatic when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default = "default_ppw")]
    pub points_per_width: f64,
    /// Time step of the Schrödinger-residual check.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Crank–Nicolson step of the oracle check.
    #[serde(default = "default_cn_dt")]
    pub cn_dt: f64,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self {
            x_max: None,
            points: None,
            points_per_width: default_ppw(),
            dt: default_dt(),
            cn_dt: default_cn_dt(),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn sho() -> Family {
    Family::Sho
}
fn ground() -> Vec<usize> {
    vec![0]
}
fn unit_mass() -> Profile {
    Profile::constant(1.0)
}
fn no_gauge() -> Profile {
    Profile::constant(0.0)
}
fn default_samples() -> usize {
    1025
}
fn default_frames() -> usize {
    33
}
fn default_ppw() -> f64 {
    40.0
}
fn default_dt() -> f64 {
    1e-3
}
fn default_cn_dt() -> f64 {
    0.01
}

/// Command-line overrides applied after parsing.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub modes: Option<Vec<usize>>,
    pub dt: Option<f64>,
    pub grid_n: Option<usize>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        scenario.validate().map_err(|(key, msg)| {
            let at = locate(text, key).map(|l| format!("line {l}: ")).unwrap_or_default();
            CliError::Config(format!("{at}{key}: {msg}"))
        })?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenarios always serialize")
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(modes) = &o.modes {
            self.modes = modes.clone();
        }
        if let Some(dt) = o.dt {
            self.grid.dt = dt;
        }
        if let Some(n) = o.grid_n {
            self.grid.points = Some(n);
        }
        self.validate()
            .map_err(|(key, msg)| CliError::Config(format!("{key} (after overrides): {msg}")))
    }

    fn validate(&self) -> Result<(), (&'static str, String)> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(("name", "must be a non-empty file-name-safe string".into()));
        }
        if !positive(self.hbar) {
            return Err(("hbar", format!("{} must be positive", self.hbar)));
        }
        alpha_of_g(self.g, self.hbar).map_err(|e| ("g", e.to_string()))?;
        if self.family == Family::Sho && self.g != 0.0 {
            return Err((
                "g",
                "the sho family has no inverse-square term; use family = \"inverse-square\"".into(),
            ));
        }
        if self.family == Family::Sho
            && !(self.mass.is_constant()
                && self.mass.value(0.0) == 1.0
                && self.gauge.is_constant()
                && self.gauge.value(0.0) == 0.0)
        {
            return Err((
                "mass",
                "mass and gauge profiles require family = \"inverse-square\"".into(),
            ));
        }
        if self.family == Family::InverseSquare && (self.u1.c_u != 0.0 || self.u1.c_v != 0.0) {
            return Err(("u1", "the displacement u1 applies to the sho family only".into()));
        }
        if self.fault.is_some() && self.u1.c_u == 0.0 && self.u1.c_v == 0.0 {
            return Err(("fault", "flip-delta-sign needs a nonzero u1 to have any effect".into()));
        }
        if self.modes.is_empty() {
            return Err(("modes", "at least one mode is required".into()));
        }
        if self.modes.iter().any(|&n| n > 40) {
            return Err(("modes", "mode indices above 40 are not supported".into()));
        }
        for (key, p) in [("mass", &self.mass), ("gauge", &self.gauge)] {
            if !matches!(p, Profile::Const { .. } | Profile::Sinusoidal { .. }) {
                return Err((key, "only const and sinusoidal profiles are accepted".into()));
            }
        }
        if matches!(self.frequency, Profile::Sinusoidal { .. }) {
            return Err(("frequency", "use kind = \"mathieu\" for a periodic frequency".into()));
        }
        if let Profile::GaussianPulse { width, .. } = self.frequency {
            if !positive(width) {
                return Err(("frequency", "gaussian-pulse width must be positive".into()));
            }
        }
        let t = &self.time;
        if !(t.start.is_finite() && t.end.is_finite() && t.end > t.start) {
            return Err(("time", "end must exceed start".into()));
        }
        if t.samples < 3 || t.frames < 2 || t.frames > t.samples {
            return Err(("time", "need samples ≥ 3 and 2 ≤ frames ≤ samples".into()));
        }
        if let Some(p) = self.period {
            if !positive(p) {
                return Err(("period", format!("{p} must be positive")));
            }
        }
        let g = &self.grid;
        if !(positive(g.points_per_width) && positive(g.dt) && positive(g.cn_dt)) {
            return Err(("grid", "points_per_width, dt and cn_dt must be positive".into()));
        }
        if g.x_max.is_some_and(|x| !positive(x)) {
            return Err(("grid", "x_max must be positive".into()));
        }
        if g.points.is_some_and(|n| n < 16) {
            return Err(("grid", "points must be at least 16".into()));
        }
        let ics = &self.initial;
        if ics.dv * ics.u - ics.du * ics.v <= 0.0 {
            return Err(("initial", "the Wronskian dv·u − du·v must be positive".into()));
        }
        let spec = self.spec();
        let times: Vec<f64> = (0..=64)
            .map(|k| t.start + (t.end - t.start) * k as f64 / 64.0)
            .collect();
        spec.validate(&times).map_err(|e| ("mass", e.to_string()))?;
        Ok(())
    }

    pub fn spec(&self) -> OscillatorSpec {
        OscillatorSpec::new(self.frequency.clone())
            .with_mass(self.mass.clone())
            .with_gauge(self.gauge.clone())
            .with_coupling(self.g)
            .with_hbar(self.hbar)
            .with_u1(self.u1.c_u, self.u1.c_v)
    }

    pub fn ics(&self) -> [f64; 4] {
        let i = &self.initial;
        [i.u, i.du, i.v, i.dv]
    }

    pub fn trajectory(&self) -> Result<ClassicalTrajectory, CliError> {
        self.trajectory_on((self.time.start, self.time.end), self.time.samples)
    }

    pub fn trajectory_on(&self, span: (f64, f64), samples: usize) -> Result<ClassicalTrajectory, CliError> {
        Ok(solve_linear(&self.spec(), span, self.ics(), samples)?)
    }

    pub fn domain(&self) -> Domain {
        self.family.domain()
    }

    /// The configured grid, or one sized automatically for the requested modes.
    pub fn grid(&self, traj: &ClassicalTrajectory) -> Result<Arc<QuadratureGrid>, CliError> {
        let n_max = self.modes.iter().copied().max().unwrap_or(0);
        let auto = || auto_grid_with(traj, &self.spec(), self.family, n_max, self.grid.points_per_width);
        match (self.grid.x_max, self.grid.points) {
            (None, None) => Ok(auto()?),
            (x_max, points) => {
                let x_max = match x_max {
                    Some(x) => x,
                    None => auto()?.x_max(),
                };
                let points = points.unwrap_or_else(|| {
                    let base = auto().map(|g| g.spacing).unwrap_or(x_max / 1000.0);
                    (x_max / base).ceil() as usize
                });
                Ok(Arc::new(build_grid(self.domain(), x_max, points)?))
            }
        }
    }
}

/// 1-based line of `[key]`, `[key.…]` or `key =`.
fn locate(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.starts_with(&format!("[{key}]"))
                || l.starts_with(&format!("[{key}."))
                || l.strip_prefix(key)
                    .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}
