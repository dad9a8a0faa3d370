//! Classical solutions, the Ermakov width `ρ₀`, the reparametrized clock `τ`
//! and the displacement phase `δ_{u1}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::profile::Profile;

/// Relative drift of `v̇₀u₀ − u̇₀v₀` tolerated by [`wronskian`].
pub const WRONSKIAN_TOL: f64 = 1e-8;

/// The physical problem: frequency, mass and gauge profiles plus couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorSpec {
    /// `w₀²(t)`
    pub w0_sq: Profile,
    /// `M(t) > 0`
    pub mass: Profile,
    /// `a(t)`, coefficient of `−a(xp+px)` in the generalized Hamiltonian.
    pub gauge: Profile,
    /// Inverse-square coupling `g`.
    pub g: f64,
    pub hbar: f64,
    /// `(c_u, c_v)` with `u₁ = c_u·u₀ + c_v·v₀`.
    pub u1_coeffs: (f64, f64),
}

impl OscillatorSpec {
    pub fn new(w0_sq: Profile) -> Self {
        Self {
            w0_sq,
            mass: Profile::constant(1.0),
            gauge: Profile::constant(0.0),
            g: 0.0,
            hbar: 1.0,
            u1_coeffs: (0.0, 0.0),
        }
    }

    /// Unit mass, unit frequency.
    pub fn unit() -> Self {
        Self::new(Profile::constant(1.0))
    }

    pub fn with_mass(mut self, mass: Profile) -> Self {
        self.mass = mass;
        self
    }

    pub fn with_gauge(mut self, gauge: Profile) -> Self {
        self.gauge = gauge;
        self
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn with_u1(mut self, c_u: f64, c_v: f64) -> Self {
        self.u1_coeffs = (c_u, c_v);
        self
    }

    /// True when `M ≡ 1` and `a ≡ 0`, i.e. the Hamiltonian is `H₀` (plus `g/x²`).
    pub fn is_unit_mass_gauge_free(&self) -> bool {
        self.mass.is_constant()
            && self.mass.value(0.0) == 1.0
            && self.gauge.is_constant()
            && self.gauge.value(0.0) == 0.0
    }

    /// `c(t) = w₀² + (√M)''/√M + 4a² − (2/M)(Ma)'`
    pub fn c(&self, t: f64) -> f64 {
        let m = self.mass.value(t);
        let dm = self.mass.deriv(t);
        let ddm = self.mass.deriv2(t);
        let a = self.gauge.value(t);
        let da = self.gauge.deriv(t);
        // (√M)''/√M = M''/(2M) − M'²/(4M²)
        let sqrt_term = ddm / (2.0 * m) - dm * dm / (4.0 * m * m);
        self.w0_sq.value(t) + sqrt_term + 4.0 * a * a - 2.0 * (dm * a + m * da) / m
    }

    /// Checks the invariants that do not depend on a trajectory.
    pub fn validate(&self, times: &[f64]) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::Domain(format!("hbar must be positive, got {}", self.hbar)));
        }
        for &t in times {
            let m = self.mass.value(t);
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::Domain(format!("mass M({t}) = {m} must be positive")));
            }
            let w = self.w0_sq.value(t);
            let a = self.gauge.value(t);
            if !w.is_finite() || !a.is_finite() {
                return Err(Error::Domain(format!("profile not finite at t = {t}")));
            }
        }
        Ok(())
    }
}

/// Width quantities of the mass-scaled solutions `u = u₀/√M`, `v = v₀/√M`
/// at one sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledWidth {
    pub t: f64,
    /// `ρ = ρ₀/√M`
    pub rho: f64,
    /// `dρ/dt`
    pub drho: f64,
    pub mass: f64,
    pub dmass: f64,
    pub gauge: f64,
}

/// Sampled classical data on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalTrajectory {
    pub t_grid: Vec<f64>,
    pub u0: Vec<f64>,
    pub du0: Vec<f64>,
    pub v0: Vec<f64>,
    pub dv0: Vec<f64>,
    /// Wronskian `Ω₀ = v̇₀u₀ − u̇₀v₀` evaluated from the initial conditions.
    pub omega0: f64,
    pub rho0: Vec<f64>,
    pub drho0: Vec<f64>,
    /// `τ(t) = ∫ Ω₀/ρ₀² dt'`, zero at the first sample.
    pub tau: Vec<f64>,
    pub u1: Vec<f64>,
    pub du1: Vec<f64>,
    /// `δ_{u1}(t) = ∫ (½w₀²u₁² − ½u̇₁²) dt'`, zero at the first sample.
    pub delta_u1: Vec<f64>,
    /// `θ₀` with `(u₀ − iv₀)/ρ₀ = e^{−iθ₀}` at the first sample.
    pub theta0: f64,
}

impl ClassicalTrajectory {
    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }

    pub fn dt(&self) -> f64 {
        if self.t_grid.len() < 2 {
            0.0
        } else {
            self.t_grid[1] - self.t_grid[0]
        }
    }

    pub fn t_start(&self) -> f64 {
        self.t_grid[0]
    }

    pub fn t_end(&self) -> f64 {
        self.t_grid[self.t_grid.len() - 1]
    }

    /// Index of the sample at time `t`, if `t` lies on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let dt = self.dt();
        if dt == 0.0 {
            return (t == self.t_grid[0]).then_some(0);
        }
        let k = ((t - self.t_start()) / dt).round();
        if k < 0.0 || k as usize >= self.len() {
            return None;
        }
        let k = k as usize;
        ((self.t_grid[k] - t).abs() <= 1e-9 * dt).then_some(k)
    }

    /// `e^{−is(τ(t_k)+θ₀)}`, the continuous branch of `((u₀ − iv₀)/ρ₀)^s`.
    pub fn phase_factor(&self, k: usize, s: f64) -> Complex64 {
        Complex64::from_polar(1.0, -s * (self.tau[k] + self.theta0))
    }

    /// Instantaneous Wronskian `v̇₀u₀ − u̇₀v₀` at sample `k`.
    pub fn wronskian_at(&self, k: usize) -> f64 {
        self.dv0[k] * self.u0[k] - self.du0[k] * self.v0[k]
    }

    /// Maximum relative deviation of the instantaneous Wronskian from `Ω₀`.
    pub fn wronskian_drift(&self) -> f64 {
        (0..self.len())
            .map(|k| ((self.wronskian_at(k) - self.omega0) / self.omega0).abs())
            .fold(0.0, f64::max)
    }

    /// Mass-scaled width at sample `k`.
    pub fn scaled_width(&self, k: usize, spec: &OscillatorSpec) -> ScaledWidth {
        let t = self.t_grid[k];
        let m = spec.mass.value(t);
        let dm = spec.mass.deriv(t);
        let sm = m.sqrt();
        ScaledWidth {
            t,
            rho: self.rho0[k] / sm,
            drho: self.drho0[k] / sm - self.rho0[k] * dm / (2.0 * m * sm),
            mass: m,
            dmass: dm,
            gauge: spec.gauge.value(t),
        }
    }
}

/// Integrates `ẍ + w₀²(t)x = 0` for two independent solutions and derives the
/// Ermakov quantities on a uniform grid of `n_samples` points.
///
/// `ics = (u₀, u̇₀, v₀, v̇₀)` at `t_span.0`.
pub fn solve_linear(
    spec: &OscillatorSpec,
    t_span: (f64, f64),
    ics: [f64; 4],
    n_samples: usize,
) -> Result<ClassicalTrajectory> {
    solve_linear_with(&Dopri5::default(), spec, t_span, ics, n_samples)
}

pub fn solve_linear_with(
    solver: &Dopri5,
    spec: &OscillatorSpec,
    t_span: (f64, f64),
    ics: [f64; 4],
    n_samples: usize,
) -> Result<ClassicalTrajectory> {
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::Input(format!("invalid time span ({t0}, {t1})")));
    }
    if n_samples < 2 {
        return Err(Error::Input("need at least two samples".into()));
    }
    let [u, du, v, dv] = ics;
    let omega0 = dv * u - du * v;
    let scale = (u * u + du * du) * (v * v + dv * dv);
    if !(omega0 > 0.0) || omega0.abs() <= 1e-14 * scale.sqrt() {
        return Err(Error::DegenerateSolutions(omega0));
    }

    let h = (t1 - t0) / (n_samples - 1) as f64;
    let mut times: Vec<f64> = (0..n_samples).map(|k| t0 + k as f64 * h).collect();
    times[n_samples - 1] = t1;

    let (cu, cv) = spec.u1_coeffs;
    let rhs = |t: f64, y: &[f64; 6]| {
        let w2 = spec.w0_sq.value(t);
        let r2 = y[0] * y[0] + y[2] * y[2];
        let u1 = cu * y[0] + cv * y[2];
        let du1 = cu * y[1] + cv * y[3];
        [
            y[1],
            -w2 * y[0],
            y[3],
            -w2 * y[2],
            omega0 / r2,
            0.5 * w2 * u1 * u1 - 0.5 * du1 * du1,
        ]
    };
    let states = solver.solve(rhs, [u, du, v, dv, 0.0, 0.0], &times)?;

    let n = states.len();
    let mut traj = ClassicalTrajectory {
        t_grid: times,
        u0: Vec::with_capacity(n),
        du0: Vec::with_capacity(n),
        v0: Vec::with_capacity(n),
        dv0: Vec::with_capacity(n),
        omega0,
        rho0: Vec::with_capacity(n),
        drho0: Vec::with_capacity(n),
        tau: Vec::with_capacity(n),
        u1: Vec::with_capacity(n),
        du1: Vec::with_capacity(n),
        delta_u1: Vec::with_capacity(n),
        theta0: v.atan2(u),
    };
    for y in &states {
        let rho = (y[0] * y[0] + y[2] * y[2]).sqrt();
        traj.u0.push(y[0]);
        traj.du0.push(y[1]);
        traj.v0.push(y[2]);
        traj.dv0.push(y[3]);
        traj.rho0.push(rho);
        traj.drho0.push((y[0] * y[1] + y[2] * y[3]) / rho);
        traj.tau.push(y[4]);
        traj.u1.push(cu * y[0] + cv * y[2]);
        traj.du1.push(cu * y[1] + cv * y[3]);
        traj.delta_u1.push(y[5]);
    }
    Ok(traj)
}

/// Generalized Wronskian `Ω₀ = M(v̇u − u̇v)` with `u = u₀/√M`, `v = v₀/√M`,
/// checked for constancy along the grid.
pub fn wronskian(traj: &ClassicalTrajectory, mass: &Profile) -> Result<f64> {
    let value_at = |k: usize| {
        let t = traj.t_grid[k];
        let m = mass.value(t);
        let dm = mass.deriv(t);
        let sm = m.sqrt();
        let (u, v) = (traj.u0[k] / sm, traj.v0[k] / sm);
        let corr = dm / (2.0 * m);
        let du = traj.du0[k] / sm - u * corr;
        let dv = traj.dv0[k] / sm - v * corr;
        m * (dv * u - du * v)
    };
    let w0 = value_at(0);
    for k in 1..traj.len() {
        let drift = ((value_at(k) - w0) / w0).abs();
        if drift > WRONSKIAN_TOL {
            return Err(Error::WronskianDrift {
                drift,
                tol: WRONSKIAN_TOL,
                t: traj.t_grid[k],
            });
        }
    }
    Ok(w0)
}

/// Fourth-order first derivative of uniformly sampled data, one-sided at the ends.
pub(crate) fn differentiate4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "need at least five samples");
    let mut d = vec![0.0; n];
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    let fwd0 =
        |g: &dyn Fn(usize) -> f64| (-25.0 * g(0) + 48.0 * g(1) - 36.0 * g(2) + 16.0 * g(3) - 3.0 * g(4)) / (12.0 * h);
    let fwd1 = |g: &dyn Fn(usize) -> f64| (-3.0 * g(0) - 10.0 * g(1) + 18.0 * g(2) - 6.0 * g(3) + g(4)) / (12.0 * h);
    d[0] = fwd0(&|j| f[j]);
    d[1] = fwd1(&|j| f[j]);
    d[n - 1] = -fwd0(&|j| f[n - 1 - j]);
    d[n - 2] = -fwd1(&|j| f[n - 1 - j]);
    d
}

/// `max_t |ρ̈₀ + w₀²ρ₀ − Ω₀²/ρ₀³|`, with `ρ̈₀` from a fourth-order stencil applied
/// to the analytic `ρ̇₀ = (u₀u̇₀ + v₀v̇₀)/ρ₀`.
pub fn ermakov_residual(traj: &ClassicalTrajectory, spec: &OscillatorSpec) -> f64 {
    if traj.len() < 5 {
        return f64::NAN;
    }
    let ddrho = differentiate4(&traj.drho0, traj.dt());
    let om2 = traj.omega0 * traj.omega0;
    (0..traj.len())
        .map(|k| {
            let r = traj.rho0[k];
            (ddrho[k] + spec.w0_sq.value(traj.t_grid[k]) * r - om2 / (r * r * r)).abs()
        })
        .fold(0.0, f64::max)
}

/// The reparametrized clock `τ(t)` with `τ(t₀) = 0`.
pub fn tau_of_t(traj: &ClassicalTrajectory) -> Result<Vec<f64>> {
    if let Some(k) = traj.rho0.iter().position(|&r| !(r > 0.0)) {
        return Err(Error::Domain(format!(
            "rho0 = {} is not positive at t = {}",
            traj.rho0[k], traj.t_grid[k]
        )));
    }
    Ok(traj.tau.clone())
}

/// `δ_{u1}(t)` with `δ(t₀) = 0`; identically zero when `u₁ = 0`.
pub fn delta_u1(traj: &ClassicalTrajectory, spec: &OscillatorSpec) -> Vec<f64> {
    if spec.u1_coeffs == (0.0, 0.0) {
        return vec![0.0; traj.len()];
    }
    traj.delta_u1.clone()
}
