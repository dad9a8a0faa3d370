//! Periodicity of the Ermakov width and the non-adiabatic geometric phase.

use serde::Serialize;

use num_complex::Complex64;

use crate::classical::{solve_linear, ClassicalTrajectory, OscillatorSpec};
use crate::error::{Error, Result};
use crate::operators::{expectation, HamiltonianModel};
use crate::state::ComplexSpline;
use crate::wavefunctions::{auto_grid_with, evaluate, Family, ModeSpec, POINTS_PER_WIDTH};

/// Joint relative tolerance on `(ρ, ρ̇)` for accepting a period.
pub const PERIOD_TOL: f64 = 1e-8;
/// Largest tolerated gap between the integral and expectation routes to `γₙ`.
pub const ROUTE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseReport {
    pub n: usize,
    pub alpha: f64,
    pub family: Family,
    /// Period `T'` of `ρ` (`T` or `2T`).
    pub t_prime: f64,
    /// Overall phase change `χₙ = −ν·τ(T')`.
    pub chi: f64,
    /// `(1/ħ)∫⟨H⟩dt` over one period.
    pub dynamical: f64,
    /// `γₙ` from the closed-form width integral.
    pub gamma: f64,
    /// `γₙ = χₙ + (1/ħ)∫⟨H⟩dt` from expectation quadrature.
    pub gamma_expectation: f64,
    pub route_gap: f64,
    pub periodicity_residual: f64,
}

impl PhaseReport {
    /// `γₙ/ν`, independent of `n` within a family.
    pub fn gamma_per_ladder(&self) -> f64 {
        self.gamma / ladder(self.family, self.n, self.alpha)
    }
}

fn ladder(family: Family, n: usize, alpha: f64) -> f64 {
    ModeSpec { n, alpha, family }.ladder()
}

/// Quadrature settings for [`geometric_phase`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOptions {
    /// Sample intervals per period for the classical re-solve.
    pub samples: usize,
    /// Every `stride`-th sample enters the expectation-value quadrature.
    pub stride: usize,
    /// Grid density for `⟨H⟩`; the energy error grows like `ν³h⁴`, so this is
    /// finer than the wavefunction default.
    pub points_per_width: f64,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self {
            samples: 1024,
            stride: 4,
            points_per_width: 2.0 * POINTS_PER_WIDTH,
        }
    }
}

fn sampler(traj: &ClassicalTrajectory, values: &[f64]) -> ComplexSpline {
    ComplexSpline::uniform(
        traj.t_start(),
        traj.dt(),
        values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
    )
}

fn value_at(traj: &ClassicalTrajectory, values: &[f64], spline: &ComplexSpline, t: f64) -> f64 {
    match traj.index_of(t) {
        Some(k) => values[k],
        None => spline.eval(t).re,
    }
}

/// `max(|ρ(t+T') − ρ(t)|, |ρ̇(t+T') − ρ̇(t)|)/max ρ` over the overlap window
/// `t ∈ [t₀, min(t₀+T', t_end−T')]`.
pub fn periodicity_residual(traj: &ClassicalTrajectory, t_prime: f64) -> Result<f64> {
    let t0 = traj.t_start();
    let last = (t0 + t_prime).min(traj.t_end() - t_prime);
    if last < t0 - 1e-9 * traj.dt() {
        return Err(Error::Input(format!(
            "trajectory span {} is shorter than the candidate period {t_prime}",
            traj.t_end() - t0
        )));
    }
    let rho_s = sampler(traj, &traj.rho0);
    let drho_s = sampler(traj, &traj.drho0);
    let scale = traj.rho0.iter().fold(0.0f64, |m, &r| m.max(r));
    let mut worst: f64 = 0.0;
    for k in 0..traj.len() {
        let t = traj.t_grid[k];
        if t > last + 1e-9 * traj.dt() {
            break;
        }
        let dr = (value_at(traj, &traj.rho0, &rho_s, t + t_prime) - traj.rho0[k]).abs();
        let dd = (value_at(traj, &traj.drho0, &drho_s, t + t_prime) - traj.drho0[k]).abs();
        worst = worst.max(dr.max(dd) / scale);
    }
    Ok(worst)
}

/// Returns `Some(T)` or `Some(2T)` when `ρ` repeats with that period, else `None`.
/// The trajectory must span at least `2T`.
pub fn detect_period(traj: &ClassicalTrajectory, period: f64) -> Result<Option<f64>> {
    if !(period > 0.0) {
        return Err(Error::Input(format!("declared period {period} must be positive")));
    }
    let span = traj.t_end() - traj.t_start();
    if span < 2.0 * period - 1e-9 * traj.dt() {
        return Err(Error::Input(format!(
            "trajectory span {span} is shorter than twice the declared period {period}"
        )));
    }
    for t_prime in [period, 2.0 * period] {
        if span < t_prime - 1e-9 * traj.dt() {
            continue;
        }
        if periodicity_residual(traj, t_prime)? < PERIOD_TOL {
            return Ok(Some(t_prime));
        }
    }
    Ok(None)
}

fn tau_at(traj: &ClassicalTrajectory, t: f64) -> Result<f64> {
    if t > traj.t_end() + 1e-9 * traj.dt() {
        return Err(Error::Input(format!("trajectory ends before t = {t}")));
    }
    Ok(value_at(traj, &traj.tau, &sampler(traj, &traj.tau), t))
}

/// `χₙ = −ν·∫₀^{T'} Ω₀/ρ₀² dt = −ν·τ(T')` with `ν = 2n+α+1`.
pub fn overall_phase(n: usize, alpha: f64, traj: &ClassicalTrajectory, t_prime: f64) -> Result<f64> {
    let nu = 2.0 * n as f64 + alpha + 1.0;
    Ok(-nu * tau_at(traj, traj.t_start() + t_prime)?)
}

/// Trapezoid rule on uniform samples; spectrally accurate for periodic integrands.
fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1]))
}

/// Geometric phase of `mode` over one period `T'` of `ρ`, by both routes.
pub fn geometric_phase(
    mode: &ModeSpec,
    traj: &ClassicalTrajectory,
    spec: &OscillatorSpec,
    t_prime: f64,
) -> Result<PhaseReport> {
    geometric_phase_with(mode, traj, spec, t_prime, &PhaseOptions::default())
}

pub fn geometric_phase_with(
    mode: &ModeSpec,
    traj: &ClassicalTrajectory,
    spec: &OscillatorSpec,
    t_prime: f64,
    opts: &PhaseOptions,
) -> Result<PhaseReport> {
    if mode.family == Family::Sho && !spec.is_unit_mass_gauge_free() {
        return Err(Error::Input(
            "the Hermite family requires unit mass and zero gauge".into(),
        ));
    }
    let spec = spec.clone().with_u1(0.0, 0.0);
    let t0 = traj.t_start();
    let ics = [traj.u0[0], traj.du0[0], traj.v0[0], traj.dv0[0]];
    let period = solve_linear(&spec, (t0, t0 + t_prime), ics, opts.samples + 1)?;
    let last = period.len() - 1;

    let scale = period.rho0.iter().fold(0.0f64, |m, &r| m.max(r));
    let periodicity = (period.rho0[last] - period.rho0[0])
        .abs()
        .max((period.drho0[last] - period.drho0[0]).abs())
        / scale;
    if periodicity > PERIOD_TOL {
        return Err(Error::Consistency(format!(
            "rho is not periodic with T' = {t_prime} (residual {periodicity:e})"
        )));
    }

    let nu = mode.ladder();
    let omega0 = period.omega0;
    let integrand: Vec<f64> = (0..period.len())
        .map(|k| {
            let w = period.scaled_width(k, &spec);
            w.mass * w.drho * w.drho + 2.0 * w.mass * w.gauge * w.rho * w.drho
        })
        .collect();
    let gamma = nu * trapezoid(&integrand, period.dt()) / omega0;
    let chi = -nu * period.tau[last];

    let ham = match mode.family {
        Family::Sho => HamiltonianModel::H0(spec.clone()),
        Family::InverseSquare => HamiltonianModel::Hin(spec.clone()),
    };
    let grid = auto_grid_with(&period, &spec, mode.family, mode.n, opts.points_per_width)?;
    let stride = opts.stride.max(1);
    let energies = (0..period.len())
        .step_by(stride)
        .map(|k| {
            let psi = evaluate(mode, &period, &spec, k, &grid)?;
            Ok(expectation(&ham.at(period.t_grid[k]), &psi)?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let dynamical = trapezoid(&energies, period.dt() * stride as f64) / spec.hbar;
    let gamma_expectation = chi + dynamical;
    let route_gap = (gamma - gamma_expectation).abs();
    if route_gap > ROUTE_TOL {
        return Err(Error::Consistency(format!(
            "geometric phase routes disagree: {gamma} vs {gamma_expectation}"
        )));
    }
    Ok(PhaseReport {
        n: mode.n,
        alpha: mode.alpha,
        family: mode.family,
        t_prime,
        chi,
        dynamical,
        gamma,
        gamma_expectation,
        route_gap,
        periodicity_residual: periodicity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Profile;
    use std::f64::consts::PI;

    #[test]
    fn constant_width_has_any_period() {
        let spec = OscillatorSpec::unit();
        let traj = solve_linear(&spec, (0.0, 4.0), [1.0, 0.0, 0.0, 1.0], 401).unwrap();
        assert_eq!(detect_period(&traj, 1.3).unwrap(), Some(1.3));
    }

    #[test]
    fn squeezed_unit_oscillator_has_period_pi() {
        let spec = OscillatorSpec::unit();
        let traj = solve_linear(&spec, (0.0, 2.0 * PI), [1.0, 0.0, 0.0, 2.0], 1001).unwrap();
        assert_eq!(detect_period(&traj, PI).unwrap(), Some(PI));
        assert_eq!(detect_period(&traj, PI / 2.0).unwrap(), Some(PI));
        assert_eq!(detect_period(&traj, 1.0).unwrap(), None);
    }

    #[test]
    fn short_span_rejected() {
        let spec = OscillatorSpec::unit();
        let traj = solve_linear(&spec, (0.0, 3.0), [1.0, 0.0, 0.0, 2.0], 301).unwrap();
        assert!(matches!(detect_period(&traj, PI), Err(Error::Input(_))));
    }

    #[test]
    fn overall_phase_constant_frequency() {
        let spec = OscillatorSpec::unit();
        let traj = solve_linear(&spec, (0.0, 2.0 * PI), [1.0, 0.0, 0.0, 1.0], 257).unwrap();
        let chi = overall_phase(0, 0.5, &traj, 2.0 * PI).unwrap();
        assert!((chi + 3.0 * PI).abs() < 1e-8);
        let chi3 = overall_phase(3, 0.5, &traj, 2.0 * PI).unwrap();
        assert!((chi3 / chi - 7.5 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn quasi_periodic_drive_fails_cleanly() {
        let spec = OscillatorSpec::new(Profile::mathieu(1.0, 0.2, 2.0));
        let traj = solve_linear(&spec, (0.0, 4.0 * PI), [1.0, 0.0, 0.0, 1.0], 2001).unwrap();
        assert_eq!(detect_period(&traj, PI).unwrap(), None);
        let mode = ModeSpec::inverse_square(0, 1.0, 1.0).unwrap();
        assert!(matches!(
            geometric_phase(&mode, &traj, &spec, PI),
            Err(Error::Consistency(_))
        ));
    }
}
