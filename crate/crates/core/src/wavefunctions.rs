//! Closed-form wavefunction families on grids.
//!
//! Non-integer powers `((u − iv)/ρ)^s` are never taken on the principal
//! branch; they are `e^{−is(τ(t)+θ₀)}`, which stays continuous and winds
//! correctly through any number of oscillations.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{ClassicalTrajectory, OscillatorSpec};
use crate::error::{Error, Result};
use crate::special::{build_grid, hermite_function, laguerre_function, Domain, QuadratureGrid};
use crate::state::{GridWavefunction, SUPPORT_TOL};
use crate::transforms::{apply_u_f, apply_u_g, apply_u_w0};

/// The two wavefunction families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Hermite family `ψₙ⁰` of `H₀` on the full line.
    Sho,
    /// Laguerre family `φₙ` of `H_in` on the half line.
    InverseSquare,
}

impl Family {
    pub fn domain(self) -> Domain {
        match self {
            Family::Sho => Domain::FullLine,
            Family::InverseSquare => Domain::HalfLine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub n: usize,
    /// Inverse-square index; ignored for [`Family::Sho`].
    pub alpha: f64,
    pub family: Family,
}

impl ModeSpec {
    pub fn sho(n: usize) -> Self {
        Self {
            n,
            alpha: 0.5,
            family: Family::Sho,
        }
    }

    pub fn inverse_square(n: usize, g: f64, hbar: f64) -> Result<Self> {
        Ok(Self {
            n,
            alpha: alpha_of_g(g, hbar)?,
            family: Family::InverseSquare,
        })
    }

    pub fn for_spec(n: usize, family: Family, spec: &OscillatorSpec) -> Result<Self> {
        match family {
            Family::Sho => Ok(Self::sho(n)),
            Family::InverseSquare => Self::inverse_square(n, spec.g, spec.hbar),
        }
    }

    /// Eigenvalue of the static Hamiltonian in units of `ħ`: `n + ½` or `2n + α + 1`.
    pub fn ladder(&self) -> f64 {
        match self.family {
            Family::Sho => self.n as f64 + 0.5,
            Family::InverseSquare => 2.0 * self.n as f64 + self.alpha + 1.0,
        }
    }
}

/// `α = ½√(1 + 8g/ħ²)`, defined for `g > −ħ²/8`.
pub fn alpha_of_g(g: f64, hbar: f64) -> Result<f64> {
    if !(hbar > 0.0) {
        return Err(Error::Domain(format!("hbar = {hbar} must be positive")));
    }
    let arg = 1.0 + 8.0 * g / (hbar * hbar);
    if !(arg > 0.0) {
        return Err(Error::Domain(format!(
            "inverse-square coupling g = {g} must exceed -hbar^2/8"
        )));
    }
    Ok(0.5 * arg.sqrt())
}

fn require_domain(grid: &QuadratureGrid, domain: Domain) -> Result<()> {
    if grid.domain != domain {
        Err(Error::Domain(format!(
            "expected a {domain:?} grid, got {:?}",
            grid.domain
        )))
    } else {
        Ok(())
    }
}

fn supported(psi: GridWavefunction) -> Result<GridWavefunction> {
    psi.check_support(SUPPORT_TOL)?;
    Ok(psi)
}

/// Stationary oscillator state `ψₙ^s(x, τ)` of `H^s = ½(p² + x²)`.
pub fn psi_s(n: usize, grid: &Arc<QuadratureGrid>, tau: f64, hbar: f64) -> Result<GridWavefunction> {
    let scale = hbar.powf(-0.25);
    let phase = Complex64::from_polar(scale, -(n as f64 + 0.5) * tau);
    let values = grid
        .nodes
        .iter()
        .map(|&x| hermite_function(n, x / hbar.sqrt()).map(|h| phase * h))
        .collect::<Result<Vec<_>>>()?;
    GridWavefunction::new(Arc::clone(grid), values, tau, hbar)
}

/// `ψₙ⁰(x, t_k)` of the time-dependent oscillator, including the displacement by `u₁`.
pub fn psi_0(
    n: usize,
    traj: &ClassicalTrajectory,
    spec: &OscillatorSpec,
    k: usize,
    grid: &Arc<QuadratureGrid>,
) -> Result<GridWavefunction> {
    require_domain(grid, Domain::FullLine)?;
    let hbar = spec.hbar;
    let (rho, drho, omega) = (traj.rho0[k], traj.drho0[k], traj.omega0);
    let (u1, du1, delta) = (traj.u1[k], traj.du1[k], traj.delta_u1[k]);
    let amp = (omega / hbar).powf(0.25) / rho.sqrt();
    let xi_scale = (omega / hbar).sqrt() / rho;
    let global = traj.phase_factor(k, n as f64 + 0.5) * amp;
    let values = grid
        .nodes
        .iter()
        .map(|&x| {
            let y = x - u1;
            let h = hermite_function(n, xi_scale * y)?;
            let phase = (du1 * x + delta + 0.5 * drho / rho * y * y) / hbar;
            Ok(global * Complex64::from_polar(h, phase))
        })
        .collect::<Result<Vec<_>>>()?;
    supported(GridWavefunction::new(Arc::clone(grid), values, traj.t_grid[k], hbar)?)
}

/// Stationary state `φₙ^s(x, τ)` of `H_in^s = ½(p² + x²) + g/x²` on the half line.
pub fn phi_s(n: usize, alpha: f64, grid: &Arc<QuadratureGrid>, tau: f64, hbar: f64) -> Result<GridWavefunction> {
    require_domain(grid, Domain::HalfLine)?;
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    let phase = Complex64::from_polar((4.0 / hbar).powf(0.25), -(2.0 * n as f64 + alpha + 1.0) * tau);
    let values = grid
        .nodes
        .iter()
        .map(|&x| {
            let y = x * x / hbar;
            laguerre_function(n, alpha, y).map(|l| phase * (y.powf(0.25) * l))
        })
        .collect::<Result<Vec<_>>>()?;
    GridWavefunction::new(Arc::clone(grid), values, tau, hbar)
}

/// `φₙ(x, t_k)` of the generalized Hamiltonian `H_in` with mass `M(t)` and gauge `a(t)`.
pub fn phi(
    n: usize,
    traj: &ClassicalTrajectory,
    spec: &OscillatorSpec,
    k: usize,
    grid: &Arc<QuadratureGrid>,
) -> Result<GridWavefunction> {
    require_domain(grid, Domain::HalfLine)?;
    let hbar = spec.hbar;
    let alpha = alpha_of_g(spec.g, hbar)?;
    let w = traj.scaled_width(k, spec);
    let omega = traj.omega0;
    let y_scale = omega / (hbar * w.rho * w.rho);
    let amp = (4.0 * y_scale).powf(0.25);
    let chirp = 0.5 * (w.mass * w.drho / w.rho + 2.0 * w.mass * w.gauge) / hbar;
    let global = traj.phase_factor(k, 2.0 * n as f64 + alpha + 1.0) * amp;
    let values = grid
        .nodes
        .iter()
        .map(|&x| {
            let y = y_scale * x * x;
            let l = laguerre_function(n, alpha, y)?;
            Ok(global * Complex64::from_polar(y.powf(0.25) * l, chirp * x * x))
        })
        .collect::<Result<Vec<_>>>()?;
    supported(GridWavefunction::new(Arc::clone(grid), values, traj.t_grid[k], hbar)?)
}

/// Evaluates mode `mode` of its family at sample `k`.
pub fn evaluate(
    mode: &ModeSpec,
    traj: &ClassicalTrajectory,
    spec: &OscillatorSpec,
    k: usize,
    grid: &Arc<QuadratureGrid>,
) -> Result<GridWavefunction> {
    match mode.family {
        Family::Sho => psi_0(mode.n, traj, spec, k, grid),
        Family::InverseSquare => phi(mode.n, traj, spec, k, grid),
    }
}

/// `U_f U_w0 ψₙ^s` evaluated through the operator pipeline instead of the closed form.
pub fn psi_0_via_transforms(
    n: usize,
    traj: &ClassicalTrajectory,
    spec: &OscillatorSpec,
    k: usize,
    grid: &Arc<QuadratureGrid>,
) -> Result<GridWavefunction> {
    let base = psi_s(n, grid, traj.tau[k] + traj.theta0, spec.hbar)?;
    let squeezed = apply_u_w0(&base, traj.rho0[k], traj.drho0[k], traj.omega0)?;
    let mut out = apply_u_f(&squeezed, traj.u1[k], traj.du1[k], traj.delta_u1[k])?;
    out.t = traj.t_grid[k];
    Ok(out)
}

/// `U_g U_w0 φₙ^s` evaluated through the operator pipeline.
pub fn phi_via_transforms(
    n: usize,
    traj: &ClassicalTrajectory,
    spec: &OscillatorSpec,
    k: usize,
    grid: &Arc<QuadratureGrid>,
) -> Result<GridWavefunction> {
    let alpha = alpha_of_g(spec.g, spec.hbar)?;
    let base = phi_s(n, alpha, grid, traj.tau[k] + traj.theta0, spec.hbar)?;
    let squeezed = apply_u_w0(&base, traj.rho0[k], traj.drho0[k], traj.omega0)?;
    let w = traj.scaled_width(k, spec);
    let mut out = apply_u_g(&squeezed, w.mass, w.dmass, w.gauge)?;
    out.t = traj.t_grid[k];
    Ok(out)
}

/// Points per narrowest width used by [`auto_grid`].
pub const POINTS_PER_WIDTH: f64 = 40.0;

/// Grid wide enough for modes `0..=n_max` at every trajectory sample and fine
/// enough that `Δx ≤ width/40` at the narrowest instant.
pub fn auto_grid(
    traj: &ClassicalTrajectory,
    spec: &OscillatorSpec,
    family: Family,
    n_max: usize,
) -> Result<Arc<QuadratureGrid>> {
    auto_grid_with(traj, spec, family, n_max, POINTS_PER_WIDTH)
}

pub fn auto_grid_with(
    traj: &ClassicalTrajectory,
    spec: &OscillatorSpec,
    family: Family,
    n_max: usize,
    points_per_width: f64,
) -> Result<Arc<QuadratureGrid>> {
    let hbar = spec.hbar;
    let alpha = match family {
        Family::Sho => 0.5,
        Family::InverseSquare => alpha_of_g(spec.g, hbar)?,
    };
    let mut w_min = f64::INFINITY;
    let mut w_max: f64 = 0.0;
    let mut shift: f64 = 0.0;
    let mut chirp: f64 = 0.0;
    for k in 0..traj.len() {
        let (rho, c) = match family {
            Family::Sho => (traj.rho0[k], traj.drho0[k] / traj.rho0[k]),
            Family::InverseSquare => {
                let w = traj.scaled_width(k, spec);
                (w.rho, w.mass * w.drho / w.rho + 2.0 * w.mass * w.gauge)
            }
        };
        let width = rho * (hbar / traj.omega0).sqrt();
        w_min = w_min.min(width);
        w_max = w_max.max(width);
        chirp = chirp.max(c.abs());
        if family == Family::Sho {
            shift = shift.max(traj.u1[k].abs());
        }
    }
    let reach = 8.0 + (4.0 * n_max as f64 + 2.0 * alpha + 2.0).sqrt();
    let x_max = shift + reach * w_max;
    let mut dx = w_min / points_per_width;
    // local wavenumber of the chirp, (c·x + u̇₁)/ħ, resolved by ≥ 20 points per wavelength
    let du1_max = if family == Family::Sho {
        traj.du1.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        0.0
    };
    let k_max = (chirp * x_max + du1_max) / hbar;
    if k_max > 0.0 {
        dx = dx.min(std::f64::consts::PI / (10.0 * k_max));
    }
    let n = match family {
        Family::Sho => {
            let n = (2.0 * x_max / dx).ceil() as usize + 1;
            n | 1
        }
        Family::InverseSquare => (x_max / dx).ceil() as usize,
    };
    Ok(Arc::new(build_grid(family.domain(), x_max, n)?))
}
