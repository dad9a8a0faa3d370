//! Pointwise actions of the intertwining unitaries.
//!
//! Every operator here is a Gaussian chirp `exp(iκx²/ħ)` to the left of a
//! dilation `ψ(x) ↦ √s·ψ(s·x)` (or, for `U_f`, of a translation). The chirp is
//! applied after the coordinate change, preserving the operator ordering; the
//! two factors do not commute.

use num_complex::Complex64;

use crate::classical::ClassicalTrajectory;
use crate::error::{Error, Result};
use crate::special::Domain;
use crate::state::GridWavefunction;

/// `√s · exp(iκx²/ħ) · ψ(s·x)`
fn chirped_dilation(psi: &GridWavefunction, s: f64, kappa: f64) -> Result<GridWavefunction> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("dilation factor {s} must be positive")));
    }
    let xs: Vec<f64> = psi.grid.nodes.iter().map(|x| s * x).collect();
    let sampled = psi.resample(&xs)?;
    let pre = s.sqrt();
    let values = psi
        .grid
        .nodes
        .iter()
        .zip(sampled)
        .map(|(&x, v)| v * Complex64::from_polar(pre, kappa * x * x / psi.hbar))
        .collect();
    Ok(psi.with_values(values))
}

/// `U_w0(ρ, Ω)ψ (x) = (Ω^{1/4}/√ρ) e^{iρ̇x²/(2ħρ)} ψ(√Ω x/ρ)`.
pub fn apply_u_w0(psi: &GridWavefunction, rho: f64, drho: f64, omega: f64) -> Result<GridWavefunction> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("rho = {rho} must be positive")));
    }
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("Omega = {omega} must be positive")));
    }
    chirped_dilation(psi, omega.sqrt() / rho, drho / (2.0 * rho))
}

/// `U_f ψ (x) = e^{(i/ħ)(u̇₁x + δ)} ψ(x − u₁)`.
pub fn apply_u_f(psi: &GridWavefunction, u1: f64, du1: f64, delta: f64) -> Result<GridWavefunction> {
    if psi.grid.domain != Domain::FullLine {
        return Err(Error::Domain("displacement requires a full-line grid".into()));
    }
    let xs: Vec<f64> = psi.grid.nodes.iter().map(|x| x - u1).collect();
    let sampled = psi.resample(&xs)?;
    let values = psi
        .grid
        .nodes
        .iter()
        .zip(sampled)
        .map(|(&x, v)| v * Complex64::from_polar(1.0, (du1 * x + delta) / psi.hbar))
        .collect();
    Ok(psi.with_values(values))
}

/// Squeeze operator of the unit oscillator; same form as [`apply_u_w0`] with
/// `(ρ_s, dρ_s/dτ, Ω_s)`.
pub fn apply_u_s(psi: &GridWavefunction, rho_s: f64, drho_s: f64, omega_s: f64) -> Result<GridWavefunction> {
    apply_u_w0(psi, rho_s, drho_s, omega_s)
}

/// `U_g ψ (x) = M^{1/4} e^{(i/ħ)(Ma − Ṁ/4)x²} ψ(√M x)`.
pub fn apply_u_g(psi: &GridWavefunction, mass: f64, dmass: f64, a: f64) -> Result<GridWavefunction> {
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("mass = {mass} must be positive")));
    }
    chirped_dilation(psi, mass.sqrt(), mass * a - dmass / 4.0)
}

/// Ermakov width of the unit-frequency oscillator built from the solutions
/// `u_s(τ) = u cos τ + u̇ sin τ`, `v_s(τ) = v cos τ + v̇ sin τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSqueeze {
    pub u: f64,
    pub du: f64,
    pub v: f64,
    pub dv: f64,
}

impl UnitSqueeze {
    /// `ρ_s ≡ √Ω_s`, for which `U_s` is the identity.
    pub fn trivial(omega_s: f64) -> Self {
        let r = omega_s.sqrt();
        Self {
            u: r,
            du: 0.0,
            v: 0.0,
            dv: r,
        }
    }

    fn solutions(&self, tau: f64) -> (f64, f64, f64, f64) {
        let (s, c) = tau.sin_cos();
        (
            self.u * c + self.du * s,
            -self.u * s + self.du * c,
            self.v * c + self.dv * s,
            -self.v * s + self.dv * c,
        )
    }

    pub fn omega(&self) -> f64 {
        self.dv * self.u - self.du * self.v
    }

    pub fn rho(&self, tau: f64) -> f64 {
        let (u, _, v, _) = self.solutions(tau);
        (u * u + v * v).sqrt()
    }

    /// `dρ_s/dτ`
    pub fn drho(&self, tau: f64) -> f64 {
        let (u, du, v, dv) = self.solutions(tau);
        (u * du + v * dv) / (u * u + v * v).sqrt()
    }

    /// `ρ_s'' + ρ_s − Ω_s²/ρ_s³`, evaluated analytically.
    pub fn ermakov_residual(&self, tau: f64) -> f64 {
        let (u, du, v, dv) = self.solutions(tau);
        let r = (u * u + v * v).sqrt();
        let dr = (u * du + v * dv) / r;
        let ddr = (du * du - u * u + dv * dv - v * v) / r - dr * dr / r;
        let om = self.omega();
        ddr + r - om * om / (r * r * r)
    }
}

/// Largest pointwise gap between `U_w0(ρ₀,Ω₀)U_s ψ` and `U_w0(ρ₀ρ_s, Ω₀Ω_s)ψ`
/// over the supplied states, each taken at the trajectory sample matching its
/// time label.
pub fn check_composition_law(
    traj: &ClassicalTrajectory,
    squeeze: &UnitSqueeze,
    psi_set: &[GridWavefunction],
) -> Result<f64> {
    let omega_s = squeeze.omega();
    if !(omega_s > 0.0) {
        return Err(Error::DegenerateSolutions(omega_s));
    }
    let mut worst: f64 = 0.0;
    for psi in psi_set {
        let k = traj
            .index_of(psi.t)
            .ok_or_else(|| Error::Input(format!("state time {} is not a trajectory sample", psi.t)))?;
        let tau = traj.tau[k];
        let resid = squeeze.ermakov_residual(tau).abs();
        if resid > 1e-10 {
            return Err(Error::Consistency(format!(
                "rho_s fails its Ermakov equation by {resid:e}"
            )));
        }
        let (rho0, drho0, omega0) = (traj.rho0[k], traj.drho0[k], traj.omega0);
        let (rho_s, drho_s) = (squeeze.rho(tau), squeeze.drho(tau));

        let lhs = apply_u_w0(&apply_u_s(psi, rho_s, drho_s, omega_s)?, rho0, drho0, omega0)?;
        // d(ρ₀ρ_s)/dt with dτ/dt = Ω₀/ρ₀²
        let drho_prod = drho0 * rho_s + rho0 * drho_s * omega0 / (rho0 * rho0);
        let rhs = apply_u_w0(psi, rho0 * rho_s, drho_prod, omega0 * omega_s)?;
        let gap = lhs
            .values
            .iter()
            .zip(&rhs.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(gap);
    }
    Ok(worst)
}
