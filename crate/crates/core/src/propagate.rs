//! Crank–Nicolson reference propagator for the time-dependent Schrödinger
//! equation, independent of every closed-form construction in this crate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{GridOperator, HamiltonianModel};
use crate::special::Domain;
use crate::state::GridWavefunction;

/// Norm drift above which [`evolve`] reports a stability error.
pub const NORM_DRIFT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_span: (f64, f64),
    /// Keep every `record_every`-th state; the final state is always kept.
    pub record_every: usize,
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_span: (f64, f64)) -> Self {
        Self {
            dt,
            t_span,
            record_every: 1,
        }
    }

    pub fn recording_every(mut self, every: usize) -> Self {
        self.record_every = every.max(1);
        self
    }

    /// Number of steps; the step is shrunk slightly so the span is covered exactly.
    pub fn n_steps(&self) -> usize {
        ((self.t_span.1 - self.t_span.0) / self.dt).round().max(1.0) as usize
    }
}

/// Tridiagonal Hamiltonian with zero Dirichlet values beyond both grid ends
/// (and at `x = 0` on the half line).
struct Tridiagonal {
    lower: Vec<Complex64>,
    diag: Vec<Complex64>,
    upper: Vec<Complex64>,
}

fn assemble(ham: &HamiltonianModel, t: f64, psi: &GridWavefunction) -> Result<Tridiagonal> {
    let form = ham.at(t).form();
    let grid = &psi.grid;
    if form.inv_x2 != 0.0 && grid.domain != Domain::HalfLine {
        return Err(Error::Domain("an x^-2 term requires a half-line grid".into()));
    }
    let hbar = psi.hbar;
    let h = grid.spacing;
    let x = &grid.nodes;
    let n = x.len();
    let kin = hbar * hbar * form.p2 / (h * h);
    let mut lower = vec![Complex64::new(0.0, 0.0); n];
    let mut diag = vec![Complex64::new(0.0, 0.0); n];
    let mut upper = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        let mut d = 2.0 * kin + form.x2 * x[j] * x[j];
        if form.inv_x2 != 0.0 {
            d += form.inv_x2 / (x[j] * x[j]);
        }
        diag[j] = Complex64::new(d, 0.0);
        // (xp + px) → −iħ[(x_j + x_{j+1})ψ_{j+1} − (x_j + x_{j−1})ψ_{j−1}]/(2h)
        if j + 1 < n {
            let s = (x[j] + x[j + 1]) / (2.0 * h);
            upper[j] = Complex64::new(-kin, -hbar * form.dilation * s);
        }
        if j > 0 {
            let s = (x[j] + x[j - 1]) / (2.0 * h);
            lower[j] = Complex64::new(-kin, hbar * form.dilation * s);
        }
    }
    Ok(Tridiagonal { lower, diag, upper })
}

fn crank_nicolson_step(m: &Tridiagonal, psi: &[Complex64], dt: f64, hbar: f64) -> Vec<Complex64> {
    let n = psi.len();
    let c = Complex64::new(0.0, 0.5 * dt / hbar);
    // rhs = (1 − i dt H/2ħ) ψ
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        let mut hpsi = m.diag[j] * psi[j];
        if j > 0 {
            hpsi += m.lower[j] * psi[j - 1];
        }
        if j + 1 < n {
            hpsi += m.upper[j] * psi[j + 1];
        }
        rhs[j] = psi[j] - c * hpsi;
    }
    // solve (1 + i dt H/2ħ) ψ' = rhs
    let mut cp = vec![Complex64::new(0.0, 0.0); n];
    let mut dp = vec![Complex64::new(0.0, 0.0); n];
    let one = Complex64::new(1.0, 0.0);
    for j in 0..n {
        let a = if j > 0 {
            c * m.lower[j]
        } else {
            Complex64::new(0.0, 0.0)
        };
        let b = one + c * m.diag[j];
        let up = c * m.upper[j];
        let denom = if j > 0 { b - a * cp[j - 1] } else { b };
        cp[j] = up / denom;
        dp[j] = if j > 0 {
            (rhs[j] - a * dp[j - 1]) / denom
        } else {
            rhs[j] / denom
        };
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    out[n - 1] = dp[n - 1];
    for j in (0..n - 1).rev() {
        out[j] = dp[j] - cp[j] * out[j + 1];
    }
    out
}

/// Propagates `psi0` over `cfg.t_span`, evaluating `H` at each half step.
pub fn evolve(psi0: &GridWavefunction, ham: &HamiltonianModel, cfg: &EvolutionConfig) -> Result<Vec<GridWavefunction>> {
    if !(cfg.dt > 0.0) || !(cfg.t_span.1 > cfg.t_span.0) {
        return Err(Error::Input(format!(
            "invalid evolution config: dt = {}, span = {:?}",
            cfg.dt, cfg.t_span
        )));
    }
    let n_steps = cfg.n_steps();
    let dt = (cfg.t_span.1 - cfg.t_span.0) / n_steps as f64;
    let norm0 = psi0.norm();
    let hbar = psi0.hbar;
    let every = cfg.record_every.max(1);

    let mut current = psi0.clone();
    current.t = cfg.t_span.0;
    let mut out = vec![current.clone()];
    for step in 0..n_steps {
        let t = cfg.t_span.0 + step as f64 * dt;
        let m = assemble(ham, t + 0.5 * dt, &current)?;
        let next = crank_nicolson_step(&m, &current.values, dt, hbar);
        current = current.with_values(next);
        current.t = if step + 1 == n_steps { cfg.t_span.1 } else { t + dt };
        let drift = (current.norm() - norm0).abs() / norm0;
        if drift > NORM_DRIFT_TOL || !drift.is_finite() {
            return Err(Error::Stability { drift, t: current.t });
        }
        if (step + 1) % every == 0 || step + 1 == n_steps {
            out.push(current.clone());
        }
    }
    Ok(out)
}

/// `|⟨a|b⟩|/(‖a‖‖b‖)`, blind to a global phase.
pub fn fidelity(a: &GridWavefunction, b: &GridWavefunction) -> Result<f64> {
    if a.values.len() != b.values.len() {
        return Err(Error::Input("fidelity requires states on the same grid".into()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Input("fidelity of a zero-norm state".into()));
    }
    Ok((a.inner(b).norm() / (na * nb)).min(1.0))
}
