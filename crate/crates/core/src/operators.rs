//! Hamiltonians and exact invariants as grid operators, expectation values,
//! and the numerical Schrödinger / invariance checks.
//!
//! Every operator in this module is a quadratic form
//! `A·p² + B·(xp+px) + C·x² + D/x²`, realized with fourth-order finite
//! differences for `p = −iħ∂ₓ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{ClassicalTrajectory, OscillatorSpec};
use crate::error::{Error, Result};
use crate::special::Domain;
use crate::state::{GridWavefunction, SUPPORT_TOL};

/// Imaginary part of an expectation value above which a Hermiticity warning is logged.
pub const HERMITICITY_TOL: f64 = 1e-6;

/// `p2·p² + dilation·(xp+px) + x2·x² + inv_x2/x²`
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadraticForm {
    pub p2: f64,
    pub dilation: f64,
    pub x2: f64,
    pub inv_x2: f64,
}

impl QuadraticForm {
    pub fn position_squared() -> Self {
        Self {
            x2: 1.0,
            ..Self::default()
        }
    }
}

pub trait GridOperator {
    fn form(&self) -> QuadraticForm;
}

impl GridOperator for QuadraticForm {
    fn form(&self) -> QuadraticForm {
        *self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HamiltonianKind {
    /// `p²/2 + w₀²x²/2`
    H0,
    /// `p²/2M − a(xp+px) + ½Mc x² + g/(Mx²)`
    Hin,
    /// `½(p² + x²)`
    Hs,
    /// `½(p² + x²) + g/x²`
    HinS,
}

/// Snapshot of a Hamiltonian's coefficients at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSpec {
    pub which: HamiltonianKind,
    pub w0_sq: f64,
    pub mass: f64,
    pub dmass: f64,
    pub a: f64,
    pub c: f64,
    pub g: f64,
    pub hbar: f64,
}

impl HamiltonianSpec {
    pub fn h_s(hbar: f64) -> Self {
        Self {
            which: HamiltonianKind::Hs,
            w0_sq: 1.0,
            mass: 1.0,
            dmass: 0.0,
            a: 0.0,
            c: 1.0,
            g: 0.0,
            hbar,
        }
    }

    pub fn h_in_s(g: f64, hbar: f64) -> Self {
        Self {
            which: HamiltonianKind::HinS,
            g,
            ..Self::h_s(hbar)
        }
    }

    pub fn h0(spec: &OscillatorSpec, t: f64) -> Self {
        let w = spec.w0_sq.value(t);
        Self {
            which: HamiltonianKind::H0,
            w0_sq: w,
            c: w,
            ..Self::h_s(spec.hbar)
        }
    }

    pub fn h_in(spec: &OscillatorSpec, t: f64) -> Self {
        Self {
            which: HamiltonianKind::Hin,
            w0_sq: spec.w0_sq.value(t),
            mass: spec.mass.value(t),
            dmass: spec.mass.deriv(t),
            a: spec.gauge.value(t),
            c: spec.c(t),
            g: spec.g,
            hbar: spec.hbar,
        }
    }
}

impl GridOperator for HamiltonianSpec {
    fn form(&self) -> QuadraticForm {
        match self.which {
            HamiltonianKind::H0 => QuadraticForm {
                p2: 0.5,
                x2: 0.5 * self.w0_sq,
                ..QuadraticForm::default()
            },
            HamiltonianKind::Hin => QuadraticForm {
                p2: 0.5 / self.mass,
                dilation: -self.a,
                x2: 0.5 * self.mass * self.c,
                inv_x2: self.g / self.mass,
            },
            HamiltonianKind::Hs => QuadraticForm {
                p2: 0.5,
                x2: 0.5,
                ..QuadraticForm::default()
            },
            HamiltonianKind::HinS => QuadraticForm {
                p2: 0.5,
                x2: 0.5,
                inv_x2: self.g,
                ..QuadraticForm::default()
            },
        }
    }
}

/// A Hamiltonian as a function of time.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianModel {
    Static(HamiltonianSpec),
    /// `H₀(t)` of the given oscillator (mass and gauge ignored).
    H0(OscillatorSpec),
    /// `H_in(t)` of the given oscillator.
    Hin(OscillatorSpec),
}

impl HamiltonianModel {
    pub fn at(&self, t: f64) -> HamiltonianSpec {
        match self {
            HamiltonianModel::Static(h) => *h,
            HamiltonianModel::H0(spec) => HamiltonianSpec::h0(spec, t),
            HamiltonianModel::Hin(spec) => HamiltonianSpec::h_in(spec, t),
        }
    }

    pub fn hbar(&self) -> f64 {
        match self {
            HamiltonianModel::Static(h) => h.hbar,
            HamiltonianModel::H0(spec) | HamiltonianModel::Hin(spec) => spec.hbar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvariantFamily {
    I0,
    Iin,
}

/// `I = (1/2Ω)[(Ωx/ρ)² + (ρp − Kx)² + 2ρ²g/x²]` with `K = Mρ̇ + 2Maρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticInvariant {
    pub rho: f64,
    pub drho: f64,
    pub omega0: f64,
    pub mass: f64,
    pub a: f64,
    pub g: f64,
    pub hbar: f64,
    pub family: InvariantFamily,
}

impl QuadraticInvariant {
    /// `I₀` built from `ρ₀` at sample `k` (unit mass, no gauge, `u₁ = 0`).
    pub fn i0(traj: &ClassicalTrajectory, k: usize, hbar: f64) -> Self {
        Self {
            rho: traj.rho0[k],
            drho: traj.drho0[k],
            omega0: traj.omega0,
            mass: 1.0,
            a: 0.0,
            g: 0.0,
            hbar,
            family: InvariantFamily::I0,
        }
    }

    /// `I_in` built from `ρ = ρ₀/√M` at sample `k`.
    pub fn i_in(traj: &ClassicalTrajectory, spec: &OscillatorSpec, k: usize) -> Self {
        let w = traj.scaled_width(k, spec);
        Self {
            rho: w.rho,
            drho: w.drho,
            omega0: traj.omega0,
            mass: w.mass,
            a: w.gauge,
            g: spec.g,
            hbar: spec.hbar,
            family: InvariantFamily::Iin,
        }
    }
}

impl GridOperator for QuadraticInvariant {
    fn form(&self) -> QuadraticForm {
        let (rho, om) = (self.rho, self.omega0);
        let (mass, a, g) = match self.family {
            InvariantFamily::I0 => (1.0, 0.0, 0.0),
            InvariantFamily::Iin => (self.mass, self.a, self.g),
        };
        let k = mass * self.drho + 2.0 * mass * a * rho;
        QuadraticForm {
            p2: rho * rho / (2.0 * om),
            dilation: -rho * k / (2.0 * om),
            x2: (om * om / (rho * rho) + k * k) / (2.0 * om),
            inv_x2: rho * rho * g / om,
        }
    }
}

/// Fourth-order first and second derivatives with zero extension beyond the
/// outer edges and the anchor `ψ(0) = 0` on half-line grids.
fn derivatives(values: &[Complex64], h: f64, domain: Domain) -> (Vec<Complex64>, Vec<Complex64>) {
    let zero = Complex64::new(0.0, 0.0);
    let offset = match domain {
        Domain::FullLine => 0,
        Domain::HalfLine => 1,
    };
    let n = values.len();
    let f = |i: isize| -> Complex64 {
        let j = i - offset as isize;
        if i < 0 || j < 0 || j as usize >= n {
            zero
        } else {
            values[j as usize]
        }
    };
    let mut d1 = vec![zero; n];
    let mut d2 = vec![zero; n];
    for j in 0..n {
        let i = (j + offset) as isize;
        if domain == Domain::HalfLine && j == 0 {
            // off-centre stencils on nodes 0..5, with f(0) = 0
            d1[j] = (f(0) * -3.0 - f(1) * 10.0 + f(2) * 18.0 - f(3) * 6.0 + f(4)) / (12.0 * h);
            d2[j] = (f(0) * 10.0 - f(1) * 15.0 - f(2) * 4.0 + f(3) * 14.0 - f(4) * 6.0 + f(5)) / (12.0 * h * h);
        } else {
            d1[j] = (f(i - 2) - f(i - 1) * 8.0 + f(i + 1) * 8.0 - f(i + 2)) / (12.0 * h);
            d2[j] = (-f(i - 2) + f(i - 1) * 16.0 - f(i) * 30.0 + f(i + 1) * 16.0 - f(i + 2)) / (12.0 * h * h);
        }
    }
    (d1, d2)
}

/// Nodes next to the origin that use [`factored_derivatives`]; further out the
/// plain central stencils are accurate and keep the operator symmetric.
const FACTORED_NODES: usize = 8;

/// Derivatives of `ψ = x^s·χ` on a half-line grid, with `χ` differenced
/// through its even extension. States of an `x⁻²` potential vanish like
/// `x^s` with non-integer `s`, which the plain stencils resolve only to
/// order `h^{2s−1}`; `χ` is smooth and even, so this stays fourth order.
/// Returns `(ψ', ψ'', (xψ)')`.
fn factored_derivatives(
    values: &[Complex64],
    nodes: &[f64],
    h: f64,
    s: f64,
) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let n = values.len();
    let chi: Vec<Complex64> = values.iter().zip(nodes).map(|(v, x)| v / x.powf(s)).collect();
    let at = |i: isize| -> Complex64 {
        match i {
            // even extrapolation in x² through the first three nodes
            0 => chi[0] * 1.5 - chi[1] * 0.6 + chi[2] * 0.1,
            i if i < 0 => at_positive(&chi, (-i) as usize),
            i => at_positive(&chi, i as usize),
        }
    };
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    let mut dx = Vec::with_capacity(n);
    for j in 0..n {
        let i = j as isize + 1;
        let c1 = (at(i - 2) - at(i - 1) * 8.0 + at(i + 1) * 8.0 - at(i + 2)) / (12.0 * h);
        let c2 = (-at(i - 2) + at(i - 1) * 16.0 - at(i) * 30.0 + at(i + 1) * 16.0 - at(i + 2)) / (12.0 * h * h);
        let x = nodes[j];
        let xs = x.powf(s);
        let c = chi[j];
        d1.push((c1 + c * (s / x)) * xs);
        d2.push((c2 + c1 * (2.0 * s / x) + c * (s * (s - 1.0) / (x * x))) * xs);
        dx.push((c * (s + 1.0) + c1 * x) * xs);
    }
    (d1, d2, dx)
}

/// `χ` at node `k ≥ 1` (1-based), zero beyond the outer edge.
fn at_positive(chi: &[Complex64], k: usize) -> Complex64 {
    chi.get(k - 1).copied().unwrap_or(Complex64::new(0.0, 0.0))
}

/// Leading power `s` of `ψ ~ x^s` at the origin forced by `p2·p² + inv_x2/x²`.
fn indicial_exponent(form: &QuadraticForm, hbar: f64) -> Option<f64> {
    if form.inv_x2 == 0.0 || form.p2 <= 0.0 {
        return None;
    }
    let disc = 0.25 + form.inv_x2 / (form.p2 * hbar * hbar);
    (disc > 0.0).then(|| 0.5 + disc.sqrt())
}

/// Image of `psi` under `op`.
pub fn apply_operator<O: GridOperator + ?Sized>(op: &O, psi: &GridWavefunction) -> Result<GridWavefunction> {
    let form = op.form();
    let grid = &psi.grid;
    if form.inv_x2 != 0.0 && grid.domain != Domain::HalfLine {
        return Err(Error::Domain("an x^-2 term requires a half-line grid".into()));
    }
    psi.check_support(SUPPORT_TOL)?;
    let hbar = psi.hbar;
    let h = grid.spacing;
    let (d1, d2, dx_xpsi) = match indicial_exponent(&form, hbar) {
        Some(s) if grid.len() >= 3 => {
            let (mut d1, mut d2) = derivatives(&psi.values, h, grid.domain);
            let xpsi: Vec<Complex64> = grid.nodes.iter().zip(&psi.values).map(|(x, v)| v * *x).collect();
            let (mut dx_xpsi, _) = derivatives(&xpsi, h, grid.domain);
            let (f1, f2, fx) = factored_derivatives(&psi.values, &grid.nodes, h, s);
            let k = FACTORED_NODES.min(grid.len());
            d1[..k].copy_from_slice(&f1[..k]);
            d2[..k].copy_from_slice(&f2[..k]);
            dx_xpsi[..k].copy_from_slice(&fx[..k]);
            (d1, d2, dx_xpsi)
        }
        _ => {
            let (d1, d2) = derivatives(&psi.values, h, grid.domain);
            let xpsi: Vec<Complex64> = grid.nodes.iter().zip(&psi.values).map(|(x, v)| v * *x).collect();
            let (dx_xpsi, _) = derivatives(&xpsi, h, grid.domain);
            (d1, d2, dx_xpsi)
        }
    };
    let minus_i_hbar = Complex64::new(0.0, -hbar);
    let values = grid
        .nodes
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let v = psi.values[j];
            // (xp + px)ψ = x(pψ) + p(xψ)
            let dil = minus_i_hbar * (d1[j] * x + dx_xpsi[j]);
            let mut out = d2[j] * (-hbar * hbar * form.p2) + dil * form.dilation + v * (form.x2 * x * x);
            if form.inv_x2 != 0.0 {
                out += v * (form.inv_x2 / (x * x));
            }
            out
        })
        .collect();
    Ok(psi.with_values(values))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expectation {
    pub value: f64,
    /// Imaginary part, nonzero only through discretization; a Hermiticity diagnostic.
    pub imag: f64,
}

/// `⟨ψ|O|ψ⟩/⟨ψ|ψ⟩`.
pub fn expectation<O: GridOperator + ?Sized>(op: &O, psi: &GridWavefunction) -> Result<Expectation> {
    let image = apply_operator(op, psi)?;
    let z = psi.inner(&image) / psi.norm_sqr();
    if z.im.abs() > HERMITICITY_TOL {
        log::warn!("expectation value has imaginary part {:e}", z.im);
    }
    Ok(Expectation {
        value: z.re,
        imag: z.im,
    })
}

/// `⟨a|O|b⟩`.
pub fn matrix_element<O: GridOperator + ?Sized>(
    op: &O,
    a: &GridWavefunction,
    b: &GridWavefunction,
) -> Result<Complex64> {
    Ok(a.inner(&apply_operator(op, b)?))
}

/// `max_k ‖(−iħ∂_t + H(t_k))ψ_k‖ / ‖H(t_k)ψ_k‖` over interior samples, with
/// `∂_t` by central differences. States must be equally spaced in time.
pub fn schrodinger_residual(states: &[GridWavefunction], ham: &HamiltonianModel) -> Result<f64> {
    if states.len() < 3 {
        return Err(Error::Input(format!(
            "need at least 3 time samples, got {}",
            states.len()
        )));
    }
    let dt = states[1].t - states[0].t;
    if !(dt > 0.0) {
        return Err(Error::Input("time samples must be increasing".into()));
    }
    for w in states.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt {
            return Err(Error::Input("time samples must be equally spaced".into()));
        }
    }
    let mut worst: f64 = 0.0;
    for k in 1..states.len() - 1 {
        let psi = &states[k];
        let hbar = psi.hbar;
        let h_psi = apply_operator(&ham.at(psi.t), psi)?;
        let coef = Complex64::new(0.0, -hbar / (2.0 * dt));
        let resid: Vec<Complex64> = states[k + 1]
            .values
            .iter()
            .zip(&states[k - 1].values)
            .zip(&h_psi.values)
            .map(|((p, m), hp)| (p - m) * coef + hp)
            .collect();
        let r = psi.with_values(resid).norm();
        worst = worst.max(r / h_psi.norm());
    }
    Ok(worst)
}

/// Result of [`invariance_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    /// `max_{t,m,n} |⟨m|I|n⟩(t) − ⟨m|I|n⟩(t₀)|`
    pub max_deviation: f64,
    /// Matrix `⟨m|I|n⟩` at the first sampled time.
    pub initial: Vec<Vec<Complex64>>,
}

/// Matrix `⟨m|I|n⟩` over the given states.
pub fn invariant_matrix<O: GridOperator + ?Sized>(op: &O, states: &[GridWavefunction]) -> Result<Vec<Vec<Complex64>>> {
    let images = states
        .iter()
        .map(|s| apply_operator(op, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(states
        .iter()
        .map(|a| images.iter().map(|ib| a.inner(ib)).collect())
        .collect())
}

/// Constancy of the invariant's matrix elements in the supplied mode bases.
/// `states[t][m]` is mode `m` at time sample `t`; `invariants[t]` the invariant there.
pub fn invariance_check(
    invariants: &[QuadraticInvariant],
    states: &[Vec<GridWavefunction>],
) -> Result<InvarianceReport> {
    if invariants.len() != states.len() || states.is_empty() {
        return Err(Error::Input("one invariant per time sample is required".into()));
    }
    let initial = invariant_matrix(&invariants[0], &states[0])?;
    let mut worst: f64 = 0.0;
    for (inv, basis) in invariants.iter().zip(states).skip(1) {
        let m = invariant_matrix(inv, basis)?;
        for (row, row0) in m.iter().zip(&initial) {
            for (a, b) in row.iter().zip(row0) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    Ok(InvarianceReport {
        max_deviation: worst,
        initial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{build_grid, QuadratureGrid};
    use crate::wavefunctions::{phi_s, psi_s};
    use std::sync::Arc;

    fn full() -> Arc<QuadratureGrid> {
        Arc::new(build_grid(Domain::FullLine, 12.0, 2401).unwrap())
    }

    fn half() -> Arc<QuadratureGrid> {
        Arc::new(build_grid(Domain::HalfLine, 12.0, 960).unwrap())
    }

    fn rel_gap(a: &GridWavefunction, b: &GridWavefunction, scale: f64) -> f64 {
        let diff: Vec<Complex64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y * scale).collect();
        a.with_values(diff).norm() / a.norm()
    }

    #[test]
    fn h_s_eigenstates() {
        let g = full();
        for n in 0..6 {
            let psi = psi_s(n, &g, 0.0, 1.0).unwrap();
            let hp = apply_operator(&HamiltonianSpec::h_s(1.0), &psi).unwrap();
            assert!(rel_gap(&hp, &psi, n as f64 + 0.5) < 1e-6, "n = {n}");
        }
    }

    #[test]
    fn h_in_s_eigenstates() {
        let g = half();
        let gc = 1.0;
        let alpha = 1.5;
        for n in 0..5 {
            let phi = phi_s(n, alpha, &g, 0.0, 1.0).unwrap();
            let hp = apply_operator(&HamiltonianSpec::h_in_s(gc, 1.0), &phi).unwrap();
            assert!(rel_gap(&hp, &phi, 2.0 * n as f64 + alpha + 1.0) < 1e-6, "n = {n}");
        }
    }

    #[test]
    fn non_integer_index_keeps_accuracy_at_the_origin() {
        // α = ½√5.8 makes φ ~ x^1.70 at the origin
        let g = Arc::new(build_grid(Domain::HalfLine, 12.0, 1200).unwrap());
        let alpha = crate::wavefunctions::alpha_of_g(0.6, 1.0).unwrap();
        for n in 0..4 {
            let phi = phi_s(n, alpha, &g, 0.0, 1.0).unwrap();
            let e = expectation(&HamiltonianSpec::h_in_s(0.6, 1.0), &phi).unwrap();
            assert!((e.value - (2.0 * n as f64 + alpha + 1.0)).abs() < 1e-7, "n = {n}");
        }
    }

    #[test]
    fn ground_energy_and_hermiticity() {
        let g = full();
        let a = psi_s(0, &g, 0.0, 1.0).unwrap();
        let e = expectation(&HamiltonianSpec::h_s(1.0), &a).unwrap();
        assert!((e.value - 0.5).abs() < 1e-9);
        let b = GridWavefunction::from_fn(Arc::clone(&g), 0.0, 1.0, |x| {
            Complex64::new((-(x - 0.5) * (x - 0.5)).exp(), 0.2 * x * (-(x * x)).exp())
        });
        let op = QuadraticForm {
            p2: 0.7,
            dilation: -0.3,
            x2: 1.1,
            inv_x2: 0.0,
        };
        let ab = matrix_element(&op, &a, &b).unwrap();
        let ba = matrix_element(&op, &b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-7);
    }

    #[test]
    fn inverse_square_term_needs_half_line() {
        let g = full();
        let psi = psi_s(0, &g, 0.0, 1.0).unwrap();
        assert!(matches!(
            apply_operator(&HamiltonianSpec::h_in_s(1.0, 1.0), &psi),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn residual_needs_three_samples() {
        let g = full();
        let psi = psi_s(0, &g, 0.0, 1.0).unwrap();
        let r = schrodinger_residual(
            &[psi.clone(), psi],
            &HamiltonianModel::Static(HamiltonianSpec::h_s(1.0)),
        );
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn stationary_states_have_small_residual() {
        let g = full();
        let dt = 1e-3;
        let ham = HamiltonianModel::Static(HamiltonianSpec::h_s(1.0));
        // central differencing leaves a relative error of (EΔt)²/6
        for n in 0..4 {
            let e = n as f64 + 0.5;
            let bound = (e * dt).powi(2) / 6.0 * 1.01 + 1e-8;
            let states: Vec<_> = (0..5)
                .map(|k| {
                    let mut s = psi_s(n, &g, k as f64 * dt, 1.0).unwrap();
                    s.t = k as f64 * dt;
                    s
                })
                .collect();
            let r = schrodinger_residual(&states, &ham).unwrap();
            assert!(r < bound, "n = {n}: {r}");
            if n < 2 {
                assert!(r < 1e-6);
            }
        }
    }
}
