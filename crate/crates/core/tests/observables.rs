use std::f64::consts::PI;
use std::sync::Arc;
use tdho_core::*;

fn mathieu() -> OscillatorSpec {
    OscillatorSpec::new(Profile::mathieu(1.0, 0.2, 2.0))
}

fn generalized() -> OscillatorSpec {
    mathieu()
        .with_mass(Profile::sinusoidal(1.0, 0.3, 1.0, 0.0))
        .with_gauge(Profile::sinusoidal(0.0, 0.1, 1.0, PI / 2.0))
        .with_coupling(1.0)
}

/// Worst residual over triples of consecutive samples spread across `[0, π]`.
fn residual(
    spec: &OscillatorSpec,
    family: Family,
    n: usize,
    dt: f64,
    traj_mut: impl Fn(&mut ClassicalTrajectory),
) -> f64 {
    let samples = (PI / dt).round() as usize + 1;
    let mut traj = solve_linear(spec, (0.0, PI), [1.0, 0.0, 0.0, 1.0], samples).unwrap();
    traj_mut(&mut traj);
    let grid = auto_grid(&traj, spec, family, n).unwrap();
    let mode = ModeSpec::for_spec(n, family, spec).unwrap();
    let model = match family {
        Family::Sho => HamiltonianModel::H0(spec.clone()),
        Family::InverseSquare => HamiltonianModel::Hin(spec.clone()),
    };
    let mut worst: f64 = 0.0;
    for k in (1..samples - 1).step_by(samples / 10) {
        let states: Vec<_> = (k - 1..=k + 1)
            .map(|j| wavefunctions::evaluate(&mode, &traj, spec, j, &grid).unwrap())
            .collect();
        worst = worst.max(schrodinger_residual(&states, &model).unwrap());
    }
    worst
}

#[test]
fn driven_hermite_states_solve_schrodinger() {
    let spec = mathieu().with_u1(0.8, 0.3);
    for n in 0..3 {
        let r = residual(&spec, Family::Sho, n, 1e-3, |_| {});
        assert!(r < 1e-5, "n = {n}: {r}");
        let ratio = residual(&spec, Family::Sho, n, 2e-3, |_| {}) / r;
        assert!((ratio - 4.0).abs() < 0.4, "n = {n}: ratio {ratio}");
    }
}

#[test]
fn generalized_laguerre_states_solve_schrodinger() {
    let spec = generalized();
    for n in 0..2 {
        let r = residual(&spec, Family::InverseSquare, n, 1e-3, |_| {});
        assert!(r < 1e-5, "n = {n}: {r}");
        let ratio = residual(&spec, Family::InverseSquare, n, 2e-3, |_| {}) / r;
        assert!((ratio - 4.0).abs() < 0.4, "n = {n}: ratio {ratio}");
    }
}

#[test]
fn flipped_displacement_phase_breaks_the_solution() {
    let spec = mathieu().with_u1(0.8, 0.3);
    let flip = |t: &mut ClassicalTrajectory| t.delta_u1.iter_mut().for_each(|d| *d = -*d);
    let r = residual(&spec, Family::Sho, 0, 1e-3, flip);
    assert!(r > 1e-2, "{r}");
    // without a displacement the phase is zero and the flip is harmless
    let r = residual(&mathieu(), Family::Sho, 0, 1e-3, flip);
    assert!(r < 1e-5);
}

#[test]
fn invariant_eigenvalues_and_constant_matrix_elements() {
    let spec = mathieu();
    let traj = solve_linear(&spec, (0.0, PI), [1.0, 0.0, 0.0, 1.0], 21).unwrap();
    let grid = auto_grid(&traj, &spec, Family::Sho, 5).unwrap();
    let invariants: Vec<_> = (0..traj.len()).map(|k| QuadraticInvariant::i0(&traj, k, 1.0)).collect();
    let states: Vec<Vec<_>> = (0..traj.len())
        .map(|k| (0..6).map(|n| psi_0(n, &traj, &spec, k, &grid).unwrap()).collect())
        .collect();
    let report = invariance_check(&invariants, &states).unwrap();
    assert!(report.max_deviation < 1e-5, "{}", report.max_deviation);
    for n in 0..6 {
        assert!((report.initial[n][n].re - (n as f64 + 0.5)).abs() < 1e-5);
    }

    let spec = generalized();
    let traj = solve_linear(&spec, (0.0, PI), [1.0, 0.0, 0.0, 1.0], 21).unwrap();
    let grid = auto_grid(&traj, &spec, Family::InverseSquare, 5).unwrap();
    let invariants: Vec<_> = (0..traj.len())
        .map(|k| QuadraticInvariant::i_in(&traj, &spec, k))
        .collect();
    let states: Vec<Vec<_>> = (0..traj.len())
        .map(|k| (0..6).map(|n| phi(n, &traj, &spec, k, &grid).unwrap()).collect())
        .collect();
    let report = invariance_check(&invariants, &states).unwrap();
    assert!(report.max_deviation < 1e-5, "{}", report.max_deviation);
    for n in 0..6 {
        assert!((report.initial[n][n].re - (2.0 * n as f64 + 2.5)).abs() < 1e-5);
    }
}

#[test]
fn invariant_is_trivial_for_constant_frequency() {
    let spec = OscillatorSpec::unit();
    let traj = solve_linear(&spec, (0.0, 2.0), [1.0, 0.0, 0.0, 1.0], 5).unwrap();
    let grid = Arc::new(build_grid(Domain::FullLine, 12.0, 2401).unwrap());
    let invariants: Vec<_> = (0..traj.len()).map(|k| QuadraticInvariant::i0(&traj, k, 1.0)).collect();
    let states: Vec<Vec<_>> = (0..traj.len())
        .map(|k| (0..4).map(|n| psi_0(n, &traj, &spec, k, &grid).unwrap()).collect())
        .collect();
    assert!(invariance_check(&invariants, &states).unwrap().max_deviation < 1e-8);
}

#[test]
fn invariant_acts_diagonally_on_its_modes() {
    let spec = mathieu();
    let traj = solve_linear(&spec, (0.0, 1.0), [1.0, 0.0, 0.0, 1.0], 3).unwrap();
    let grid = tdho_core::wavefunctions::auto_grid_with(&traj, &spec, Family::Sho, 4, 80.0).unwrap();
    let inv = QuadraticInvariant::i0(&traj, 2, 1.0);
    for n in 0..5 {
        let psi = psi_0(n, &traj, &spec, 2, &grid).unwrap();
        let image = apply_operator(&inv, &psi).unwrap();
        let diff: Vec<_> = image
            .values
            .iter()
            .zip(&psi.values)
            .map(|(a, b)| a - b * (n as f64 + 0.5))
            .collect();
        assert!(psi.with_values(diff).norm() / image.norm() < 1e-6, "n = {n}");
    }
}

#[test]
fn operators_are_hermitian_on_resolved_states() {
    let spec = generalized();
    let traj = solve_linear(&spec, (0.0, 2.0), [1.0, 0.0, 0.0, 1.0], 5).unwrap();
    let grid = auto_grid(&traj, &spec, Family::InverseSquare, 3).unwrap();
    let a = phi(1, &traj, &spec, 3, &grid).unwrap();
    let b = phi(3, &traj, &spec, 3, &grid).unwrap();
    let h = HamiltonianSpec::h_in(&spec, traj.t_grid[3]);
    let inv = QuadraticInvariant::i_in(&traj, &spec, 3);
    let gap = (matrix_element(&h, &a, &b).unwrap() - matrix_element(&h, &b, &a).unwrap().conj()).norm();
    assert!(gap < 1e-7, "{gap}");
    let gap = (matrix_element(&inv, &a, &b).unwrap() - matrix_element(&inv, &b, &a).unwrap().conj()).norm();
    assert!(gap < 1e-7, "{gap}");
    assert!(expectation(&h, &a).unwrap().imag.abs() < 1e-7);
}
