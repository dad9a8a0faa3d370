//! The four verbs. Each returns a serializable report; `main` decides where
//! it goes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use tdho_core::operators::invariant_matrix;
use tdho_core::phase::{periodicity_residual, PERIOD_TOL};
use tdho_core::wavefunctions::{auto_grid_with, evaluate};
use tdho_core::{
    build_grid, check_composition_law, evolve as cn_evolve, fidelity, geometric_phase, invariance_check, psi_s,
    schrodinger_residual, solve_linear, ClassicalTrajectory, Domain, EvolutionConfig, Family, GridWavefunction,
    HamiltonianModel, ModeSpec, OscillatorSpec, PhaseReport, QuadraticInvariant, UnitSqueeze,
};

use crate::config::{Fault, Scenario};
use crate::CliError;

pub const ERMAKOV_THRESHOLD: f64 = 1e-8;
pub const RESIDUAL_THRESHOLD: f64 = 1e-5;
pub const GRAM_THRESHOLD: f64 = 1e-7;
pub const INVARIANCE_THRESHOLD: f64 = 1e-5;
pub const COMPOSITION_THRESHOLD: f64 = 1e-7;
pub const FIDELITY_DEFICIT_THRESHOLD: f64 = 1e-4;

fn mode(scenario: &Scenario, n: usize) -> Result<ModeSpec, CliError> {
    Ok(ModeSpec::for_spec(n, scenario.family, &scenario.spec())?)
}

fn hamiltonian(scenario: &Scenario, spec: OscillatorSpec) -> HamiltonianModel {
    match scenario.family {
        Family::Sho => HamiltonianModel::H0(spec),
        Family::InverseSquare => HamiltonianModel::Hin(spec),
    }
}

/// Trajectory with the scenario's fault applied.
fn faulty(scenario: &Scenario, mut traj: ClassicalTrajectory) -> ClassicalTrajectory {
    if scenario.fault == Some(Fault::FlipDeltaSign) {
        traj.delta_u1.iter_mut().for_each(|d| *d = -*d);
    }
    traj
}

/// `count` indices spread evenly over `0..len`, endpoints included.
fn spread(len: usize, count: usize) -> Vec<usize> {
    let count = count.clamp(1, len);
    if count == 1 {
        return vec![0];
    }
    let mut idx: Vec<usize> = (0..count)
        .map(|f| ((f * (len - 1)) as f64 / (count - 1) as f64).round() as usize)
        .collect();
    idx.dedup();
    idx
}

// ---------------------------------------------------------------- evolve

fn family_label(f: Family) -> &'static str {
    match f {
        Family::Sho => "sho",
        Family::InverseSquare => "inverse-square",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameMoments {
    pub t: f64,
    pub norm: f64,
    pub mean_x: f64,
    pub mean_x2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeOutput {
    pub n: usize,
    pub file: String,
    pub rows: usize,
    pub frames: Vec<FrameMoments>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classical {
    pub t: Vec<f64>,
    pub tau: Vec<f64>,
    pub rho: Vec<f64>,
    pub u1: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveSummary {
    pub scenario: String,
    pub family: Family,
    pub hbar: f64,
    pub grid_points: usize,
    pub x_max: f64,
    pub omega0: f64,
    pub classical: Classical,
    pub modes: Vec<ModeOutput>,
}

/// Writes one CSV per mode plus `<name>_summary.json` into `out`.
pub fn evolve(scenario: &Scenario, out: &Path) -> Result<EvolveSummary, CliError> {
    std::fs::create_dir_all(out)?;
    let spec = scenario.spec();
    let traj = faulty(scenario, scenario.trajectory()?);
    let grid = scenario.grid(&traj)?;
    let frames = spread(traj.len(), scenario.time.frames);

    let modes = scenario
        .modes
        .par_iter()
        .map(|&n| {
            let m = mode(scenario, n)?;
            let file = format!("{}_n{n}.csv", scenario.name);
            let mut w = BufWriter::new(File::create(out.join(&file))?);
            writeln!(w, "# scenario: {}", scenario.name)?;
            writeln!(
                w,
                "# mode: n = {n}, family = {}, alpha = {}",
                family_label(scenario.family),
                m.alpha
            )?;
            writeln!(w, "t,x,re,im,abs2")?;
            let mut moments = Vec::with_capacity(frames.len());
            for &k in &frames {
                let psi = evaluate(&m, &traj, &spec, k, &grid)?;
                let t = traj.t_grid[k];
                for (x, v) in grid.nodes.iter().zip(&psi.values) {
                    writeln!(w, "{t:.16e},{x:.16e},{:.16e},{:.16e},{:.16e}", v.re, v.im, v.norm_sqr())?;
                }
                moments.push(FrameMoments {
                    t,
                    norm: psi.norm(),
                    mean_x: psi.moment(1),
                    mean_x2: psi.moment(2),
                });
            }
            w.flush()?;
            Ok(ModeOutput {
                n,
                file,
                rows: frames.len() * grid.len(),
                frames: moments,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let classical = Classical {
        t: frames.iter().map(|&k| traj.t_grid[k]).collect(),
        tau: frames.iter().map(|&k| traj.tau[k]).collect(),
        rho: frames.iter().map(|&k| traj.scaled_width(k, &spec).rho).collect(),
        u1: frames.iter().map(|&k| traj.u1[k]).collect(),
    };
    let summary = EvolveSummary {
        scenario: scenario.name.clone(),
        family: scenario.family,
        hbar: scenario.hbar,
        grid_points: grid.len(),
        x_max: grid.x_max(),
        omega0: traj.omega0,
        classical,
        modes,
    };
    write_json(&out.join(format!("{}_summary.json", scenario.name)), &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value < threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub scenario: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

type Suite<'a> = dyn Fn() -> Result<Vec<Check>, CliError> + Send + Sync + 'a;

pub fn verify(scenario: &Scenario, seed: u64) -> Result<VerifyReport, CliError> {
    let traj = scenario.trajectory()?;
    let suites: Vec<Box<Suite<'_>>> = vec![
        Box::new(|| classical_checks(scenario, &traj)),
        Box::new(|| residual_checks(scenario)),
        Box::new(|| orthonormality_check(scenario, &traj)),
        Box::new(|| invariance_checks(scenario)),
        Box::new(|| composition_check(scenario, &traj, seed)),
        Box::new(|| oracle_check(scenario)),
    ];
    let checks: Vec<Check> = suites
        .par_iter()
        .map(|suite| suite())
        .collect::<Result<Vec<_>, CliError>>()?
        .into_iter()
        .flatten()
        .collect();
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        scenario: scenario.name.clone(),
        seed,
        checks,
        pass,
    })
}

fn classical_checks(scenario: &Scenario, traj: &ClassicalTrajectory) -> Result<Vec<Check>, CliError> {
    let fine = scenario.trajectory_on(
        (scenario.time.start, scenario.time.end),
        scenario.time.samples.max(4097),
    )?;
    Ok(vec![
        Check::below(
            "wronskian_drift",
            traj.wronskian_drift(),
            tdho_core::classical::WRONSKIAN_TOL,
        ),
        Check::below(
            "ermakov_residual",
            tdho_core::ermakov_residual(&fine, &scenario.spec()),
            ERMAKOV_THRESHOLD,
        ),
    ])
}

/// Residual of each requested mode over ten triples of samples `dt` apart.
fn residual_checks(scenario: &Scenario) -> Result<Vec<Check>, CliError> {
    let (t0, t1) = (scenario.time.start, scenario.time.end);
    let samples = ((t1 - t0) / scenario.grid.dt).round() as usize + 1;
    let traj = faulty(scenario, scenario.trajectory_on((t0, t1), samples.max(3))?);
    let spec = scenario.spec();
    let grid = scenario.grid(&traj)?;
    let model = hamiltonian(scenario, spec.clone());
    let centres: Vec<usize> = spread(traj.len() - 2, 10).into_iter().map(|k| k + 1).collect();
    scenario
        .modes
        .par_iter()
        .map(|&n| {
            let m = mode(scenario, n)?;
            let mut worst: f64 = 0.0;
            for &k in &centres {
                let states = (k - 1..=k + 1)
                    .map(|j| evaluate(&m, &traj, &spec, j, &grid))
                    .collect::<Result<Vec<_>, _>>()?;
                worst = worst.max(schrodinger_residual(&states, &model)?);
            }
            Ok(Check::below(
                format!("schrodinger_residual[n={n}]"),
                worst,
                RESIDUAL_THRESHOLD,
            ))
        })
        .collect()
}

fn gram_error(states: &[GridWavefunction]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b) - target).norm());
        }
    }
    worst
}

fn orthonormality_check(scenario: &Scenario, traj: &ClassicalTrajectory) -> Result<Vec<Check>, CliError> {
    let spec = scenario.spec();
    let n_max = scenario.modes.iter().copied().max().unwrap_or(0).max(8);
    let grid = auto_grid_with(traj, &spec, scenario.family, n_max, scenario.grid.points_per_width)?;
    let worst = spread(traj.len(), 5)
        .par_iter()
        .map(|&k| {
            let states = (0..=n_max)
                .map(|n| evaluate(&mode(scenario, n)?, traj, &spec, k, &grid).map_err(CliError::from))
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(gram_error(&states))
        })
        .collect::<Result<Vec<f64>, CliError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(vec![Check::below(
        format!("orthonormality[0..={n_max}]"),
        worst,
        GRAM_THRESHOLD,
    )])
}

/// Invariant matrix elements in the requested modes, in the `u₁ = 0` sector.
pub struct InvariantData {
    pub times: Vec<f64>,
    pub matrices: Vec<Vec<Vec<f64>>>,
    pub expected_diagonal: Vec<f64>,
    pub max_deviation: f64,
    pub spectrum_error: f64,
}

pub fn invariant_data(scenario: &Scenario, samples: usize) -> Result<InvariantData, CliError> {
    let spec = scenario.spec().with_u1(0.0, 0.0);
    let traj = solve_linear(
        &spec,
        (scenario.time.start, scenario.time.end),
        scenario.ics(),
        scenario.time.samples,
    )?;
    let grid = scenario.grid(&traj)?;
    let ks = spread(traj.len(), samples);
    let modes = scenario
        .modes
        .iter()
        .map(|&n| mode(scenario, n))
        .collect::<Result<Vec<_>, _>>()?;
    let per_time = ks
        .par_iter()
        .map(|&k| {
            let inv = match scenario.family {
                Family::Sho => QuadraticInvariant::i0(&traj, k, scenario.hbar),
                Family::InverseSquare => QuadraticInvariant::i_in(&traj, &spec, k),
            };
            let states = modes
                .iter()
                .map(|m| evaluate(m, &traj, &spec, k, &grid))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((inv, states))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let (invariants, states): (Vec<_>, Vec<_>) = per_time.into_iter().unzip();
    let report = invariance_check(&invariants, &states)?;
    let matrices = invariants
        .iter()
        .zip(&states)
        .map(|(inv, basis)| {
            Ok(invariant_matrix(inv, basis)?
                .into_iter()
                .map(|row| row.into_iter().map(|z| z.re).collect())
                .collect())
        })
        .collect::<Result<Vec<Vec<Vec<f64>>>, CliError>>()?;
    let expected_diagonal: Vec<f64> = modes.iter().map(|m| scenario.hbar * m.ladder()).collect();
    let spectrum_error = matrices
        .iter()
        .flat_map(|m| {
            m.iter()
                .enumerate()
                .map(|(i, row)| (row[i] - expected_diagonal[i]).abs())
        })
        .fold(0.0, f64::max);
    Ok(InvariantData {
        times: ks.iter().map(|&k| traj.t_grid[k]).collect(),
        matrices,
        expected_diagonal,
        max_deviation: report.max_deviation,
        spectrum_error,
    })
}

fn invariance_checks(scenario: &Scenario) -> Result<Vec<Check>, CliError> {
    let data = invariant_data(scenario, 9)?;
    Ok(vec![
        Check::below("invariant_constancy", data.max_deviation, INVARIANCE_THRESHOLD),
        Check::below("invariant_spectrum", data.spectrum_error, INVARIANCE_THRESHOLD),
    ])
}

/// Two seeded squeeze draws checked on `ψₙ^s`, `n ≤ 4`, at three trajectory samples.
fn composition_check(scenario: &Scenario, traj: &ClassicalTrajectory, seed: u64) -> Result<Vec<Check>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<UnitSqueeze> = (0..2)
        .map(|_| UnitSqueeze {
            u: rng.random_range(0.8..1.4),
            du: rng.random_range(-0.3..0.3),
            v: rng.random_range(-0.3..0.3),
            dv: rng.random_range(0.8..1.4),
        })
        .collect();
    let ks = spread(traj.len(), 3);
    let hbar = scenario.hbar;
    let mut widest: f64 = 1.0;
    let mut narrowest: f64 = 1.0;
    let mut chirp: f64 = 0.0;
    for s in &draws {
        let bound = (s.u * s.u + s.du * s.du + s.v * s.v + s.dv * s.dv).sqrt() / s.omega().sqrt();
        for &k in &ks {
            let w = traj.rho0[k] / traj.omega0.sqrt();
            widest = widest.max(w * bound);
            narrowest = narrowest.min(w / bound);
            chirp = chirp.max((traj.drho0[k] / traj.rho0[k]).abs() + bound * bound);
        }
    }
    let x_max = 13.0 * widest * hbar.sqrt();
    let spacing = (narrowest * hbar.sqrt() / 160.0).min(std::f64::consts::PI * hbar / (40.0 * chirp * x_max));
    let points = 2 * (x_max / spacing).ceil() as usize + 1;
    let grid = Arc::new(build_grid(Domain::FullLine, x_max, points)?);
    let mut states = Vec::new();
    for &k in &ks {
        for n in 0..=4 {
            let mut s = psi_s(n, &grid, 0.3 * n as f64, hbar)?;
            s.t = traj.t_grid[k];
            states.push(s);
        }
    }
    let worst = draws
        .par_iter()
        .map(|s| Ok(check_composition_law(traj, s, &states)?))
        .collect::<Result<Vec<f64>, CliError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(vec![Check::below("composition_law", worst, COMPOSITION_THRESHOLD)])
}

/// Crank–Nicolson from the first requested mode over one declared period
/// (or the whole span), compared with the closed form.
fn oracle_check(scenario: &Scenario) -> Result<Vec<Check>, CliError> {
    let t0 = scenario.time.start;
    let span = scenario.time.end - t0;
    let t1 = t0 + scenario.period.map_or(span, |p| p.min(span));
    let spec = scenario.spec();
    let traj = faulty(scenario, scenario.trajectory_on((t0, t1), 65)?);
    let n = scenario.modes[0];
    let m = mode(scenario, n)?;
    let grid = auto_grid_with(&traj, &spec, scenario.family, n, 160.0)?;
    let start = evaluate(&m, &traj, &spec, 0, &grid)?;
    let target = evaluate(&m, &traj, &spec, traj.len() - 1, &grid)?;
    let cfg = EvolutionConfig::new(scenario.grid.cn_dt, (t0, t1)).recording_every(usize::MAX);
    let end = cn_evolve(&start, &hamiltonian(scenario, spec), &cfg)?
        .pop()
        .expect("evolve keeps the final state");
    let deficit = 1.0 - fidelity(&end, &target)?;
    Ok(vec![Check::below(
        format!("oracle_fidelity_deficit[n={n}]"),
        deficit,
        FIDELITY_DEFICIT_THRESHOLD,
    )])
}

// ---------------------------------------------------------------- phase

#[derive(Debug, Clone, Serialize)]
pub struct PhaseTable {
    pub scenario: String,
    pub declared_period: f64,
    pub t_prime: f64,
    pub reports: Vec<PhaseReport>,
}

pub fn phase(scenario: &Scenario) -> Result<PhaseTable, CliError> {
    let period = scenario
        .period
        .ok_or_else(|| CliError::Config("phase needs a declared period".into()))?;
    let t0 = scenario.time.start;
    let traj = scenario.trajectory_on((t0, t0 + 2.0 * period), scenario.time.samples.max(2049))?;
    let spec = scenario.spec();
    let mut t_prime = None;
    for cand in [period, 2.0 * period] {
        if periodicity_residual(&traj, cand)? < PERIOD_TOL && coefficient_residual(&spec, t0, cand) < PERIOD_TOL {
            t_prime = Some(cand);
            break;
        }
    }
    let t_prime = t_prime.ok_or_else(|| {
        CliError::Check(format!(
            "no T or 2T periodicity of rho, M and a for declared T = {period} (scenario {})",
            scenario.name
        ))
    })?;
    let reports = scenario
        .modes
        .par_iter()
        .map(|&n| Ok(geometric_phase(&mode(scenario, n)?, &traj, &spec, t_prime)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(PhaseTable {
        scenario: scenario.name.clone(),
        declared_period: period,
        t_prime,
        reports,
    })
}

/// Largest change of `M`, `Ṁ` and `a` under a shift by `t_prime`, sampled over one window.
fn coefficient_residual(spec: &OscillatorSpec, t0: f64, t_prime: f64) -> f64 {
    (0..=256)
        .map(|k| t0 + t_prime * k as f64 / 256.0)
        .map(|t| {
            let (m, a) = (&spec.mass, &spec.gauge);
            (m.value(t + t_prime) - m.value(t))
                .abs()
                .max((m.deriv(t + t_prime) - m.deriv(t)).abs())
                .max((a.value(t + t_prime) - a.value(t)).abs())
        })
        .fold(0.0, f64::max)
}

impl PhaseTable {
    pub fn render(&self) -> String {
        let mut s = format!(
            "scenario {}: T = {}, T' = {}\n{:>3} {:>8} {:>16} {:>16} {:>16} {:>16} {:>10}\n",
            self.scenario,
            self.declared_period,
            self.t_prime,
            "n",
            "alpha",
            "chi",
            "dynamical",
            "gamma",
            "gamma/nu",
            "gap"
        );
        for r in &self.reports {
            s += &format!(
                "{:>3} {:>8.4} {:>16.10} {:>16.10} {:>16.10} {:>16.12} {:>10.2e}\n",
                r.n,
                r.alpha,
                r.chi,
                r.dynamical,
                r.gamma,
                r.gamma_per_ladder(),
                r.route_gap
            );
        }
        s
    }
}

// ---------------------------------------------------------------- invariant

#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub scenario: String,
    pub family: Family,
    pub modes: Vec<usize>,
    pub expected_diagonal: Vec<f64>,
    pub times: Vec<f64>,
    /// `Re⟨m|I|n⟩` at each time.
    pub matrices: Vec<Vec<Vec<f64>>>,
    pub max_deviation: f64,
    pub spectrum_error: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn invariant(scenario: &Scenario) -> Result<InvariantReport, CliError> {
    let data = invariant_data(scenario, scenario.time.frames)?;
    let pass = data.max_deviation < INVARIANCE_THRESHOLD && data.spectrum_error < INVARIANCE_THRESHOLD;
    Ok(InvariantReport {
        scenario: scenario.name.clone(),
        family: scenario.family,
        modes: scenario.modes.clone(),
        expected_diagonal: data.expected_diagonal,
        times: data.times,
        matrices: data.matrices,
        max_deviation: data.max_deviation,
        spectrum_error: data.spectrum_error,
        threshold: INVARIANCE_THRESHOLD,
        pass,
    })
}

// ---------------------------------------------------------------- output

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    std::fs::write(path, to_json(value))?;
    Ok(())
}

/// `<out>/<name>_<verb>.json`
pub fn report_path(out: &Path, scenario: &Scenario, verb: &str) -> PathBuf {
    out.join(format!("{}_{verb}.json", scenario.name))
}
