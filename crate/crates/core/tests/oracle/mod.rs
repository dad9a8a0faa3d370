//! Reference solvers kept apart from the library: classical fixed-step RK4
//! with Richardson extrapolation, Gauss-Legendre panels, and the monodromy
//! matrix of the linear equation.

#![allow(dead_code)]

pub fn rk4<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t0: f64,
    t1: f64,
    steps: usize,
) -> [f64; N] {
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = f(t, &y);
        let k2 = f(t + h / 2.0, &axpy(&y, &k1, h / 2.0));
        let k3 = f(t + h / 2.0, &axpy(&y, &k2, h / 2.0));
        let k4 = f(t + h, &axpy(&y, &k3, h));
        for j in 0..N {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    y
}

fn axpy<const N: usize>(y: &[f64; N], k: &[f64; N], h: f64) -> [f64; N] {
    let mut out = *y;
    for j in 0..N {
        out[j] += h * k[j];
    }
    out
}

/// RK4 at `steps` and `2·steps`, combined to cancel the h⁴ term.
pub fn richardson<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t0: f64,
    t1: f64,
    steps: usize,
) -> [f64; N] {
    let coarse = rk4(f, y0, t0, t1, steps);
    let fine = rk4(f, y0, t0, t1, 2 * steps);
    let mut out = fine;
    for j in 0..N {
        out[j] = (16.0 * fine[j] - coarse[j]) / 15.0;
    }
    out
}

/// State (u, u̇, v, v̇, τ, δ) for `ẍ + w²(t)x = 0`, with the clock and the
/// displacement phase of u₁ = c_u·u + c_v·v carried as quadratures.
pub fn classical_rhs(w_sq: impl Fn(f64) -> f64, c: (f64, f64)) -> impl Fn(f64, &[f64; 6]) -> [f64; 6] {
    move |t, y| {
        let w = w_sq(t);
        let omega = y[3] * y[0] - y[1] * y[2];
        let r2 = y[0] * y[0] + y[2] * y[2];
        let u1 = c.0 * y[0] + c.1 * y[2];
        let du1 = c.0 * y[1] + c.1 * y[3];
        [
            y[1],
            -w * y[0],
            y[3],
            -w * y[2],
            omega / r2,
            0.5 * w * u1 * u1 - 0.5 * du1 * du1,
        ]
    }
}

/// Oracle state at `t` from ICs at `t0`.
pub fn classical_at(
    w_sq: impl Fn(f64) -> f64,
    c: (f64, f64),
    ics: [f64; 4],
    t0: f64,
    t: f64,
    steps: usize,
) -> [f64; 6] {
    let f = classical_rhs(w_sq, c);
    richardson(&f, [ics[0], ics[1], ics[2], ics[3], 0.0, 0.0], t0, t, steps)
}

/// Monodromy matrix over one period: columns are the solutions from (1,0) and (0,1).
pub fn monodromy(w_sq: impl Fn(f64) -> f64 + Copy, period: f64, steps: usize) -> [[f64; 2]; 2] {
    let f = move |t: f64, y: &[f64; 2]| [y[1], -w_sq(t) * y[0]];
    let a = richardson(&f, [1.0, 0.0], 0.0, period, steps);
    let b = richardson(&f, [0.0, 1.0], 0.0, period, steps);
    [[a[0], b[0]], [a[1], b[1]]]
}

const GL_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

/// Composite 5-point Gauss-Legendre on `panels` equal panels.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            sum += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * sum
}

/// ICs `(u, u̇, v, v̇)` of the Floquet pair `u + iv = e^{iμt}p(t)` for a
/// stable periodic `w²`, oriented so that the Wronskian is positive.
pub fn floquet_ics(w_sq: impl Fn(f64) -> f64 + Copy, period: f64, steps: usize) -> [f64; 4] {
    let m = monodromy(w_sq, period, steps);
    let half_trace = 0.5 * (m[0][0] + m[1][1]);
    assert!(half_trace.abs() < 1.0, "unstable band");
    let mu = half_trace.acos();
    let (z0, z1) = ((m[0][1], 0.0), (mu.cos() - m[0][0], mu.sin()));
    let mut ics = [z0.0, z1.0, z0.1, z1.1];
    if ics[3] * ics[0] - ics[1] * ics[2] < 0.0 {
        ics[2] = -ics[2];
        ics[3] = -ics[3];
    }
    ics
}
