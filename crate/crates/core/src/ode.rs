//! Adaptive Dormand–Prince 5(4) integrator.
//!
//! Steps are clipped so that every requested output time is hit exactly; the
//! solution at output times therefore carries the full fifth-order accuracy of
//! an accepted step rather than that of an interpolant.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 10_000_000,
        }
    }
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// Integrates `y' = f(t, y)` from `outputs[0]` and returns the state at each
    /// output time. `outputs` must be ascending.
    pub fn solve<const N: usize, F>(&self, f: F, y0: [f64; N], outputs: &[f64]) -> Result<Vec<[f64; N]>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        if outputs.is_empty() {
            return Ok(Vec::new());
        }
        if outputs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("output times must be strictly ascending".into()));
        }
        let mut t = outputs[0];
        let mut y = y0;
        let mut out = Vec::with_capacity(outputs.len());
        out.push(y);
        if outputs.len() == 1 {
            return Ok(out);
        }

        let mut k1 = f(t, &y);
        let mut h = self.initial_step(&f, t, &y, &k1, outputs[outputs.len() - 1] - t);
        let mut steps = 0usize;

        for &t_next in &outputs[1..] {
            while t < t_next {
                steps += 1;
                if steps > self.max_steps {
                    return Err(Error::Integration {
                        t,
                        reason: "maximum step count exceeded".into(),
                    });
                }
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Integration {
                        t,
                        reason: format!("step size underflow (h = {h:e})"),
                    });
                }
                let remaining = t_next - t;
                let clipped = h >= remaining;
                let step = if clipped { remaining } else { h };

                let k2 = f(t + C2 * step, &axpy(&y, step, &[(A21, &k1)]));
                let k3 = f(t + C3 * step, &axpy(&y, step, &[(A31, &k1), (A32, &k2)]));
                let k4 = f(t + C4 * step, &axpy(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
                let k5 = f(
                    t + C5 * step,
                    &axpy(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                );
                let k6 = f(
                    t + step,
                    &axpy(&y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
                );
                let y_new = axpy(&y, step, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
                let k7 = f(t + step, &y_new);

                let mut err = 0.0;
                for i in 0..N {
                    let e = step * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                    err += (e / sc).powi(2);
                }
                let err = (err / N as f64).sqrt();
                if !err.is_finite() {
                    return Err(Error::Integration {
                        t,
                        reason: "non-finite state".into(),
                    });
                }
                let factor = if err == 0.0 {
                    10.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 10.0)
                };
                if err <= 1.0 {
                    t = if clipped { t_next } else { t + step };
                    y = y_new;
                    k1 = k7;
                    // a clipped step says nothing about the natural step size
                    if !clipped {
                        h = step * factor;
                    } else if factor < 1.0 {
                        h = h.min(step * factor);
                    }
                } else {
                    h = step * factor.min(1.0);
                }
            }
            out.push(y);
        }
        Ok(out)
    }

    fn initial_step<const N: usize, F>(&self, f: &F, t: f64, y: &[f64; N], k1: &[f64; N], span: f64) -> f64
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let scale = |i: usize| self.atol + self.rtol * y[i].abs();
        let d0 = (y.iter().enumerate().map(|(i, v)| (v / scale(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
        let d1 = (k1.iter().enumerate().map(|(i, v)| (v / scale(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1 = axpy(y, h0, &[(1.0, k1)]);
        let k2 = f(t + h0, &y1);
        let d2 = (k2
            .iter()
            .zip(k1.iter())
            .enumerate()
            .map(|(i, (a, b))| ((a - b) / scale(i)).powi(2))
            .sum::<f64>()
            / N as f64)
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span.abs())
    }
}
