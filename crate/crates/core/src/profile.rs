//! Time profiles for the frequency, mass and gauge coefficients.
//!
//! Presets carry analytic first and second derivatives, which the generalized
//! Hamiltonian needs through `c(t)` and the mass-scaled width `ρ = ρ₀/√M`.
//! Arbitrary closures are accepted through [`Profile::custom`]; their
//! derivatives fall back to fourth-order central differences.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    /// `value`
    Const { value: f64 },
    /// Smoothed step `before → after` centred at `t_switch`; `width = 0` is a hard step.
    Step {
        before: f64,
        after: f64,
        t_switch: f64,
        #[serde(default)]
        width: f64,
    },
    /// `mean + amplitude·cos(omega·t)`
    Mathieu { mean: f64, amplitude: f64, omega: f64 },
    /// `base + amplitude·exp(−(t − center)²/(2·width²))`
    GaussianPulse {
        base: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// `mean + amplitude·sin(omega·t + phase)`
    Sinusoidal {
        mean: f64,
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    #[serde(skip)]
    Custom(ProfileFn),
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Profile::Const { value }
    }

    pub fn mathieu(mean: f64, amplitude: f64, omega: f64) -> Self {
        Profile::Mathieu { mean, amplitude, omega }
    }

    pub fn sinusoidal(mean: f64, amplitude: f64, omega: f64, phase: f64) -> Self {
        Profile::Sinusoidal {
            mean,
            amplitude,
            omega,
            phase,
        }
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Profile::Custom(Arc::new(f))
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Profile::Const { value } => *value,
            Profile::Step {
                before,
                after,
                t_switch,
                width,
            } => {
                if *width > 0.0 {
                    let s = ((t - t_switch) / width).tanh();
                    before + 0.5 * (after - before) * (1.0 + s)
                } else if t < *t_switch {
                    *before
                } else {
                    *after
                }
            }
            Profile::Mathieu { mean, amplitude, omega } => mean + amplitude * (omega * t).cos(),
            Profile::GaussianPulse {
                base,
                amplitude,
                center,
                width,
            } => {
                let z = (t - center) / width;
                base + amplitude * (-0.5 * z * z).exp()
            }
            Profile::Sinusoidal {
                mean,
                amplitude,
                omega,
                phase,
            } => mean + amplitude * (omega * t + phase).sin(),
            Profile::Custom(f) => f(t),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            Profile::Const { .. } => 0.0,
            Profile::Step {
                before,
                after,
                t_switch,
                width,
            } => {
                if *width > 0.0 {
                    let s = ((t - t_switch) / width).tanh();
                    0.5 * (after - before) * (1.0 - s * s) / width
                } else {
                    0.0
                }
            }
            Profile::Mathieu { amplitude, omega, .. } => -amplitude * omega * (omega * t).sin(),
            Profile::GaussianPulse {
                amplitude,
                center,
                width,
                ..
            } => {
                let z = (t - center) / width;
                -amplitude * (-0.5 * z * z).exp() * z / width
            }
            Profile::Sinusoidal {
                amplitude,
                omega,
                phase,
                ..
            } => amplitude * omega * (omega * t + phase).cos(),
            Profile::Custom(f) => {
                let h = 1e-3 * (1.0 + t.abs());
                (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
            }
        }
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        match self {
            Profile::Const { .. } => 0.0,
            Profile::Step {
                before,
                after,
                t_switch,
                width,
            } => {
                if *width > 0.0 {
                    let s = ((t - t_switch) / width).tanh();
                    -(after - before) * s * (1.0 - s * s) / (width * width)
                } else {
                    0.0
                }
            }
            Profile::Mathieu { amplitude, omega, .. } => -amplitude * omega * omega * (omega * t).cos(),
            Profile::GaussianPulse {
                amplitude,
                center,
                width,
                ..
            } => {
                let z = (t - center) / width;
                amplitude * (-0.5 * z * z).exp() * (z * z - 1.0) / (width * width)
            }
            Profile::Sinusoidal {
                amplitude,
                omega,
                phase,
                ..
            } => -amplitude * omega * omega * (omega * t + phase).sin(),
            Profile::Custom(f) => {
                let h = 1e-2 * (1.0 + t.abs());
                (-f(t - 2.0 * h) + 16.0 * f(t - h) - 30.0 * f(t) + 16.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h * h)
            }
        }
    }

    /// True for profiles that do not vary in time.
    pub fn is_constant(&self) -> bool {
        match self {
            Profile::Const { .. } => true,
            Profile::Step { before, after, .. } => before == after,
            Profile::Mathieu { amplitude, .. }
            | Profile::GaussianPulse { amplitude, .. }
            | Profile::Sinusoidal { amplitude, .. } => *amplitude == 0.0,
            Profile::Custom(_) => false,
        }
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Const { value } => write!(f, "Const({value})"),
            Profile::Step {
                before,
                after,
                t_switch,
                width,
            } => write!(f, "Step({before} -> {after} at {t_switch}, width {width})"),
            Profile::Mathieu { mean, amplitude, omega } => write!(f, "Mathieu({mean} + {amplitude} cos({omega} t))"),
            Profile::GaussianPulse {
                base,
                amplitude,
                center,
                width,
            } => write!(f, "GaussianPulse({base} + {amplitude} g(t; {center}, {width}))"),
            Profile::Sinusoidal {
                mean,
                amplitude,
                omega,
                phase,
            } => write!(f, "Sinusoidal({mean} + {amplitude} sin({omega} t + {phase}))"),
            Profile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl PartialEq for Profile {
    fn eq(&self, other: &Self) -> bool {
        use Profile::*;
        match (self, other) {
            (Const { value: a }, Const { value: b }) => a == b,
            (
                Step {
                    before: a0,
                    after: a1,
                    t_switch: a2,
                    width: a3,
                },
                Step {
                    before: b0,
                    after: b1,
                    t_switch: b2,
                    width: b3,
                },
            ) => (a0, a1, a2, a3) == (b0, b1, b2, b3),
            (
                Mathieu {
                    mean: a0,
                    amplitude: a1,
                    omega: a2,
                },
                Mathieu {
                    mean: b0,
                    amplitude: b1,
                    omega: b2,
                },
            ) => (a0, a1, a2) == (b0, b1, b2),
            (
                GaussianPulse {
                    base: a0,
                    amplitude: a1,
                    center: a2,
                    width: a3,
                },
                GaussianPulse {
                    base: b0,
                    amplitude: b1,
                    center: b2,
                    width: b3,
                },
            ) => (a0, a1, a2, a3) == (b0, b1, b2, b3),
            (
                Sinusoidal {
                    mean: a0,
                    amplitude: a1,
                    omega: a2,
                    phase: a3,
                },
                Sinusoidal {
                    mean: b0,
                    amplitude: b1,
                    omega: b2,
                    phase: b3,
                },
            ) => (a0, a1, a2, a3) == (b0, b1, b2, b3),
            (Custom(a), Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}
