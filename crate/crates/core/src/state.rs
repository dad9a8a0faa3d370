//! Sampled wavefunctions and cubic-spline resampling.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{Domain, QuadratureGrid};

/// Magnitude below which a wavefunction is treated as vanished at the grid edge.
pub const SUPPORT_TOL: f64 = 1e-10;

/// `ψ(x, t)` sampled on a [`QuadratureGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    pub grid: Arc<QuadratureGrid>,
    pub values: Vec<Complex64>,
    pub t: f64,
    pub hbar: f64,
}

impl GridWavefunction {
    pub fn new(grid: Arc<QuadratureGrid>, values: Vec<Complex64>, t: f64, hbar: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Input(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, t, hbar })
    }

    pub fn from_fn<F>(grid: Arc<QuadratureGrid>, t: f64, hbar: f64, f: F) -> Self
    where
        F: Fn(f64) -> Complex64,
    {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        Self { grid, values, t, hbar }
    }

    pub fn with_values(&self, values: Vec<Complex64>) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values,
            t: self.t,
            hbar: self.hbar,
        }
    }

    /// `⟨self|other⟩` by grid quadrature.
    pub fn inner(&self, other: &GridWavefunction) -> Complex64 {
        self.grid
            .weights
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| a.conj() * b * *w)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid
            .weights
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Input(format!("cannot normalize state of norm {n}")));
        }
        Ok(self.with_values(self.values.iter().map(|v| v / n).collect()))
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// `⟨x^k⟩ / ⟨1⟩`.
    pub fn moment(&self, k: i32) -> f64 {
        let num: f64 = self
            .grid
            .nodes
            .iter()
            .zip(&self.grid.weights)
            .zip(&self.values)
            .map(|((x, w), v)| w * x.powi(k) * v.norm_sqr())
            .sum();
        num / self.norm_sqr()
    }

    /// `max |ψ|` over the nodes adjacent to outer boundaries (both ends on the
    /// full line, the far end on the half line).
    pub fn boundary_magnitude(&self) -> f64 {
        let n = self.values.len();
        let edge = 2.min(n);
        let far = self.values[n - edge..].iter().map(|v| v.norm()).fold(0.0, f64::max);
        match self.grid.domain {
            Domain::FullLine => self.values[..edge].iter().map(|v| v.norm()).fold(far, f64::max),
            Domain::HalfLine => far,
        }
    }

    /// Fails when the state has not decayed below `tol` at the outer boundary.
    pub fn check_support(&self, tol: f64) -> Result<()> {
        let m = self.boundary_magnitude();
        if m > tol {
            Err(Error::Support(format!(
                "|psi| = {m:e} at the grid boundary exceeds {tol:e}"
            )))
        } else {
            Ok(())
        }
    }

    /// Interpolates the state at arbitrary abscissae with a cubic spline. Points beyond the grid are taken as zero, which requires the
    /// state to have vanished at the corresponding edge.
    pub fn resample(&self, xs: &[f64]) -> Result<Vec<Complex64>> {
        let spline = ComplexSpline::new(&self.grid, &self.values);
        let lo = spline.x0;
        let hi = self.grid.x_max();
        let h = self.grid.spacing;
        let n = self.values.len();
        let mut out = Vec::with_capacity(xs.len());
        for &x in xs {
            if x < lo - 1e-12 * h || x > hi + 1e-12 * h {
                let edge = if x > hi {
                    self.values[n - 1].norm()
                } else if self.grid.domain == Domain::FullLine {
                    self.values[0].norm()
                } else {
                    return Err(Error::Domain(format!("half-line state requested at x = {x}")));
                };
                if edge > SUPPORT_TOL {
                    return Err(Error::Support(format!(
                        "abscissa {x} lies outside the grid where |psi| = {edge:e}"
                    )));
                }
                out.push(Complex64::new(0.0, 0.0));
            } else {
                out.push(spline.eval(x.clamp(lo, hi)));
            }
        }
        Ok(out)
    }
}

/// Not-a-knot cubic spline through uniformly spaced complex samples. Half-line
/// grids get an extra knot `ψ(0) = 0`.
pub(crate) struct ComplexSpline {
    x0: f64,
    h: f64,
    f: Vec<Complex64>,
    m: Vec<Complex64>,
}

impl ComplexSpline {
    fn new(grid: &QuadratureGrid, values: &[Complex64]) -> Self {
        let (x0, f) = match grid.domain {
            Domain::FullLine => (grid.x_min(), values.to_vec()),
            Domain::HalfLine => {
                let mut f = Vec::with_capacity(values.len() + 1);
                f.push(Complex64::new(0.0, 0.0));
                f.extend_from_slice(values);
                (0.0, f)
            }
        };
        Self::uniform(x0, grid.spacing, f)
    }

    pub(crate) fn uniform(x0: f64, h: f64, f: Vec<Complex64>) -> Self {
        let m = not_a_knot_second_derivatives(&f, h);
        Self { x0, h, f, m }
    }

    pub(crate) fn eval(&self, x: f64) -> Complex64 {
        let n = self.f.len();
        let s = (x - self.x0) / self.h;
        let i = (s.floor() as usize).min(n - 2);
        let t = s - i as f64;
        let u = 1.0 - t;
        let h2 = self.h * self.h / 6.0;
        self.f[i] * u + self.f[i + 1] * t + (self.m[i] * (u * u * u - u) + self.m[i + 1] * (t * t * t - t)) * h2
    }
}

/// Second derivatives of the not-a-knot cubic spline: the third derivative
/// is continuous across the second and penultimate knots, which keeps the
/// end intervals at fourth order even where `ψ''` does not vanish.
fn not_a_knot_second_derivatives(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    let zero = Complex64::new(0.0, 0.0);
    if n < 4 {
        return vec![zero; n];
    }
    // unknowns m[1..n−1]: m[i−1] + 4m[i] + m[i+1] = 6(f[i+1] − 2f[i] + f[i−1])/h²,
    // with m[0] = 2m[1] − m[2] and m[n−1] = 2m[n−2] − m[n−3] folded into the end rows
    let k = n - 2;
    let scale = 6.0 / (h * h);
    let mut c_prime = vec![0.0; k];
    let mut d_prime = vec![zero; k];
    for j in 0..k {
        let i = j + 1;
        let rhs = (f[i + 1] - f[i] * 2.0 + f[i - 1]) * scale;
        let (lower, diag, upper) = if j == 0 || j == k - 1 {
            (0.0, 6.0, 0.0)
        } else {
            (1.0, 4.0, 1.0)
        };
        let prev_c = if j == 0 { 0.0 } else { c_prime[j - 1] };
        let prev_d = if j == 0 { zero } else { d_prime[j - 1] };
        let denom = diag - lower * prev_c;
        c_prime[j] = upper / denom;
        d_prime[j] = (rhs - prev_d * lower) / denom;
    }
    let mut m = vec![zero; n];
    m[k] = d_prime[k - 1];
    for j in (0..k - 1).rev() {
        m[j + 1] = d_prime[j] - m[j + 2] * c_prime[j];
    }
    m[0] = m[1] * 2.0 - m[2];
    m[n - 1] = m[n - 2] * 2.0 - m[n - 3];
    m
}
