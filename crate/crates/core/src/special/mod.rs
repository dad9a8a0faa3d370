//! Hermite and generalized Laguerre polynomials, their normalized oscillator
//! functions, and `ln Γ`.
//!
//! All recurrences carry a running logarithmic scale so that large orders and
//! arguments neither overflow nor underflow before the final exponentiation.

mod quadrature;

pub use quadrature::{build_grid, Domain, QuadratureGrid};

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest polynomial order accepted by the evaluators.
pub const MAX_ORDER: usize = 200;

const RESCALE_AT: f64 = 1e150;

fn check_order(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        Err(Error::Range(format!("order {n} exceeds {MAX_ORDER}")))
    } else {
        Ok(())
    }
}

/// Runs a three-term recurrence `p_{k+1} = step(k, p_k, p_{k-1})` from
/// `(p_0, p_1)` and returns `(ln|p_n|, sign)`.
fn scaled_recurrence<F>(n: usize, p0: f64, p1: f64, step: F) -> (f64, f64)
where
    F: Fn(usize, f64, f64) -> f64,
{
    let (mut prev, mut cur) = (p0, p1);
    if n == 0 {
        return (prev.abs().ln(), prev.signum());
    }
    let mut log_scale = 0.0;
    for k in 1..n {
        let next = step(k, cur, prev);
        prev = cur;
        cur = next;
        let m = cur.abs().max(prev.abs());
        if m > RESCALE_AT || (m < 1.0 / RESCALE_AT && m > 0.0) {
            prev /= m;
            cur /= m;
            log_scale += m.ln();
        }
    }
    (cur.abs().ln() + log_scale, if cur == 0.0 { 0.0 } else { cur.signum() })
}

/// `(ln|H_n(x)|, sign H_n(x))` for the physicists' Hermite polynomial.
pub fn hermite_log(n: usize, x: f64) -> Result<(f64, f64)> {
    check_order(n)?;
    Ok(scaled_recurrence(n, 1.0, 2.0 * x, |k, cur, prev| {
        2.0 * x * cur - 2.0 * k as f64 * prev
    }))
}

/// Physicists' Hermite polynomial `H_n(x)`.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    let (l, s) = hermite_log(n, x)?;
    Ok(s * l.exp())
}

/// Normalized oscillator function `H_n(ξ)e^{−ξ²/2}/√(2ⁿ n! √π)`.
pub fn hermite_function(n: usize, xi: f64) -> Result<f64> {
    check_order(n)?;
    let h0 = PI.powf(-0.25);
    if n == 0 {
        return Ok(h0 * (-0.5 * xi * xi).exp());
    }
    let (l, s) = scaled_recurrence(n, h0, 2f64.sqrt() * xi * h0, |k, cur, prev| {
        let k = k as f64;
        (2.0 / (k + 1.0)).sqrt() * xi * cur - (k / (k + 1.0)).sqrt() * prev
    });
    Ok(s * (l - 0.5 * xi * xi).exp())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > -1.0) {
        Err(Error::Domain(format!("Laguerre index alpha = {alpha} must exceed -1")))
    } else {
        Ok(())
    }
}

/// `(ln|L_n^α(x)|, sign)`.
pub fn laguerre_log(n: usize, alpha: f64, x: f64) -> Result<(f64, f64)> {
    check_order(n)?;
    check_alpha(alpha)?;
    Ok(scaled_recurrence(n, 1.0, 1.0 + alpha - x, |k, cur, prev| {
        let k = k as f64;
        ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0)
    }))
}

/// Generalized Laguerre polynomial `L_n^α(x)`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> Result<f64> {
    let (l, s) = laguerre_log(n, alpha, x)?;
    Ok(s * l.exp())
}

/// Normalized Laguerre function `√(n!/Γ(n+α+1)) y^{α/2} e^{−y/2} L_n^α(y)`,
/// orthonormal on `(0, ∞)` with unit weight.
pub fn laguerre_function(n: usize, alpha: f64, y: f64) -> Result<f64> {
    check_order(n)?;
    check_alpha(alpha)?;
    if y < 0.0 {
        return Err(Error::Domain(format!("Laguerre function argument {y} is negative")));
    }
    let envelope = if y == 0.0 {
        if alpha == 0.0 {
            0.0
        } else if alpha > 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        0.5 * alpha * y.ln() - 0.5 * y
    };
    let l0 = (-0.5 * log_gamma(alpha + 1.0)?).exp();
    let l1 = l0 * (1.0 + alpha - y) / (1.0 + alpha).sqrt();
    let (l, s) = scaled_recurrence(n, l0, l1, |k, cur, prev| {
        let k = k as f64;
        ((2.0 * k + 1.0 + alpha - y) * cur - (k * (k + alpha)).sqrt() * prev) / ((k + 1.0) * (k + alpha + 1.0)).sqrt()
    });
    Ok(s * (l + envelope).exp())
}

/// Natural logarithm of `Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    // shift into the asymptotic regime, Γ(x) = Γ(x+k) / (x(x+1)…(x+k−1))
    let mut z = x;
    let mut shift = 1.0;
    while z < 15.0 {
        shift *= z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2
                                * (-1.0 / 1680.0
                                    + inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0 + inv2 / 156.0))))));
    let stirling = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series;
    Ok(stirling - shift.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite(2, 1.0).unwrap(), 2.0);
        // 32x⁵ − 160x³ + 120x at x = ½
        assert!((hermite(5, 0.5).unwrap() - 41.0).abs() < 1e-12);
    }

    #[test]
    fn hermite_order_guard() {
        assert!(matches!(hermite(201, 0.0), Err(Error::Range(_))));
        let (l, s) = hermite_log(200, 30.0).unwrap();
        assert!(l.is_finite() && l > 700.0 && s == 1.0);
    }

    #[test]
    fn hermite_recurrence_consistency() {
        for n in 1..50 {
            for i in 0..=40 {
                let x = -10.0 + 0.5 * i as f64;
                let (hp, h, hm) = (
                    hermite(n + 1, x).unwrap(),
                    hermite(n, x).unwrap(),
                    hermite(n - 1, x).unwrap(),
                );
                let scale = hp
                    .abs()
                    .max((2.0 * x * h).abs())
                    .max((2.0 * n as f64 * hm).abs())
                    .max(1.0);
                assert!((hp - 2.0 * x * h + 2.0 * n as f64 * hm).abs() / scale < 1e-9);
            }
        }
    }

    #[test]
    fn hermite_function_matches_polynomial() {
        for n in 0..12 {
            for &xi in &[-3.0, -0.4, 0.0, 1.1, 2.5] {
                let fact: f64 = (1..=n).map(|k| k as f64).product();
                let direct =
                    hermite(n, xi).unwrap() * (-0.5 * xi * xi).exp() / (2f64.powi(n as i32) * fact * PI.sqrt()).sqrt();
                assert!((hermite_function(n, xi).unwrap() - direct).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 0.3, 5.0).unwrap(), 1.0);
        assert!((laguerre(1, 0.5, 2.0).unwrap() + 0.5).abs() < 1e-15);
        assert!(matches!(laguerre(2, -1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(laguerre(201, 0.5, 1.0), Err(Error::Range(_))));
    }

    #[test]
    fn laguerre_orthogonality_by_quadrature() {
        // ∫₀^∞ x^α e^{−x} L₂^α L₃^α dx with x = s², trapezoid in s
        let alpha = 0.7;
        let h = 1e-3;
        let mut sum = 0.0;
        let mut norm2 = 0.0;
        for k in 1..=9000 {
            let s = k as f64 * h;
            let x = s * s;
            let w = 2.0 * s * x.powf(alpha) * (-x).exp();
            let (l2, l3) = (laguerre(2, alpha, x).unwrap(), laguerre(3, alpha, x).unwrap());
            sum += h * w * l2 * l3;
            norm2 += h * w * l2 * l2;
        }
        assert!(sum.abs() < 1e-9, "overlap {sum}");
        // Γ(2+α+1)/2!
        let expect = log_gamma(3.0 + alpha).unwrap().exp() / 2.0;
        assert!((norm2 - expect).abs() < 1e-9);
    }

    #[test]
    fn laguerre_function_normalization_factor() {
        let (n, alpha, y) = (4usize, 1.5f64, 2.3f64);
        let direct = ((log_gamma(n as f64 + 1.0).unwrap() - log_gamma(n as f64 + alpha + 1.0).unwrap()) / 2.0).exp()
            * y.powf(alpha / 2.0)
            * (-y / 2.0).exp()
            * laguerre(n, alpha, y).unwrap();
        assert!((laguerre_function(n, alpha, y).unwrap() - direct).abs() < 1e-14);
        assert_eq!(laguerre_function(3, 0.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn log_gamma_known_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-14);
        assert!((log_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-12 * 24f64.ln());
        assert!((log_gamma(0.5).unwrap() - 0.5 * PI.ln()).abs() < 1e-12 * 0.5 * PI.ln());
        // ln(170!) via summed logs
        let direct: f64 = (1..=170).map(|k| (k as f64).ln()).sum();
        assert!((log_gamma(171.0).unwrap() - direct).abs() < 1e-12 * direct);
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-2.5), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn log_gamma_shift_identity(x in 0.05f64..60.0) {
            let lhs = log_gamma(x + 1.0).unwrap();
            let rhs = log_gamma(x).unwrap() + x.ln();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }

        #[test]
        fn laguerre_solves_its_differential_equation(
            n in 0usize..=20,
            alpha in 0.0f64..3.0,
            x in 0.2f64..15.0,
        ) {
            // x y'' + (α + 1 − x) y' + n y = 0
            let h = 1e-3 * (1.0 + x);
            let f = |z: f64| laguerre(n, alpha, z).unwrap();
            let d1 = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
            let d2 = (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
                / (12.0 * h * h);
            let lhs = x * d2 + (alpha + 1.0 - x) * d1 + n as f64 * f(x);
            let scale = (x * d2).abs() + ((alpha + 1.0 - x) * d1).abs() + (n as f64 * f(x)).abs() + 1.0;
            prop_assert!(lhs.abs() / scale < 1e-6, "residual {} scale {}", lhs, scale);
        }
    }
}
