use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// `[−x_max, x_max]`
    FullLine,
    /// `(0, x_max]`; the origin itself is never a node.
    HalfLine,
}

/// Uniform composite-trapezoid grid. For integrands that vanish at both ends
/// the trapezoid rule converges spectrally, which is why one grid serves every
/// Gaussian width along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: Domain,
    pub spacing: f64,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn x_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn x_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }
}

/// Builds a uniform grid with `n_points` nodes.
pub fn build_grid(domain: Domain, x_max: f64, n_points: usize) -> Result<QuadratureGrid> {
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(Error::Input(format!("x_max must be positive, got {x_max}")));
    }
    if n_points < 3 {
        return Err(Error::Input(format!("need at least 3 grid points, got {n_points}")));
    }
    let grid = match domain {
        Domain::FullLine => {
            let h = 2.0 * x_max / (n_points - 1) as f64;
            let mut nodes: Vec<f64> = (0..n_points).map(|k| -x_max + k as f64 * h).collect();
            nodes[n_points - 1] = x_max;
            if n_points % 2 == 1 {
                nodes[n_points / 2] = 0.0;
            }
            let mut weights = vec![h; n_points];
            weights[0] = 0.5 * h;
            weights[n_points - 1] = 0.5 * h;
            QuadratureGrid {
                nodes,
                weights,
                domain,
                spacing: h,
            }
        }
        Domain::HalfLine => {
            let h = x_max / n_points as f64;
            let nodes: Vec<f64> = (1..=n_points).map(|k| k as f64 * h).collect();
            QuadratureGrid {
                nodes,
                weights: vec![h; n_points],
                domain,
                spacing: h,
            }
        }
    };
    Ok(grid)
}
