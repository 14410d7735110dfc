//! Picard iteration of the Duhamel map
//! `Φ[v](t) = e^{tL_A} v0 + ∫₀^t e^{(t−s)L_A} N(v(s)) ds`,
//! with `N(v) = −∇·(v∇K*v)`.
//!
//! Iterates live on Gauss–Legendre nodes `σ_m` in `[0, t]`. The Duhamel
//! integral up to each node is evaluated with a Gauss–Legendre rule on
//! `[0, σ_j]`, interpolating `N(v(s))` through the nodes by Lagrange
//! polynomials; the propagator factor `e^{(σ_j − s)h_A}` is applied exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::nonlinear::NonlinearOperator;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::quadrature::gauss_legendre;
use crate::regions::{check_amplitude, symbol_h, ChemoParams};
use crate::spectral::{inverse_transform, transform, Field, SpectrumField};

pub const DEFAULT_PICARD_ITERATIONS: usize = 6;
pub const DEFAULT_PICARD_NODES: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct PicardSolution {
    pub field: Field,
    /// `max_j ‖v^{(k+1)}(σ_j) − v^{(k)}(σ_j)‖₂` for each iteration `k`.
    pub increments: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub iterations: usize,
    pub nodes: usize,
    pub dealias: bool,
    pub exec: ExecChoice,
}

/// Serializable mirror of [`Exec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExecChoice {
    Sequential,
    #[default]
    Parallel,
}

impl From<ExecChoice> for Exec {
    fn from(c: ExecChoice) -> Self {
        match c {
            ExecChoice::Sequential => Exec::Sequential,
            ExecChoice::Parallel => Exec::Parallel,
        }
    }
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            iterations: DEFAULT_PICARD_ITERATIONS,
            nodes: DEFAULT_PICARD_NODES,
            dealias: true,
            exec: ExecChoice::Parallel,
        }
    }
}

fn lagrange_weights(nodes: &[f64], s: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|m| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != m)
                .map(|(_, &xj)| (s - xj) / (nodes[m] - xj))
                .product()
        })
        .collect()
}

/// Mild solution at time `t` by `iterations` Picard steps from
/// `v^{(0)}(s) = e^{sL_A} v0`.
pub fn picard_mild_solution(
    params: &ChemoParams,
    amplitude: f64,
    v0: &Field,
    t: f64,
    options: PicardOptions,
) -> Result<PicardSolution> {
    check_amplitude(amplitude)?;
    if options.iterations < 2 {
        return Err(Error::InvalidParameter {
            name: "n_iter",
            reason: format!("need at least 2 iterations, got {}", options.iterations),
        });
    }
    if options.nodes < 2 {
        return Err(Error::InvalidParameter {
            name: "quad_points",
            reason: format!("need at least 2 nodes, got {}", options.nodes),
        });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    let exec: Exec = options.exec.into();
    let grid = v0.grid().clone();
    let symbol: Vec<f64> = grid
        .xi_sq()
        .iter()
        .map(|&x| symbol_h(params, amplitude, x))
        .collect();
    let op = NonlinearOperator::new(params, grid.clone(), options.dealias);
    let v0_hat = transform(v0).coeffs().to_vec();

    let (x, w) = gauss_legendre(options.nodes);
    let nodes: Vec<f64> = x.iter().map(|xi| 0.5 * t * (xi + 1.0)).collect();
    // Targets: every node, then t itself.
    let targets: Vec<f64> = nodes.iter().copied().chain(std::iter::once(t)).collect();

    struct Rule {
        lag: Vec<Vec<f64>>,
        weights: Vec<f64>,
        lags: Vec<f64>,
    }
    let rules: Vec<Rule> = targets
        .iter()
        .map(|&tau| {
            let subs: Vec<f64> = x.iter().map(|xi| 0.5 * tau * (xi + 1.0)).collect();
            Rule {
                lag: subs.iter().map(|&s| lagrange_weights(&nodes, s)).collect(),
                weights: w.iter().map(|wi| 0.5 * tau * wi).collect(),
                lags: subs.iter().map(|&s| tau - s).collect(),
            }
        })
        .collect();

    let free = |tau: f64| -> Vec<Complex64> {
        v0_hat
            .iter()
            .zip(&symbol)
            .map(|(c, &h)| c * (tau * h).exp())
            .collect()
    };
    let mut iterate: Vec<Vec<Complex64>> = targets.iter().map(|&tau| free(tau)).collect();
    let free_part = iterate.clone();
    // Parseval for the unitary DFT: ‖f‖₂ = √(h^n) ‖f̂‖_ℓ².
    let root_cell = grid.cell_volume().sqrt();
    let l2 = |a: &[Complex64], b: &[Complex64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt() * root_cell
    };
    let l2_norm = |a: &[Complex64]| a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() * root_cell;

    let mut increments = Vec::with_capacity(options.iterations);
    for _ in 0..options.iterations {
        let forcing: Vec<Vec<Complex64>> = exec.map_slice(&iterate[..nodes.len()], |v| op.apply_spectrum(v).0);
        if forcing.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Contraction { increments });
        }
        let next: Vec<Vec<Complex64>> = exec.map_range(targets.len(), |j| {
            let rule = &rules[j];
            let mut acc = free_part[j].clone();
            let mut interp = vec![Complex64::new(0.0, 0.0); acc.len()];
            for (l, lag) in rule.lag.iter().enumerate() {
                interp.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                for (m, &c) in lag.iter().enumerate() {
                    for (z, f) in interp.iter_mut().zip(&forcing[m]) {
                        *z += c * f;
                    }
                }
                let (wl, lagt) = (rule.weights[l], rule.lags[l]);
                for ((a, z), &h) in acc.iter_mut().zip(&interp).zip(&symbol) {
                    *a += wl * (lagt * h).exp() * z;
                }
            }
            acc
        });
        let inc = next
            .iter()
            .zip(&iterate)
            .map(|(a, b)| l2(a, b))
            .fold(0.0, f64::max);
        let size = next.iter().map(|a| l2_norm(a)).fold(0.0, f64::max);
        increments.push(inc);
        iterate = next;
        let k = increments.len();
        if k >= 2 && increments[k - 1] > increments[k - 2] && inc > 1e-12 * size.max(1e-300) {
            return Err(Error::Contraction { increments });
        }
    }
    let last = iterate.pop().expect("target list ends with t");
    let field = inverse_transform(&SpectrumField::new(grid, last)?);
    Ok(PicardSolution { field, increments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn zero_data_gives_zero() {
        let g = make_grid(1, 32, 10.0).unwrap();
        let p = ChemoParams::new(4.0, 1.0, 9.0, 1.0).unwrap();
        let sol = picard_mild_solution(&p, 4.0, &Field::zeros(g), 0.05, PicardOptions::default()).unwrap();
        assert!(sol.field.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lagrange_reproduces_polynomials() {
        let nodes = [0.0, 0.3, 0.7, 1.0];
        let w = lagrange_weights(&nodes, 0.45);
        let val: f64 = nodes.iter().zip(&w).map(|(x, c)| c * x.powi(3)).sum();
        assert!((val - 0.45f64.powi(3)).abs() < 1e-14);
    }

    #[test]
    fn rejects_too_few_iterations() {
        let g = make_grid(1, 32, 10.0).unwrap();
        let p = ChemoParams::new(4.0, 1.0, 9.0, 1.0).unwrap();
        let opts = PicardOptions { iterations: 1, ..Default::default() };
        assert!(picard_mild_solution(&p, 4.0, &Field::zeros(g), 0.05, opts).is_err());
    }
}
