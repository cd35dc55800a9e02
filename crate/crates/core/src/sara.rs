//! The sparsity averaging reweighted analysis loop.
//!
//! Starting from the unweighted solution `x(0)` and `gamma(0) = std(Psi^T x(0))`,
//! each pass sets `W = diag(gamma / (gamma + |Psi^T x(t-1)|))`, re-solves the
//! weighted problem warm-started at `x(t-1)`, then lowers `gamma` by `beta`
//! down to the noise floor `sigma_alpha`. Iteration stops once the relative
//! change between successive solutions drops to `eta` or after `n_max` solves.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dictionary::SaraDictionary;
use crate::error::{Error, Result};
use crate::image::{norm2, Image};
use crate::measurement::MeasurementOperator;
use crate::solver::{operator_norm, solve_weighted_l1, SolverConfig, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaraConfig {
    pub epsilon: f64,
    pub sigma_alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub n_max: usize,
    /// Inner solver controls; its `epsilon` is overridden by [`SaraConfig::epsilon`].
    pub solver: SolverConfig,
}

pub const DEFAULT_BETA: f64 = 1e-1;
pub const DEFAULT_ETA: f64 = 1e-3;
pub const DEFAULT_N_MAX: usize = 10;

impl SaraConfig {
    pub fn new(epsilon: f64, sigma_alpha: f64) -> Self {
        Self {
            epsilon,
            sigma_alpha,
            beta: DEFAULT_BETA,
            eta: DEFAULT_ETA,
            n_max: DEFAULT_N_MAX,
            solver: SolverConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(alloc::format!("sara: {what}")));
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta must lie in (0, 1)");
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad("eta must lie in (0, 1)");
        }
        if self.n_max == 0 {
            return bad("n_max must be at least 1");
        }
        if !(self.sigma_alpha >= 0.0 && self.sigma_alpha.is_finite()) {
            return bad("sigma_alpha must be finite and non-negative");
        }
        SolverConfig {
            epsilon: self.epsilon,
            ..self.solver
        }
        .validate()
    }
}

/// One weighted solve of the loop; `t = 0` is the unweighted initialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaraRecord {
    pub t: usize,
    /// `gamma(t)` after the update that follows solve `t`.
    pub gamma: f64,
    /// Relative change against the previous solution; 1 at `t = 0`.
    pub rho: f64,
    /// `|W(t) Psi^T x(t)|_1`.
    pub objective: f64,
    pub inner_iters: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SaraTrace {
    pub records: Vec<SaraRecord>,
}

impl SaraTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_inner_iters(&self) -> usize {
        self.records.iter().map(|r| r.inner_iters).sum()
    }

    pub fn all_converged(&self) -> bool {
        self.records.iter().all(|r| r.converged)
    }

    pub fn last(&self) -> Option<&SaraRecord> {
        self.records.last()
    }
}

/// Noise level in the coefficient domain, `sqrt(M / D) sigma_n`.
pub fn sigma_alpha(m: usize, d: usize, sigma_n: f64) -> f64 {
    (m as f64 / d as f64).sqrt() * sigma_n
}

/// `w_i = gamma / (gamma + |alpha_i|)`, in `(0, 1]` and equal to 1 where `alpha_i = 0`.
pub fn update_weights(alpha: &[f64], gamma: f64) -> Result<WeightVector> {
    if !(gamma > 0.0) {
        return Err(Error::NonPositiveGamma(gamma));
    }
    WeightVector::new(alpha.iter().map(|a| gamma / (gamma + a.abs())).collect())
}

/// Sample standard deviation about the mean.
pub fn empirical_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// `max(beta^t gamma0, sigma_alpha)`, the closed form of the homotopy
/// `gamma(t) = max(beta gamma(t-1), sigma_alpha)`.
fn gamma_at(gamma0: f64, beta: f64, sigma_alpha: f64, t: usize) -> f64 {
    let mut decay = 1.0;
    for _ in 0..t {
        decay *= beta;
    }
    (decay * gamma0).max(sigma_alpha)
}

pub fn sara_reconstruct(
    y: &[Complex64],
    phi: &dyn MeasurementOperator,
    dict: &SaraDictionary,
    cfg: &SaraConfig,
) -> Result<(Image, SaraTrace)> {
    cfg.validate()?;
    let mut solver = SolverConfig {
        epsilon: cfg.epsilon,
        ..cfg.solver
    };
    if solver.operator_norm.is_none() {
        solver.operator_norm = Some(operator_norm(phi, dict)?);
    }

    let d = dict.n_coeffs();
    let first = solve_weighted_l1(y, phi, dict, &WeightVector::ones(d), &solver, None)?;
    let mut x_prev = first.x_hat;
    let mut alpha = dict.analysis(&x_prev)?;
    let gamma0 = empirical_std(&alpha);
    let mut trace = SaraTrace::default();
    trace.records.push(SaraRecord {
        t: 0,
        gamma: gamma0,
        rho: 1.0,
        objective: first.final_objective,
        inner_iters: first.iterations,
        converged: first.converged,
    });

    if x_prev.as_slice().iter().all(|&v| v == 0.0) {
        // Zero is optimal for every weighting, so it is a fixed point.
        trace.records[0].rho = 0.0;
        return Ok((x_prev, trace));
    }

    let mut gamma = gamma0;
    let mut rho = 1.0;
    let mut t = 1;
    while rho > cfg.eta && t < cfg.n_max {
        let w = update_weights(&alpha, gamma)?;
        let res = solve_weighted_l1(y, phi, dict, &w, &solver, Some(&x_prev))?;
        gamma = gamma_at(gamma0, cfg.beta, cfg.sigma_alpha, t);
        let prev_norm = x_prev.norm();
        rho = if prev_norm > 0.0 {
            let diff: Vec<f64> = res
                .x_hat
                .as_slice()
                .iter()
                .zip(x_prev.as_slice())
                .map(|(a, b)| a - b)
                .collect();
            norm2(&diff) / prev_norm
        } else {
            1.0
        };
        trace.records.push(SaraRecord {
            t,
            gamma,
            rho,
            objective: res.final_objective,
            inner_iters: res.iterations,
            converged: res.converged,
        });
        log::debug!(
            "sara t={t} gamma={gamma:.3e} rho={rho:.3e} inner={} converged={}",
            res.iterations,
            res.converged
        );
        x_prev = res.x_hat;
        alpha = dict.analysis(&x_prev)?;
        t += 1;
    }
    Ok((x_prev, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{Frame, SaraDictionary};
    use crate::measurement::DenseOperator;
    use crate::wavelets::Daubechies;
    use alloc::vec;

    #[test]
    fn sigma_alpha_examples() {
        assert_eq!(sigma_alpha(7, 7, 0.3), 0.3);
        assert_eq!(sigma_alpha(10, 40, 0.0), 0.0);
        assert_eq!(sigma_alpha(100, 400, 2.0), 1.0);
    }

    #[test]
    fn weight_law() {
        let w = update_weights(&[0.0, 2.0, -2.0, 1e12], 2.0).unwrap();
        let w = w.as_slice();
        assert_eq!(w[0], 1.0);
        assert_eq!(w[1], 0.5);
        assert_eq!(w[2], 0.5);
        assert!(w[3] > 0.0 && w[3] < 1e-11);
        assert_eq!(
            update_weights(&[1.0], 0.0),
            Err(Error::NonPositiveGamma(0.0))
        );
        assert!(update_weights(&[1.0], -1.0).is_err());
    }

    #[test]
    fn weights_decrease_with_magnitude() {
        let mags: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        let w = update_weights(&mags, 0.7).unwrap();
        assert!(w.as_slice().windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn gamma_schedule_floors_at_sigma_alpha() {
        assert_eq!(gamma_at(5.0, 0.1, 0.2, 0), 5.0);
        assert_eq!(gamma_at(5.0, 0.1, 0.2, 1), 0.5);
        assert_eq!(gamma_at(5.0, 0.1, 0.2, 2), 0.2);
        assert_eq!(gamma_at(5.0, 0.1, 0.2, 7), 0.2);
    }

    #[test]
    fn std_estimator() {
        assert_eq!(empirical_std(&[1.0]), 0.0);
        assert!((empirical_std(&[1.0, 2.0, 3.0, 4.0]) - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let base = SaraConfig::new(0.1, 0.01);
        assert_eq!(base.beta, 0.1);
        assert_eq!(base.eta, 1e-3);
        base.validate().unwrap();
        assert!(SaraConfig { beta: 1.0, ..base }.validate().is_err());
        assert!(SaraConfig { eta: 0.0, ..base }.validate().is_err());
        assert!(SaraConfig { n_max: 0, ..base }.validate().is_err());
        assert!(SaraConfig {
            epsilon: -1.0,
            ..base
        }
        .validate()
        .is_err());
    }

    #[test]
    fn exact_data_stops_after_one_reweight() {
        let dict = SaraDictionary::new(vec![Frame::Daubechies(Daubechies::Db1)], 4, 4, 2).unwrap();
        let op = DenseOperator::identity(16);
        let truth: Vec<f64> = (0..16).map(|k| 1.0 + (k % 3) as f64).collect();
        let y: Vec<Complex64> = truth.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut cfg = SaraConfig::new(0.0, 0.0);
        cfg.solver.positivity = true;
        cfg.solver.max_iters = 50_000;
        cfg.solver.rel_tol = 1e-12;
        let (x, trace) = sara_reconstruct(&y, &op, &dict, &cfg).unwrap();
        assert_eq!(trace.len(), 2);
        assert!(trace.records[1].rho <= cfg.eta);
        for (a, b) in x.as_slice().iter().zip(&truth) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_solution_is_a_fixed_point() {
        let dict = SaraDictionary::new(vec![Frame::Dirac], 2, 2, 1).unwrap();
        let op = DenseOperator::identity(4);
        let y = vec![Complex64::new(0.01, 0.0); 4];
        let mut cfg = SaraConfig::new(1.0, 0.0);
        cfg.solver.positivity = true;
        let (x, trace) = sara_reconstruct(&y, &op, &dict, &cfg).unwrap();
        assert!(x.as_slice().iter().all(|&v| v == 0.0));
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.records[0].rho, 0.0);
    }
}
