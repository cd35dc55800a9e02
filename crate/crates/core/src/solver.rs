//! Constrained weighted l1 analysis problem
//!
//! ```text
//! min_x  |W Psi^T x|_1   subject to  |y - Phi x|_2 <= epsilon   (and x >= 0)
//! ```
//!
//! solved with a first-order primal-dual (Chambolle-Pock) iteration. The
//! l1 term and the l2-ball indicator each get a dual variable; both are
//! handled through the Moreau identity, so every step is a cheap proximal
//! map plus one application of `Phi`, `Phi^*`, `Psi^T` and `Psi`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dictionary::SaraDictionary;
use crate::error::{dim_err, Error, Result};
use crate::image::{dot, norm2, Image};
use crate::measurement::{norm_c, MeasurementOperator};

/// Diagonal of `W`, strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Config(alloc::format!(
                "weights must be finite and strictly positive, found {w}"
            )));
        }
        Ok(Self(weights))
    }

    /// `W = I`.
    pub fn ones(len: usize) -> Self {
        Self(vec![1.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|w| w * c).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Radius of the data-fidelity ball, in measurement units.
    pub epsilon: f64,
    pub positivity: bool,
    pub max_iters: usize,
    /// Threshold on the relative change of the primal and of the dual iterate.
    pub rel_tol: f64,
    /// Threshold on the relative feasibility gap, see [`SolverResult::relative_gap`].
    pub feas_tol: f64,
    /// Norm of `x -> (Phi x, Psi^T x)`; estimated by power iteration when `None`.
    pub operator_norm: Option<f64>,
    /// Initial `tau / sigma`; the product is pinned to `0.99 / L^2`.
    pub step_ratio: f64,
    /// Rebalance `tau / sigma` from the primal and dual residuals.
    pub adaptive_steps: bool,
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            positivity: false,
            max_iters: 2000,
            rel_tol: 1e-5,
            feas_tol: 1e-4,
            operator_norm: None,
            step_ratio: 1.0,
            adaptive_steps: true,
            record_trace: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(alloc::format!("solver: {what}")));
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be finite and non-negative");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if !(self.rel_tol > 0.0 && self.feas_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.step_ratio > 0.0 && self.step_ratio.is_finite()) {
            return bad("step ratio must be positive");
        }
        if let Some(l) = self.operator_norm {
            if !(l > 0.0 && l.is_finite()) {
                return bad("operator norm must be positive");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub objective: f64,
    pub residual: f64,
    pub rel_change: f64,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub x_hat: Image,
    pub iterations: usize,
    /// `|W Psi^T x_hat|_1`.
    pub final_objective: f64,
    /// `max(0, |y - Phi x_hat| - epsilon)`.
    pub feasibility_gap: f64,
    pub converged: bool,
    pub trace: Vec<IterationRecord>,
}

impl SolverResult {
    /// Converts a non-converged result into [`Error::Convergence`].
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Convergence {
                what: "weighted l1 solver",
                iterations: self.iterations,
            })
        }
    }

    /// Feasibility gap over `max(epsilon, 1e-4 |y|)`.
    pub fn relative_gap(gap: f64, epsilon: f64, y_norm: f64) -> f64 {
        let scale = epsilon.max(1e-4 * y_norm);
        if scale > 0.0 {
            gap / scale
        } else if gap > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

/// Coefficient types the weighted soft-thresholding operates on.
pub trait Coefficient: Copy {
    fn modulus(self) -> f64;
    fn scale(self, s: f64) -> Self;
}

impl Coefficient for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }

    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Coefficient for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }

    fn scale(self, s: f64) -> Self {
        self * s
    }
}

#[inline]
fn shrink<C: Coefficient>(a: C, threshold: f64) -> C {
    let m = a.modulus();
    if m <= threshold {
        a.scale(0.0)
    } else {
        a.scale(1.0 - threshold / m)
    }
}

/// Proximal map of `tau |W .|_1`: `a_i max(0, 1 - tau w_i / |a_i|)`.
pub fn prox_weighted_l1<C: Coefficient>(alpha: &[C], w: &WeightVector, tau: f64) -> Result<Vec<C>> {
    if alpha.len() != w.len() {
        return Err(dim_err!(
            "{} coefficients, {} weights",
            alpha.len(),
            w.len()
        ));
    }
    if !(tau >= 0.0) {
        return Err(Error::Config(alloc::format!(
            "threshold scale must be >= 0, got {tau}"
        )));
    }
    Ok(alpha
        .iter()
        .zip(w.as_slice())
        .map(|(&a, &wi)| shrink(a, tau * wi))
        .collect())
}

/// Projection onto `{v : |v - center| <= epsilon}`.
pub fn project_l2_ball(
    v: &[Complex64],
    center: &[Complex64],
    epsilon: f64,
) -> Result<Vec<Complex64>> {
    if v.len() != center.len() {
        return Err(dim_err!(
            "vector of {} entries, center of {}",
            v.len(),
            center.len()
        ));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::Config(alloc::format!(
            "ball radius must be >= 0, got {epsilon}"
        )));
    }
    let mut out = v.to_vec();
    project_l2_ball_in_place(&mut out, center, epsilon);
    Ok(out)
}

fn project_l2_ball_in_place(v: &mut [Complex64], center: &[Complex64], epsilon: f64) {
    let dist = v
        .iter()
        .zip(center)
        .map(|(a, c)| (a - c).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if dist <= epsilon {
        return;
    }
    let s = epsilon / dist;
    for (a, &c) in v.iter_mut().zip(center) {
        *a = c + (*a - c) * s;
    }
}

pub fn project_positive(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

/// `epsilon = sigma_n sqrt(M + 2 sqrt(M))`: mean plus two standard deviations
/// of `|n|^2` for complex noise of per-sample variance `sigma_n^2`.
pub fn noise_bound_epsilon(sigma_n: f64, m: usize) -> f64 {
    let m = m as f64;
    sigma_n * (m + 2.0 * m.sqrt()).sqrt()
}

const NORM_REL_TOL: f64 = 1e-6;
const NORM_MAX_ITERS: usize = 500;

/// Spectral norm of `x -> (Phi x, Psi^T x)` by power iteration on
/// `Re(Phi^* Phi) + Psi Psi^T`.
pub fn operator_norm(phi: &dyn MeasurementOperator, dict: &SaraDictionary) -> Result<f64> {
    let n = dict.n_pixels();
    if phi.n() != n {
        return Err(dim_err!(
            "operator acts on {} pixels, dictionary on {n}",
            phi.n()
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a7a);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut meas = vec![Complex64::new(0.0, 0.0); phi.m()];
    let mut coeffs = vec![0.0; dict.n_coeffs()];
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut previous = 0.0;
    for _ in 0..NORM_MAX_ITERS {
        let nv = norm2(&v);
        if nv == 0.0 {
            return Ok(0.0);
        }
        v.iter_mut().for_each(|x| *x /= nv);
        phi.forward_into(&v, &mut meas);
        phi.adjoint_into(&meas, &mut a);
        dict.analysis_into(&v, &mut coeffs);
        dict.synthesis_into(&coeffs, &mut b);
        for (ai, bi) in a.iter_mut().zip(&b) {
            *ai += bi;
        }
        let lambda = dot(&v, &a);
        core::mem::swap(&mut v, &mut a);
        if (lambda - previous).abs() <= NORM_REL_TOL * lambda {
            return Ok(lambda.sqrt());
        }
        previous = lambda;
    }
    Err(Error::Convergence {
        what: "operator norm power iteration",
        iterations: NORM_MAX_ITERS,
    })
}

/// `Delta(y, Phi, W, epsilon)`: the weighted l1 analysis solution.
///
/// A run that hits `max_iters` is returned with `converged = false`; use
/// [`SolverResult::into_converged`] to treat it as an error.
pub fn solve_weighted_l1(
    y: &[Complex64],
    phi: &dyn MeasurementOperator,
    dict: &SaraDictionary,
    w: &WeightVector,
    cfg: &SolverConfig,
    warm_start: Option<&Image>,
) -> Result<SolverResult> {
    cfg.validate()?;
    let n = dict.n_pixels();
    let d = dict.n_coeffs();
    let m = phi.m();
    if phi.n() != n {
        return Err(dim_err!(
            "operator acts on {} pixels, dictionary on {n}",
            phi.n()
        ));
    }
    if y.len() != m {
        return Err(dim_err!(
            "{} measurements for an operator with M = {m}",
            y.len()
        ));
    }
    if w.len() != d {
        return Err(dim_err!("{} weights for {d} coefficients", w.len()));
    }
    let (rows, cols) = dict.shape();
    let mut x = match warm_start {
        Some(img) if img.shape() != (rows, cols) => {
            return Err(dim_err!(
                "warm start shape {:?} differs from {:?}",
                img.shape(),
                (rows, cols)
            ))
        }
        Some(img) => img.as_slice().to_vec(),
        None => vec![0.0; n],
    };
    if cfg.positivity {
        x.iter_mut().for_each(|v| *v = v.max(0.0));
    }

    let norm = match cfg.operator_norm {
        Some(l) => l,
        None => operator_norm(phi, dict)?,
    };
    let step = 0.99f64.sqrt() / norm;
    let ratio = cfg.step_ratio.sqrt();
    let (mut tau, mut sigma) = (step * ratio, step / ratio);
    let mut adapt = ADAPT_START;
    let weights = w.as_slice();
    let y_norm = norm_c(y);
    let eps = cfg.epsilon;

    let mut ax = vec![0.0; d];
    let mut px = vec![Complex64::new(0.0, 0.0); m];
    dict.analysis_into(&x, &mut ax);
    phi.forward_into(&x, &mut px);
    let mut u1 = vec![0.0; d];
    let mut u2 = vec![Complex64::new(0.0, 0.0); m];
    let mut u2_prev = vec![Complex64::new(0.0, 0.0); m];

    // `kt_u` holds Psi u1 + Re Phi^* u2 for the current duals.
    let mut kt_u = vec![0.0; n];
    let mut kt_u_prev = vec![0.0; n];
    let mut meas_part = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut ax_new = vec![0.0; d];
    let mut px_new = vec![Complex64::new(0.0, 0.0); m];
    let mut ball = vec![Complex64::new(0.0, 0.0); m];
    let mut trace = Vec::new();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iters {
        iterations += 1;

        for ((xn, &xo), &g) in x_new.iter_mut().zip(&x).zip(&kt_u) {
            let v = xo - tau * g;
            *xn = if cfg.positivity { v.max(0.0) } else { v };
        }
        dict.analysis_into(&x_new, &mut ax_new);
        phi.forward_into(&x_new, &mut px_new);

        // Dual step on the l1 term: prox of sigma h^* with h = |W.|_1, by Moreau,
        // i.e. v - sigma prox_{h/sigma}(v / sigma), which clips v to [-w, w].
        // Alongside, the dual residual (u - u')/sigma - K(x - x').
        let (mut dual_diff, mut dual_norm, mut dual_res) = (0.0, 0.0, 0.0);
        for ((u, &an), (&ao, &wi)) in u1.iter_mut().zip(&ax_new).zip(ax.iter().zip(weights)) {
            let v = *u + sigma * (2.0 * an - ao);
            let next = v - sigma * shrink(v / sigma, wi / sigma);
            dual_diff += (next - *u) * (next - *u);
            dual_norm += next * next;
            let r = (*u - next) / sigma - (ao - an);
            dual_res += r * r;
            *u = next;
        }
        // Dual step on the ball indicator, same identity with a projection.
        u2_prev.copy_from_slice(&u2);
        for ((b, u), (&pn, &po)) in ball
            .iter_mut()
            .zip(u2.iter_mut())
            .zip(px_new.iter().zip(&px))
        {
            *u += (pn * 2.0 - po) * sigma;
            *b = *u / sigma;
        }
        project_l2_ball_in_place(&mut ball, y, eps);
        for (((u, &b), &prev), (&pn, &po)) in u2
            .iter_mut()
            .zip(&ball)
            .zip(&u2_prev)
            .zip(px_new.iter().zip(&px))
        {
            *u -= b * sigma;
            dual_diff += (*u - prev).norm_sqr();
            dual_norm += u.norm_sqr();
            dual_res += ((prev - *u) / sigma - (po - pn)).norm_sqr();
        }

        core::mem::swap(&mut kt_u, &mut kt_u_prev);
        dict.synthesis_into(&u1, &mut kt_u);
        phi.adjoint_into(&u2, &mut meas_part);
        kt_u.iter_mut().zip(&meas_part).for_each(|(g, &h)| *g += h);

        // Primal residual (x - x')/tau - K^T(u - u').
        let (mut diff, mut primal_res) = (0.0, 0.0);
        for (((&xn, &xo), &g), &go) in x_new.iter().zip(&x).zip(&kt_u).zip(&kt_u_prev) {
            diff += (xn - xo) * (xn - xo);
            let r = (xo - xn) / tau - (go - g);
            primal_res += r * r;
        }
        // The iterate is the primal-dual pair; a warm start with fresh duals
        // must not pass as converged on its first, motionless primal step.
        let rel_change =
            relative(diff.sqrt(), norm2(&x_new)).max(relative(dual_diff.sqrt(), dual_norm.sqrt()));
        core::mem::swap(&mut x, &mut x_new);
        core::mem::swap(&mut ax, &mut ax_new);
        core::mem::swap(&mut px, &mut px_new);

        let residual = residual_norm(y, &px);
        let gap = (residual - eps).max(0.0);
        if cfg.record_trace {
            trace.push(IterationRecord {
                iteration: iterations,
                objective: weighted_l1(&ax, weights),
                residual,
                rel_change,
            });
        }
        if rel_change < cfg.rel_tol && SolverResult::relative_gap(gap, eps, y_norm) < cfg.feas_tol {
            converged = true;
            break;
        }

        // Residual balancing: shift the split between tau and sigma toward
        // the lagging residual, keeping tau sigma L^2 fixed. The adaptation
        // factor decays geometrically, so the steps settle.
        if cfg.adaptive_steps {
            let (p, q) = (primal_res.sqrt(), dual_res.sqrt());
            if p > ADAPT_BAND * q {
                tau /= 1.0 - adapt;
                sigma *= 1.0 - adapt;
                adapt *= ADAPT_DECAY;
            } else if q > ADAPT_BAND * p {
                tau *= 1.0 - adapt;
                sigma /= 1.0 - adapt;
                adapt *= ADAPT_DECAY;
            }
        }
    }

    let residual = residual_norm(y, &px);
    Ok(SolverResult {
        final_objective: weighted_l1(&ax, weights),
        feasibility_gap: (residual - eps).max(0.0),
        x_hat: Image::new(rows, cols, x)?,
        iterations,
        converged,
        trace,
    })
}

const ADAPT_START: f64 = 0.5;
const ADAPT_DECAY: f64 = 0.95;
const ADAPT_BAND: f64 = 1.5;

fn relative(diff: f64, norm: f64) -> f64 {
    if norm > 0.0 {
        diff / norm
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn residual_norm(y: &[Complex64], px: &[Complex64]) -> f64 {
    y.iter()
        .zip(px)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn weighted_l1(coeffs: &[f64], weights: &[f64]) -> f64 {
    coeffs.iter().zip(weights).map(|(a, w)| w * a.abs()).sum()
}
