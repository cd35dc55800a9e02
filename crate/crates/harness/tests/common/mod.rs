#![allow(dead_code)]

pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sara_core::dictionary::{db1_to_db8, dirac_and_db1_to_db8, Frame};
use sara_core::measurement::apply_noise;
use sara_core::solver::{noise_bound_epsilon, solve_weighted_l1};
use sara_core::wavelets::Daubechies;
use sara_core::{
    Complex64, DenseOperator, FourierMask, FourierMaskConfig, Image, MeasurementOperator,
    NoiseModel, SaraDictionary, SolverConfig, SpreadSpectrum, SpreadSpectrumConfig, WeightVector,
};

pub struct Instance {
    pub label: String,
    pub phi: Box<dyn MeasurementOperator>,
    pub dict: SaraDictionary,
    pub y: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub epsilon: f64,
    pub positivity: bool,
}

pub const SIDE: usize = 8;

/// Small weighted l1 problems over 8x8 images, cycling through operator
/// kinds, dictionaries, weightings and the positivity constraint.
pub fn instance(k: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a11_0000 + k as u64);
    let n = SIDE * SIDE;
    let m = rng.random_range(20..=44);
    let (kind, phi): (&str, Box<dyn MeasurementOperator>) = match k % 3 {
        0 => {
            let scale = (1.0 / (2.0 * m as f64)).sqrt();
            let data = (0..m * n)
                .map(|_| {
                    let (a, b): (f64, f64) =
                        (rng.sample(StandardNormal), rng.sample(StandardNormal));
                    Complex64::new(a * scale, b * scale)
                })
                .collect();
            ("dense", Box::new(DenseOperator::new(m, n, data).unwrap()))
        }
        1 => (
            "spread",
            Box::new(
                SpreadSpectrum::new(
                    SpreadSpectrumConfig {
                        seed: rng.random(),
                        m,
                    },
                    SIDE,
                    SIDE,
                )
                .unwrap(),
            ),
        ),
        _ => (
            "mask",
            Box::new(FourierMask::new(FourierMaskConfig::new(rng.random(), SIDE, m)).unwrap()),
        ),
    };
    let frames = match (k / 3) % 5 {
        0 => vec![Frame::Dirac],
        1 => vec![Frame::Daubechies(Daubechies::Db8)],
        2 => db1_to_db8(),
        3 => dirac_and_db1_to_db8(),
        _ => vec![
            Frame::Daubechies(Daubechies::Db2),
            Frame::Daubechies(Daubechies::Db4),
        ],
    };
    let dict = SaraDictionary::new(frames, SIDE, SIDE, 2).unwrap();
    let truth: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.35) {
                rng.random_range(0.1..1.0)
            } else {
                0.0
            }
        })
        .collect();
    let y0 = phi.forward(&truth).unwrap();
    let (y, sigma) = apply_noise(
        &y0,
        &NoiseModel {
            input_snr_db: rng.random_range(20.0..40.0),
            seed: rng.random(),
        },
    )
    .unwrap();
    let epsilon = noise_bound_epsilon(sigma, m);
    let weights = if k % 2 == 0 {
        vec![1.0; dict.n_coeffs()]
    } else {
        (0..dict.n_coeffs())
            .map(|_| rng.random_range(0.1..=1.0))
            .collect()
    };
    let positivity = k % 4 != 3;
    Instance {
        label: format!("#{k} {kind} M={m} q={} pos={positivity}", dict.q()),
        phi,
        dict,
        y,
        weights,
        epsilon,
        positivity,
    }
}

pub fn tight_solver(epsilon: f64, positivity: bool) -> SolverConfig {
    SolverConfig {
        epsilon,
        positivity,
        max_iters: 300_000,
        rel_tol: 1e-10,
        feas_tol: 1e-8,
        ..SolverConfig::default()
    }
}

pub struct Comparison {
    pub label: String,
    pub rel_objective: f64,
    pub gap: f64,
    pub min_pixel: f64,
    pub converged: bool,
}

impl Comparison {
    pub fn passes(&self) -> bool {
        self.rel_objective <= 1e-4 && self.gap <= 1e-6 && self.min_pixel >= -1e-10
    }
}

pub fn compare_with_oracle(inst: &Instance) -> Comparison {
    let w = WeightVector::new(inst.weights.clone()).unwrap();
    let cfg = tight_solver(inst.epsilon, inst.positivity);
    let ours = solve_weighted_l1(&inst.y, inst.phi.as_ref(), &inst.dict, &w, &cfg, None).unwrap();
    let reference = oracle::solve(
        &inst.y,
        inst.phi.as_ref(),
        &inst.dict,
        &inst.weights,
        inst.epsilon,
        inst.positivity,
    );
    let residual = oracle::residual_norm(&inst.y, inst.phi.as_ref(), ours.x_hat.as_slice());
    let min_pixel = if inst.positivity {
        ours.x_hat.min()
    } else {
        0.0
    };
    Comparison {
        label: inst.label.clone(),
        rel_objective: (ours.final_objective - reference.objective).abs()
            / reference.objective.abs().max(1e-12),
        gap: (residual - inst.epsilon).max(0.0),
        min_pixel,
        converged: ours.converged,
    }
}

pub fn random_image(rows: usize, cols: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::new(
        rows,
        cols,
        (0..rows * cols)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect(),
    )
    .unwrap()
}
