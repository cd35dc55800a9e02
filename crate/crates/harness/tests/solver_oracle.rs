mod common;

use common::{compare_with_oracle, instance, tight_solver, Instance};
use sara_core::solver::solve_weighted_l1;
use sara_core::WeightVector;

#[test]
fn matches_cone_program_oracle() {
    for k in 0..6 {
        let c = compare_with_oracle(&instance(k));
        assert!(
            c.passes(),
            "{}: rel objective {:.2e}, gap {:.2e}, min pixel {:.2e}",
            c.label,
            c.rel_objective,
            c.gap,
            c.min_pixel
        );
    }
}

fn solve(inst: &Instance, weights: &[f64]) -> Vec<f64> {
    let w = WeightVector::new(weights.to_vec()).unwrap();
    let cfg = tight_solver(inst.epsilon, inst.positivity);
    solve_weighted_l1(&inst.y, inst.phi.as_ref(), &inst.dict, &w, &cfg, None)
        .unwrap()
        .x_hat
        .into_vec()
}

#[test]
fn scaling_the_weights_keeps_the_minimizer() {
    let inst = instance(7);
    let base = solve(&inst, &inst.weights);
    let scaled: Vec<f64> = inst.weights.iter().map(|w| w * 37.5).collect();
    let other = solve(&inst, &scaled);
    let norm = base.iter().map(|v| v * v).sum::<f64>().sqrt();
    let diff = base
        .iter()
        .zip(&other)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    assert!(
        diff <= 1e-4 * norm,
        "relative difference {:.2e}",
        diff / norm
    );
}

#[test]
fn warm_start_reaches_the_same_solution() {
    let inst = instance(4);
    let w = WeightVector::new(inst.weights.clone()).unwrap();
    let cfg = tight_solver(inst.epsilon, inst.positivity);
    let cold = solve_weighted_l1(&inst.y, inst.phi.as_ref(), &inst.dict, &w, &cfg, None).unwrap();
    let start = sara_core::Image::zeros(common::SIDE, common::SIDE);
    let half: Vec<f64> = cold.x_hat.as_slice().iter().map(|v| 0.5 * v).collect();
    let start = sara_core::Image::new(start.rows(), start.cols(), half).unwrap();
    let warm = solve_weighted_l1(
        &inst.y,
        inst.phi.as_ref(),
        &inst.dict,
        &w,
        &cfg,
        Some(&start),
    )
    .unwrap();
    assert!(warm.converged && warm.iterations > 1);
    let rel = (warm.final_objective - cold.final_objective).abs() / cold.final_objective;
    assert!(rel < 1e-5, "objective mismatch {rel:.2e}");
}

#[test]
fn objective_settles_over_the_final_iterations() {
    let inst = instance(2);
    let w = WeightVector::new(inst.weights.clone()).unwrap();
    let cfg = sara_core::SolverConfig {
        record_trace: true,
        ..tight_solver(inst.epsilon, inst.positivity)
    };
    let res = solve_weighted_l1(&inst.y, inst.phi.as_ref(), &inst.dict, &w, &cfg, None).unwrap();
    assert!(res.converged);
    let tail = &res.trace[res.trace.len() * 9 / 10..];
    for pair in tail.windows(2) {
        let (a, b) = (pair[0].objective, pair[1].objective);
        assert!(
            b <= a * (1.0 + 1e-6),
            "iteration {}: {a} -> {b}",
            pair[1].iteration
        );
    }
}
