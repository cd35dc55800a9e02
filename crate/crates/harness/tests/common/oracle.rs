//! Dense reference solver for the weighted l1 analysis problem, posed as a
//! second-order cone program and handed to Clarabel's interior-point method.
//!
//!   minimize   sum_i w_i t_i
//!   subject to -t <= Psi^T x <= t,  |[Re; Im](y - Phi x)|_2 <= eps,  x >= 0 (optional)

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, NonnegativeConeT, SecondOrderConeT,
    SolverStatus, SupportedConeT,
};
use sara_core::{Complex64, Image, MeasurementOperator, SaraDictionary};

pub struct OracleSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

/// Columns of `Phi` as dense complex vectors, one per pixel.
pub fn dense_phi(phi: &dyn MeasurementOperator) -> Vec<Vec<Complex64>> {
    let n = phi.n();
    (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            phi.forward(&e).unwrap()
        })
        .collect()
}

/// Columns of `Psi^T`, one per pixel.
pub fn dense_analysis(dict: &SaraDictionary) -> Vec<Vec<f64>> {
    let (rows, cols) = dict.shape();
    (0..rows * cols)
        .map(|j| {
            let mut e = Image::zeros(rows, cols);
            e.as_mut_slice()[j] = 1.0;
            dict.analysis(&e).unwrap()
        })
        .collect()
}

/// Column-major triplets to CSC, dropping exact zeros.
fn csc(nrows: usize, ncols: usize, columns: &[Vec<(usize, f64)>]) -> CscMatrix<f64> {
    let mut colptr = Vec::with_capacity(ncols + 1);
    let mut rowval = Vec::new();
    let mut nzval = Vec::new();
    colptr.push(0);
    for col in columns {
        let mut entries: Vec<_> = col.iter().copied().filter(|&(_, v)| v != 0.0).collect();
        entries.sort_by_key(|&(r, _)| r);
        for (r, v) in entries {
            rowval.push(r);
            nzval.push(v);
        }
        colptr.push(rowval.len());
    }
    CscMatrix::new(nrows, ncols, colptr, rowval, nzval)
}

pub fn solve(
    y: &[Complex64],
    phi: &dyn MeasurementOperator,
    dict: &SaraDictionary,
    weights: &[f64],
    epsilon: f64,
    positivity: bool,
) -> OracleSolution {
    let n = phi.n();
    let m = phi.m();
    let d = dict.n_coeffs();
    let phi_cols = dense_phi(phi);
    let psi_cols = dense_analysis(dict);

    // Row blocks of A: [Psi^T, -I] (d), [-Psi^T, -I] (d), [-I, 0] (n, optional),
    // then the cone rows: 0 (radius), [Re Phi, 0] (m), [Im Phi, 0] (m).
    let pos_rows = if positivity { n } else { 0 };
    let soc_start = 2 * d + pos_rows;
    let nrows = soc_start + 1 + 2 * m;
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + d];
    for j in 0..n {
        let col = &mut columns[j];
        for (i, &v) in psi_cols[j].iter().enumerate() {
            col.push((i, v));
            col.push((d + i, -v));
        }
        if positivity {
            col.push((2 * d + j, -1.0));
        }
        for (i, v) in phi_cols[j].iter().enumerate() {
            col.push((soc_start + 1 + i, v.re));
            col.push((soc_start + 1 + m + i, v.im));
        }
    }
    for i in 0..d {
        columns[n + i] = vec![(i, -1.0), (d + i, -1.0)];
    }
    let a = csc(nrows, n + d, &columns);
    let mut b = vec![0.0; nrows];
    b[soc_start] = epsilon;
    for (i, v) in y.iter().enumerate() {
        b[soc_start + 1 + i] = v.re;
        b[soc_start + 1 + m + i] = v.im;
    }
    let mut q = vec![0.0; n + d];
    q[n..].copy_from_slice(weights);
    let p = CscMatrix::zeros((n + d, n + d));
    let cones: Vec<SupportedConeT<f64>> = vec![
        NonnegativeConeT(2 * d + pos_rows),
        SecondOrderConeT(1 + 2 * m),
    ];
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(1e-10)
        .tol_gap_rel(1e-10)
        .tol_feas(1e-10)
        .max_iter(400)
        .build()
        .unwrap();
    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings).unwrap();
    solver.solve();
    assert!(
        matches!(
            solver.solution.status,
            SolverStatus::Solved | SolverStatus::AlmostSolved
        ),
        "oracle status {:?}",
        solver.solution.status
    );
    let x = solver.solution.x[..n].to_vec();
    let img = Image::new(dict.shape().0, dict.shape().1, x.clone()).unwrap();
    let objective = dict
        .analysis(&img)
        .unwrap()
        .iter()
        .zip(weights)
        .map(|(a, w)| w * a.abs())
        .sum();
    OracleSolution { x, objective }
}

pub fn residual_norm(y: &[Complex64], phi: &dyn MeasurementOperator, x: &[f64]) -> f64 {
    let px = phi.forward(x).unwrap();
    y.iter()
        .zip(&px)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
