//! Shared strategies and fixtures for the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use netsched_core::linalg;
use netsched_core::rational::Prob;
use proptest::prelude::*;

/// A `rows × cols` matrix with entries uniform in `[−scale, scale]`.
pub fn matrix(rows: usize, cols: usize, scale: f64) -> impl Strategy<Value = DMatrix<f64>> {
    proptest::collection::vec(-scale..scale, rows * cols)
        .prop_map(move |e| DMatrix::from_row_slice(rows, cols, &e))
}

/// A random square matrix rescaled to a target spectral radius in
/// `[0.05, 0.9]` (left as-is in the measure-zero nilpotent case).
pub fn schur(d: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (matrix(d, d, 1.0), 0.05..0.9f64).prop_map(|(a, target)| {
        let rho = linalg::spectral_radius(&a).expect("finite square matrix");
        if rho > 1e-9 {
            a * (target / rho)
        } else {
            a
        }
    })
}

/// A symmetric positive definite matrix `GᵀG + εI` with `ε ∈ [0.1, 1]`.
pub fn spd(d: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (matrix(d, d, 1.0), 0.1..1.0f64).prop_map(move |(g, eps)| {
        g.transpose() * &g + DMatrix::identity(d, d) * eps
    })
}

/// An exact probability `k/den`, `k ∈ {1, …, den−1}`.
pub fn grid_prob(den: i64) -> impl Strategy<Value = Prob> {
    (1..den).prop_map(move |k| Prob::new(k, den))
}

/// A well-conditioned invertible matrix `Q·D` (orthogonal times
/// diagonal with entries in `[0.5, 2]`).
pub fn invertible(d: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (matrix(d, d, 1.0), proptest::collection::vec(0.5..2.0f64, d)).prop_map(move |(g, diag)| {
        let q = g.qr().q();
        q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
    })
}
