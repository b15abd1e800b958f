//! Steady-state covariance from the Lyapunov equation A·C + C·Aᵀ = −D.

use nalgebra::{DMatrix, DVector, Matrix6};

use crate::dynamics::{stability, DiffusionMatrix, DriftMatrix};
use crate::error::{Error, Result};

/// Accepted relative residual ‖AC + CAᵀ + D‖_F / ‖D‖_F.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Symmetric covariance of (δx₁, δy₁, δx₂, δy₂, δq, δp) with the vacuum
/// variance normalized to 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(pub Matrix6<f64>);

impl CovarianceMatrix {
    pub fn as_matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_iterator(6, 6, self.0.iter().copied())
    }
}

/// ‖AC + CAᵀ + D‖_F / ‖D‖_F
pub fn residual(a: &Matrix6<f64>, c: &Matrix6<f64>, d: &Matrix6<f64>) -> f64 {
    let r = a * c + c * a.transpose() + d;
    r.norm() / d.norm()
}

/// Kronecker sum I⊗A + A⊗I acting on column-major vec(C).
fn kronecker_sum(a: &Matrix6<f64>) -> DMatrix<f64> {
    let n = 6;
    let mut k = DMatrix::<f64>::zeros(n * n, n * n);
    // vec(AC)_{i + n j} = Σ_l A_il C_lj ; vec(CAᵀ)_{i + n j} = Σ_l C_il A_jl
    for j in 0..n {
        for i in 0..n {
            let row = i + n * j;
            for l in 0..n {
                k[(row, l + n * j)] += a[(i, l)];
                k[(row, i + n * l)] += a[(j, l)];
            }
        }
    }
    k
}

fn condition_estimate(k: &DMatrix<f64>) -> f64 {
    let sv = k.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves for the stationary covariance of a strictly stable drift.
///
/// The 36-dimensional vectorized system is solved densely by LU with one
/// round of iterative refinement, then symmetrized as (C + Cᵀ)/2.
pub fn solve_lyapunov(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    let report = stability(a)?;
    if !report.stable {
        return Err(Error::Unstable {
            margin: report.margin,
        });
    }
    solve_stable(&a.0, &d.0)
}

/// Same as [`solve_lyapunov`] but with the stability precondition left to
/// the caller.
pub fn solve_stable(a: &Matrix6<f64>, d: &Matrix6<f64>) -> Result<CovarianceMatrix> {
    let k = kronecker_sum(a);
    let rhs = DVector::from_iterator(36, d.iter().map(|x| -x));
    let lu = k.clone().lu();
    let mut x = match lu.solve(&rhs) {
        Some(x) if x.iter().all(|v| v.is_finite()) => x,
        _ => {
            return Err(Error::IllConditioned {
                condition: condition_estimate(&k),
            })
        }
    };
    let r = &rhs - &k * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let c = Matrix6::from_iterator(x.iter().copied());
    let c = (c + c.transpose()) * 0.5;
    let res = if d.norm() > 0.0 { residual(a, &c, d) } else { 0.0 };
    if res.is_nan() || res > RESIDUAL_TOLERANCE {
        return Err(Error::Residual { residual: res });
    }
    Ok(CovarianceMatrix(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalar_balance() {
        let a = DriftMatrix(-0.5 * Matrix6::identity());
        let d = DiffusionMatrix(Matrix6::identity());
        let c = solve_lyapunov(&a, &d).unwrap();
        assert!((c.0 - Matrix6::identity()).norm() < 1e-14);
    }

    #[test]
    fn decoupled_modes() {
        let av = [1.0, 2.0, 0.5, 3.0, 7.0, 0.1];
        let dv = [1.0, 0.2, 4.0, 1.5, 0.0, 2.0];
        let a = DriftMatrix(Matrix6::from_diagonal(&(-nalgebra::Vector6::from(av))));
        let d = DiffusionMatrix(Matrix6::from_diagonal(&nalgebra::Vector6::from(dv)));
        let c = solve_lyapunov(&a, &d).unwrap().0;
        for i in 0..6 {
            assert!((c[(i, i)] - dv[i] / (2.0 * av[i])).abs() < 1e-14);
        }
        assert!((c - Matrix6::from_diagonal(&c.diagonal())).norm() < 1e-15);
    }

    #[test]
    fn rejects_unstable_drift() {
        let a = DriftMatrix(Matrix6::identity());
        let d = DiffusionMatrix(Matrix6::identity());
        assert!(matches!(
            solve_lyapunov(&a, &d),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn singular_system_reports_condition() {
        // eigenvalues ±i make λ_i + λ_j = 0 for a conjugate pair
        let mut a = Matrix6::zeros();
        a[(0, 1)] = 1.0;
        a[(1, 0)] = -1.0;
        match solve_stable(&a, &Matrix6::identity()) {
            Err(Error::IllConditioned { condition }) => assert!(condition > 1e12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn residual_reference_values() {
        let a = -0.5 * Matrix6::identity();
        let d = Matrix6::identity();
        assert!(residual(&a, &Matrix6::identity(), &d) <= 1e-15);
        assert_eq!(residual(&a, &Matrix6::zeros(), &d), 1.0);
    }

    #[test]
    fn residual_grows_linearly_with_perturbation() {
        let a = -0.5 * Matrix6::identity();
        let d = Matrix6::identity();
        // for this A the perturbation ε·I yields A εI + εI Aᵀ = −ε I, so slope = ‖I‖/‖D‖ = 1
        let eps = [1e-6, 2e-6, 4e-6];
        let r: Vec<f64> = eps
            .iter()
            .map(|e| residual(&a, &(Matrix6::identity() * (1.0 + e)), &d))
            .collect();
        let s1 = (r[1] - r[0]) / (eps[1] - eps[0]);
        let s2 = (r[2] - r[1]) / (eps[2] - eps[1]);
        assert!((s1 - 1.0).abs() < 1e-6 && (s2 - 1.0).abs() < 1e-6, "{s1} {s2}");
    }

    fn stable_from(entries: &[f64], shift: f64) -> Matrix6<f64> {
        let m = Matrix6::from_iterator(entries.iter().copied());
        let margin = m
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        m - Matrix6::identity() * (margin + shift)
    }

    proptest! {
        #[test]
        fn linear_in_diffusion(
            e in prop::collection::vec(-1.0f64..1.0, 36),
            d1 in prop::collection::vec(0.0f64..2.0, 6),
            d2 in prop::collection::vec(0.0f64..2.0, 6),
            s in 0.1f64..10.0,
        ) {
            let a = DriftMatrix(stable_from(&e, 0.5));
            let mk = |v: &[f64]| DiffusionMatrix(Matrix6::from_diagonal(&nalgebra::Vector6::from_column_slice(v)));
            let (da, db) = (mk(&d1), mk(&d2));
            prop_assume!(da.0.norm() > 0.1 && db.0.norm() > 0.1);
            let c1 = solve_lyapunov(&a, &da).unwrap().0;
            let c2 = solve_lyapunov(&a, &db).unwrap().0;
            let c12 = solve_lyapunov(&a, &DiffusionMatrix(da.0 + db.0)).unwrap().0;
            prop_assert!((c12 - c1 - c2).norm() <= 1e-9 * c12.norm());
            let cs = solve_lyapunov(&a, &DiffusionMatrix(da.0 * s)).unwrap().0;
            prop_assert!((cs - c1 * s).norm() <= 1e-9 * cs.norm());
            // positive semidefinite for D ⪰ 0
            let min = c1.symmetric_eigenvalues().min();
            prop_assert!(min >= -1e-9 * c1.norm());
            prop_assert!((c1 - c1.transpose()).norm() == 0.0);
        }
    }
}
