//! Small dense linear-algebra kernels: Euclidean norms, cyclic Jacobi
//! eigenvalue sweeps and an LLᵀ solve. Desk-scale only (n ≤ a few hundred).

use ndarray::{Array1, Array2};

pub(crate) fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

pub(crate) fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn max_asymmetry(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    worst
}

fn off_diagonal_norm(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += a[[p, q]] * a[[p, q]];
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, iterated
/// until the off-diagonal norm drops below `rel_tol * ||A||_F`.
///
/// The input is symmetrized first; callers that must reject asymmetric
/// matrices check [`max_asymmetry`] beforehand. Returned values are unsorted.
pub(crate) fn jacobi_eigenvalues(a: &Array2<f64>, rel_tol: f64) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "jacobi_eigenvalues: matrix must be square");
    if n == 0 {
        return Vec::new();
    }
    let mut m = 0.5 * (a + &a.t().to_owned());
    let scale = frobenius(&m);
    if scale == 0.0 {
        return vec![0.0; n];
    }
    let tol = rel_tol * scale;
    for _sweep in 0..100 {
        if off_diagonal_norm(&m) <= tol {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() <= tol / (10.0 * (n * n) as f64) {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[[k, p]];
                    let akq = m[[k, q]];
                    m[[k, p]] = c * akp - s * akq;
                    m[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[[p, k]];
                    let aqk = m[[q, k]];
                    m[[p, k]] = c * apk - s * aqk;
                    m[[q, k]] = s * apk + c * aqk;
                }
                m[[p, q]] = 0.0;
                m[[q, p]] = 0.0;
            }
        }
    }
    (0..n).map(|i| m[[i, i]]).collect()
}

/// (smallest, largest) eigenvalue of a symmetric matrix.
pub(crate) fn symmetric_extremes(a: &Array2<f64>, rel_tol: f64) -> (f64, f64) {
    let eigs = jacobi_eigenvalues(a, rel_tol);
    let lo = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Solves `a x = b` for symmetric positive definite `a` via LLᵀ.
/// Returns `None` when the factorization breaks down.
pub(crate) fn solve_spd(a: &Array2<f64>, b: &Array1<f64>) -> Option<Array1<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return None;
    }
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[[i, j]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    // forward then backward substitution
    let mut y = Array1::<f64>::zeros(n);
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[[i, k]] * y[k];
        }
        y[i] = sum / l[[i, i]];
    }
    let mut x = Array1::<f64>::zeros(n);
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in (i + 1)..n {
            sum -= l[[k, i]] * x[k];
        }
        x[i] = sum / l[[i, i]];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn jacobi_on_diagonal_matrix_is_exact() {
        let a = arr2(&[[4.0, 0.0], [0.0, 9.0]]);
        let mut eigs = jacobi_eigenvalues(&a, 1e-12);
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((eigs[0] - 4.0).abs() < 1e-14);
        assert!((eigs[1] - 9.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_matches_2x2_closed_form() {
        // eigenvalues of [[a, b], [b, c]] are (a+c)/2 ± sqrt(((a-c)/2)^2 + b^2)
        let (a, b, c): (f64, f64, f64) = (2.0, -1.5, 0.5);
        let m = arr2(&[[a, b], [b, c]]);
        let mid = 0.5 * (a + c);
        let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let mut eigs = jacobi_eigenvalues(&m, 1e-12);
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((eigs[0] - (mid - rad)).abs() < 1e-10);
        assert!((eigs[1] - (mid + rad)).abs() < 1e-10);
    }

    #[test]
    fn spd_solve_recovers_known_solution() {
        let a = arr2(&[[4.0, 1.0, 0.0], [1.0, 3.0, -1.0], [0.0, -1.0, 2.0]]);
        let x_true = ndarray::arr1(&[1.0, -2.0, 0.5]);
        let b = a.dot(&x_true);
        let x = solve_spd(&a, &b).expect("matrix is SPD");
        for i in 0..3 {
            assert!((x[i] - x_true[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn spd_solve_rejects_indefinite() {
        let a = arr2(&[[1.0, 2.0], [2.0, 1.0]]);
        assert!(solve_spd(&a, &ndarray::arr1(&[1.0, 1.0])).is_none());
    }
}
