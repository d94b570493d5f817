//! Regularity constants, dual-sequence bound constants, closed-form penalty
//! thresholds and the symmetric-eigenvalue utilities backing them.

use ndarray::Array2;
use thiserror::Error;

use crate::driver::IterationRecord;
use crate::linalg;
use crate::model::{CompositeProblem, Matrix, ModelError, Vector};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("matrix is not symmetric (worst asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("gamma must be positive, got {0}")]
    NonpositiveGamma(f64),
    #[error("descent constant must be positive, got {0}")]
    NonpositiveDescent(f64),
    #[error("gradient-bound constant b must be positive, got {0}")]
    NonpositiveGradientBound(f64),
    #[error("{0}")]
    InvalidInput(String),
    #[error("penalty {rho} does not exceed the threshold {rho_bar}")]
    RhoBelowThreshold { rho: f64, rho_bar: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

const SYMMETRY_TOL: f64 = 1e-12;
const JACOBI_REL_TOL: f64 = 1e-12;

/// Smallest eigenvalue of a real symmetric matrix via cyclic Jacobi
/// rotations, swept until the off-diagonal norm is below 1e-12·||A||.
pub fn lambda_min_symmetric(a: &Matrix) -> Result<f64, AnalysisError> {
    check_symmetric(a)?;
    let (lo, _) = linalg::symmetric_extremes(a, JACOBI_REL_TOL);
    Ok(lo)
}

/// Largest eigenvalue of a real symmetric matrix.
pub fn lambda_max_symmetric(a: &Matrix) -> Result<f64, AnalysisError> {
    check_symmetric(a)?;
    let (_, hi) = linalg::symmetric_extremes(a, JACOBI_REL_TOL);
    Ok(hi)
}

/// All eigenvalues, ascending.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>, AnalysisError> {
    check_symmetric(a)?;
    let mut eigs = linalg::jacobi_eigenvalues(a, JACOBI_REL_TOL);
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(eigs)
}

fn check_symmetric(a: &Matrix) -> Result<(), AnalysisError> {
    if a.nrows() != a.ncols() {
        return Err(AnalysisError::InvalidInput(format!(
            "matrix must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = 1.0 + linalg::frobenius(a);
    let asym = linalg::max_asymmetry(a);
    if asym > SYMMETRY_TOL * scale {
        return Err(AnalysisError::NotSymmetric(asym));
    }
    Ok(())
}

/// Pointwise regularity modulus sqrt(lambda_min(J_F(x) J_F(x)ᵀ)); returns 0
/// when the Jacobian is singular at `x`.
pub fn gamma_at(p: &CompositeProblem, x: &Vector) -> Result<f64, AnalysisError> {
    let (_, jac) = p.eval_map(x)?;
    let jjt = jac.dot(&jac.t());
    let (lo, _) = linalg::symmetric_extremes(&jjt, JACOBI_REL_TOL);
    Ok(lo.max(0.0).sqrt())
}

/// Constants (d1, d2) bounding the dual step by the last two primal steps:
/// d1 = (2/γ²)(L(f0) + L(F)·Λ + b)², d2 = 2b²/γ². For linear F pass
/// L(F) = 0; the multiplier bound Λ is then irrelevant.
pub fn dual_bound_constants(
    l_f0: f64,
    l_map: f64,
    lambda: f64,
    b: f64,
    gamma: f64,
) -> Result<(f64, f64), AnalysisError> {
    if !(gamma > 0.0) {
        return Err(AnalysisError::NonpositiveGamma(gamma));
    }
    if !(b > 0.0) {
        return Err(AnalysisError::NonpositiveGradientBound(b));
    }
    let g2 = gamma * gamma;
    let s = l_f0 + l_map * lambda + b;
    Ok((2.0 * s * s / g2, 2.0 * b * b / g2))
}

/// Linear-case penalty threshold: any fixed rho > 2(d1 + d2)/a guarantees
/// the Lyapunov descent without the adaptive regime.
pub fn linear_threshold_rho(a: f64, d1: f64, d2: f64) -> Result<f64, AnalysisError> {
    if !(a > 0.0) {
        return Err(AnalysisError::NonpositiveDescent(a));
    }
    Ok(2.0 * (d1 + d2) / a)
}

/// Penalty threshold for the strongly convex ADM variant (mu = 0):
/// rho > 4((L(f0) + 1)² + 1) / (sigma · lambda_min(F Fᵀ)).
pub fn adm_threshold_rho(
    l_f0: f64,
    sigma: f64,
    lambda_min_fft: f64,
) -> Result<f64, AnalysisError> {
    if !(sigma > 0.0) {
        return Err(AnalysisError::InvalidInput(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if !(lambda_min_fft > 0.0) {
        return Err(AnalysisError::InvalidInput(format!(
            "lambda_min(FF^T) must be positive, got {lambda_min_fft}"
        )));
    }
    if l_f0 < 0.0 {
        return Err(AnalysisError::InvalidInput(format!(
            "L(f0) must be nonnegative, got {l_f0}"
        )));
    }
    let s = l_f0 + 1.0;
    Ok(4.0 * (s * s + 1.0) / (sigma * lambda_min_fft))
}

/// Closed-form threshold data for the proximal linearized map on a linear
/// composite problem with kappa(FFᵀ) < 2.
///
/// With ℓ = L(f0), t = mu − rho·γ² and eta = 33γ² − 16||F||²:
///
/// * psi(t; rho) = 16t² − 2(ργ² − 8ℓ)t + ργ²(ℓ + ρ||F||² − 2ργ²) + 8ℓ²
/// * Δψ(rho)    = ρ²γ²η − 32ργ²ℓ − 64ℓ²
/// * rho_bar    = (8ℓ/(ηγ))(2γ + sqrt(4γ² + η))
/// * mu_{1,2}   = ((17ργ² − 8ℓ) ∓ sqrt(Δψ))/16
///
/// psi(t; rho) < 0 is equivalent to the sufficient-descent margin
/// a/2 − (d1 + d2)/rho being positive with the signed-t constants below.
#[derive(Clone, Debug)]
pub struct Album3Thresholds {
    l_f0: f64,
    gamma: f64,
    norm_map: f64,
    pub eta: f64,
    pub rho_bar: f64,
}

/// Builds the threshold bundle; requires eta > 0 and enforces the stated
/// hypothesis kappa(FFᵀ) < 2 (stronger than eta > 0 alone).
pub fn album3_thresholds(
    l_f0: f64,
    gamma: f64,
    norm_map: f64,
) -> Result<Album3Thresholds, AnalysisError> {
    if !(gamma > 0.0) {
        return Err(AnalysisError::NonpositiveGamma(gamma));
    }
    if !(l_f0 > 0.0) {
        return Err(AnalysisError::InvalidInput(format!(
            "L(f0) must be positive for the linearized-map thresholds, got {l_f0}"
        )));
    }
    let kappa = (norm_map * norm_map) / (gamma * gamma);
    if !(kappa < 2.0) {
        return Err(AnalysisError::InvalidInput(format!(
            "kappa(FF^T) = {kappa} must be < 2"
        )));
    }
    let eta = 33.0 * gamma * gamma - 16.0 * norm_map * norm_map;
    if !(eta > 0.0) {
        return Err(AnalysisError::InvalidInput(format!(
            "eta = 33*gamma^2 - 16*||F||^2 = {eta} must be positive"
        )));
    }
    let rho_bar = (8.0 * l_f0 / (eta * gamma)) * (2.0 * gamma + (4.0 * gamma * gamma + eta).sqrt());
    Ok(Album3Thresholds {
        l_f0,
        gamma,
        norm_map,
        eta,
        rho_bar,
    })
}

impl Album3Thresholds {
    /// Reduced discriminant of psi(·; rho); positive iff rho > rho_bar.
    pub fn delta_psi(&self, rho: f64) -> f64 {
        let g2 = self.gamma * self.gamma;
        let l = self.l_f0;
        rho * rho * g2 * self.eta - 32.0 * rho * g2 * l - 64.0 * l * l
    }

    /// The quadratic whose negativity characterizes admissible (rho, mu)
    /// pairs through t = mu − rho·γ².
    pub fn psi(&self, t: f64, rho: f64) -> f64 {
        let g2 = self.gamma * self.gamma;
        let l = self.l_f0;
        let f2 = self.norm_map * self.norm_map;
        16.0 * t * t - 2.0 * (rho * g2 - 8.0 * l) * t + rho * g2 * (l + rho * f2 - 2.0 * rho * g2)
            + 8.0 * l * l
    }

    /// Zeros (t1, t2) of psi(·; rho), defined for rho > rho_bar.
    pub fn t_zeros(&self, rho: f64) -> Result<(f64, f64), AnalysisError> {
        let disc = self.delta_psi(rho);
        if !(disc > 0.0) {
            return Err(AnalysisError::RhoBelowThreshold {
                rho,
                rho_bar: self.rho_bar,
            });
        }
        let g2 = self.gamma * self.gamma;
        let mid = rho * g2 - 8.0 * self.l_f0;
        let root = disc.sqrt();
        Ok(((mid - root) / 16.0, (mid + root) / 16.0))
    }

    /// Admissible proximal-weight interval (mu1, mu2) for a given rho > rho_bar.
    pub fn mu_interval(&self, rho: f64) -> Result<(f64, f64), AnalysisError> {
        let (t1, t2) = self.t_zeros(rho)?;
        let shift = rho * self.gamma * self.gamma;
        Ok((t1 + shift, t2 + shift))
    }

    /// Dual-step bound constants with the signed deviation t = mu − rho·γ²
    /// standing in for ||mu·I − rho·FᵀF||:
    /// d1 = 2t²/λ_min(FFᵀ), d2 = 2(ℓ + t)²/λ_min(FFᵀ).
    pub fn dual_constants(&self, rho: f64, mu: f64) -> (f64, f64) {
        let g2 = self.gamma * self.gamma;
        let t = mu - rho * g2;
        let s = self.l_f0 + t;
        (2.0 * t * t / g2, 2.0 * s * s / g2)
    }

    /// Sufficient-descent quantity a/2 − (d1 + d2)/rho with
    /// a = mu − (ℓ + rho||F||²)/2; positive on admissible (rho, mu).
    pub fn sufficient_descent_margin(&self, rho: f64, mu: f64) -> f64 {
        let l_total = self.l_f0 + rho * self.norm_map * self.norm_map;
        let a = mu - 0.5 * l_total;
        let (d1, d2) = self.dual_constants(rho, mu);
        0.5 * a - (d1 + d2) / rho
    }
}

/// Verifies ||y^{k+1} − y^k||² ≤ d1·||x^{k+1} − x^k||² + d2·||x^k − x^{k−1}||²
/// for every recorded iteration k ≥ k_from, with additive slack 1e-8·(1+rhs).
pub fn check_dual_bound(records: &[IterationRecord], d1: f64, d2: f64, k_from: usize) -> bool {
    let k_from = k_from.max(1);
    for k in k_from..records.len() {
        let dy = records[k].step_y;
        let dx = records[k].step_x;
        let dx_prev = records[k - 1].step_x;
        let rhs = d1 * dx * dx + d2 * dx_prev * dx_prev;
        if dy * dy > rhs + 1e-8 * (1.0 + rhs) {
            return false;
        }
    }
    true
}

/// Constants of the Lyapunov subgradient bound:
/// sigma1 = (1/γ)(B + 1 + 1/ρ0)(L(f0) + L(F)·Λ + b) + 4β0 + b + d,
/// sigma2 = (b/γ)(B + 1 + 1/ρ0).
#[allow(clippy::too_many_arguments)]
pub fn subgradient_bound_constants(
    b_jac: f64,
    b: f64,
    d_c: f64,
    l_f0: f64,
    l_map: f64,
    lambda: f64,
    gamma: f64,
    rho0: f64,
    beta0: f64,
) -> (f64, f64) {
    assert!(gamma > 0.0, "gamma must be positive");
    assert!(rho0 > 0.0, "rho0 must be positive");
    let reach = b_jac + 1.0 + 1.0 / rho0;
    let sigma1 = reach * (l_f0 + l_map * lambda + b) / gamma + 4.0 * beta0 + b + d_c;
    let sigma2 = b * reach / gamma;
    (sigma1, sigma2)
}

/// Spectral norm of a (not necessarily symmetric) matrix via AᵀA.
pub fn operator_norm(a: &Array2<f64>) -> f64 {
    let ata = a.t().dot(a);
    let (_, hi) = linalg::symmetric_extremes(&ata, JACOBI_REL_TOL);
    hi.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::sphere_problem;
    use ndarray::{arr1, arr2};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lambda_min_identity_and_diagonal() {
        assert_eq!(lambda_min_symmetric(&Matrix::eye(3)).unwrap(), 1.0);
        let d = arr2(&[[4.0, 0.0], [0.0, 9.0]]);
        assert_eq!(lambda_min_symmetric(&d).unwrap(), 4.0);
    }

    #[test]
    fn lambda_min_rejects_asymmetric() {
        let a = arr2(&[[1.0, 2.0], [0.0, 1.0]]);
        assert!(matches!(
            lambda_min_symmetric(&a),
            Err(AnalysisError::NotSymmetric(_))
        ));
    }

    #[test]
    fn lambda_min_matches_power_iteration_oracle_on_random_4x4() {
        // independent oracle: lambda_min(A) = c − lambda_max(cI − A), the
        // largest eigenvalue obtained by plain power iteration on the
        // positive-definite shift.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let mut a = Array2::<f64>::zeros((4, 4));
            for i in 0..4 {
                for j in 0..=i {
                    let v: f64 = rng.random_range(-2.0..2.0);
                    a[[i, j]] = v;
                    a[[j, i]] = v;
                }
            }
            // Gershgorin upper bound
            let c = (0..4)
                .map(|i| (0..4).map(|j| a[[i, j]].abs()).sum::<f64>())
                .fold(0.0f64, f64::max)
                + 1.0;
            let shifted = c * &Matrix::eye(4) - &a;
            let mut v = Array2::<f64>::zeros((4, 1)).column(0).to_owned();
            for i in 0..4 {
                v[i] = rng.random_range(0.1..1.0);
            }
            for _ in 0..20_000 {
                let w = shifted.dot(&v);
                let n = w.dot(&w).sqrt();
                v = w / n;
            }
            let rayleigh = v.dot(&shifted.dot(&v));
            let oracle = c - rayleigh;
            let jacobi = lambda_min_symmetric(&a).unwrap();
            assert!(
                (jacobi - oracle).abs() < 1e-8,
                "jacobi {jacobi} vs power-iteration oracle {oracle}"
            );
        }
    }

    #[test]
    fn gamma_at_sphere_scales_with_radius() {
        let p = sphere_problem(&arr1(&[2.0, 0.0]), 0.5).unwrap();
        let x = arr1(&[0.7 * 0.6, 0.7 * 0.8]); // ||x|| = 0.7
        let g = gamma_at(&p, &x).unwrap();
        assert!((g - 1.4).abs() < 1e-12);
    }

    #[test]
    fn gamma_at_linear_maps() {
        let p = crate::gallery::linear_composite_problem(
            &Matrix::eye(2),
            &arr1(&[0.0, 0.0]),
            &Matrix::eye(2),
            crate::gallery::LinearHKind::Zero,
        )
        .unwrap();
        assert!((gamma_at(&p, &arr1(&[3.0, -1.0])).unwrap() - 1.0).abs() < 1e-12);

        let f = arr2(&[[1.0, 0.0], [0.0, 2.0]]);
        let p = crate::gallery::linear_composite_problem(
            &Matrix::eye(2),
            &arr1(&[0.0, 0.0]),
            &f,
            crate::gallery::LinearHKind::Zero,
        )
        .unwrap();
        assert!((gamma_at(&p, &arr1(&[5.0, 5.0])).unwrap() - 1.0).abs() < 1e-12);
        // constant in x for linear maps
        assert!(
            (gamma_at(&p, &arr1(&[-2.0, 9.0])).unwrap()
                - gamma_at(&p, &arr1(&[0.1, 0.2])).unwrap())
            .abs()
                < 1e-12
        );
    }

    #[test]
    fn dual_bound_constants_formulas() {
        let (d1, d2) = dual_bound_constants(1.0, 0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(d1, 8.0);
        assert_eq!(d2, 2.0);
        // gamma = 2 scales d2 down to b²/2
        let (_, d2) = dual_bound_constants(1.0, 0.0, 0.0, 1.0, 2.0).unwrap();
        assert_eq!(d2, 0.5);
        assert!(dual_bound_constants(1.0, 0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn linear_threshold_formula() {
        assert_eq!(linear_threshold_rho(1.0, 2.0, 1.0).unwrap(), 6.0);
        assert_eq!(linear_threshold_rho(2.0, 2.0, 2.0).unwrap(), 4.0);
        let (d1, d2) = dual_bound_constants(1.0, 0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(linear_threshold_rho(1.0, d1, d2).unwrap(), 20.0);
        assert!(linear_threshold_rho(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn adm_threshold_formula() {
        assert_eq!(adm_threshold_rho(1.0, 1.0, 1.0).unwrap(), 20.0);
        assert_eq!(adm_threshold_rho(0.0, 2.0, 1.0).unwrap(), 4.0);
        let t1 = adm_threshold_rho(1.0, 1.0, 1.0).unwrap();
        let t2 = adm_threshold_rho(1.0, 2.0, 1.0).unwrap();
        assert!((t1 - 2.0 * t2).abs() < 1e-12, "doubling sigma halves it");
        assert!(adm_threshold_rho(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn album3_threshold_canonical_values() {
        let b = album3_thresholds(1.0, 1.0, 1.0).unwrap();
        assert_eq!(b.eta, 17.0);
        let expected = (8.0 / 17.0) * (2.0 + 21.0f64.sqrt());
        assert!((b.rho_bar - expected).abs() < 1e-10);
        // rho_bar is exactly the positive root of the discriminant
        assert!(b.delta_psi(b.rho_bar).abs() < 1e-8);
        assert_eq!(b.delta_psi(4.0), 80.0);
        let (mu1, mu2) = b.mu_interval(4.0).unwrap();
        assert!((mu1 - 3.190983).abs() < 1e-4);
        assert!((mu2 - 4.309017).abs() < 1e-4);
        // psi vanishes at its zeros and is negative at the midpoint
        let (t1, t2) = b.t_zeros(4.0).unwrap();
        assert!(b.psi(t1, 4.0).abs() < 1e-8);
        assert!(b.psi(t2, 4.0).abs() < 1e-8);
        let t_mid = 0.5 * (mu1 + mu2) - 4.0;
        assert!(b.psi(t_mid, 4.0) < 0.0);
        // below the threshold the mu interval is empty
        assert!(b.mu_interval(2.0).is_err());
    }

    #[test]
    fn album3_margin_positive_on_admissible_pairs() {
        let b = album3_thresholds(1.0, 1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let rho = b.rho_bar * rng.random_range(1.01..5.0);
            let (mu1, mu2) = b.mu_interval(rho).unwrap();
            let mu = mu1 + (mu2 - mu1) * rng.random_range(0.01..0.99);
            let margin = b.sufficient_descent_margin(rho, mu);
            assert!(
                margin > 0.0,
                "margin {margin} not positive at rho={rho}, mu={mu}"
            );
        }
    }

    #[test]
    fn album3_rejects_wide_spectrum() {
        // kappa = 4 ≥ 2
        assert!(album3_thresholds(1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn subgradient_constants_formulas() {
        let (s1, s2) = subgradient_bound_constants(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 2.0);
        assert_eq!(s1, 16.0);
        assert_eq!(s2, 3.0);
        // sigma2 is linear in b
        let (_, s2b) = subgradient_bound_constants(1.0, 2.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 2.0);
        assert_eq!(s2b, 2.0 * s2);
        // and vanishes as gamma grows
        let (_, s2g) = subgradient_bound_constants(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1e12, 1.0, 2.0);
        assert!(s2g < 1e-11);
    }
}
