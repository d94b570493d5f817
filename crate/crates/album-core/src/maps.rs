//! The primal black-box maps: joint minimization, alternating minimization,
//! its proximal linearized variant and the strongly convex ADM limit, each
//! with the (a, b, c) constants certifying sufficient descent, the gradient
//! bound and the u-subgradient bound.

use ndarray::Array2;
use thiserror::Error;

use crate::lagrangian::grad_x_aug_lagrangian;
use crate::linalg::{self, norm};
use crate::model::{AlgoParams, CompositeProblem, Vector};

#[derive(Debug, Error)]
pub enum MapsError {
    #[error("inner solver exceeded {iterations} iterations (last gradient norm {residual:.3e})")]
    InnerSolveFailed { iterations: usize, residual: f64 },
    #[error("nonpositive descent constant: mu = {mu} must exceed L/2 = {half_l}")]
    NonpositiveDescentConstant { mu: f64, half_l: f64 },
    #[error("kappa(FF^T) = {0} must be < 2 for the linearized map")]
    SpectrumTooWide(f64),
    #[error("operation requires a linear mapping F")]
    RequiresLinearMap,
    #[error("x-step strong convexity is not certified (quadratic f0 and linear F required)")]
    StrongConvexityNotCertified,
    #[error("strong convexity modulus must be positive, got {0}")]
    NonpositiveSigma(f64),
    #[error("proximal weight mu must be {expected} for {kind}, got {got}")]
    InvalidMu {
        kind: &'static str,
        expected: &'static str,
        got: f64,
    },
    #[error("x-step linear solve failed (matrix not positive definite)")]
    LinearSolveFailed,
}

/// Which primal map drives the outer loop. The ADM variant carries the
/// certified strong-convexity modulus of x ↦ L_rho(x, u, y).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapKind {
    Album1,
    Album2,
    Album3,
    Adm { sigma: f64 },
}

impl MapKind {
    pub fn name(&self) -> &'static str {
        match self {
            MapKind::Album1 => "album1",
            MapKind::Album2 => "album2",
            MapKind::Album3 => "album3",
            MapKind::Adm { .. } => "adm",
        }
    }
}

/// Certificate of a Lagrangian algorithmic map: descent constant `a`,
/// gradient-bound constant `b`, u-subgradient bound constant `c`.
///
/// For maps on nonlinear F the constant `c` is not known a priori; it starts
/// at rho·B with B the best available bound on ||J_F|| (zero when unknown)
/// and the driver maintains the running value for diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// The (a, b, c) certificate for a map kind at the given (mu, rho).
pub fn map_constants(
    kind: &MapKind,
    mu: f64,
    rho: f64,
    p: &CompositeProblem,
) -> Result<MapConstants, MapsError> {
    let grad_bound = p.linear_map_norm().unwrap_or(0.0);
    match kind {
        MapKind::Album1 => {
            require_positive_mu("album1", mu)?;
            // the joint u-block is exactly optimal, so any c certifies C3
            Ok(MapConstants { a: mu, b: mu, c: 0.0 })
        }
        MapKind::Album2 => {
            require_positive_mu("album2", mu)?;
            Ok(MapConstants {
                a: mu,
                b: mu,
                c: rho * grad_bound,
            })
        }
        MapKind::Album3 => {
            require_positive_mu("album3", mu)?;
            let (lo, hi) = p
                .linear_map_extremes()
                .ok_or(MapsError::RequiresLinearMap)?;
            if lo <= 0.0 {
                return Err(MapsError::RequiresLinearMap);
            }
            let kappa = hi / lo;
            if !(kappa < 2.0) {
                return Err(MapsError::SpectrumTooWide(kappa));
            }
            let norm_f = hi.sqrt();
            let l_total = p.lipschitz_f0() + rho * norm_f * norm_f;
            let a = mu - 0.5 * l_total;
            if !(a > 0.0) {
                return Err(MapsError::NonpositiveDescentConstant {
                    mu,
                    half_l: 0.5 * l_total,
                });
            }
            Ok(MapConstants {
                a,
                b: l_total + mu,
                c: rho * norm_f,
            })
        }
        MapKind::Adm { sigma } => {
            if !(*sigma > 0.0) {
                return Err(MapsError::NonpositiveSigma(*sigma));
            }
            if mu != 0.0 {
                return Err(MapsError::InvalidMu {
                    kind: "adm",
                    expected: "exactly 0",
                    got: mu,
                });
            }
            // b can be any positive number for an exact x-minimizer
            Ok(MapConstants {
                a: *sigma,
                b: 1.0,
                c: rho * grad_bound,
            })
        }
    }
}

fn require_positive_mu(kind: &'static str, mu: f64) -> Result<(), MapsError> {
    if mu > 0.0 {
        Ok(())
    } else {
        Err(MapsError::InvalidMu {
            kind,
            expected: "positive",
            got: mu,
        })
    }
}

pub(crate) struct InnerSolve {
    pub x: Vector,
}

/// Gradient descent with Armijo backtracking: trial step 1, halving,
/// sufficient-decrease constant 1e-4, stopping at ||grad|| ≤ tol.
///
/// Once objective decreases fall below floating-point resolution the value
/// test goes blind; a trial step is then accepted on a strict contraction of
/// the gradient norm instead, which keeps converging to tolerances well
/// below the value-resolution floor sqrt(eps·|f|).
pub(crate) fn armijo_minimize<V, G>(
    value: V,
    grad: G,
    x0: Vector,
    tol: f64,
    max_iters: usize,
) -> Result<InnerSolve, MapsError>
where
    V: Fn(&Vector) -> f64,
    G: Fn(&Vector) -> Vector,
{
    let mut x = x0;
    let mut fx = value(&x);
    let mut gn = f64::INFINITY;
    for it in 0..=max_iters {
        let g = grad(&x);
        gn = norm(&g);
        if gn <= tol {
            return Ok(InnerSolve { x });
        }
        if it == max_iters {
            break;
        }
        let g2 = gn * gn;
        let mut t = 1.0;
        loop {
            let cand = &x - &(&g * t);
            let fc = value(&cand);
            if fc <= fx - 1e-4 * t * g2 {
                x = cand;
                fx = fc;
                break;
            }
            if (fx - fc).abs() <= 1e-12 * (1.0 + fx.abs().max(fc.abs())) {
                let gc = norm(&grad(&cand));
                if gc <= gn * (1.0 - 1e-9) {
                    x = cand;
                    fx = fc;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-20 {
                return Err(MapsError::InnerSolveFailed {
                    iterations: it,
                    residual: gn,
                });
            }
        }
    }
    Err(MapsError::InnerSolveFailed {
        iterations: max_iters,
        residual: gn,
    })
}

/// Value of the proximal x-subproblem at fixed u (the constant h(u) is
/// dropped): f0(x) + <y, F(x) − u> + (rho/2)||F(x) − u||² + (mu/2)||x − anchor||².
fn x_objective_value(
    p: &CompositeProblem,
    x: &Vector,
    u: &Vector,
    y: &Vector,
    rho: f64,
    mu: f64,
    anchor: &Vector,
) -> f64 {
    let (f0, _) = p.f0_raw(x);
    let (fx, _) = p.map_raw(x);
    let r = &fx - u;
    let d = x - anchor;
    f0 + y.dot(&r) + 0.5 * rho * r.dot(&r) + 0.5 * mu * d.dot(&d)
}

fn x_objective_grad(
    p: &CompositeProblem,
    x: &Vector,
    u: &Vector,
    y: &Vector,
    rho: f64,
    mu: f64,
    anchor: &Vector,
) -> Vector {
    let (_, g0) = p.f0_raw(x);
    let (fx, jac) = p.map_raw(x);
    let w = y + &((&fx - u) * rho);
    g0 + jac.t().dot(&w) + (x - anchor) * mu
}

/// Direct solve of the x-subproblem when f0 is quadratic and F linear:
/// (H + rho·FᵀF + mu·I) x = mu·anchor − c − Fᵀy + rho·Fᵀu.
fn exact_x_solve(
    p: &CompositeProblem,
    u: &Vector,
    y: &Vector,
    rho: f64,
    mu: f64,
    anchor: &Vector,
) -> Option<Result<Vector, MapsError>> {
    let quad = p.quadratic_f0()?;
    let fm = p.linear_map()?;
    let n = p.n();
    let mut a: Array2<f64> = &quad.hessian + &(fm.t().dot(fm) * rho);
    for i in 0..n {
        a[[i, i]] += mu;
    }
    let rhs = anchor * mu - &quad.linear - &fm.t().dot(y) + fm.t().dot(u) * rho;
    Some(linalg::solve_spd(&a, &rhs).ok_or(MapsError::LinearSolveFailed))
}

/// Exact minimizer of u ↦ L_rho(x, u, y), i.e. prox_{h/rho}(F(x) + y/rho).
pub fn album2_u_step(p: &CompositeProblem, x: &Vector, y: &Vector, rho: f64) -> Vector {
    let (fx, _) = p.map_raw(x);
    let arg = &fx + &(y / rho);
    p.prox(&arg, 1.0 / rho)
}

/// Approximate minimizer of x ↦ L_rho(x, u_next, y) + (mu/2)||x − x_k||².
/// Direct solve when the structure allows it, Armijo descent otherwise.
pub fn album2_x_step(
    p: &CompositeProblem,
    x_k: &Vector,
    u_next: &Vector,
    y: &Vector,
    rho: f64,
    params: &AlgoParams,
) -> Result<Vector, MapsError> {
    let mu = params.mu;
    require_positive_mu("album2", mu)?;
    if let Some(solved) = exact_x_solve(p, u_next, y, rho, mu, x_k) {
        return solved;
    }
    let solve = armijo_minimize(
        |x| x_objective_value(p, x, u_next, y, rho, mu, x_k),
        |x| x_objective_grad(p, x, u_next, y, rho, mu, x_k),
        x_k.clone(),
        params.inner_tol,
        params.inner_max_iters,
    )?;
    Ok(solve.x)
}

/// Joint approximate minimizer of L_rho(x, u, y) + (mu/2)||x − x_k||² by
/// block-coordinate descent: exact u-prox alternating with x descent until
/// both blocks are inner-tolerance stationary.
pub fn album1_step(
    p: &CompositeProblem,
    x_k: &Vector,
    u_k: &Vector,
    y: &Vector,
    rho: f64,
    params: &AlgoParams,
) -> Result<(Vector, Vector), MapsError> {
    let mu = params.mu;
    require_positive_mu("album1", mu)?;
    debug_assert_eq!(u_k.len(), p.m());
    let mut x = x_k.clone();
    const MAX_SWEEPS: usize = 500;
    for sweep in 0..MAX_SWEEPS {
        // the u-block is exactly minimized given x, so the first sweep
        // already decreases the joint objective from (x_k, u_k)
        let u = album2_u_step(p, &x, y, rho);
        if let Some(solved) = exact_x_solve(p, &u, y, rho, mu, x_k) {
            x = solved?;
        } else {
            let solve = armijo_minimize(
                |z| x_objective_value(p, z, &u, y, rho, mu, x_k),
                |z| x_objective_grad(p, z, &u, y, rho, mu, x_k),
                x,
                params.inner_tol,
                params.inner_max_iters,
            )?;
            x = solve.x;
        }
        // joint stationarity: the refreshed u-block must not move and the
        // x-block must stay stationary against the refreshed u
        let u_refresh = album2_u_step(p, &x, y, rho);
        let du = norm(&(&u_refresh - &u));
        let gx = norm(&x_objective_grad(p, &x, &u_refresh, y, rho, mu, x_k));
        if du <= params.inner_tol.max(1e-12) && gx <= params.inner_tol.max(rho * du) {
            return Ok((x, u_refresh));
        }
        if sweep == MAX_SWEEPS - 1 {
            return Err(MapsError::InnerSolveFailed {
                iterations: MAX_SWEEPS,
                residual: du.max(gx),
            });
        }
    }
    unreachable!()
}

/// One explicit gradient step on the linearized model:
/// x⁺ = x_k − (1/mu)·grad_x L_rho(x_k, u_next, y).
pub fn album3_x_step(
    p: &CompositeProblem,
    x_k: &Vector,
    u_next: &Vector,
    y: &Vector,
    rho: f64,
    params: &AlgoParams,
) -> Result<Vector, MapsError> {
    require_positive_mu("album3", params.mu)?;
    if !p.is_linear_map() {
        return Err(MapsError::RequiresLinearMap);
    }
    let g = grad_x_aug_lagrangian(p, x_k, u_next, y, rho);
    Ok(x_k - &(&g / params.mu))
}

/// Exact minimizer of x ↦ L_rho(x, u_next, y) for the mu = 0 ADM variant;
/// only available with certified strong convexity (quadratic f0, linear F).
pub fn adm_x_step(
    p: &CompositeProblem,
    u_next: &Vector,
    y: &Vector,
    rho: f64,
) -> Result<Vector, MapsError> {
    let anchor = Vector::zeros(p.n());
    match exact_x_solve(p, u_next, y, rho, 0.0, &anchor) {
        Some(solved) => solved,
        None => Err(MapsError::StrongConvexityNotCertified),
    }
}

/// Dispatches one primal step (x⁺, u⁺) for the chosen map.
pub fn primal_step(
    p: &CompositeProblem,
    kind: &MapKind,
    x_k: &Vector,
    u_k: &Vector,
    y: &Vector,
    rho: f64,
    params: &AlgoParams,
) -> Result<(Vector, Vector), MapsError> {
    match kind {
        MapKind::Album1 => album1_step(p, x_k, u_k, y, rho, params),
        MapKind::Album2 => {
            let u_next = album2_u_step(p, x_k, y, rho);
            let x_next = album2_x_step(p, x_k, &u_next, y, rho, params)?;
            Ok((x_next, u_next))
        }
        MapKind::Album3 => {
            let u_next = album2_u_step(p, x_k, y, rho);
            let x_next = album3_x_step(p, x_k, &u_next, y, rho, params)?;
            Ok((x_next, u_next))
        }
        MapKind::Adm { .. } => {
            let u_next = album2_u_step(p, x_k, y, rho);
            let x_next = adm_x_step(p, &u_next, y, rho)?;
            Ok((x_next, u_next))
        }
    }
}

/// Norm of the computable u-subgradient witness v⁺ of condition C3:
/// zero for the joint map, rho·||F(x_k) − F(x⁺)|| for the alternating maps.
pub fn c3_witness_norm(
    kind: &MapKind,
    p: &CompositeProblem,
    x_k: &Vector,
    x_next: &Vector,
    rho: f64,
) -> f64 {
    match kind {
        MapKind::Album1 => 0.0,
        _ => {
            let (f_prev, _) = p.map_raw(x_k);
            let (f_next, _) = p.map_raw(x_next);
            rho * norm(&(&f_prev - &f_next))
        }
    }
}

/// Checks that mu is compatible with the map kind before a run starts.
pub fn validate_mu(kind: &MapKind, mu: f64) -> Result<(), MapsError> {
    match kind {
        MapKind::Adm { .. } => {
            if mu != 0.0 {
                Err(MapsError::InvalidMu {
                    kind: "adm",
                    expected: "exactly 0",
                    got: mu,
                })
            } else {
                Ok(())
            }
        }
        _ => require_positive_mu(kind.name(), mu),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{self, sphere_problem};
    use crate::model::{CompositeProblem, Matrix, QuadraticModel};
    use ndarray::{arr1, arr2};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// f0 = 0.5 x², F = id, h = 0 on R, with quadratic structure attached.
    fn scalar_quadratic() -> CompositeProblem {
        CompositeProblem::builder(1, 1)
            .f0(|x: &Vector| (0.5 * x.dot(x), x.clone()))
            .linear_map(Matrix::eye(1))
            .h(|_| 0.0)
            .prox(|v, _| v.clone())
            .dist_dom(|_| 0.0)
            .gamma(1.0)
            .lipschitz_f0(1.0)
            .quadratic_f0(QuadraticModel {
                hessian: Matrix::eye(1),
                linear: Vector::zeros(1),
            })
            .build()
            .unwrap()
    }

    fn solve_2x2(a: [[f64; 2]; 2], b: [f64; 2]) -> [f64; 2] {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        [
            (b[0] * a[1][1] - a[0][1] * b[1]) / det,
            (a[0][0] * b[1] - b[0] * a[1][0]) / det,
        ]
    }

    #[test]
    fn album1_joint_minimizer_matches_linear_system_oracle() {
        // f0 = 0.5 x², F = id, h = 0, mu = 1, rho = 1, y = 0, x_k = u_k = 2.
        // Joint stationarity of 0.5x² + (mu/2)(x−2)² + (rho/2)(x−u)² is the
        // 2x2 system [[1+mu+rho, −rho], [−rho, rho]]·(x,u) = (mu·2, 0).
        let p = scalar_quadratic();
        let params = AlgoParams {
            mu: 1.0,
            inner_tol: 1e-12,
            ..AlgoParams::default()
        };
        let (x, u) = album1_step(&p, &arr1(&[2.0]), &arr1(&[2.0]), &arr1(&[0.0]), 1.0, &params)
            .expect("inner solve");
        let oracle = solve_2x2([[3.0, -1.0], [-1.0, 1.0]], [2.0, 0.0]);
        assert!((x[0] - oracle[0]).abs() < 1e-9, "x {} vs {}", x[0], oracle[0]);
        assert!((u[0] - oracle[1]).abs() < 1e-9, "u {} vs {}", u[0], oracle[1]);
    }

    #[test]
    fn album1_indicator_forces_u_and_reduces_to_prox_step() {
        // h = indicator of {3}: u⁺ = 3 regardless of x
        let p = CompositeProblem::builder(1, 1)
            .f0(|x: &Vector| (0.5 * x.dot(x), x.clone()))
            .linear_map(Matrix::eye(1))
            .h(|u: &Vector| if (u[0] - 3.0).abs() <= 1e-12 { 0.0 } else { f64::INFINITY })
            .prox(|_, _| arr1(&[3.0]))
            .dist_dom(|u: &Vector| (u[0] - 3.0).abs())
            .gamma(1.0)
            .lipschitz_f0(1.0)
            .build()
            .unwrap();
        let params = AlgoParams {
            mu: 1.0,
            inner_tol: 1e-12,
            ..AlgoParams::default()
        };
        let (x, u) = album1_step(&p, &arr1(&[0.0]), &arr1(&[3.0]), &arr1(&[0.0]), 1.0, &params)
            .expect("inner solve");
        assert_eq!(u[0], 3.0);
        // x minimizes 0.5x² + 0.5x² + 0.5(x−3)² → x = 1
        assert!((x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn album1_is_a_fixed_point_at_a_joint_minimizer() {
        let p = scalar_quadratic();
        let params = AlgoParams {
            mu: 1.0,
            inner_tol: 1e-12,
            ..AlgoParams::default()
        };
        // start at the joint minimizer computed above and step again
        let (x, u) = album1_step(&p, &arr1(&[2.0]), &arr1(&[2.0]), &arr1(&[0.0]), 1.0, &params).unwrap();
        let (x2, u2) = album1_step(&p, &x, &u, &arr1(&[0.0]), 1.0, &params).unwrap();
        // the anchor moved to the new x, so the fixed point of the map from
        // that state keeps x within inner tolerance of a stationary point
        let g = x_objective_grad(&p, &x2, &u2, &arr1(&[0.0]), 1.0, 1.0, &x);
        assert!(norm(&g) <= 1e-10);
    }

    #[test]
    fn album2_u_step_examples() {
        // indicator of {1} with F(x) = x², x = 1.2, y = 0.5, rho = 5
        let p = sphere_problem(&arr1(&[2.0, 0.0]), 0.5).unwrap();
        let u = album2_u_step(&p, &arr1(&[1.2, 0.0]), &arr1(&[0.5]), 5.0);
        assert_eq!(u, arr1(&[1.0]));

        // h = 0: u⁺ = F(x) + y/rho
        let p = scalar_quadratic();
        let u = album2_u_step(&p, &arr1(&[2.0]), &arr1(&[1.0]), 4.0);
        assert!((u[0] - 2.25).abs() < 1e-15);

        // h = |·|: soft threshold of 3 at level 1 → 2
        let p = gallery::l1_equality_problem(
            &Matrix::eye(1),
            &arr1(&[0.0]),
            &Matrix::eye(1),
            &arr1(&[1.0]),
        )
        .unwrap();
        let u = album2_u_step(&p, &arr1(&[0.0]), &arr1(&[3.0]), 1.0);
        assert!((u[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn album2_u_step_is_globally_minimal_against_random_candidates() {
        let p = sphere_problem(&arr1(&[1.0, -2.0]), 0.5).unwrap();
        let x = arr1(&[0.3, 0.9]);
        let y = arr1(&[0.7]);
        let rho = 2.5;
        let u_star = album2_u_step(&p, &x, &y, rho);
        let best = crate::lagrangian::aug_lagrangian(&p, &x, &u_star, &y, rho);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let w = arr1(&[rng.random_range(-3.0..3.0)]);
            let cand = crate::lagrangian::aug_lagrangian(&p, &x, &w, &y, rho);
            assert!(best <= cand + 1e-12, "u-step not minimal: {best} > {cand}");
        }
    }

    #[test]
    fn album2_x_step_scalar_quadratic() {
        // F = id, f0 ≡ 0, u⁺ = 0, y = 0, rho = 1, mu = 1, x_k = 2:
        // minimize (1/2)x² + (1/2)(x−2)² → x⁺ = 1
        let p = CompositeProblem::builder(1, 1)
            .f0(|_| (0.0, Vector::zeros(1)))
            .linear_map(Matrix::eye(1))
            .h(|_| 0.0)
            .prox(|v, _| v.clone())
            .dist_dom(|_| 0.0)
            .gamma(1.0)
            .quadratic_f0(QuadraticModel {
                hessian: Matrix::zeros((1, 1)),
                linear: Vector::zeros(1),
            })
            .build()
            .unwrap();
        let params = AlgoParams::default();
        let x = album2_x_step(&p, &arr1(&[2.0]), &arr1(&[0.0]), &arr1(&[0.0]), 1.0, &params).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn album2_x_step_keeps_stationary_points() {
        let p = scalar_quadratic();
        let params = AlgoParams::default();
        // x = 0 is stationary for 0.5x² + (rho/2)(x−0)² + (mu/2)(x−0)²
        let x = album2_x_step(&p, &arr1(&[0.0]), &arr1(&[0.0]), &arr1(&[0.0]), 1.0, &params).unwrap();
        assert!(x[0].abs() < 1e-12);
    }

    #[test]
    fn album2_x_step_sphere_meets_inner_tolerance() {
        let p = sphere_problem(&arr1(&[2.0, 0.0]), 0.5).unwrap();
        let params = AlgoParams {
            inner_tol: 1e-10,
            ..AlgoParams::default()
        };
        let x_k = arr1(&[0.4, 0.8]);
        let u = arr1(&[1.0]);
        let y = arr1(&[0.2]);
        let x = album2_x_step(&p, &x_k, &u, &y, 5.0, &params).unwrap();
        let g = x_objective_grad(&p, &x, &u, &y, 5.0, params.mu, &x_k);
        assert!(norm(&g) <= 1e-10, "inner gradient {:.3e}", norm(&g));
    }

    #[test]
    fn album3_step_examples() {
        let p = scalar_quadratic();
        let params = AlgoParams {
            mu: 4.0,
            ..AlgoParams::default()
        };
        // zero gradient → fixed point: grad at x=0, u=0, y=0 is 0
        let x = album3_x_step(&p, &arr1(&[0.0]), &arr1(&[0.0]), &arr1(&[0.0]), 1.0, &params).unwrap();
        assert_eq!(x[0], 0.0);

        // scalar arithmetic: gradient 2 at x_k = 1 with mu = 4 → 0.5
        // grad = x + y + rho(x − u) = 1 + 0 + 1·(1 − 0) = 2
        let x = album3_x_step(&p, &arr1(&[1.0]), &arr1(&[0.0]), &arr1(&[0.0]), 1.0, &params).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn album3_step_is_the_linearized_model_minimizer() {
        // completing the square: argmin <x − x_k, g> + (mu/2)||x − x_k||² is
        // x_k − g/mu; compare against scanning a fine grid of candidates.
        let p = scalar_quadratic();
        let params = AlgoParams {
            mu: 3.0,
            ..AlgoParams::default()
        };
        let x_k = arr1(&[0.7]);
        let u = arr1(&[0.2]);
        let y = arr1(&[0.4]);
        let rho = 2.0;
        let x = album3_x_step(&p, &x_k, &u, &y, rho, &params).unwrap();
        let g = grad_x_aug_lagrangian(&p, &x_k, &u, &y, rho);
        let model = |z: f64| (z - x_k[0]) * g[0] + 0.5 * params.mu * (z - x_k[0]).powi(2);
        let m_star = model(x[0]);
        let mut z = -3.0;
        while z <= 3.0 {
            assert!(m_star <= model(z) + 1e-12);
            z += 0.01;
        }
    }

    #[test]
    fn adm_step_matches_direct_linear_solve() {
        // f0 = 0.5 xᵀQx + qᵀx with Q ≻ 0, F = I: x⁺ solves
        // (Q + rho·I) x = −q − y + rho·u⁺
        let q_mat = arr2(&[[2.0, 0.5], [0.5, 1.0]]);
        let q_vec = arr1(&[0.3, -0.7]);
        let p = gallery::linear_composite_problem(
            &q_mat,
            &q_vec,
            &Matrix::eye(2),
            gallery::LinearHKind::Zero,
        )
        .unwrap();
        let u = arr1(&[0.4, 0.1]);
        let y = arr1(&[-0.2, 0.9]);
        let rho = 3.0;
        let x = adm_x_step(&p, &u, &y, rho).unwrap();
        let lhs = &q_mat + &(Matrix::eye(2) * rho);
        let rhs = -&q_vec - &y + &(&u * rho);
        let oracle = crate::linalg::solve_spd(&lhs, &rhs).unwrap();
        for i in 0..2 {
            assert!((x[i] - oracle[i]).abs() < 1e-12);
        }
        // exact solve leaves the partial gradient at machine precision
        let g = grad_x_aug_lagrangian(&p, &x, &u, &y, rho);
        assert!(norm(&g) <= 1e-10);
    }

    #[test]
    fn adm_step_scalar_strongly_convex() {
        let p = scalar_quadratic();
        let x = adm_x_step(&p, &arr1(&[0.0]), &arr1(&[0.0]), 1.0).unwrap();
        assert!(x[0].abs() < 1e-14);
    }

    #[test]
    fn adm_step_requires_certified_structure() {
        let p = sphere_problem(&arr1(&[2.0, 0.0]), 0.5).unwrap();
        assert!(matches!(
            adm_x_step(&p, &arr1(&[1.0]), &arr1(&[0.0]), 1.0),
            Err(MapsError::StrongConvexityNotCertified)
        ));
    }

    #[test]
    fn map_constants_examples() {
        let p = scalar_quadratic();
        let c = map_constants(&MapKind::Album1, 2.0, 1.0, &p).unwrap();
        assert_eq!((c.a, c.b, c.c), (2.0, 2.0, 0.0));

        // album3 with mu=4, rho=1, L(f0)=1, ||F||=1: L = 2, a = 3, b = 6, c = 1
        let c = map_constants(&MapKind::Album3, 4.0, 1.0, &p).unwrap();
        assert_eq!((c.a, c.b, c.c), (3.0, 6.0, 1.0));

        let c = map_constants(&MapKind::Adm { sigma: 1.5 }, 0.0, 2.0, &p).unwrap();
        assert_eq!((c.a, c.b, c.c), (1.5, 1.0, 2.0));
    }

    #[test]
    fn map_constants_rejects_nonpositive_descent() {
        let p = scalar_quadratic();
        // L = 1 + rho = 11, need mu > 5.5
        let err = map_constants(&MapKind::Album3, 5.0, 10.0, &p).unwrap_err();
        assert!(matches!(err, MapsError::NonpositiveDescentConstant { .. }));
    }

    #[test]
    fn map_constants_rejects_wide_spectra_for_album3() {
        let f = arr2(&[[1.0, 0.0], [0.0, 2.0]]); // kappa(FF^T) = 4
        let p = gallery::linear_composite_problem(
            &Matrix::eye(2),
            &arr1(&[0.0, 0.0]),
            &f,
            gallery::LinearHKind::Zero,
        )
        .unwrap();
        assert!(matches!(
            map_constants(&MapKind::Album3, 100.0, 0.1, &p),
            Err(MapsError::SpectrumTooWide(_))
        ));
    }

    #[test]
    fn armijo_solves_ill_conditioned_quadratic() {
        let value = |x: &Vector| 0.5 * (x[0] * x[0] + 50.0 * x[1] * x[1]);
        let grad = |x: &Vector| arr1(&[x[0], 50.0 * x[1]]);
        let sol = armijo_minimize(value, grad, arr1(&[3.0, -2.0]), 1e-10, 100_000).unwrap();
        assert!(norm(&sol.x) < 1e-9);
    }
}
