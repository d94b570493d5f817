//! Augmented Lagrangian of the split reformulation u = F(x), its partial
//! x-gradient, the Lyapunov function with quadratic memory term, the
//! explicit multiplier update and the KKT residual triple.

use ndarray::Array1;

use crate::linalg::norm;
use crate::model::{CompositeProblem, Vector};

/// Iterate quadruple of the outer loop together with the current penalty,
/// Lyapunov weight and iteration counter. `x_prev` is the memory slot of the
/// Lyapunov function; at k = 0 it equals `x` so the memory term vanishes.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub x: Vector,
    pub u: Vector,
    pub y: Vector,
    pub x_prev: Vector,
    pub rho: f64,
    pub beta: f64,
    pub k: usize,
}

/// L_rho(x, u, y) = f0(x) + h(u) + <y, F(x) − u> + (rho/2)||F(x) − u||².
/// May be +inf when u lies outside dom h.
pub fn aug_lagrangian(p: &CompositeProblem, x: &Vector, u: &Vector, y: &Vector, rho: f64) -> f64 {
    debug_assert!(rho > 0.0);
    let (f0, _) = p.f0_raw(x);
    let (fx, _) = p.map_raw(x);
    let r = &fx - u;
    f0 + p.h_value(u) + y.dot(&r) + 0.5 * rho * r.dot(&r)
}

/// grad_x L_rho(x, u, y) = grad f0(x) + J_F(x)ᵀ (y + rho (F(x) − u)).
pub fn grad_x_aug_lagrangian(
    p: &CompositeProblem,
    x: &Vector,
    u: &Vector,
    y: &Vector,
    rho: f64,
) -> Vector {
    debug_assert!(rho > 0.0);
    let (_, g0) = p.f0_raw(x);
    let (fx, jac) = p.map_raw(x);
    let w = y + &((&fx - u) * rho);
    g0 + jac.t().dot(&w)
}

/// E_beta(x, u, y, w) = L_rho(x, u, y) + beta ||x − w||². `beta = 0` is
/// accepted for diagnostics and reduces to the augmented Lagrangian.
pub fn lyapunov(
    p: &CompositeProblem,
    x: &Vector,
    u: &Vector,
    y: &Vector,
    w: &Vector,
    rho: f64,
    beta: f64,
) -> f64 {
    debug_assert!(beta >= 0.0);
    let d = x - w;
    aug_lagrangian(p, x, u, y, rho) + beta * d.dot(&d)
}

/// Explicit dual update y⁺ = y + rho (F(x⁺) − u⁺).
pub fn multiplier_step(
    p: &CompositeProblem,
    x_next: &Vector,
    u_next: &Vector,
    y: &Vector,
    rho: f64,
) -> Vector {
    debug_assert!(rho > 0.0);
    let (fx, _) = p.map_raw(x_next);
    y + &((&fx - u_next) * rho)
}

/// The three residuals certifying an approximate critical point of the
/// composite model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KktResiduals {
    /// ||grad f0(x) + J_F(x)ᵀ y||
    pub stationarity: f64,
    /// ||F(x) − u||
    pub feasibility: f64,
    /// ||u − prox_{h/rho}(u + y/rho)||, the prox fixed-point surrogate for
    /// y ∈ ∂h(u).
    pub dual: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity.max(self.feasibility).max(self.dual)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

/// Evaluates the KKT residual triple at (x, u, y) with penalty `rho`.
pub fn kkt_residuals(
    p: &CompositeProblem,
    x: &Vector,
    u: &Vector,
    y: &Vector,
    rho: f64,
) -> KktResiduals {
    debug_assert!(rho > 0.0);
    let (_, g0) = p.f0_raw(x);
    let (fx, jac) = p.map_raw(x);
    let stationarity = norm(&(&g0 + &jac.t().dot(y)));
    let feasibility = norm(&(&fx - u));
    let arg = u + &(y / rho);
    let dual = norm(&(u - &p.prox(&arg, 1.0 / rho)));
    KktResiduals {
        stationarity,
        feasibility,
        dual,
    }
}

/// Euclidean norm helper re-exported for callers assembling traces.
pub fn vec_norm(v: &Array1<f64>) -> f64 {
    norm(v)
}
