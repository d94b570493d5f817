//! The outer loop: primal step through the chosen map, explicit multiplier
//! update, then the adaptive step that escalates the penalty whenever the
//! new iterate leaves the information zone or the Lyapunov function fails
//! its sufficient-decrease test.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::lagrangian::{
    aug_lagrangian, grad_x_aug_lagrangian, kkt_residuals, multiplier_step, KktResiduals,
    SolverState,
};
use crate::linalg::{norm, symmetric_extremes};
use crate::maps::{
    c3_witness_norm, map_constants, primal_step, validate_mu, MapConstants, MapKind, MapsError,
};
use crate::model::{AlgoParams, CompositeProblem, ModelError, Vector};

/// Penalty ceiling; crossing it signals a mis-specified zone or d_bar.
pub const PENALTY_GUARD: f64 = 1e12;
/// Running multiplier-norm guard; exceeding it produces a warning, not an
/// error, since boundedness is an assumption of the analysis.
pub const MULTIPLIER_GUARD: f64 = 1e8;

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Maps(#[from] MapsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("augmented Lagrangian is not finite at iteration {k}: unbounded below or oracle fault")]
    NonFiniteLagrangian { k: usize },
    #[error("penalty diverged (rho = {rho:.3e} at iteration {k}); the zone or d_bar looks mis-specified")]
    PenaltyDiverged { rho: f64, k: usize },
    #[error("fixed penalty {rho} is not above the linear-case threshold {rho_bar:.6}")]
    RhoBelowThreshold { rho: f64, rho_bar: f64 },
    #[error("a fixed penalty requires a linear mapping F")]
    FixedRhoRequiresLinear,
}

/// Initial data of a run. Missing pieces are defaulted: x0 is a seeded
/// random unit vector, u0 = prox_{h/rho0}(F(x0)) (so u0 lies in dom h),
/// y0 = 0. `fixed_rho` switches off the adaptive step for linear F when the
/// caller has precomputed a penalty above the closed-form threshold.
#[derive(Clone, Debug, Default)]
pub struct Init {
    pub x0: Option<Vector>,
    pub u0: Option<Vector>,
    pub y0: Option<Vector>,
    pub seed: u64,
    pub fixed_rho: Option<f64>,
}

impl Init {
    pub fn seeded(seed: u64) -> Self {
        Init {
            seed,
            ..Init::default()
        }
    }

    pub fn from_point(x0: Vector) -> Self {
        Init {
            x0: Some(x0),
            ..Init::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
}

/// One row of the run trace. `rho` and `beta` are the values used at this
/// iteration (before any adaptive escalation takes effect).
#[derive(Clone, Debug)]
pub struct IterationRecord {
    pub k: usize,
    pub rho: f64,
    pub beta: f64,
    /// ||x^{k+1} − x^k||
    pub step_x: f64,
    /// ||y^{k+1} − y^k||
    pub step_y: f64,
    /// L_rho(x^{k+1}, u^{k+1}, y^{k+1})
    pub laug: f64,
    /// E_beta at (z^k, x^{k−1})
    pub lyapunov_prev: f64,
    /// E_beta at (z^{k+1}, x^k)
    pub lyapunov_next: f64,
    /// zone membership of x^{k+1}
    pub in_zone: bool,
    pub lyap_test_pass: bool,
    pub kkt: KktResiduals,
    pub c1_slack: f64,
    pub c2_slack: f64,
    pub c3_slack: f64,
    /// h(u^{k+1}), for the trace surrogate of the semicontinuity condition
    pub h_u: f64,
}

/// Full trace of a run plus the post-hoc indices and running bounds the
/// diagnostics need.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub records: Vec<IterationRecord>,
    /// First index from which the recorded penalty stays exactly constant.
    pub k_statio: Option<usize>,
    /// First index from which every recorded iterate lies in the zone.
    pub k_info: Option<usize>,
    pub converged: bool,
    pub termination: Termination,
    pub final_state: SolverState,
    /// Constants at the final penalty; `c` carries the running rho·B value
    /// for maps on nonlinear F.
    pub constants: MapConstants,
    /// tau used by the descent test in the last iteration.
    pub tau: f64,
    /// Running max of ||y^k|| (the Lambda of the dual-sequence bound).
    pub multiplier_bound: f64,
    /// Running max of ||J_F(x^k)|| (the B of the subgradient bound).
    pub jacobian_bound: f64,
    pub x0_in_zone: bool,
    pub warnings: Vec<String>,
}

impl RunReport {
    /// Objective value f0 + h∘F at the final iterate.
    pub fn final_objective(&self, p: &CompositeProblem) -> f64 {
        p.objective(&self.final_state.x)
    }
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vector {
    loop {
        let v = Vector::from_iter((0..n).map(|_| StandardNormal.sample(rng)));
        let r = norm(&v);
        if r > 1e-9 {
            return v / r;
        }
    }
}

/// Spectral norm of the Jacobian at x (constant for linear F).
fn jacobian_norm(p: &CompositeProblem, x: &Vector) -> f64 {
    if let Some(nf) = p.linear_map_norm() {
        return nf;
    }
    let (_, jac) = p.map_raw(x);
    let jjt = jac.dot(&jac.t());
    let (_, hi) = symmetric_extremes(&jjt, 1e-12);
    hi.max(0.0).sqrt()
}

/// Lyapunov weight beta_k = d2/rho_k. For the joint/alternating/ADM maps
/// d2 = 2b²/γ²; for the linearized map the sharper constant
/// d2 = 2(L(f0) + ||M||)²/γ² with M = mu·I − rho·FᵀF applies.
fn lyapunov_beta(
    kind: &MapKind,
    constants: &MapConstants,
    p: &CompositeProblem,
    rho: f64,
    mu: f64,
) -> f64 {
    let g2 = p.gamma() * p.gamma();
    match kind {
        MapKind::Album3 => {
            let s = p.lipschitz_f0() + m_operator_norm(p, rho, mu);
            2.0 * s * s / (rho * g2)
        }
        _ => 2.0 * constants.b * constants.b / (rho * g2),
    }
}

/// ||mu·I − rho·FᵀF|| for linear F. The spectrum of FᵀF is the spectrum of
/// FFᵀ padded with zeros when m < n.
fn m_operator_norm(p: &CompositeProblem, rho: f64, mu: f64) -> f64 {
    let (lo, hi) = p
        .linear_map_extremes()
        .expect("M norm requires a linear map");
    let lam_min_ftf = if p.m() < p.n() { 0.0 } else { lo };
    (mu - rho * lam_min_ftf)
        .abs()
        .max((mu - rho * hi).abs())
}

/// The adaptive step of the outer loop: computes beta_k = 2b²/(rho_k·γ²),
/// evaluates the Lyapunov decrease test
/// tau·||x^{k+1} − x^k||² ≤ E(z^k, x^{k−1}) − E(z^{k+1}, x^k)
/// and the zone membership of x^{k+1}, and escalates the penalty by delta
/// when either fails. Returns (rho_next, beta_used, pass).
pub fn adaptive_step(
    p: &CompositeProblem,
    constants: &MapConstants,
    prev: &SolverState,
    x_next: &Vector,
    u_next: &Vector,
    y_next: &Vector,
    params: &AlgoParams,
) -> (f64, f64, bool) {
    let rho = prev.rho;
    let beta = 2.0 * constants.b * constants.b / (rho * p.gamma() * p.gamma());
    let tau = params.tau_fraction * constants.a;
    let (pass, _, _) = descent_test(
        p, &prev.x, &prev.u, &prev.y, &prev.x_prev, x_next, u_next, y_next, rho, beta, tau,
    );
    let in_zone = p.in_zone(x_next);
    let ok = pass && in_zone;
    let rho_next = if ok { rho } else { rho + params.delta };
    (rho_next, beta, ok)
}

#[allow(clippy::too_many_arguments)]
fn descent_test(
    p: &CompositeProblem,
    x: &Vector,
    u: &Vector,
    y: &Vector,
    x_prev: &Vector,
    x_next: &Vector,
    u_next: &Vector,
    y_next: &Vector,
    rho: f64,
    beta: f64,
    tau: f64,
) -> (bool, f64, f64) {
    let d_prev = x - x_prev;
    let d_next = x_next - x;
    let e_prev = aug_lagrangian(p, x, u, y, rho) + beta * d_prev.dot(&d_prev);
    let e_next = aug_lagrangian(p, x_next, u_next, y_next, rho) + beta * d_next.dot(&d_next);
    let pass = tau * d_next.dot(&d_next) <= e_prev - e_next;
    (pass, e_prev, e_next)
}

/// tau for fixed-penalty (linear F) runs: the descent margin guaranteed by
/// the closed-form constants, scaled by tau_fraction. The adaptive test is
/// bypassed, so tau must come from the theory instead of from `a` alone.
fn bypass_tau(
    kind: &MapKind,
    constants: &MapConstants,
    p: &CompositeProblem,
    rho: f64,
    mu: f64,
    params: &AlgoParams,
) -> Result<f64, DriverError> {
    let g2 = p.gamma() * p.gamma();
    let l = p.lipschitz_f0();
    let (d1, d2) = match kind {
        MapKind::Album3 => {
            let m_norm = m_operator_norm(p, rho, mu);
            let s = l + m_norm;
            (2.0 * m_norm * m_norm / g2, 2.0 * s * s / g2)
        }
        _ => {
            let s = l + constants.b;
            (2.0 * s * s / g2, 2.0 * constants.b * constants.b / g2)
        }
    };
    let a_eff = constants.a - 2.0 * (d1 + d2) / rho;
    if !(a_eff > 0.0) {
        return Err(DriverError::RhoBelowThreshold {
            rho,
            rho_bar: 2.0 * (d1 + d2) / constants.a,
        });
    }
    Ok(params.tau_fraction * a_eff)
}

/// Runs the outer loop until the KKT residuals drop below `stop_tol` or the
/// iteration cap is reached.
pub fn run(
    p: &CompositeProblem,
    kind: &MapKind,
    params: &AlgoParams,
    init: &Init,
) -> Result<RunReport, DriverError> {
    params.validate()?;
    validate_mu(kind, params.mu)?;
    if init.fixed_rho.is_some() && !p.is_linear_map() {
        return Err(DriverError::FixedRhoRequiresLinear);
    }
    let fixed = init.fixed_rho.is_some();
    let rho0 = init.fixed_rho.unwrap_or(params.rho0);
    if !(rho0 > 0.0) {
        return Err(DriverError::Model(ModelError::InvalidData(format!(
            "penalty must be positive, got {rho0}"
        ))));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(init.seed);
    let x0 = match &init.x0 {
        Some(x) => {
            if x.len() != p.n() {
                return Err(DriverError::Model(ModelError::DimensionMismatch {
                    what: "x0",
                    expected: p.n(),
                    got: x.len(),
                }));
            }
            x.clone()
        }
        None => random_unit(p.n(), &mut rng),
    };
    let u0 = match &init.u0 {
        Some(u) => u.clone(),
        None => {
            let (fx, _) = p.map_raw(&x0);
            p.prox(&fx, 1.0 / rho0)
        }
    };
    let y0 = init.y0.clone().unwrap_or_else(|| Vector::zeros(p.m()));

    let constants0 = map_constants(kind, params.mu, rho0, p)?;
    if !aug_lagrangian(p, &x0, &u0, &y0, rho0).is_finite() {
        return Err(DriverError::NonFiniteLagrangian { k: 0 });
    }

    let x0_in_zone = p.in_zone(&x0);
    let mut state = SolverState {
        x_prev: x0.clone(),
        x: x0,
        u: u0,
        y: y0,
        rho: rho0,
        beta: lyapunov_beta(kind, &constants0, p, rho0, params.mu),
        k: 0,
    };
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut multiplier_bound = norm(&state.y);
    let mut jacobian_bound = jacobian_norm(p, &state.x);
    let mut constants = constants0;
    let mut tau = params.tau_fraction * constants.a;
    let mut converged = false;

    for k in 0..params.outer_max_iters {
        let rho = state.rho;
        constants = map_constants(kind, params.mu, rho, p)?;
        tau = if fixed {
            bypass_tau(kind, &constants, p, rho, params.mu, params)?
        } else {
            params.tau_fraction * constants.a
        };

        let (x_next, u_next) = primal_step(p, kind, &state.x, &state.u, &state.y, rho, params)?;
        let y_next = multiplier_step(p, &x_next, &u_next, &state.y, rho);

        let laug_next = aug_lagrangian(p, &x_next, &u_next, &y_next, rho);
        if !laug_next.is_finite() {
            return Err(DriverError::NonFiniteLagrangian { k });
        }

        let beta = lyapunov_beta(kind, &constants, p, rho, params.mu);
        let (lyap_pass, e_prev, e_next) = descent_test(
            p,
            &state.x,
            &state.u,
            &state.y,
            &state.x_prev,
            &x_next,
            &u_next,
            &y_next,
            rho,
            beta,
            tau,
        );
        let in_zone = p.in_zone(&x_next);
        let rho_next = if fixed {
            rho
        } else if !in_zone || !lyap_pass {
            rho + params.delta
        } else {
            rho
        };

        let dx = norm(&(&x_next - &state.x));
        let dy = norm(&(&y_next - &state.y));

        // per-step condition slacks against the declared certificate
        let laug_prev_yk = aug_lagrangian(p, &state.x, &state.u, &state.y, rho);
        let laug_next_yk = aug_lagrangian(p, &x_next, &u_next, &state.y, rho);
        let c1_slack = 0.5 * constants.a * dx * dx + laug_next_yk - laug_prev_yk;
        let grad_next = grad_x_aug_lagrangian(p, &x_next, &u_next, &state.y, rho);
        let c2_slack = norm(&grad_next) - constants.b * dx;
        jacobian_bound = jacobian_bound.max(jacobian_norm(p, &x_next));
        let c_run = match kind {
            MapKind::Album1 => 0.0,
            MapKind::Album3 => constants.c,
            _ => rho * jacobian_bound,
        };
        let c3_slack = c3_witness_norm(kind, p, &state.x, &x_next, rho) - c_run * dx;

        let kkt = kkt_residuals(p, &x_next, &u_next, &y_next, rho);
        records.push(IterationRecord {
            k,
            rho,
            beta,
            step_x: dx,
            step_y: dy,
            laug: laug_next,
            lyapunov_prev: e_prev,
            lyapunov_next: e_next,
            in_zone,
            lyap_test_pass: lyap_pass,
            kkt,
            c1_slack,
            c2_slack,
            c3_slack,
            h_u: p.h_value(&u_next),
        });

        multiplier_bound = multiplier_bound.max(norm(&y_next));
        state = SolverState {
            x_prev: std::mem::replace(&mut state.x, Vector::zeros(0)),
            x: x_next,
            u: u_next,
            y: y_next,
            rho: rho_next,
            beta,
            k: k + 1,
        };

        if kkt.within(params.stop_tol) {
            converged = true;
            break;
        }
        if rho_next > PENALTY_GUARD {
            return Err(DriverError::PenaltyDiverged { rho: rho_next, k });
        }
    }

    let k_statio = detect_stabilization(&records);
    let k_info = detect_zone_entry(&records);
    let mut warnings = Vec::new();
    if multiplier_bound > MULTIPLIER_GUARD {
        warnings.push(format!(
            "multiplier norm {multiplier_bound:.3e} exceeded the {MULTIPLIER_GUARD:.0e} guard; \
             the boundedness assumption looks violated"
        ));
    }
    // final diagnostic c for maps whose bound is only known a posteriori
    match kind {
        MapKind::Album2 | MapKind::Adm { .. } => {
            constants.c = state.rho * jacobian_bound;
        }
        _ => {}
    }
    Ok(RunReport {
        records,
        k_statio,
        k_info,
        converged,
        termination: if converged {
            Termination::Converged
        } else {
            Termination::MaxIterations
        },
        final_state: state,
        constants,
        tau,
        multiplier_bound,
        jacobian_bound,
        x0_in_zone,
        warnings,
    })
}

/// Smallest index from which the recorded penalty is exactly constant to the
/// end of the trace; absent when the trace ends mid-escalation.
pub fn detect_stabilization(records: &[IterationRecord]) -> Option<usize> {
    if records.is_empty() {
        return None;
    }
    let last = records[records.len() - 1].rho;
    let mut start = records.len() - 1;
    while start > 0 && records[start - 1].rho == last {
        start -= 1;
    }
    if start == 0 {
        Some(0)
    } else if records.len() - start >= 2 {
        Some(start)
    } else {
        None
    }
}

/// Smallest index from which every recorded iterate lies in the zone.
fn detect_zone_entry(records: &[IterationRecord]) -> Option<usize> {
    if records.is_empty() || !records[records.len() - 1].in_zone {
        return None;
    }
    let mut start = records.len() - 1;
    while start > 0 && records[start - 1].in_zone {
        start -= 1;
    }
    Some(start)
}
