//! The composite model: minimize f0(x) + h(F(x)) with smooth f0, smooth
//! mapping F into R^m and a proper lsc (possibly nonconvex) h accessed
//! through value, prox and domain-distance oracles.
//!
//! A [`CompositeProblem`] bundles the oracles together with the constants
//! that are assumed to hold on its information zone: the gradient Lipschitz
//! constant of f0, the Jacobian Lipschitz constant of F, the uniform
//! regularity modulus `gamma` and the zone enlargement radius `d_bar`.
//! Constants are supplied by the problem builder; nothing is estimated
//! behind the caller's back.

use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::linalg;

pub type Vector = Array1<f64>;
pub type Matrix = Array2<f64>;

type F0Oracle = dyn Fn(&Vector) -> (f64, Vector) + Send + Sync;
type MapOracle = dyn Fn(&Vector) -> (Vector, Matrix) + Send + Sync;
type HOracle = dyn Fn(&Vector) -> f64 + Send + Sync;
type ProxOracle = dyn Fn(&Vector, f64) -> Vector + Send + Sync;
type DistOracle = dyn Fn(&Vector) -> f64 + Send + Sync;
type ZoneOracle = dyn Fn(&Vector) -> bool + Send + Sync;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid problem data: {0}")]
    InvalidData(String),
}

/// Quadratic structure of f0 when available: grad f0(x) = hessian·x + linear.
/// Used by the maps to replace inner descent loops with direct solves; the
/// value of f0 always comes from the oracle (the quadratic form may differ
/// from f0 by a constant).
#[derive(Clone, Debug)]
pub struct QuadraticModel {
    pub hessian: Matrix,
    pub linear: Vector,
}

/// Immutable oracle bundle for the composite model. All oracles are pure
/// functions of their inputs, so a problem can be shared across threads.
#[derive(Clone)]
pub struct CompositeProblem {
    n: usize,
    m: usize,
    f0: Arc<F0Oracle>,
    map: Arc<MapOracle>,
    h: Arc<HOracle>,
    prox: Arc<ProxOracle>,
    dist_dom: Arc<DistOracle>,
    zone: Option<Arc<ZoneOracle>>,
    lipschitz_f0: f64,
    lipschitz_map: f64,
    gamma: f64,
    d_bar: f64,
    linear_map: Option<Matrix>,
    /// (lambda_min, lambda_max) of F·Fᵀ, cached when F is linear.
    linear_map_extremes: Option<(f64, f64)>,
    quadratic_f0: Option<QuadraticModel>,
}

impl fmt::Debug for CompositeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompositeProblem")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("lipschitz_f0", &self.lipschitz_f0)
            .field("lipschitz_map", &self.lipschitz_map)
            .field("gamma", &self.gamma)
            .field("d_bar", &self.d_bar)
            .field("is_linear_map", &self.linear_map.is_some())
            .finish()
    }
}

impl CompositeProblem {
    pub fn builder(n: usize, m: usize) -> CompositeProblemBuilder {
        CompositeProblemBuilder::new(n, m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Value and gradient of f0 at `x`.
    pub fn eval_f0(&self, x: &Vector) -> Result<(f64, Vector), ModelError> {
        if x.len() != self.n {
            return Err(ModelError::DimensionMismatch {
                what: "f0 argument",
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((self.f0)(x))
    }

    /// Value F(x) in R^m and the m×n Jacobian whose rows are the
    /// component gradients.
    pub fn eval_map(&self, x: &Vector) -> Result<(Vector, Matrix), ModelError> {
        if x.len() != self.n {
            return Err(ModelError::DimensionMismatch {
                what: "F argument",
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((self.map)(x))
    }

    pub(crate) fn f0_raw(&self, x: &Vector) -> (f64, Vector) {
        debug_assert_eq!(x.len(), self.n);
        (self.f0)(x)
    }

    pub(crate) fn map_raw(&self, x: &Vector) -> (Vector, Matrix) {
        debug_assert_eq!(x.len(), self.n);
        (self.map)(x)
    }

    /// Extended-real value of h; `f64::INFINITY` encodes points outside dom h.
    pub fn h_value(&self, u: &Vector) -> f64 {
        assert_eq!(u.len(), self.m, "h argument has wrong length");
        (self.h)(u)
    }

    /// prox_{t·h}(v) = argmin_u h(u) + (1/2t)·||u − v||². Total on its domain;
    /// nonconvex h uses the catalog tie-breaking rules.
    pub fn prox(&self, v: &Vector, t: f64) -> Vector {
        assert!(t > 0.0, "prox step size must be positive");
        assert_eq!(v.len(), self.m, "prox argument has wrong length");
        (self.prox)(v, t)
    }

    /// Euclidean distance from `v` to dom h.
    pub fn dist_dom(&self, v: &Vector) -> f64 {
        assert_eq!(v.len(), self.m, "dist argument has wrong length");
        (self.dist_dom)(v)
    }

    /// Membership in the information zone. Defaults to the enlargement test
    /// dist(F(x), dom h) ≤ d_bar unless the builder installed a predicate.
    pub fn in_zone(&self, x: &Vector) -> bool {
        assert_eq!(x.len(), self.n, "zone argument has wrong length");
        match &self.zone {
            Some(pred) => pred(x),
            None => self.dist_dom(&self.map_raw(x).0) <= self.d_bar,
        }
    }

    pub fn lipschitz_f0(&self) -> f64 {
        self.lipschitz_f0
    }

    /// Jacobian Lipschitz constant L(F) on the zone; zero when F is linear.
    pub fn lipschitz_map(&self) -> f64 {
        self.lipschitz_map
    }

    /// Uniform regularity modulus of F on the zone.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn d_bar(&self) -> f64 {
        self.d_bar
    }

    pub fn is_linear_map(&self) -> bool {
        self.linear_map.is_some()
    }

    pub fn linear_map(&self) -> Option<&Matrix> {
        self.linear_map.as_ref()
    }

    /// (lambda_min, lambda_max) of F·Fᵀ for linear F.
    pub fn linear_map_extremes(&self) -> Option<(f64, f64)> {
        self.linear_map_extremes
    }

    /// Operator norm ||F|| for linear F.
    pub fn linear_map_norm(&self) -> Option<f64> {
        self.linear_map_extremes.map(|(_, hi)| hi.max(0.0).sqrt())
    }

    pub fn quadratic_f0(&self) -> Option<&QuadraticModel> {
        self.quadratic_f0.as_ref()
    }

    /// Full objective f0(x) + h(F(x)) of the composite model.
    pub fn objective(&self, x: &Vector) -> f64 {
        let (f0, _) = self.f0_raw(x);
        f0 + self.h_value(&self.map_raw(x).0)
    }
}

pub struct CompositeProblemBuilder {
    n: usize,
    m: usize,
    f0: Option<Arc<F0Oracle>>,
    map: Option<Arc<MapOracle>>,
    h: Option<Arc<HOracle>>,
    prox: Option<Arc<ProxOracle>>,
    dist_dom: Option<Arc<DistOracle>>,
    zone: Option<Arc<ZoneOracle>>,
    lipschitz_f0: f64,
    lipschitz_map: f64,
    gamma: Option<f64>,
    d_bar: f64,
    linear_map: Option<Matrix>,
    quadratic_f0: Option<QuadraticModel>,
}

impl CompositeProblemBuilder {
    fn new(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            f0: None,
            map: None,
            h: None,
            prox: None,
            dist_dom: None,
            zone: None,
            lipschitz_f0: 0.0,
            lipschitz_map: 0.0,
            gamma: None,
            d_bar: f64::INFINITY,
            linear_map: None,
            quadratic_f0: None,
        }
    }

    pub fn f0<F>(mut self, f: F) -> Self
    where
        F: Fn(&Vector) -> (f64, Vector) + Send + Sync + 'static,
    {
        self.f0 = Some(Arc::new(f));
        self
    }

    pub fn map<F>(mut self, f: F) -> Self
    where
        F: Fn(&Vector) -> (Vector, Matrix) + Send + Sync + 'static,
    {
        self.map = Some(Arc::new(f));
        self
    }

    /// Installs a linear mapping F(x) = F·x; the oracle is derived from the
    /// matrix and its F·Fᵀ spectrum is cached.
    pub fn linear_map(mut self, f_matrix: Matrix) -> Self {
        let fm = f_matrix.clone();
        self.map = Some(Arc::new(move |x: &Vector| (fm.dot(x), fm.clone())));
        self.linear_map = Some(f_matrix);
        self.lipschitz_map = 0.0;
        self
    }

    pub fn h<F>(mut self, f: F) -> Self
    where
        F: Fn(&Vector) -> f64 + Send + Sync + 'static,
    {
        self.h = Some(Arc::new(f));
        self
    }

    pub fn prox<F>(mut self, f: F) -> Self
    where
        F: Fn(&Vector, f64) -> Vector + Send + Sync + 'static,
    {
        self.prox = Some(Arc::new(f));
        self
    }

    pub fn dist_dom<F>(mut self, f: F) -> Self
    where
        F: Fn(&Vector) -> f64 + Send + Sync + 'static,
    {
        self.dist_dom = Some(Arc::new(f));
        self
    }

    /// Overrides the default zone predicate; the zone may strictly contain
    /// the d_bar-enlargement of the feasible set.
    pub fn zone_predicate<F>(mut self, f: F) -> Self
    where
        F: Fn(&Vector) -> bool + Send + Sync + 'static,
    {
        self.zone = Some(Arc::new(f));
        self
    }

    pub fn lipschitz_f0(mut self, l: f64) -> Self {
        self.lipschitz_f0 = l;
        self
    }

    pub fn lipschitz_map(mut self, l: f64) -> Self {
        self.lipschitz_map = l;
        self
    }

    pub fn gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn d_bar(mut self, d_bar: f64) -> Self {
        self.d_bar = d_bar;
        self
    }

    pub fn quadratic_f0(mut self, q: QuadraticModel) -> Self {
        self.quadratic_f0 = Some(q);
        self
    }

    pub fn build(self) -> Result<CompositeProblem, ModelError> {
        if self.n == 0 || self.m == 0 {
            return Err(ModelError::InvalidData(
                "dimensions n and m must be positive".into(),
            ));
        }
        if self.m > self.n {
            return Err(ModelError::InvalidData(format!(
                "image dimension m = {} exceeds n = {}",
                self.m, self.n
            )));
        }
        let gamma = self
            .gamma
            .ok_or_else(|| ModelError::InvalidData("gamma must be supplied".into()))?;
        if !(gamma > 0.0) {
            return Err(ModelError::InvalidData(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if !(self.d_bar > 0.0) {
            return Err(ModelError::InvalidData(format!(
                "d_bar must be in (0, +inf], got {}",
                self.d_bar
            )));
        }
        if self.lipschitz_f0 < 0.0 || self.lipschitz_map < 0.0 {
            return Err(ModelError::InvalidData(
                "Lipschitz constants must be nonnegative".into(),
            ));
        }
        if let Some(fm) = &self.linear_map {
            if fm.nrows() != self.m || fm.ncols() != self.n {
                return Err(ModelError::DimensionMismatch {
                    what: "linear map matrix",
                    expected: self.m * self.n,
                    got: fm.nrows() * fm.ncols(),
                });
            }
        }
        if let Some(q) = &self.quadratic_f0 {
            if q.hessian.nrows() != self.n || q.hessian.ncols() != self.n || q.linear.len() != self.n
            {
                return Err(ModelError::DimensionMismatch {
                    what: "quadratic f0 data",
                    expected: self.n,
                    got: q.linear.len(),
                });
            }
        }
        let linear_map_extremes = self.linear_map.as_ref().map(|fm| {
            let fft = fm.dot(&fm.t());
            linalg::symmetric_extremes(&fft, 1e-12)
        });
        Ok(CompositeProblem {
            n: self.n,
            m: self.m,
            f0: self
                .f0
                .ok_or_else(|| ModelError::InvalidData("f0 oracle missing".into()))?,
            map: self
                .map
                .ok_or_else(|| ModelError::InvalidData("F oracle missing".into()))?,
            h: self
                .h
                .ok_or_else(|| ModelError::InvalidData("h oracle missing".into()))?,
            prox: self
                .prox
                .ok_or_else(|| ModelError::InvalidData("prox oracle missing".into()))?,
            dist_dom: self
                .dist_dom
                .ok_or_else(|| ModelError::InvalidData("dist oracle missing".into()))?,
            zone: self.zone,
            lipschitz_f0: self.lipschitz_f0,
            lipschitz_map: self.lipschitz_map,
            gamma,
            d_bar: self.d_bar,
            linear_map: self.linear_map,
            linear_map_extremes,
            quadratic_f0: self.quadratic_f0,
        })
    }
}

/// Outer-loop parameters shared by all the multiplier methods.
#[derive(Clone, Debug)]
pub struct AlgoParams {
    /// Initial penalty rho_0 > 0.
    pub rho0: f64,
    /// Penalty increment delta > 0 applied on each failed adaptive test.
    pub delta: f64,
    /// Proximal weight mu (> 0 for the joint/alternating/linearized maps,
    /// exactly 0 for the ADM variant).
    pub mu: f64,
    /// tau = tau_fraction · a, with tau_fraction in (0, 1/2).
    pub tau_fraction: f64,
    /// Gradient tolerance of the inner solvers.
    pub inner_tol: f64,
    /// Iteration cap of the inner solvers.
    pub inner_max_iters: usize,
    /// Outer iteration cap.
    pub outer_max_iters: usize,
    /// KKT residual tolerance declaring convergence.
    pub stop_tol: f64,
}

impl Default for AlgoParams {
    fn default() -> Self {
        Self {
            rho0: 1.0,
            delta: 1.0,
            mu: 1.0,
            tau_fraction: 0.25,
            inner_tol: 1e-10,
            inner_max_iters: 100_000,
            outer_max_iters: 20_000,
            stop_tol: 1e-6,
        }
    }
}

impl AlgoParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.rho0 > 0.0) {
            return Err(ModelError::InvalidData(format!(
                "rho0 must be positive, got {}",
                self.rho0
            )));
        }
        if !(self.delta > 0.0) {
            return Err(ModelError::InvalidData(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if !(self.tau_fraction > 0.0 && self.tau_fraction < 0.5) {
            return Err(ModelError::InvalidData(format!(
                "tau_fraction must lie in (0, 1/2) so that tau is in (0, a/2), got {}",
                self.tau_fraction
            )));
        }
        if self.mu < 0.0 {
            return Err(ModelError::InvalidData(format!(
                "mu must be nonnegative, got {}",
                self.mu
            )));
        }
        if !(self.inner_tol > 0.0) || !(self.stop_tol > 0.0) {
            return Err(ModelError::InvalidData(
                "tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}
