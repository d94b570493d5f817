//! Ready-to-run instances of the composite model with analytically derived
//! constants, plus the proximal-operator catalog they are built from.

use ndarray::{s, Array2};
use thiserror::Error;

use crate::linalg::{self, norm};
use crate::model::{CompositeProblem, Matrix, ModelError, QuadraticModel, Vector};

#[derive(Debug, Error)]
pub enum GalleryError {
    #[error("cost vector must be nonzero")]
    DegenerateCost,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("feasibility needs at least two sets, got {0}")]
    TooFewSets(usize),
    #[error("sparsity level {s} exceeds dimension {n}")]
    SparsityTooLarge { s: usize, n: usize },
    #[error("weights must be positive, got {0}")]
    NonpositiveWeight(f64),
    #[error("mapping matrix is rank deficient (lambda_min(FF^T) = {0:.3e})")]
    RankDeficientMap(f64),
    #[error("quadratic cost matrix must be symmetric")]
    AsymmetricCost,
    #[error(transparent)]
    Model(#[from] ModelError),
}

// ---------------------------------------------------------------------------
// prox catalog
// ---------------------------------------------------------------------------

/// Soft threshold: prox of t·|·| at v.
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Componentwise soft threshold with per-coordinate weights w_i·t.
pub fn soft_threshold_weighted(v: &Vector, weights: &Vector, t: f64) -> Vector {
    Vector::from_iter(
        v.iter()
            .zip(weights.iter())
            .map(|(&vi, &wi)| soft_threshold(vi, wi * t)),
    )
}

/// Projection onto the sparsity ball { ||u||_0 ≤ s }: keeps the s largest
/// magnitudes, ties broken toward lower indices.
pub fn hard_threshold(v: &Vector, s: usize) -> Vector {
    let n = v.len();
    if s >= n {
        return v.clone();
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        v[j].abs()
            .partial_cmp(&v[i].abs())
            .unwrap()
            .then(i.cmp(&j))
    });
    let mut out = Vector::zeros(n);
    for &i in idx.iter().take(s) {
        out[i] = v[i];
    }
    out
}

/// Radial projection onto the sphere of given radius centered at the origin.
/// At v = 0 every point of the sphere is closest; the first canonical basis
/// vector is selected for determinism.
pub fn project_sphere(v: &Vector, radius: f64) -> Vector {
    let r = norm(v);
    if r == 0.0 {
        let mut e = Vector::zeros(v.len());
        e[0] = radius;
        return e;
    }
    v * (radius / r)
}

/// Projection onto a closed Euclidean ball.
pub fn project_ball(v: &Vector, center: &Vector, radius: f64) -> Vector {
    let d = v - center;
    let r = norm(&d);
    if r <= radius {
        v.clone()
    } else {
        center + &(&d * (radius / r))
    }
}

/// A closed set with an exact projection oracle, for the feasibility gallery.
#[derive(Clone, Debug)]
pub enum ProjectableSet {
    Ball { center: Vector, radius: f64 },
    Sphere { center: Vector, radius: f64 },
    Singleton { point: Vector },
}

impl ProjectableSet {
    pub fn dim(&self) -> usize {
        match self {
            ProjectableSet::Ball { center, .. } => center.len(),
            ProjectableSet::Sphere { center, .. } => center.len(),
            ProjectableSet::Singleton { point } => point.len(),
        }
    }

    pub fn project(&self, v: &Vector) -> Vector {
        match self {
            ProjectableSet::Ball { center, radius } => project_ball(v, center, *radius),
            ProjectableSet::Sphere { center, radius } => {
                center + &project_sphere(&(v - center), *radius)
            }
            ProjectableSet::Singleton { point } => point.clone(),
        }
    }

    pub fn distance(&self, v: &Vector) -> f64 {
        match self {
            ProjectableSet::Ball { center, radius } => (norm(&(v - center)) - radius).max(0.0),
            ProjectableSet::Sphere { center, radius } => (norm(&(v - center)) - radius).abs(),
            ProjectableSet::Singleton { point } => norm(&(v - point)),
        }
    }
}

// ---------------------------------------------------------------------------
// problem builders
// ---------------------------------------------------------------------------

/// Linear cost over the unit sphere: minimize <c, x> subject to ||x||² = 1,
/// modeled with F(x) = ||x||² and h the indicator of {1}.
///
/// The zone { ||x|| ≥ r1 } certifies gamma = 2·r1 and L(F) = 2 with
/// enlargement radius d_bar = 1 − r1²; the global minimizer is −c/||c||.
pub fn sphere_problem(c: &Vector, r1: f64) -> Result<CompositeProblem, GalleryError> {
    if norm(c) == 0.0 {
        return Err(GalleryError::DegenerateCost);
    }
    if !(r1 > 0.0 && r1 < 1.0) {
        return Err(GalleryError::InvalidParameter(format!(
            "r1 must lie in (0, 1), got {r1}"
        )));
    }
    let n = c.len();
    let cost = c.clone();
    let p = CompositeProblem::builder(n, 1)
        .f0(move |x: &Vector| (cost.dot(x), cost.clone()))
        .map(|x: &Vector| {
            let fx = Vector::from_elem(1, x.dot(x));
            let jac = Array2::from_shape_fn((1, x.len()), |(_, j)| 2.0 * x[j]);
            (fx, jac)
        })
        .h(|u: &Vector| {
            if (u[0] - 1.0).abs() <= 1e-12 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .prox(|_: &Vector, _| Vector::from_elem(1, 1.0))
        .dist_dom(|u: &Vector| (u[0] - 1.0).abs())
        .zone_predicate(move |x: &Vector| norm(x) >= r1)
        .gamma(2.0 * r1)
        .lipschitz_f0(0.0)
        .lipschitz_map(2.0)
        .d_bar(1.0 - r1 * r1)
        .build()?;
    Ok(p)
}

/// Finds a point in the intersection of `sets` by minimizing the pairwise
/// coupling (2(p−1))⁻¹ Σ ||x_1 − x_i||² over the product space, with h the
/// sum of set indicators and F the identity.
pub fn feasibility_problem(sets: &[ProjectableSet]) -> Result<CompositeProblem, GalleryError> {
    let p_count = sets.len();
    if p_count < 2 {
        return Err(GalleryError::TooFewSets(p_count));
    }
    let block = sets[0].dim();
    if block == 0 || sets.iter().any(|s| s.dim() != block) {
        return Err(GalleryError::InvalidParameter(
            "all sets must live in the same nonzero dimension".into(),
        ));
    }
    let total = block * p_count;

    // Hessian of the coupling quadratic: (1/(p−1)) · C ⊗ I with
    // C = [[p−1, −1ᵀ], [−1, I]]; its largest eigenvalue is p/(p−1).
    let w = 1.0 / (p_count as f64 - 1.0);
    let mut hessian = Array2::<f64>::zeros((total, total));
    for i in 1..p_count {
        for d in 0..block {
            let a = d; // block 0
            let b = i * block + d;
            hessian[[a, a]] += w;
            hessian[[b, b]] += w;
            hessian[[a, b]] -= w;
            hessian[[b, a]] -= w;
        }
    }
    let (_, l_f0) = linalg::symmetric_extremes(&hessian, 1e-12);

    let h_sets = sets.to_vec();
    let prox_sets = sets.to_vec();
    let dist_sets = sets.to_vec();
    let hess_f0 = hessian.clone();
    let p = CompositeProblem::builder(total, total)
        .f0(move |x: &Vector| {
            let g = hess_f0.dot(x);
            (0.5 * x.dot(&g), g)
        })
        .linear_map(Matrix::eye(total))
        .h(move |u: &Vector| {
            let ok = h_sets.iter().enumerate().all(|(i, set)| {
                let ui = u.slice(s![i * block..(i + 1) * block]).to_owned();
                set.distance(&ui) <= 1e-9
            });
            if ok {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .prox(move |v: &Vector, _| {
            let mut out = Vector::zeros(v.len());
            for (i, set) in prox_sets.iter().enumerate() {
                let vi = v.slice(s![i * block..(i + 1) * block]).to_owned();
                out.slice_mut(s![i * block..(i + 1) * block])
                    .assign(&set.project(&vi));
            }
            out
        })
        .dist_dom(move |v: &Vector| {
            dist_sets
                .iter()
                .enumerate()
                .map(|(i, set)| {
                    let vi = v.slice(s![i * block..(i + 1) * block]).to_owned();
                    set.distance(&vi).powi(2)
                })
                .sum::<f64>()
                .sqrt()
        })
        .gamma(1.0)
        .lipschitz_f0(l_f0)
        .quadratic_f0(QuadraticModel {
            hessian,
            linear: Vector::zeros(total),
        })
        .build()?;
    Ok(p)
}

/// Sparsity-constrained least squares: minimize ½||Ax − b||² over
/// { ||x||_0 ≤ s }, with F the identity and h the sparsity-ball indicator.
pub fn sparsity_problem(
    a: &Matrix,
    b: &Vector,
    s: usize,
) -> Result<CompositeProblem, GalleryError> {
    let n = a.ncols();
    if a.nrows() != b.len() {
        return Err(GalleryError::InvalidParameter(format!(
            "A has {} rows but b has length {}",
            a.nrows(),
            b.len()
        )));
    }
    if s == 0 || s > n {
        return Err(GalleryError::SparsityTooLarge { s, n });
    }
    let gram = a.t().dot(a);
    let (_, l_f0) = linalg::symmetric_extremes(&gram, 1e-12);
    let lin = -a.t().dot(b);

    let a_f0 = a.to_owned();
    let b_f0 = b.to_owned();
    let p = CompositeProblem::builder(n, n)
        .f0(move |x: &Vector| {
            let r = a_f0.dot(x) - &b_f0;
            (0.5 * r.dot(&r), a_f0.t().dot(&r))
        })
        .linear_map(Matrix::eye(n))
        .h(move |u: &Vector| {
            if u.iter().filter(|&&v| v != 0.0).count() <= s {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .prox(move |v: &Vector, _| hard_threshold(v, s))
        .dist_dom(move |v: &Vector| norm(&(v - &hard_threshold(v, s))))
        .gamma(1.0)
        .lipschitz_f0(l_f0)
        .quadratic_f0(QuadraticModel {
            hessian: gram,
            linear: lin,
        })
        .build()?;
    Ok(p)
}

/// The nonsmooth part of a linear composite problem.
#[derive(Clone, Debug)]
pub enum LinearHKind {
    /// h = 0 (smooth problem in split form).
    Zero,
    /// Weighted l1 penalty h(u) = Σ w_i |u_i|.
    L1 { weights: Vector },
    /// Indicator of the sparsity ball { ||u||_0 ≤ s }.
    Cardinality { s: usize },
}

/// Quadratic-plus-composite instance f0 = ½xᵀQx + qᵀx, F linear with full
/// row rank, h as selected. gamma = sqrt(lambda_min(FFᵀ)), d_bar = +inf and
/// L(f0) = ||Q||.
pub fn linear_composite_problem(
    q_matrix: &Matrix,
    q_linear: &Vector,
    f_matrix: &Matrix,
    h_kind: LinearHKind,
) -> Result<CompositeProblem, GalleryError> {
    let n = f_matrix.ncols();
    let m = f_matrix.nrows();
    if q_matrix.nrows() != n || q_matrix.ncols() != n || q_linear.len() != n {
        return Err(GalleryError::InvalidParameter(
            "quadratic data must match the column dimension of F".into(),
        ));
    }
    if linalg::max_asymmetry(q_matrix) > 1e-12 * (1.0 + linalg::frobenius(q_matrix)) {
        return Err(GalleryError::AsymmetricCost);
    }
    let fft = f_matrix.dot(&f_matrix.t());
    let (lam_min, _) = linalg::symmetric_extremes(&fft, 1e-12);
    if lam_min <= 1e-12 {
        return Err(GalleryError::RankDeficientMap(lam_min));
    }
    let (q_lo, q_hi) = linalg::symmetric_extremes(q_matrix, 1e-12);
    let l_f0 = q_lo.abs().max(q_hi.abs());

    let mut builder = CompositeProblem::builder(n, m)
        .linear_map(f_matrix.to_owned())
        .gamma(lam_min.sqrt())
        .lipschitz_f0(l_f0)
        .quadratic_f0(QuadraticModel {
            hessian: q_matrix.to_owned(),
            linear: q_linear.to_owned(),
        });

    let q_f0 = q_matrix.to_owned();
    let c_f0 = q_linear.to_owned();
    builder = builder.f0(move |x: &Vector| {
        let qx = q_f0.dot(x);
        (0.5 * x.dot(&qx) + c_f0.dot(x), qx + &c_f0)
    });

    builder = match h_kind {
        LinearHKind::Zero => builder
            .h(|_| 0.0)
            .prox(|v: &Vector, _| v.clone())
            .dist_dom(|_| 0.0),
        LinearHKind::L1 { weights } => {
            if weights.len() != m {
                return Err(GalleryError::InvalidParameter(format!(
                    "need {m} weights, got {}",
                    weights.len()
                )));
            }
            if let Some(&w) = weights.iter().find(|&&w| w <= 0.0) {
                return Err(GalleryError::NonpositiveWeight(w));
            }
            let w_h = weights.clone();
            let w_prox = weights.clone();
            builder
                .h(move |u: &Vector| u.iter().zip(w_h.iter()).map(|(&ui, &wi)| wi * ui.abs()).sum())
                .prox(move |v: &Vector, t| soft_threshold_weighted(v, &w_prox, t))
                .dist_dom(|_| 0.0)
        }
        LinearHKind::Cardinality { s } => {
            if s == 0 || s > m {
                return Err(GalleryError::SparsityTooLarge { s, n: m });
            }
            builder
                .h(move |u: &Vector| {
                    if u.iter().filter(|&&v| v != 0.0).count() <= s {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                })
                .prox(move |v: &Vector, _| hard_threshold(v, s))
                .dist_dom(move |v: &Vector| norm(&(v - &hard_threshold(v, s))))
        }
    };
    Ok(builder.build()?)
}

/// l1-penalized equality constraints: f0 quadratic, F linear, h_i = w_i|·|.
pub fn l1_equality_problem(
    q_matrix: &Matrix,
    q_linear: &Vector,
    f_matrix: &Matrix,
    weights: &Vector,
) -> Result<CompositeProblem, GalleryError> {
    linear_composite_problem(
        q_matrix,
        q_linear,
        f_matrix,
        LinearHKind::L1 {
            weights: weights.clone(),
        },
    )
}

/// Certified strong-convexity modulus of x ↦ L_rho(x, u, y) for problems
/// with quadratic f0 and linear F: lambda_min(Q) + rho·lambda_min(FᵀF).
/// `None` when the structure is missing or the modulus is not positive.
pub fn adm_sigma(p: &CompositeProblem, rho: f64) -> Option<f64> {
    let quad = p.quadratic_f0()?;
    let fm = p.linear_map()?;
    let (q_lo, _) = linalg::symmetric_extremes(&quad.hessian, 1e-12);
    let ftf = fm.t().dot(fm);
    let (f_lo, _) = linalg::symmetric_extremes(&ftf, 1e-12);
    let sigma = q_lo + rho * f_lo.max(0.0);
    (sigma > 0.0).then_some(sigma)
}
