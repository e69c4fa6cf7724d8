//! Observation model: X ∈ R^p centered at θ, residual vector U ∈ R^n
//! carrying the scale through s = ‖U‖², with joint spherical symmetry
//! and unknown precision η.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensions (p, n) of the location and residual blocks.
///
/// Any p ≥ 1, n ≥ 1 is a valid sampling model; shrinkage rules impose
/// p ≥ 3 and n ≥ 2 at their own construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemDim {
    pub p: usize,
    pub n: usize,
}

impl ProblemDim {
    pub fn new(p: usize, n: usize) -> Result<Self> {
        if p < 1 || n < 1 {
            return Err(Error::Dimension(format!(
                "need p >= 1 and n >= 1, got p = {p}, n = {n}"
            )));
        }
        Ok(Self { p, n })
    }

    /// total dimension p + n of the spherical vector
    pub fn m(&self) -> usize {
        self.p + self.n
    }

    /// true when the dimensions admit shrinkage (p ≥ 3, n ≥ 2)
    pub fn supports_shrinkage(&self) -> bool {
        self.p >= 3 && self.n >= 2
    }

    pub(crate) fn require_shrinkage(&self) -> Result<()> {
        if !self.supports_shrinkage() {
            return Err(Error::Dimension(format!(
                "shrinkage needs p >= 3 and n >= 2, got p = {}, n = {}",
                self.p, self.n
            )));
        }
        Ok(())
    }
}

/// Location-scale parameter (θ, η), η > 0 the precision.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationScale {
    pub theta: DVector<f64>,
    pub eta: f64,
}

impl LocationScale {
    pub fn new(theta: DVector<f64>, eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "precision eta must be positive and finite, got {eta}"
            )));
        }
        Ok(Self { theta, eta })
    }

    /// index of the noncentrality orbit: λ = η‖θ‖²
    pub fn lambda(&self) -> f64 {
        self.eta * self.theta.norm_squared()
    }
}

/// Observed pair (x, s) with s = ‖u‖² > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub x: DVector<f64>,
    pub s: f64,
}

impl Observation {
    pub fn new(x: DVector<f64>, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::DegenerateScale(s));
        }
        Ok(Self { x, s })
    }

    pub fn from_residuals(x: DVector<f64>, u: &DVector<f64>) -> Result<Self> {
        Self::new(x, u.norm_squared())
    }

    /// scale-free statistic W = ‖x‖² / s
    pub fn w_statistic(&self) -> f64 {
        self.x.norm_squared() / self.s
    }
}

/// W = ‖x‖²/s, the maximal invariant of the scale-rotation group.
pub fn w_statistic(obs: &Observation) -> f64 {
    obs.w_statistic()
}

const ORTHO_TOL: f64 = 1e-10;

/// Frobenius departure of gᵀg from the identity.
pub fn orthogonality_defect(g: &DMatrix<f64>) -> f64 {
    let p = g.nrows();
    let mut acc = 0.0f64;
    let gtg = g.transpose() * g;
    for i in 0..p {
        for j in 0..p {
            let target = if i == j { 1.0 } else { 0.0 };
            let d = gtg[(i, j)] - target;
            acc += d * d;
        }
    }
    acc.sqrt()
}

/// Group action (x, s) → (γ Γ x, γ² s) with γ > 0 and Γ orthogonal.
pub fn group_act(gamma: f64, rot: &DMatrix<f64>, obs: &Observation) -> Result<Observation> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "group scale gamma must be positive, got {gamma}"
        )));
    }
    let p = obs.x.len();
    if rot.nrows() != p || rot.ncols() != p {
        return Err(Error::Dimension(format!(
            "rotation must be {p}x{p}, got {}x{}",
            rot.nrows(),
            rot.ncols()
        )));
    }
    let defect = orthogonality_defect(rot);
    if !(defect <= ORTHO_TOL) {
        return Err(Error::NonOrthogonal {
            deviation: defect,
            tol: ORTHO_TOL,
        });
    }
    Observation::new(gamma * (rot * &obs.x), gamma * gamma * obs.s)
}

/// Loss η‖δ - θ‖², invariant under the group action.
pub fn scaled_quadratic_loss(eta: f64, delta: &DVector<f64>, theta: &DVector<f64>) -> Result<f64> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "precision eta must be positive, got {eta}"
        )));
    }
    if delta.len() != theta.len() {
        return Err(Error::Dimension(format!(
            "estimate has length {}, parameter has length {}",
            delta.len(),
            theta.len()
        )));
    }
    Ok(eta * (delta - theta).norm_squared())
}
