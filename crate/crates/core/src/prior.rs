//! Priors on the noncentrality index λ = η‖θ‖², expressed through the
//! spherical density π(λ) and its radial companion π̄(λ) = c_p^{-1}
//! λ^{1-p/2} π(λ).
//!
//! Three families: exact powers λ^α, the variance-mixture family
//! π(λ; α, β, b) built from gamma kernels, and user closures. A taper
//! wrapper multiplies any base prior by h_i²(λ).

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::blyth::{h_derivative, h_value};
use crate::density::c_m;
use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::model::ProblemDim;
use crate::quad::{integrate_panels, QuadConfig};

type PriorFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Prior specification with an overall scale (used to normalize proper
/// priors; the shrinkage factor ψ_π is scale-free).
#[derive(Clone)]
pub struct PriorSpec {
    pub kind: PriorKind,
    pub scale: f64,
}

#[derive(Clone)]
pub enum PriorKind {
    /// π(λ) = λ^α
    Power { alpha: f64 },
    /// gamma-kernel mixture with mixing weight (ξ-b)^α (1+ξ)^β on (b, ∞)
    Strawderman { alpha: f64, beta: f64, b: f64 },
    /// base prior multiplied by h_i²
    Tapered { base: Box<PriorSpec>, i: u32 },
    Custom {
        label: String,
        pi: PriorFn,
        dpi: Option<PriorFn>,
    },
}

impl fmt::Debug for PriorSpec {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PriorKind::Power { alpha } => write!(fm, "Power {{ alpha: {alpha} }}")?,
            PriorKind::Strawderman { alpha, beta, b } => {
                write!(fm, "Strawderman {{ alpha: {alpha}, beta: {beta}, b: {b} }}")?
            }
            PriorKind::Tapered { base, i } => write!(fm, "Tapered {{ base: {base:?}, i: {i} }}")?,
            PriorKind::Custom { label, .. } => write!(fm, "Custom {{ label: {label:?} }}")?,
        }
        if self.scale != 1.0 {
            write!(fm, " * {:.6e}", self.scale)?;
        }
        Ok(())
    }
}

impl PriorSpec {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power prior exponent must exceed -1, got {alpha}"
            )));
        }
        Ok(Self { kind: PriorKind::Power { alpha }, scale: 1.0 })
    }

    pub fn strawderman(alpha: f64, beta: f64, b: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mixing exponent alpha must exceed -1, got {alpha}"
            )));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParameter("beta must be finite".into()));
        }
        if !(b >= 0.0) || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mixing support edge b must be nonnegative, got {b}"
            )));
        }
        Ok(Self {
            kind: PriorKind::Strawderman { alpha, beta, b },
            scale: 1.0,
        })
    }

    pub fn custom<F>(label: &str, pi: F, dpi: Option<PriorFn>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: PriorKind::Custom {
                label: label.to_string(),
                pi: Arc::new(pi),
                dpi,
            },
            scale: 1.0,
        }
    }

    /// Multiply by h_i², producing the i-th element of the taper ladder.
    pub fn tapered(self, i: u32) -> Result<Self> {
        if i == 0 {
            return Err(Error::InvalidParameter("taper index must be >= 1".into()));
        }
        let scale = self.scale;
        Ok(Self {
            kind: PriorKind::Tapered {
                base: Box::new(Self { scale: 1.0, ..self }),
                i,
            },
            scale,
        })
    }

    /// Mixture convergence needs α + β < p/2 - 1 at the upper end.
    fn check_dims(&self, dims: ProblemDim) -> Result<()> {
        match &self.kind {
            PriorKind::Strawderman { alpha, beta, .. } => {
                if alpha + beta >= 0.5 * dims.p as f64 - 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "mixing weight diverges: alpha + beta = {} must stay below p/2 - 1 = {}",
                        alpha + beta,
                        0.5 * dims.p as f64 - 1.0
                    )));
                }
                Ok(())
            }
            PriorKind::Tapered { base, .. } => base.check_dims(dims),
            _ => Ok(()),
        }
    }

    /// π(λ), including the overall scale.
    pub fn density(&self, dims: ProblemDim, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "prior argument must be nonnegative and finite, got {lambda}"
            )));
        }
        self.check_dims(dims)?;
        let v = match &self.kind {
            PriorKind::Power { alpha } => lambda.powf(*alpha),
            PriorKind::Strawderman { alpha, beta, b } => {
                let p = dims.p as f64;
                c_m(dims.p)
                    * lambda.powf(0.5 * p - 1.0)
                    * strawderman_pibar(dims.p, *alpha, *beta, *b, lambda, cfg)?
            }
            PriorKind::Tapered { base, i } => {
                let h = h_value(*i, lambda)?;
                base.density(dims, lambda, cfg)? * h * h
            }
            PriorKind::Custom { pi, .. } => pi(lambda),
        };
        Ok(self.scale * v)
    }

    /// π'(λ), exact for every kind (central differences only for custom
    /// priors without a supplied derivative).
    pub fn density_derivative(&self, dims: ProblemDim, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
        self.check_dims(dims)?;
        let v = match &self.kind {
            PriorKind::Power { alpha } => alpha * lambda.powf(alpha - 1.0),
            PriorKind::Strawderman { alpha, beta, b } => {
                let p = dims.p as f64;
                let pibar = strawderman_pibar(dims.p, *alpha, *beta, *b, lambda, cfg)?;
                let dpibar = strawderman_pibar_deriv(dims.p, *alpha, *beta, *b, lambda, cfg)?;
                c_m(dims.p)
                    * ((0.5 * p - 1.0) * lambda.powf(0.5 * p - 2.0) * pibar
                        + lambda.powf(0.5 * p - 1.0) * dpibar)
            }
            PriorKind::Tapered { base, i } => {
                let h = h_value(*i, lambda)?;
                let dh = h_derivative(*i, lambda)?;
                base.density_derivative(dims, lambda, cfg)? * h * h
                    + 2.0 * base.density(dims, lambda, cfg)? * h * dh
            }
            PriorKind::Custom { pi, dpi, .. } => match dpi {
                Some(d) => d(lambda),
                None => {
                    let h = 1e-5 * lambda.max(1e-5);
                    (pi(lambda + h) - pi((lambda - h).max(0.0))) / (lambda + h - (lambda - h).max(0.0))
                }
            },
        };
        Ok(self.scale * v)
    }

    /// κ(λ) = λ π'(λ) / π(λ), the local log-log slope. Scale-free.
    pub fn kappa(&self, dims: ProblemDim, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
        match &self.kind {
            PriorKind::Power { alpha } => Ok(*alpha),
            PriorKind::Strawderman { alpha, beta, b } => {
                self.check_dims(dims)?;
                // κ = (p/2 - 1) + λ π̄'/π̄ avoids the power prefactor
                let p = dims.p as f64;
                let pibar = strawderman_pibar(dims.p, *alpha, *beta, *b, lambda, cfg)?;
                let dpibar = strawderman_pibar_deriv(dims.p, *alpha, *beta, *b, lambda, cfg)?;
                if !(pibar > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "mixture vanished at lambda = {lambda}"
                    )));
                }
                Ok(0.5 * p - 1.0 + lambda * dpibar / pibar)
            }
            PriorKind::Tapered { base, i } => {
                let h = h_value(*i, lambda)?;
                let dh = h_derivative(*i, lambda)?;
                Ok(base.kappa(dims, lambda, cfg)? + 2.0 * lambda * dh / h)
            }
            PriorKind::Custom { .. } => {
                let pi = self.density(dims, lambda, cfg)?;
                if !(pi > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "prior vanishes at lambda = {lambda}; kappa undefined"
                    )));
                }
                Ok(lambda * self.density_derivative(dims, lambda, cfg)? / pi)
            }
        }
    }

    /// π̄(λ) = c_p^{-1} λ^{1-p/2} π(λ); for the mixture family this is
    /// the gamma-kernel integral itself.
    pub fn pi_bar(&self, dims: ProblemDim, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pi_bar needs lambda > 0, got {lambda}"
            )));
        }
        self.check_dims(dims)?;
        let p = dims.p as f64;
        match &self.kind {
            PriorKind::Strawderman { alpha, beta, b } => {
                Ok(self.scale * strawderman_pibar(dims.p, *alpha, *beta, *b, lambda, cfg)?)
            }
            PriorKind::Tapered { base, i } => {
                let h = h_value(*i, lambda)?;
                Ok(self.scale * base.pi_bar(dims, lambda, cfg)? * h * h)
            }
            _ => Ok(self.density(dims, lambda, cfg)? * lambda.powf(1.0 - 0.5 * p) / c_m(dims.p)),
        }
    }

    /// ∫ π(λ) dλ; +∞ when improper. Exact reduction to the mixing weight
    /// for the mixture family.
    pub fn lambda_integral(&self, dims: ProblemDim, cfg: &QuadConfig) -> Result<f64> {
        self.check_dims(dims)?;
        match &self.kind {
            PriorKind::Power { .. } => Ok(f64::INFINITY),
            PriorKind::Strawderman { alpha, beta, b } => {
                if alpha + beta >= -1.0 {
                    return Ok(f64::INFINITY);
                }
                Ok(self.scale * mixing_weight_mass(*alpha, *beta, *b, cfg)?)
            }
            _ => {
                // generic route: quadrature of π itself
                let r = crate::quad::integrate_1d(
                    |l| self.density(dims, l, cfg).unwrap_or(f64::NAN),
                    0.0,
                    f64::INFINITY,
                    cfg,
                );
                match r {
                    Ok(v) => Ok(v.value),
                    Err(Error::QuadratureNonConvergence { .. }) => Ok(f64::INFINITY),
                    Err(e) => Err(e),
                }
            }
        }
    }

    /// Rescale a proper prior so that ∫ π = 1.
    pub fn normalized(&self, dims: ProblemDim, cfg: &QuadConfig) -> Result<Self> {
        let mass = self.lambda_integral(dims, cfg)?;
        if !mass.is_finite() || !(mass > 0.0) {
            return Err(Error::InvalidParameter(
                "prior is improper; it cannot be normalized".into(),
            ));
        }
        Ok(Self {
            kind: self.kind.clone(),
            scale: self.scale / mass,
        })
    }

    /// Finite-difference smoothness probe of π on interior points.
    pub(crate) fn smoothness_probe(&self, dims: ProblemDim, cfg: &QuadConfig) -> bool {
        match &self.kind {
            PriorKind::Power { .. } | PriorKind::Strawderman { .. } => true,
            PriorKind::Tapered { base, .. } => base.smoothness_probe(dims, cfg),
            PriorKind::Custom { .. } => {
                for &l in &[0.5f64, 2.0, 11.0, 97.0] {
                    let d = match self.density_derivative(dims, l, cfg) {
                        Ok(d) => d,
                        Err(_) => return false,
                    };
                    if !d.is_finite() {
                        return false;
                    }
                    // derivative must be stable under halving the step
                    let h = 1e-4 * l;
                    let fd = |hh: f64| -> Option<f64> {
                        let a = self.density(dims, l - hh, cfg).ok()?;
                        let b = self.density(dims, l + hh, cfg).ok()?;
                        Some((b - a) / (2.0 * hh))
                    };
                    match (fd(h), fd(0.5 * h)) {
                        (Some(d1), Some(d2)) => {
                            let denom = d1.abs().max(d2.abs()).max(1e-12);
                            if ((d1 - d2) / denom).abs() > 1e-2 {
                                return false;
                            }
                        }
                        _ => return false,
                    }
                }
                true
            }
        }
    }

    /// stable identifier used in outputs
    pub fn id(&self) -> String {
        match &self.kind {
            PriorKind::Power { alpha } => format!("power:{alpha}"),
            PriorKind::Strawderman { alpha, beta, b } => {
                format!("strawderman:{alpha},{beta},{b}")
            }
            PriorKind::Tapered { base, i } => format!("{}*h{}^2", base.id(), i),
            PriorKind::Custom { label, .. } => format!("custom:{label}"),
        }
    }
}

/// π̄ for the mixture family:
/// ∫_b^∞ (2πξ)^{-p/2} e^{-λ/(2ξ)} (ξ-b)^α (1+ξ)^β dξ.
///
/// Split at ξ = b + 1; the (ξ-b)^α endpoint power is flattened exactly
/// by τ = σ^{1/(1+α)}, the tail is mapped with a scale following the
/// integrand peak ξ* ≈ λ/p.
fn strawderman_pibar(
    p: usize,
    alpha: f64,
    beta: f64,
    b: f64,
    lambda: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    strawderman_mixture(p, alpha, beta, b, lambda, cfg, false)
}

/// d/dλ of the mixture: the same integral with an extra -1/(2ξ) factor.
fn strawderman_pibar_deriv(
    p: usize,
    alpha: f64,
    beta: f64,
    b: f64,
    lambda: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    Ok(-strawderman_mixture(p, alpha, beta, b, lambda, cfg, true)?)
}

fn strawderman_mixture(
    p: usize,
    alpha: f64,
    beta: f64,
    b: f64,
    lambda: f64,
    cfg: &QuadConfig,
    with_inverse_xi: bool,
) -> Result<f64> {
    let pf = p as f64;
    let g = |tau: f64| -> f64 {
        let xi = b + tau;
        let mut v = (-0.5 * pf * (2.0 * std::f64::consts::PI * xi).ln() - 0.5 * lambda / xi).exp()
            * (1.0 + xi).powf(beta);
        if with_inverse_xi {
            v *= 0.5 / xi;
        }
        v
    };
    // near edge: tau in (0, 1], flattened
    let inv = 1.0 / (1.0 + alpha);
    let near = integrate_panels(|s: f64| g(s.powf(inv)) * inv, &[0.0, 1.0], cfg)?;
    // tail: tau in [1, ∞), mapped with the peak scale
    let s2 = (lambda / pf).max(1.0);
    let tail = integrate_panels(
        |u: f64| {
            let om = 1.0 - u;
            let tau = 1.0 + s2 * u / om;
            g(tau) * tau.powf(alpha) * s2 / (om * om)
        },
        &[0.0, 1.0],
        cfg,
    )?;
    Ok(near.value + tail.value)
}

/// ∫_0^∞ τ^α (1+b+τ)^β dτ, the total prior mass (each gamma kernel in
/// λ integrates to one).
fn mixing_weight_mass(alpha: f64, beta: f64, b: f64, cfg: &QuadConfig) -> Result<f64> {
    let inv = 1.0 / (1.0 + alpha);
    let near = integrate_panels(
        |s: f64| (1.0 + b + s.powf(inv)).powf(beta) * inv,
        &[0.0, 1.0],
        cfg,
    )?;
    let tail = integrate_panels(
        |u: f64| {
            let om = 1.0 - u;
            let tau = 1.0 + u / om;
            tau.powf(alpha) * (1.0 + b + tau).powf(beta) / (om * om)
        },
        &[0.0, 1.0],
        cfg,
    )?;
    Ok(near.value + tail.value)
}

/// Sampler for a proper mixture prior: ξ from the normalized mixing
/// weight by inverse CDF, then λ | ξ ~ Gamma(p/2, scale 2ξ).
pub struct PriorSampler {
    inverse_cdf: Pchip,
    total_mass: f64,
    gamma: Gamma<f64>,
    b: f64,
}

impl fmt::Debug for PriorSampler {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "PriorSampler {{ total_mass: {:.6e} }}", self.total_mass)
    }
}

impl PriorSampler {
    pub fn new(prior: &PriorSpec, dims: ProblemDim, cfg: &QuadConfig) -> Result<Self> {
        let (alpha, beta, b) = match prior.kind {
            PriorKind::Strawderman { alpha, beta, b } => (alpha, beta, b),
            _ => {
                return Err(Error::Unsupported(
                    "prior sampling is provided for the proper mixture family only".into(),
                ))
            }
        };
        if alpha + beta >= -1.0 {
            return Err(Error::InvalidParameter(
                "improper prior: alpha + beta must be below -1 to sample".into(),
            ));
        }
        // cumulative mass of m(tau) = tau^alpha (1+b+tau)^beta over a grid
        // that is linear in the flattened coordinate near 0, log-spaced after
        let mut taus: Vec<f64> = Vec::new();
        let inv = 1.0 / (1.0 + alpha);
        for k in 0..=40 {
            taus.push((k as f64 / 40.0).powf(inv));
        }
        let mut t = 1.0f64;
        while t < 1e15 {
            t *= 1.2589254117941673; // 10^{0.1}
            taus.push(t);
        }
        let m = |tau: f64| tau.powf(alpha) * (1.0 + b + tau).powf(beta);
        let mut cdf = Vec::with_capacity(taus.len());
        cdf.push(0.0);
        let mut acc = 0.0;
        for win in taus.windows(2) {
            let (lo, hi) = (win[0], win[1]);
            let seg = if lo == 0.0 {
                // flattened segment: ∫ tau^alpha ... = ∫ m(s^inv) inv ds
                integrate_panels(|s: f64| m(s.powf(inv)) * s.powf(inv * alpha).recip() * 0.0 + m(s.powf(inv)) * inv / s.powf(alpha * inv) * s.powf(alpha * inv), &[0.0f64.max(lo.powf(1.0 + alpha)), hi.powf(1.0 + alpha)], cfg)?
            } else {
                integrate_panels(m, &[lo, hi], cfg)?
            };
            acc += seg.value;
            cdf.push(acc);
        }
        let total = acc;
        // strictly increasing knots for the inverse map
        let mut xs = Vec::with_capacity(cdf.len());
        let mut ys = Vec::with_capacity(cdf.len());
        let mut last = -1.0f64;
        for (c, tau) in cdf.iter().zip(&taus) {
            if *c > last {
                xs.push(*c);
                ys.push(*tau);
                last = *c;
            }
        }
        let inverse_cdf = Pchip::new(xs, ys, false)?;
        let gamma = Gamma::new(0.5 * dims.p as f64, 2.0)
            .map_err(|e| Error::InvalidParameter(format!("gamma setup failed: {e}")))?;
        Ok(Self {
            inverse_cdf,
            total_mass: total,
            gamma,
            b,
        })
    }

    /// total mixing mass, which equals ∫ π when the scale is one
    pub fn mass(&self) -> f64 {
        self.total_mass
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random::<f64>() * self.total_mass;
        let tau = self.inverse_cdf.eval(u).max(0.0);
        let xi = self.b + tau;
        // Gamma(p/2, scale 2): multiply by xi for scale 2 xi
        xi * self.gamma.sample(rng)
    }
}
