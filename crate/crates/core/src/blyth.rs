//! The slow taper sequence h_i and diagnostics built around it: prior
//! assumption reports and the pointwise convergence of tapered-prior
//! shrinkage factors.

use serde::Serialize;

use crate::density::RadialDensity;
use crate::error::{Error, Result};
use crate::model::ProblemDim;
use crate::prior::PriorSpec;
use crate::quad::{PosteriorKernel, QuadConfig};

const E: f64 = std::f64::consts::E;

/// h_i(λ) = 1 - loglog(λ+e) / loglog(λ+e+i); h_i(0) = 1 - 0 = 1 is
/// approached smoothly, and h_i → 1 pointwise as i → ∞.
pub fn h_value(i: u32, lambda: f64) -> Result<f64> {
    check_h_args(i, lambda)?;
    let num = (lambda + E).ln().ln();
    let den = (lambda + E + i as f64).ln().ln();
    Ok(1.0 - num / den)
}

/// Exact derivative of h_i in λ:
/// h_i'(λ) = -1/((λ+e) log(λ+e) loglog(λ+e+i))
///           + loglog(λ+e) / ((λ+e+i) log(λ+e+i) loglog²(λ+e+i)).
pub fn h_derivative(i: u32, lambda: f64) -> Result<f64> {
    check_h_args(i, lambda)?;
    let u = lambda + E;
    let v = lambda + E + i as f64;
    let llu = u.ln().ln();
    let llv = v.ln().ln();
    Ok(-1.0 / (u * u.ln() * llv) + llu / (v * v.ln() * llv * llv))
}

fn check_h_args(i: u32, lambda: f64) -> Result<()> {
    if i == 0 {
        return Err(Error::InvalidParameter("taper index must be >= 1".into()));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "taper argument must be a finite nonnegative value, got {lambda}"
        )));
    }
    Ok(())
}

/// π(λ; α, β, b) = c_p λ^{p/2-1} ∫_b^∞ (2πξ)^{-p/2} e^{-λ/(2ξ)}
/// (ξ-b)^α (1+ξ)^β dξ.
pub fn strawderman_prior_value(
    dims: ProblemDim,
    alpha: f64,
    beta: f64,
    b: f64,
    lambda: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    PriorSpec::strawderman(alpha, beta, b)?.density(dims, lambda, cfg)
}

/// Classification of the κ tail against the admissibility conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailClass {
    /// κ(λ) → κ* ∈ [-1, 0)
    NegativeLimit,
    /// κ → 0 from below, monotone on the probed tail
    ZeroFromBelow,
    /// κ → 0 with limsup (log λ)|κ| < 1
    ZeroLogBounded,
    Unsatisfied,
}

/// Evidence gathered for the regularity and tail conditions of a prior.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    /// finite-difference smoothness probe (exact for built-ins)
    pub differentiable: bool,
    /// log-log slope of π near 0, the local power exponent
    pub alpha_hat: f64,
    /// slope exceeds -1/2, so π behaves no worse than λ^{-1/2} at 0
    pub near_zero_ok: bool,
    /// κ(λ) over λ = 10^k, k = 2..8
    pub kappa_grid: Vec<(f64, f64)>,
    pub tail_class: TailClass,
    pub tail_ok: bool,
}

/// Probe κ(λ) = λ π'(λ)/π(λ) on the decade grid and classify the tail.
pub fn assumption_report(
    prior: &PriorSpec,
    dims: ProblemDim,
    cfg: &QuadConfig,
) -> Result<AssumptionReport> {
    // differentiability probe near a generic interior point
    let differentiable = prior.smoothness_probe(dims, cfg);

    // local exponent at 0 from the slope of log π between 1e-6 and 1e-4
    let lo = prior.density(dims, 1e-6, cfg)?;
    let hi = prior.density(dims, 1e-4, cfg)?;
    let alpha_hat = if lo > 0.0 && hi > 0.0 {
        (hi.ln() - lo.ln()) / (1e-4f64.ln() - 1e-6f64.ln())
    } else {
        f64::NAN
    };
    let near_zero_ok = alpha_hat.is_finite() && alpha_hat > -0.5;

    let mut kappa_grid = Vec::with_capacity(7);
    for k in 2..=8 {
        let lambda = 10f64.powi(k);
        kappa_grid.push((lambda, prior.kappa(dims, lambda, cfg)?));
    }

    let tail_class = classify_tail(&kappa_grid);
    Ok(AssumptionReport {
        differentiable,
        alpha_hat,
        near_zero_ok,
        kappa_grid,
        tail_class,
        tail_ok: tail_class != TailClass::Unsatisfied,
    })
}

fn classify_tail(grid: &[(f64, f64)]) -> TailClass {
    let tail: Vec<(f64, f64)> = grid.iter().copied().filter(|(l, _)| *l >= 1e5).collect();
    if tail.iter().any(|(_, k)| !k.is_finite()) {
        return TailClass::Unsatisfied;
    }
    let (_, k_end) = *tail.last().unwrap();
    let flat = tail
        .iter()
        .all(|(_, k)| (k - k_end).abs() <= 0.1 * k_end.abs() + 0.01);
    if (-1.02..=-0.02).contains(&k_end) && flat {
        return TailClass::NegativeLimit;
    }
    let below = tail.iter().all(|(_, k)| *k <= 1e-9)
        && tail.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-9);
    if below {
        return TailClass::ZeroFromBelow;
    }
    let log_bound = tail
        .iter()
        .filter(|(l, _)| *l >= 1e7)
        .map(|(l, k)| l.ln() * k.abs())
        .fold(f64::NEG_INFINITY, f64::max);
    if log_bound < 0.98 {
        return TailClass::ZeroLogBounded;
    }
    TailClass::Unsatisfied
}

/// Deviations |ψ_{π_i}(w) - ψ_π(w)| for a ladder of taper indices.
#[derive(Debug, Clone, Serialize)]
pub struct PsiConvergence {
    pub w_grid: Vec<f64>,
    pub psi_base: Vec<f64>,
    /// one row per taper index: (i, deviations over w_grid)
    pub rows: Vec<(u32, Vec<f64>)>,
    /// quadrature error budget for comparing deviations
    pub noise: f64,
}

/// Build ψ_π and ψ_{π_i} for i in `indices` and report the pointwise
/// deviations, which should shrink as the taper weakens.
pub fn psi_convergence_diagnostic(
    prior: &PriorSpec,
    density: &RadialDensity,
    dims: ProblemDim,
    w_grid: &[f64],
    indices: &[u32],
    cfg: &QuadConfig,
) -> Result<PsiConvergence> {
    if w_grid.is_empty() || indices.is_empty() {
        return Err(Error::InvalidParameter(
            "need at least one w point and one taper index".into(),
        ));
    }
    let w_max = w_grid.iter().copied().fold(0.0f64, f64::max);
    let base = PosteriorKernel::new(dims, density, prior, cfg, w_max)?;
    let mut psi_base = Vec::with_capacity(w_grid.len());
    let mut noise = 0.0f64;
    for &w in w_grid {
        let r = base.integrals(w)?;
        psi_base.push(base.psi_from(&r, w));
        noise = noise.max(r.achieved_error);
    }
    let mut rows = Vec::with_capacity(indices.len());
    for &i in indices {
        let tapered = prior.clone().tapered(i)?;
        let kern = PosteriorKernel::new(dims, density, &tapered, cfg, w_max)?;
        let mut devs = Vec::with_capacity(w_grid.len());
        for (j, &w) in w_grid.iter().enumerate() {
            let r = kern.integrals(w)?;
            noise = noise.max(r.achieved_error);
            devs.push((kern.psi_from(&r, w) - psi_base[j]).abs());
        }
        rows.push((i, devs));
    }
    Ok(PsiConvergence {
        w_grid: w_grid.to_vec(),
        psi_base,
        rows,
        noise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn h_reference_value() {
        // h_1(1) at 30 digits; in particular h_1(1) > 1/8
        assert_relative_eq!(h_value(1, 1.0).unwrap(), 0.37950315670861801716, max_relative = 1e-13);
        assert!(h_value(1, 1.0).unwrap() > 0.125);
    }

    #[test]
    fn h_limits_and_monotonicity() {
        // decreasing in lambda, increasing in i, values in [0, 1]
        let lambdas = [0.0, 0.5, 1.0, 10.0, 1e3, 1e6];
        for i in [1u32, 10, 100] {
            let mut prev = f64::INFINITY;
            for &l in &lambdas {
                let h = h_value(i, l).unwrap();
                assert!((0.0..=1.0).contains(&h));
                assert!(h <= prev + 1e-15);
                prev = h;
            }
        }
        for &l in &lambdas {
            let mut prev = -1.0;
            for i in [1u32, 10, 100, 1000, 100_000] {
                let h = h_value(i, l).unwrap();
                assert!(h >= prev - 1e-15);
                prev = h;
            }
        }
        // pointwise approach to 1 in i
        assert!(h_value(1_000_000_000, 5.0).unwrap() > 0.6);
    }

    #[test]
    fn h_derivative_matches_finite_differences() {
        for i in [1u32, 10, 1000] {
            for &l in &[0.0, 0.3, 2.0, 50.0, 1e4] {
                let d = h_derivative(i, l).unwrap();
                let eps = 1e-6 * (l + 1.0);
                let lo = h_value(i, (l - eps).max(0.0)).unwrap();
                let hi = h_value(i, l + eps).unwrap();
                let fd = (hi - lo) / (l + eps - (l - eps).max(0.0));
                assert_relative_eq!(d, fd, max_relative = 1e-6, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn h_derivative_bounds() {
        // |h_i'| is controlled by 2/((λ+e) log(λ+e) loglog(λ+e+1)) and
        // stays below e + 2 everywhere
        for i in [1u32, 7, 100, 10_000] {
            for &l in &[0.0, 0.1, 1.0, 10.0, 1e3, 1e7] {
                let d = h_derivative(i, l).unwrap().abs();
                let u = l + E;
                let bound = 2.0 / (u * u.ln() * (l + E + 1.0).ln().ln());
                assert!(d <= bound * (1.0 + 1e-12), "i={i} l={l}: {d} > {bound}");
                assert!(d < E + 2.0);
            }
        }
    }

    #[test]
    fn h_rejects_bad_arguments() {
        assert!(h_value(0, 1.0).is_err());
        assert!(h_value(1, -0.5).is_err());
        assert!(h_derivative(1, f64::NAN).is_err());
    }
}
