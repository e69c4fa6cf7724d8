//! Gauss-Jacobi rules for weights (1-x)^a (1+x)^b on [-1, 1], built by
//! Golub-Welsch from the symmetric recurrence matrix. Rules are cached
//! per (n, a, b) since eigendecomposition dominates the cost.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::func::ln_beta;
use crate::quad::adaptive::{integrate_panels, QuadConfig, QuadResult};

/// Nodes and weights of an n-point Gauss-Jacobi rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussJacobi {
    pub alpha: f64,
    pub beta: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussJacobi {
    /// Σ w_i g(x_i), approximating ∫_{-1}^1 (1-x)^α (1+x)^β g(x) dx.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }
}

fn rule_key(n: usize, a: f64, b: f64) -> (usize, u64, u64) {
    (n, a.to_bits(), b.to_bits())
}

fn cache() -> &'static Mutex<HashMap<(usize, u64, u64), Arc<GaussJacobi>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64, u64), Arc<GaussJacobi>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// n-point rule for weight (1-x)^alpha (1+x)^beta; alpha, beta > -1.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Arc<GaussJacobi>> {
    if n == 0 || n > 512 {
        return Err(Error::InvalidParameter(format!(
            "Gauss-Jacobi rule size {n} out of range 1..=512"
        )));
    }
    if !(alpha > -1.0) || !(beta > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "Jacobi weight exponents must exceed -1, got ({alpha}, {beta})"
        )));
    }
    let key = rule_key(n, alpha, beta);
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return Ok(rule.clone());
    }

    let rule = Arc::new(build_rule(n, alpha, beta));
    cache().lock().unwrap().insert(key, rule.clone());
    Ok(rule)
}

fn build_rule(n: usize, a: f64, b: f64) -> GaussJacobi {
    // recurrence coefficients of the monic Jacobi polynomials
    let ab = a + b;
    // mu0 = ∫ (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_beta(a + 1.0, b + 1.0)).exp();

    let mut diag = vec![0.0f64; n];
    let mut off = vec![0.0f64; n.saturating_sub(1)];
    for (k, d) in diag.iter_mut().enumerate() {
        let kf = k as f64;
        *d = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
    }
    for (k, o) in off.iter_mut().enumerate() {
        // o holds sqrt(beta_{k+1})
        let kf = (k + 1) as f64;
        let beta_k = if k == 0 {
            4.0 * (a + 1.0) * (b + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab)
                / ((2.0 * kf + ab) * (2.0 * kf + ab) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0))
        };
        *o = beta_k.sqrt();
    }

    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    let eig = m.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let x = eig.eigenvalues[j];
            let v0 = eig.eigenvectors[(0, j)];
            (x, mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));

    GaussJacobi {
        alpha: a,
        beta: b,
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// ∫_0^1 g(t) (1-t)^alpha dt by an n-point Gauss-Jacobi rule.
///
/// The error field is estimated from the difference against a rule of
/// roughly half the size.
pub fn integrate_beta_weighted<F: Fn(f64) -> f64>(
    g: F,
    alpha: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    integrate_jacobi01(g, alpha, 0.0, cfg)
}

/// ∫_0^1 t^beta0 (1-t)^alpha1 g(t) dt with g smooth; both exponents > -1.
///
/// Mapping t = (1+x)/2 turns this into the Jacobi weight (1-x)^alpha1
/// (1+x)^beta0 up to the constant 2^{-alpha1-beta0-1}.
pub fn integrate_jacobi01<F: Fn(f64) -> f64>(
    g: F,
    alpha1: f64,
    beta0: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let n = cfg.nodes_angular.max(8);
    let scale = (-(alpha1 + beta0 + 1.0) * std::f64::consts::LN_2).exp();
    let full = gauss_jacobi(n, alpha1, beta0)?;
    let half = gauss_jacobi(n / 2 + 1, alpha1, beta0)?;
    let eval = |rule: &GaussJacobi| -> Result<f64> {
        let mut acc = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t = 0.5 * (1.0 + x);
            let v = g(t);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand(t));
            }
            acc += w * v;
        }
        Ok(scale * acc)
    };
    let v_full = eval(&full)?;
    let v_half = eval(&half)?;
    Ok(QuadResult {
        value: v_full,
        error: (v_full - v_half).abs().max(f64::EPSILON * v_full.abs()),
    })
}

/// Adaptive route for ∫_0^1 g(t) (1-t)^alpha dt: substituting
/// u = (1-t)^{1+alpha} flattens the endpoint weight exactly.
pub fn integrate_beta_weighted_adaptive<F: Fn(f64) -> f64>(
    g: F,
    alpha: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(alpha > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta-weight exponent must exceed -1, got {alpha}"
        )));
    }
    let inv = 1.0 / (1.0 + alpha);
    let h = move |u: f64| g(1.0 - u.powf(inv)) * inv;
    integrate_panels(h, &[0.0, 0.5, 1.0], cfg)
}

/// Adaptive route for ∫_0^1 t^beta0 (1-t)^alpha1 g(t) dt. Split at 1/2;
/// each endpoint power is removed by its own substitution.
pub fn integrate_jacobi01_adaptive<F: Fn(f64) -> f64>(
    g: F,
    alpha1: f64,
    beta0: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(alpha1 > -1.0) || !(beta0 > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "Jacobi weight exponents must exceed -1, got ({alpha1}, {beta0})"
        )));
    }
    // left half: t = sigma^{1/(1+beta0)}, sigma in [0, (1/2)^{1+beta0}]
    let ib = 1.0 / (1.0 + beta0);
    let left_hi = 0.5f64.powf(1.0 + beta0);
    let gl = &g;
    let left = integrate_panels(
        move |s: f64| {
            let t = s.powf(ib);
            gl(t) * (1.0 - t).powf(alpha1) * ib
        },
        &[0.0, left_hi],
        cfg,
    )?;
    // right half: 1 - t = u^{1/(1+alpha1)}, u in [0, (1/2)^{1+alpha1}]
    let ia = 1.0 / (1.0 + alpha1);
    let right_hi = 0.5f64.powf(1.0 + alpha1);
    let gr = &g;
    let right = integrate_panels(
        move |u: f64| {
            let t = 1.0 - u.powf(ia);
            gr(t) * t.powf(beta0) * ia
        },
        &[0.0, right_hi],
        cfg,
    )?;
    Ok(QuadResult {
        value: left.value + right.value,
        error: left.error + right.error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn legendre_special_case() {
        // alpha = beta = 0 reduces to Gauss-Legendre: ∫_{-1}^1 x² dx = 2/3
        let r = gauss_jacobi(16, 0.0, 0.0).unwrap();
        assert_relative_eq!(r.integrate(|x| x * x), 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(r.weights.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn chebyshev_special_case() {
        // alpha = beta = -1/2: ∫ (1-x²)^{-1/2} dx = π
        let r = gauss_jacobi(12, -0.5, -0.5).unwrap();
        assert_relative_eq!(
            r.weights.iter().sum::<f64>(),
            std::f64::consts::PI,
            max_relative = 1e-13
        );
    }

    #[test]
    fn constant_against_square_root_weight() {
        // ∫_0^1 (1-t)^{-1/2} dt = 2
        let r = integrate_beta_weighted(|_| 1.0, -0.5, &cfg()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn linear_against_square_root_weight() {
        // ∫_0^1 t (1-t)^{-1/2} dt = B(2, 1/2) = 4/3
        let r = integrate_beta_weighted(|t| t, -0.5, &cfg()).unwrap();
        assert_relative_eq!(r.value, 4.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn smooth_integrand_reference() {
        // ∫_0^1 cos(t) (1-t)^{0.3} dt, high-precision reference
        let r = integrate_beta_weighted(|t| t.cos(), 0.3, &cfg()).unwrap();
        assert_relative_eq!(r.value, 0.67223442309166930296, max_relative = 1e-13);
    }

    #[test]
    fn both_routes_agree() {
        for &alpha in &[-0.5, -0.2, 0.0, 0.3, 1.7] {
            let a = integrate_beta_weighted(|t| (t * 1.3).cos() + t * t, alpha, &cfg()).unwrap();
            let b =
                integrate_beta_weighted_adaptive(|t| (t * 1.3).cos() + t * t, alpha, &cfg()).unwrap();
            assert_relative_eq!(a.value, b.value, max_relative = 1e-9);
        }
    }

    #[test]
    fn two_sided_weight_reference() {
        // ∫_0^1 cos(t) t^{-1/2} (1-t)^{0.3} dt, high-precision reference
        let a = integrate_jacobi01(|t| t.cos(), 0.3, -0.5, &cfg()).unwrap();
        assert_relative_eq!(a.value, 1.5858142000099028916, max_relative = 1e-12);
        let b = integrate_jacobi01_adaptive(|t| t.cos(), 0.3, -0.5, &cfg()).unwrap();
        assert_relative_eq!(a.value, b.value, max_relative = 1e-9);
    }

    #[test]
    fn beta_function_identity() {
        // ∫_0^1 t^{b-1} (1-t)^{a-1} dt = B(b, a) for several pairs
        for &(a, b) in &[(0.7, 1.9), (2.5, 0.4), (1.0, 1.0)] {
            let r = integrate_jacobi01(|_| 1.0, a - 1.0, b - 1.0, &cfg()).unwrap();
            assert_relative_eq!(r.value, crate::func::beta(b, a), max_relative = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(integrate_beta_weighted(|_| 1.0, -1.0, &cfg()).is_err());
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
    }
}
