//! Adaptive Gauss-Kronrod integration on finite and half-infinite intervals.
//!
//! The kernel is the classic 15-point Kronrod extension of 7-point Gauss,
//! with the QUADPACK error rescaling. Intervals are bisected worst-first
//! until the summed error estimate meets the configured tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and resolution knobs shared by every integration routine.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// absolute tolerance on the total integral
    pub abs_tol: f64,
    /// relative tolerance on the total integral
    pub rel_tol: f64,
    /// maximum bisection depth per initial panel
    pub max_depth: u32,
    /// node count for fixed Gauss-Jacobi angular rules
    pub nodes_angular: usize,
    /// target evaluation budget per radial sweep before adaptation
    pub nodes_radial: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_depth: 40,
            nodes_angular: 64,
            nodes_radial: 128,
        }
    }
}

/// Integral value with an error bound.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

// 15-point Kronrod abscissae on [-1, 1]; odd indices are the embedded
// 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Kronrod pass over [a, b]. Returns (value, error, resabs).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand(x));
        }
        Ok(v)
    };

    let fc = eval(center)?;
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = fc.abs() * WGK[7];
    let mut fv = [0.0f64; 15];
    fv[7] = fc;

    for j in 0..7 {
        let off = half * XGK[j];
        let f1 = eval(center - off)?;
        let f2 = eval(center + off)?;
        fv[j] = f1;
        fv[14 - j] = f2;
        let fsum = f1 + f2;
        resk += WGK[j] * fsum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * fsum;
        }
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - reskh).abs() + (fv[14 - j] - reskh).abs());
    }

    let value = resk * half;
    let resabs_s = resabs * half.abs();
    let resasc_s = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc_s != 0.0 && err != 0.0 {
        err = resasc_s * (200.0 * err / resasc_s).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs_s;
    if floor > 0.0 {
        err = err.max(floor);
    }
    Ok((value, err))
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // splittable segments first, then by error
        let sa = self.depth < u32::MAX;
        let sb = other.depth < u32::MAX;
        sa.cmp(&sb).then(self.error.total_cmp(&other.error))
    }
}

const MAX_SEGMENTS: usize = 100_000;

/// Adaptive integration over explicit initial panels (finite breakpoints).
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if breaks.len() < 2 {
        return Err(Error::InvalidParameter("need at least one panel".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for win in breaks.windows(2) {
        let (a, b) = (win[0], win[1]);
        if !(b > a) {
            return Err(Error::InvalidParameter(
                "panel breakpoints must be strictly increasing".into(),
            ));
        }
        let (v, e) = qk15(&f, a, b)?;
        total += v;
        total_err += e;
        heap.push(Segment { a, b, value: v, error: e, depth: 0 });
    }

    loop {
        let tol = f64::max(cfg.abs_tol, cfg.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(QuadResult { value: total, error: total_err });
        }
        let seg = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        if seg.depth == u32::MAX {
            // largest remaining error is frozen: no further refinement possible
            heap.push(seg);
            break;
        }
        let mid = 0.5 * (seg.a + seg.b);
        let exhausted = seg.depth >= cfg.max_depth
            || heap.len() + 2 > MAX_SEGMENTS
            || !(mid > seg.a && mid < seg.b);
        if exhausted {
            heap.push(Segment { depth: u32::MAX, ..seg });
            continue;
        }
        let (v1, e1) = qk15(&f, seg.a, mid)?;
        let (v2, e2) = qk15(&f, mid, seg.b)?;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1, depth: seg.depth + 1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2, depth: seg.depth + 1 });
    }

    // recompute the residual error without incremental cancellation noise
    let total_err: f64 = heap.iter().map(|s| s.error).sum();
    if total_err <= f64::max(cfg.abs_tol, cfg.rel_tol * total.abs()) {
        return Ok(QuadResult { value: total, error: total_err });
    }
    Err(Error::QuadratureNonConvergence { estimate: total, error: total_err })
}

/// ∫_a^b f(t) dt with b = ∞ allowed.
///
/// A half-infinite range is mapped through t = a + u/(1-u), u ∈ [0, 1),
/// and integrated adaptively in u.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if !a.is_finite() {
        return Err(Error::Unsupported(
            "lower integration bound must be finite".into(),
        ));
    }
    if b.is_finite() {
        if !(b > a) {
            return Err(Error::InvalidParameter(
                "integration bounds must satisfy a < b".into(),
            ));
        }
        return integrate_panels(f, &[a, b], cfg);
    }
    let g = move |u: f64| {
        let one_minus = 1.0 - u;
        let t = a + u / one_minus;
        f(t) / (one_minus * one_minus)
    };
    integrate_panels(g, &[0.0, 1.0], cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_1d(|t| 3.0 * t * t, 0.0, 2.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, 8.0, max_relative = 1e-13);
        assert!(r.error < 1e-10);
    }

    #[test]
    fn gaussian_tail_on_half_line() {
        // ∫_0^∞ e^{-t²} dt = √π / 2
        let r = integrate_1d(|t| (-t * t).exp(), 0.0, f64::INFINITY, &cfg()).unwrap();
        assert_relative_eq!(r.value, PI.sqrt() / 2.0, max_relative = 1e-10);
    }

    #[test]
    fn shifted_half_line() {
        // ∫_2^∞ e^{-t} dt = e^{-2}
        let r = integrate_1d(|t| (-t).exp(), 2.0, f64::INFINITY, &cfg()).unwrap();
        assert_relative_eq!(r.value, (-2.0f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // ∫_0^1 ln t dt = -1, needs deep bisection near 0
        let r = integrate_1d(|t| if t > 0.0 { t.ln() } else { 0.0 }, 0.0, 1.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, -1.0, max_relative = 1e-8);
    }

    #[test]
    fn sharp_peak_is_found() {
        // ∫ e^{-(t-0.77)²/2σ²}/(σ√(2π)) dt ≈ 1 for σ = 1e-4
        let s = 1e-4;
        let r = integrate_1d(
            |t| (-((t - 0.77) * (t - 0.77)) / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt()),
            0.0,
            1.0,
            &cfg(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn error_estimate_covers_true_error() {
        let r = integrate_1d(|t| (5.0 * t).sin() / (1.0 + t * t), 0.0, 4.0, &cfg()).unwrap();
        let exact = 0.21486641223854036557; // high-precision reference
        assert!((r.value - exact).abs() <= r.error.max(1e-12));
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let e = integrate_1d(|t| 1.0 / t, -1.0, 1.0, &cfg());
        match e {
            Err(Error::NonFiniteIntegrand(_)) | Err(Error::QuadratureNonConvergence { .. }) => {}
            other => panic!("expected integration failure, got {other:?}"),
        }
    }

    #[test]
    fn divergent_integral_does_not_converge() {
        let e = integrate_1d(|t| 1.0 / (1.0 + t), 0.0, f64::INFINITY, &cfg());
        assert!(e.is_err());
    }
}
