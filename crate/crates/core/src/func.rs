//! Small special-function helpers shared by the quadrature and density code.

pub use statrs::function::gamma::ln_gamma;

/// Natural log of the Beta function B(a, b). Requires a > 0, b > 0.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta(a: f64, b: f64) -> f64 {
    ln_beta(a, b).exp()
}

/// Survival function of the Kolmogorov distribution,
/// Q(t) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2 k² t²).
///
/// Used for the asymptotic Kolmogorov-Smirnov p-value Q(√n · D_n).
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * t * t).exp();
        sum += sign * term;
        if term < 1e-18 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Neumaier compensated summation. Deterministic for a fixed input order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn beta_matches_known_values() {
        assert_relative_eq!(beta(1.0, 1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(beta(2.0, 0.5), 4.0 / 3.0, max_relative = 1e-13);
        // B(1/2, 1/2) = π
        assert_relative_eq!(beta(0.5, 0.5), std::f64::consts::PI, max_relative = 1e-13);
    }

    #[test]
    fn kolmogorov_sf_reference_values() {
        // reference: 40-digit series evaluation
        assert_relative_eq!(kolmogorov_sf(0.5), 0.96394524366487509439, max_relative = 1e-12);
        assert_relative_eq!(kolmogorov_sf(1.0), 0.2699996716773545212, max_relative = 1e-12);
        assert_relative_eq!(kolmogorov_sf(1.36), 0.04948587675537788364, max_relative = 1e-12);
        assert_relative_eq!(kolmogorov_sf(2.0), 0.00067092525577969534654, max_relative = 1e-12);
    }

    #[test]
    fn kahan_recovers_small_increments() {
        let mut k = Kahan::new();
        k.add(1.0);
        for _ in 0..1_000_000 {
            k.add(1e-16);
        }
        assert_relative_eq!(k.value(), 1.0 + 1e-10, max_relative = 1e-12);
    }
}
