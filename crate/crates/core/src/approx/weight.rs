/// Compactly supported Gaussian
/// `phi(r) = (exp(-(eps r)^2) - exp(-eps^2)) / (1 - exp(-eps^2))` for
/// `0 <= r <= 1`, zero beyond.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianWeight {
    pub epsilon: f64,
}

impl Default for GaussianWeight {
    fn default() -> Self {
        Self { epsilon: 4.0 }
    }
}

impl GaussianWeight {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon }
    }

    pub fn value(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        let e2 = self.epsilon * self.epsilon;
        let tail = (-e2).exp();
        ((-e2 * r * r).exp() - tail) / (1.0 - tail)
    }

    /// `d phi / d r`.
    pub fn derivative(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        let e2 = self.epsilon * self.epsilon;
        -2.0 * e2 * r * (-e2 * r * r).exp() / (1.0 - (-e2).exp())
    }
}

/// Weight of `y` seen from `x` with support radius `delta`.
pub fn weight_eval(weight: &GaussianWeight, x: &crate::geometry::Point, y: &crate::geometry::Point, delta: f64) -> f64 {
    weight.value(crate::geometry::dist(x, y) / delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_monotonicity() {
        let w = GaussianWeight::default();
        assert_eq!(w.value(0.0), 1.0);
        assert_eq!(w.value(1.0), 0.0);
        assert_eq!(w.value(1.5), 0.0);
        let mut prev = 1.0;
        for i in 1..100 {
            let v = w.value(i as f64 / 100.0);
            assert!(v < prev && v > 0.0);
            prev = v;
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let w = GaussianWeight::new(4.0);
        for i in 1..20 {
            let r = i as f64 / 20.0;
            let h = 1e-7;
            let fd = (w.value(r + h) - w.value(r - h)) / (2.0 * h);
            assert!((fd - w.derivative(r)).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }
}
