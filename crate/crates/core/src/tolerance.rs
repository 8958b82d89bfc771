use num_complex::Complex64;

/// Numerical thresholds shared by every separability and extraction routine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub rel_eps: f64,
    pub abs_eps: f64,
    /// Amplitudes with modulus at or below this are treated as zero.
    pub zero_amp_threshold: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rel_eps: 1e-9,
            abs_eps: 1e-12,
            zero_amp_threshold: 1e-6,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rel_eps: f64, abs_eps: f64, zero_amp_threshold: f64) -> crate::Result<Self> {
        let cfg = Self {
            rel_eps,
            abs_eps,
            zero_amp_threshold,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rel_eps(mut self, rel_eps: f64) -> crate::Result<Self> {
        self.rel_eps = rel_eps;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> crate::Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(self.rel_eps) && ok(self.abs_eps) && ok(self.zero_amp_threshold) {
            Ok(())
        } else {
            Err(crate::MenError::InvalidQuery(format!(
                "tolerances must be finite and strictly positive: {self:?}"
            )))
        }
    }

    /// Determinant of the 2x2 block `[[a, b], [c, d]]` and whether it counts
    /// as vanishing.
    ///
    /// The threshold is `abs_eps + rel_eps * m1 * m2` where `m1 >= m2` are the
    /// two largest entry moduli of the block.
    pub fn minor(&self, a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (f64, bool) {
        let det = (a * d - b * c).norm();
        let mut m = [a.norm(), b.norm(), c.norm(), d.norm()];
        m.sort_by(|x, y| y.total_cmp(x));
        let bound = self.abs_eps + self.rel_eps * m[0] * m[1];
        (det, det <= bound)
    }

    pub fn is_zero_amplitude(&self, a: Complex64) -> bool {
        a.norm() <= self.zero_amp_threshold
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let t = ToleranceConfig::default();
        assert_eq!(t.rel_eps, 1e-9);
        assert_eq!(t.abs_eps, 1e-12);
        assert_eq!(t.zero_amp_threshold, 1e-6);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn non_positive_tolerances_rejected() {
        assert!(ToleranceConfig::new(0.0, 1e-12, 1e-6).is_err());
        assert!(ToleranceConfig::new(1e-9, -1.0, 1e-6).is_err());
        assert!(ToleranceConfig::new(1e-9, 1e-12, f64::NAN).is_err());
    }

    #[test]
    fn minor_threshold_is_scale_free() {
        let t = ToleranceConfig::default();
        let c = |x: f64| Complex64::new(x, 0.0);
        // rank one at any scale
        for s in [1e-3, 1.0, 1e3] {
            let (_, zero) = t.minor(c(s), c(2.0 * s), c(3.0 * s), c(6.0 * s));
            assert!(zero);
        }
        let (det, zero) = t.minor(c(1.0), c(0.0), c(0.0), c(1.0));
        assert_eq!(det, 1.0);
        assert!(!zero);
    }
}
