//! SNDR ceiling report.

use std::fmt;

use hstn_core::linear_to_db;
use hstn_core::outage::{sndr_ceiling, HardwareProfile};

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CeilingReport {
    pub hardware: HardwareProfile,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    /// `1/λ1`; infinite for ideal hardware.
    pub ceiling: f64,
}

impl CeilingReport {
    pub fn new(kappa_s: f64, kappa_u: f64) -> CliResult<Self> {
        let hardware = HardwareProfile::new(kappa_s, kappa_u)?;
        Ok(CeilingReport {
            hardware,
            lambda1: hardware.lambda1(),
            lambda2: hardware.lambda2(),
            lambda3: hardware.lambda3(),
            ceiling: sndr_ceiling(&hardware),
        })
    }

    pub fn ceiling_db(&self) -> f64 {
        linear_to_db(self.ceiling)
    }
}

impl fmt::Display for CeilingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kappa_s = {}, kappa_u = {}", self.hardware.kappa_s, self.hardware.kappa_u)?;
        writeln!(f, "lambda1 = {}", self.lambda1)?;
        writeln!(f, "lambda2 = {}", self.lambda2)?;
        writeln!(f, "lambda3 = {}", self.lambda3)?;
        if self.ceiling.is_finite() {
            write!(f, "SNDR ceiling = {:.6} linear = {:.3} dB", self.ceiling, self.ceiling_db())
        } else {
            write!(f, "SNDR ceiling = infinite (no ceiling)")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reported_values() {
        let r = CeilingReport::new(0.1, 0.1).unwrap();
        assert!((r.lambda1 - 0.0201).abs() < 1e-15);
        assert!(r.to_string().contains("16.968 dB"), "{r}");
        let r = CeilingReport::new(0.3, 0.3).unwrap();
        assert!(r.to_string().contains("7.256 dB"), "{r}");
        let r = CeilingReport::new(0.0, 0.0).unwrap();
        assert!(r.to_string().ends_with("infinite (no ceiling)"));
        assert!(CeilingReport::new(-0.1, 0.0).is_err());
    }
}
