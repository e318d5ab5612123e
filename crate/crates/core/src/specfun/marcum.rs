//! First-order Marcum Q function.
//!
//! [`marcum_q1`] is the reference evaluation (Bessel series, converged to
//! double precision). [`marcum_q1_truncated`] evaluates the finite
//! gamma-series approximation
//!
//! ```text
//! Q1(a, b) ≈ Σ_{r=0}^{R1} χ_r Γ(1 + r, b²/2),
//! χ_r = Γ(r + R1) R1^{1-2r} a^{2r} 2^{-r} / (Γ(r+1)² Γ(R1 - r + 1) e^{a²/2}),
//! R1  = ceil(50 max(1, a, b)),
//! ```
//!
//! whose coefficients are also what the Rician hop density is built from.

use super::bessel::bessel_i_scaled_seq;
use super::gamma::{for_each_ln_upper_gamma_int, ln_factorial, ln_gamma};

/// Multiplier in the truncation rule `R1 = ceil(50 max(1, a, b))`.
pub const TRUNCATION_FACTOR: f64 = 50.0;

/// The truncation order `R1` and the coefficients `χ_r`, `r = 0..=R1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarcumTruncation {
    pub r1_terms: u32,
    pub coefficients: Vec<f64>,
    ln_coefficients: Vec<f64>,
}

impl MarcumTruncation {
    /// Builds the coefficients for LOS parameter `a` and order `r1_terms`.
    ///
    /// Evaluated as log-gamma differences; `Γ(r + R1)` alone overflows once
    /// `R1` passes 170.
    pub fn new(a: f64, r1_terms: u32) -> Self {
        let a2_half = 0.5 * a * a;
        let big_r = r1_terms as f64;
        let ln_chi: Vec<f64> = (0..=r1_terms)
            .map(|r| {
                if r == 0 {
                    // Γ(R1) R1 / Γ(R1 + 1) = 1, including the R1 -> 0 limit
                    return -a2_half;
                }
                if a == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let rf = r as f64;
                ln_gamma(rf + big_r) + (1.0 - 2.0 * rf) * big_r.ln() + 2.0 * rf * a.ln()
                    - rf * std::f64::consts::LN_2
                    - 2.0 * ln_factorial(r)
                    - ln_gamma(big_r - rf + 1.0)
                    - a2_half
            })
            .collect();
        MarcumTruncation {
            r1_terms,
            coefficients: ln_chi.iter().map(|v| v.exp()).collect(),
            ln_coefficients: ln_chi,
        }
    }

    /// Builds the truncation for `(a, b)` with `R1 = ceil(50 max(1, a, b))`.
    pub fn for_arguments(a: f64, b: f64) -> Self {
        Self::new(a, truncation_order(a, b))
    }

    /// `ln χ_r` (`-inf` where the coefficient vanishes).
    pub fn ln_coefficient(&self, r: u32) -> f64 {
        self.ln_coefficients[r as usize]
    }

    /// Evaluates `Σ χ_r Γ(1 + r, b²/2)`.
    pub fn evaluate(&self, b: f64) -> f64 {
        let y = 0.5 * b * b;
        let mut sum = 0.0;
        let mut comp = 0.0;
        for_each_ln_upper_gamma_int(self.r1_terms, y, |r, ln_q| {
            let ln_chi = self.ln_coefficients[r as usize];
            if ln_chi == f64::NEG_INFINITY {
                return;
            }
            // Γ(1+r, y) = r! Q(r+1, y)
            let t = (ln_chi + ln_factorial(r) + ln_q).exp();
            let s = sum + t;
            comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
            sum = s;
        });
        sum + comp
    }
}

/// `R1 = ceil(50 max(1, a, b))`.
pub fn truncation_order(a: f64, b: f64) -> u32 {
    (TRUNCATION_FACTOR * 1f64.max(a).max(b)).ceil() as u32
}

/// Reference first-order Marcum Q function `Q1(a, b)`, `a, b >= 0`.
///
/// With `x = ab` and scaled Bessel terms `ĩ_k = e^{-x} I_k(x)`:
/// `Q1 = e^{-(a-b)²/2} Σ_{k≥0} (a/b)^k ĩ_k` for `a < b`, and
/// `Q1 = 1 - e^{-(a-b)²/2} Σ_{k≥1} (b/a)^k ĩ_k` otherwise.
pub fn marcum_q1(a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0);
    if b == 0.0 {
        return 1.0;
    }
    if a == 0.0 {
        return (-0.5 * b * b).exp();
    }
    let x = a * b;
    let n = 40 + (12.0 * x.sqrt()).ceil() as usize;
    let scaled = bessel_i_scaled_seq(n, x);
    let gap = (-0.5 * (a - b) * (a - b)).exp();
    if a < b {
        let ratio = a / b;
        let mut pow = 1.0;
        let mut sum = 0.0;
        for ik in scaled.iter() {
            sum += pow * ik;
            pow *= ratio;
            if pow * ik < 1e-18 * sum && pow < 1e-3 {
                break;
            }
        }
        (gap * sum).clamp(0.0, 1.0)
    } else {
        let ratio = b / a;
        let mut pow = ratio;
        let mut sum = 0.0;
        for ik in scaled.iter().skip(1) {
            sum += pow * ik;
            pow *= ratio;
        }
        (1.0 - gap * sum).clamp(0.0, 1.0)
    }
}

/// Truncated-series Marcum Q and its truncation record.
pub fn marcum_q1_truncated(a: f64, b: f64) -> (f64, MarcumTruncation) {
    let trunc = MarcumTruncation::for_arguments(a, b);
    let v = trunc.evaluate(b);
    (v, trunc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_values() {
        assert_eq!(marcum_q1(2.0, 0.0), 1.0);
        for &b in &[0.1, 1.0, 3.0] {
            assert!((marcum_q1(0.0, b) - (-0.5 * b * b).exp()).abs() < 1e-16);
        }
    }

    #[test]
    fn equal_arguments_identity() {
        // Q1(a, a) = (1 + e^{-a²} I0(a²)) / 2
        for &a in &[0.5, 1.0, 4.0, 20.0] {
            let want = 0.5 * (1.0 + super::super::bessel::bessel_i0_scaled(a * a));
            assert!((marcum_q1(a, a) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn truncation_record_for_zero_a() {
        let (v, t) = marcum_q1_truncated(0.0, 1.7);
        assert_eq!(t.r1_terms, 85);
        assert_eq!(t.coefficients[0], 1.0);
        assert!(t.coefficients[1..].iter().all(|&c| c == 0.0));
        assert!((v - (-0.5 * 1.7f64 * 1.7).exp()).abs() < 1e-15);
    }

    #[test]
    fn truncation_order_rounds_up() {
        assert_eq!(truncation_order(0.0, 0.0), 50);
        assert_eq!(truncation_order(1.01, 0.2), 51);
        assert_eq!(truncation_order(2.0, 3.3), 165);
    }

    #[test]
    fn coefficients_stay_finite_for_large_order() {
        let t = MarcumTruncation::new(2.0, 5000);
        assert!(t.coefficients.iter().all(|c| c.is_finite()));
        assert!(t.coefficients[0] > 0.0);
    }
}
