//! Satellite link budget: beam pattern, free-space scale and the
//! satellite-hop average SNR.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::bessel_j;
use crate::{db_to_linear, linear_to_db};

/// Boltzmann constant in J/K, at the three-digit precision used for the
/// reference link budget.
pub const BOLTZMANN: f64 = 1.38e-23;
pub const SPEED_OF_LIGHT: f64 = 3.0e8;
/// Scale in `ρ = 2.07123 sinθ / sinθ_3dB`.
pub const BEAM_RHO_SCALE: f64 = 2.07123;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBudget {
    /// Receiver noise temperature (K).
    pub noise_temp: f64,
    /// Carrier bandwidth (Hz).
    pub bandwidth: f64,
    /// Carrier frequency (Hz).
    pub carrier_freq: f64,
    /// Satellite-to-UAV distance (m).
    pub distance_du: f64,
    pub gain_sat_db: f64,
    pub gain_uav_db: f64,
    /// Angular offset of the UAVs from the beam centre (degrees).
    pub theta_u_deg: f64,
    pub theta_3db_deg: f64,
    /// Transmit power over noise before link scaling (linear).
    pub tx_power_over_noise: f64,
}

impl LinkBudget {
    /// Geostationary L/S-band budget: 300 K, 15 MHz, 2 GHz, 35 786 km,
    /// 53.45 dB satellite gain, 4.8 dB UAV gain, 0.8° offset in a 0.3° beam.
    pub fn reference() -> Self {
        LinkBudget {
            noise_temp: 300.0,
            bandwidth: 15e6,
            carrier_freq: 2e9,
            distance_du: 35_786e3,
            gain_sat_db: 53.45,
            gain_uav_db: 4.8,
            theta_u_deg: 0.8,
            theta_3db_deg: 0.3,
            tx_power_over_noise: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("noise_temp", self.noise_temp),
            ("bandwidth", self.bandwidth),
            ("carrier_freq", self.carrier_freq),
            ("distance_du", self.distance_du),
            ("tx_power_over_noise", self.tx_power_over_noise),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [("gain_sat_db", self.gain_sat_db), ("gain_uav_db", self.gain_uav_db)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        check_angle("theta_u_deg", self.theta_u_deg)?;
        check_angle("theta_3db_deg", self.theta_3db_deg)?;
        Ok(())
    }

    /// `η_s` at the configured transmit power.
    pub fn configured_eta_s(&self) -> Result<f64> {
        eta_s(self, linear_to_db(self.tx_power_over_noise))
    }
}

fn check_angle(name: &'static str, deg: f64) -> Result<()> {
    if !(deg > 0.0 && deg < 90.0) {
        return Err(Error::invalid(name, format!("must lie in (0, 90) degrees, got {deg}")));
    }
    Ok(())
}

/// `ρ = 2.07123 sinθ_u / sinθ_3dB`.
pub fn beam_rho(theta_u_deg: f64, theta_3db_deg: f64) -> f64 {
    BEAM_RHO_SCALE * theta_u_deg.to_radians().sin() / theta_3db_deg.to_radians().sin()
}

/// `ϑ_u (J1(ρ)/(2ρ) + 36 J3(ρ)/ρ³)`; tends to `ϑ_u` on boresight.
pub fn beam_gain(theta_u_deg: f64, theta_3db_deg: f64, gain_uav_linear: f64) -> f64 {
    let rho = beam_rho(theta_u_deg, theta_3db_deg);
    let bracket = if rho < 1e-4 {
        // J1/(2ρ) = 1/4 - ρ²/32, 36 J3/ρ³ = 3/4 - 3ρ²/64
        1.0 - 5.0 * rho * rho / 64.0
    } else {
        bessel_j(1, rho) / (2.0 * rho) + 36.0 * bessel_j(3, rho) / rho.powi(3)
    };
    gain_uav_linear * bracket
}

/// `ϑ_s ϑ(θ_u) / (K_B 𝒯 𝒲) · (c / (4π f_c d_u))²`.
pub fn free_space_scale(budget: &LinkBudget) -> Result<f64> {
    budget.validate()?;
    let beam = beam_gain(budget.theta_u_deg, budget.theta_3db_deg, db_to_linear(budget.gain_uav_db));
    let wavelength_ratio = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * budget.carrier_freq * budget.distance_du);
    let noise = BOLTZMANN * budget.noise_temp * budget.bandwidth;
    Ok(db_to_linear(budget.gain_sat_db) * beam / noise * wavelength_ratio * wavelength_ratio)
}

/// Satellite-hop average SNR: the free-space scale times the power ratio.
pub fn eta_s(budget: &LinkBudget, power_ratio_db: f64) -> Result<f64> {
    if !power_ratio_db.is_finite() {
        return Err(Error::invalid(
            "power_ratio_db",
            format!("must be finite (zero power leaves the hop silent), got {power_ratio_db}"),
        ));
    }
    Ok(free_space_scale(budget)? * db_to_linear(power_ratio_db))
}

#[cfg(test)]
mod tests {
    use super::*;

    // mpmath at 30 digits with the reference budget
    const REFERENCE_RHO: f64 = 5.523_125_773_007_363;
    const REFERENCE_BEAM_GAIN: f64 = 0.068_435_688_171_729_09;
    const REFERENCE_SCALE: f64 = 0.027_134_855_517_042_17;

    #[test]
    fn boresight_limit() {
        let g = beam_gain(1e-7, 0.3, 2.5);
        assert!((g - 2.5).abs() < 1e-12);
        assert!(beam_gain(0.8, 0.3, 2.5) < beam_gain(0.01, 0.3, 2.5));
        // series and Bessel branches meet
        let theta = (1e-4 / BEAM_RHO_SCALE * 0.3f64.to_radians().sin()).asin().to_degrees();
        let a = beam_gain(theta * (1.0 - 1e-9), 0.3, 1.0);
        let b = beam_gain(theta * (1.0 + 1e-9), 0.3, 1.0);
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn reference_pattern() {
        assert!((beam_rho(0.8, 0.3) - REFERENCE_RHO).abs() < 1e-12);
        let g = beam_gain(0.8, 0.3, db_to_linear(4.8));
        assert!((g / REFERENCE_BEAM_GAIN - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reference_scale() {
        let s = free_space_scale(&LinkBudget::reference()).unwrap();
        assert!((s / REFERENCE_SCALE - 1.0).abs() < 1e-10, "{s}");
    }

    #[test]
    fn inverse_square_and_bandwidth() {
        let base = LinkBudget::reference();
        let s = free_space_scale(&base).unwrap();
        let far = free_space_scale(&LinkBudget {
            distance_du: 2.0 * base.distance_du,
            ..base
        })
        .unwrap();
        assert!((s / far - 4.0).abs() < 1e-13);
        assert!((linear_to_db(s / far) - 6.0206).abs() < 1e-4);
        let wide = free_space_scale(&LinkBudget {
            bandwidth: 2.0 * base.bandwidth,
            ..base
        })
        .unwrap();
        assert!((linear_to_db(s / wide) - 3.0103).abs() < 1e-4);
    }

    #[test]
    fn eta_scales_with_power() {
        let b = LinkBudget::reference();
        let e0 = eta_s(&b, 0.0).unwrap();
        assert!((eta_s(&b, 10.0).unwrap() / e0 - 10.0).abs() < 1e-12);
        assert!((e0 - REFERENCE_SCALE).abs() < 1e-12);
        assert!(eta_s(&b, f64::NEG_INFINITY).is_err());
        assert_eq!(b.configured_eta_s().unwrap(), e0);
    }

    #[test]
    fn rejects_bad_budgets() {
        let b = LinkBudget::reference();
        assert!(free_space_scale(&LinkBudget { theta_u_deg: 90.0, ..b }).is_err());
        assert!(free_space_scale(&LinkBudget { noise_temp: 0.0, ..b }).is_err());
        assert!(free_space_scale(&LinkBudget { bandwidth: -1.0, ..b }).is_err());
    }
}
