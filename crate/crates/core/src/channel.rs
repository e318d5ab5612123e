//! Fading models for the two hops.
//!
//! The satellite-to-UAV hop is shadowed-Rician with integer severity, whose
//! power density collapses to a finite exponential-polynomial sum. The
//! UAV-to-user hop is Nakagami-m or Rician; both reduce to one series form
//! (see [`UnifiedSeries`]) once averaged over the UAV distance.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::mobility::MobilityModel;
use crate::quad::{integrate_piecewise, Tolerance};
use crate::specfun::gamma::{ln_factorial, pochhammer};
use crate::specfun::{bessel_i0_scaled, regularized_lower_gamma, MarcumTruncation};

/// Shadowed-Rician parameters `(m, b, Ω)` and their derived coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrFadingParams {
    pub m_su: u32,
    /// Half the average multipath power.
    pub b_su: f64,
    /// Average LOS power.
    pub omega_su: f64,
    pub alpha_u: f64,
    pub beta_u: f64,
    pub delta_u: f64,
}

impl SrFadingParams {
    pub fn new(m_su: f64, b_su: f64, omega_su: f64) -> Result<Self> {
        let m = integer_severity("m_su", m_su)?;
        if !(b_su > 0.0) || !b_su.is_finite() {
            return Err(Error::invalid("b_su", format!("must be positive, got {b_su}")));
        }
        if !(omega_su >= 0.0) || !omega_su.is_finite() {
            return Err(Error::invalid("omega_su", format!("must be non-negative, got {omega_su}")));
        }
        let two_b = 2.0 * b_su;
        let mf = m as f64;
        let alpha_u = (two_b * mf / (two_b * mf + omega_su)).powi(m as i32) / two_b;
        let beta_u = 1.0 / two_b;
        let delta_u = omega_su / (two_b * (two_b * mf + omega_su));
        Ok(SrFadingParams {
            m_su: m,
            b_su,
            omega_su,
            alpha_u,
            beta_u,
            delta_u,
        })
    }

    /// Heavy shadowing, `(1, 0.063, 0.0007)`.
    pub fn heavy() -> Self {
        Self::new(1.0, 0.063, 0.0007).expect("valid constants")
    }

    /// Average shadowing, `(5, 0.251, 0.279)`.
    pub fn average() -> Self {
        Self::new(5.0, 0.251, 0.279).expect("valid constants")
    }

    /// Light shadowing, `(10, 0.158, 1.29)`.
    pub fn light() -> Self {
        Self::new(10.0, 0.158, 1.29).expect("valid constants")
    }

    /// `ζ(κ) = (-1)^κ (1-m)_κ δ^κ / (κ!)²`. Non-negative for `κ < m`.
    pub fn zeta(&self, kappa: u32) -> f64 {
        let sign = if kappa.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * pochhammer(1.0 - self.m_su as f64, kappa) * self.delta_u.powi(kappa as i32)
            / (2.0 * ln_factorial(kappa)).exp()
    }

    /// Exponential rate `β - δ` of every term of the density.
    pub fn decay(&self) -> f64 {
        self.beta_u - self.delta_u
    }

    /// Mean channel power `2b + Ω`.
    pub fn mean_power(&self) -> f64 {
        2.0 * self.b_su + self.omega_su
    }
}

fn integer_severity(name: &'static str, m: f64) -> Result<u32> {
    if !(m >= 1.0) || m.fract() != 0.0 || m > 1e6 {
        return Err(Error::invalid(
            name,
            format!("severity must be a positive integer (the finite-sum forms need it), got {m}"),
        ));
    }
    Ok(m as u32)
}

/// Density of `|g_su|²`.
pub fn sr_power_pdf(x: f64, p: &SrFadingParams) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let poly: f64 = (0..p.m_su).map(|k| p.zeta(k) * x.powi(k as i32)).sum();
    p.alpha_u * poly * (-p.decay() * x).exp()
}

/// `Pr[η_s |g_su|² >= x]`, the closed-form complementary cdf.
pub fn sr_snr_survival(x: f64, p: &SrFadingParams, eta_s: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let theta = p.decay() / eta_s;
    let e = (-theta * x).exp();
    if e == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for k in 0..p.m_su {
        let mut inner = 0.0;
        for q in 0..=k {
            // κ!/p! Θ^{-(κ+1-p)} x^p
            let ln_t = ln_factorial(k) - ln_factorial(q) - (k + 1 - q) as f64 * theta.ln() + q as f64 * x.ln();
            inner += ln_t.exp();
        }
        total += p.zeta(k) / eta_s.powi(k as i32 + 1) * inner;
    }
    p.alpha_u * total * e
}

/// `F_Λsu(x) = Pr[η_s |g_su|² < x]`, summed as lower incomplete gammas
/// so that small probabilities keep full relative precision.
pub fn sr_snr_cdf(x: f64, p: &SrFadingParams, eta_s: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let c = p.decay();
    let z = c * x / eta_s;
    let mut total = 0.0;
    for k in 0..p.m_su {
        let lower = regularized_lower_gamma(k as f64 + 1.0, z).expect("positive shape, non-negative argument");
        total += p.zeta(k) * (ln_factorial(k) - (k + 1) as f64 * c.ln()).exp() * lower;
    }
    (p.alpha_u * total).clamp(0.0, 1.0)
}

/// Small-argument form `α_u x / η_s`.
pub fn sr_snr_cdf_small_x(x: f64, p: &SrFadingParams, eta_s: f64) -> f64 {
    p.alpha_u * x / eta_s
}

/// Draws `|g_su|²` as `|X + Y|²`: `X` circular Gaussian with power `2b`,
/// `Y` a LOS phasor with uniform phase and Nakagami-m amplitude (gamma
/// power with shape `m` and mean `Ω`).
#[derive(Debug, Clone, Copy)]
pub struct SrPowerSampler {
    sigma: f64,
    los_power: Option<Gamma<f64>>,
}

impl SrPowerSampler {
    pub fn new(p: &SrFadingParams) -> Self {
        let los_power = if p.omega_su > 0.0 {
            let m = p.m_su as f64;
            Some(Gamma::new(m, p.omega_su / m).expect("shape and scale are positive"))
        } else {
            None
        };
        SrPowerSampler {
            sigma: p.b_su.sqrt(),
            los_power,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let xr: f64 = rng.sample(StandardNormal);
        let xi: f64 = rng.sample(StandardNormal);
        let (mut re, mut im) = (self.sigma * xr, self.sigma * xi);
        if let Some(g) = &self.los_power {
            let amp = g.sample(rng).sqrt();
            let phase = std::f64::consts::TAU * rng.random::<f64>();
            re += amp * phase.cos();
            im += amp * phase.sin();
        }
        re * re + im * im
    }
}

pub fn sample_sr_power<R: Rng + ?Sized>(p: &SrFadingParams, rng: &mut R) -> f64 {
    SrPowerSampler::new(p).sample(rng)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TerrestrialFading {
    Nakagami { m_ud: u32, omega_ud: f64 },
    Rician { k_ud: f64, omega_ud: f64 },
}

impl TerrestrialFading {
    pub fn nakagami(m_ud: f64, omega_ud: f64) -> Result<Self> {
        let m_ud = integer_severity("m_ud", m_ud)?;
        check_omega(omega_ud)?;
        Ok(TerrestrialFading::Nakagami { m_ud, omega_ud })
    }

    pub fn rician(k_ud: f64, omega_ud: f64) -> Result<Self> {
        if !(k_ud >= 0.0) || !k_ud.is_finite() {
            return Err(Error::invalid("k_ud", format!("K-factor must be non-negative, got {k_ud}")));
        }
        check_omega(omega_ud)?;
        Ok(TerrestrialFading::Rician { k_ud, omega_ud })
    }

    pub fn omega(&self) -> f64 {
        match *self {
            TerrestrialFading::Nakagami { omega_ud, .. } | TerrestrialFading::Rician { omega_ud, .. } => omega_ud,
        }
    }

    /// Scale `𝒜` of the unified series for average SNR `eta_u`.
    pub fn series_scale(&self, eta_u: f64) -> f64 {
        match *self {
            TerrestrialFading::Nakagami { m_ud, omega_ud } => m_ud as f64 / (omega_ud * eta_u),
            TerrestrialFading::Rician { k_ud, omega_ud } => (1.0 + k_ud) / (omega_ud * eta_u),
        }
    }
}

fn check_omega(omega_ud: f64) -> Result<()> {
    if !(omega_ud > 0.0) || !omega_ud.is_finite() {
        return Err(Error::invalid("omega_ud", format!("must be positive, got {omega_ud}")));
    }
    Ok(())
}

/// Density of `|g_ud|²`.
pub fn terrestrial_power_pdf(x: f64, f: &TerrestrialFading) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    match *f {
        TerrestrialFading::Nakagami { m_ud, omega_ud } => {
            let m = m_ud as f64;
            let rate = m / omega_ud;
            if x == 0.0 {
                return if m_ud == 1 { rate } else { 0.0 };
            }
            (m * rate.ln() + (m - 1.0) * x.ln() - ln_factorial(m_ud - 1) - rate * x).exp()
        }
        TerrestrialFading::Rician { k_ud, omega_ud } => {
            let c = (1.0 + k_ud) / omega_ud;
            let z = 2.0 * (k_ud * c * x).sqrt();
            c * (-k_ud - c * x + z).exp() * bessel_i0_scaled(z)
        }
    }
}

/// `Pr[|g_ud|² < x]`. The Rician branch is `1 - Q1(√(2K), √(2(1+K)x/Ω))`
/// written as a Poisson mixture of lower incomplete gammas, which has no
/// cancellation for small `x`.
pub fn terrestrial_power_cdf(x: f64, f: &TerrestrialFading) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    match *f {
        TerrestrialFading::Nakagami { m_ud, omega_ud } => {
            let m = m_ud as f64;
            regularized_lower_gamma(m, m * x / omega_ud).expect("valid arguments")
        }
        TerrestrialFading::Rician { k_ud, omega_ud } => {
            let z = (1.0 + k_ud) * x / omega_ud;
            if k_ud == 0.0 {
                return -(-z).exp_m1();
            }
            let ln_k = k_ud.ln();
            let mut total = 0.0;
            let mut j = 0u32;
            loop {
                let ln_w = -k_ud + j as f64 * ln_k - ln_factorial(j);
                let term = ln_w.exp() * regularized_lower_gamma(j as f64 + 1.0, z).expect("valid arguments");
                total += term;
                // past the Poisson mode the remaining weights sum to less than twice the current one
                if j as f64 > 2.0 * k_ud && (ln_w < -45.0 || term < 1e-18 * total) {
                    break;
                }
                j += 1;
            }
            total.min(1.0)
        }
    }
}

/// Draws `|g_ud|²`: gamma power for Nakagami, `|μ + Z|²` with LOS power
/// `KΩ/(K+1)` and scatter power `Ω/(K+1)` for Rician.
#[derive(Debug, Clone, Copy)]
pub enum TerrestrialPowerSampler {
    Nakagami(Gamma<f64>),
    Rician { los: f64, sigma: f64 },
}

impl TerrestrialPowerSampler {
    pub fn new(f: &TerrestrialFading) -> Self {
        match *f {
            TerrestrialFading::Nakagami { m_ud, omega_ud } => {
                let m = m_ud as f64;
                TerrestrialPowerSampler::Nakagami(Gamma::new(m, omega_ud / m).expect("positive parameters"))
            }
            TerrestrialFading::Rician { k_ud, omega_ud } => TerrestrialPowerSampler::Rician {
                los: (k_ud * omega_ud / (k_ud + 1.0)).sqrt(),
                sigma: (0.5 * omega_ud / (k_ud + 1.0)).sqrt(),
            },
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            TerrestrialPowerSampler::Nakagami(g) => g.sample(rng),
            TerrestrialPowerSampler::Rician { los, sigma } => {
                let re = los + sigma * rng.sample::<f64, _>(StandardNormal);
                let im = sigma * rng.sample::<f64, _>(StandardNormal);
                re * re + im * im
            }
        }
    }
}

pub fn sample_terrestrial_power<R: Rng + ?Sized>(f: &TerrestrialFading, rng: &mut R) -> f64 {
    TerrestrialPowerSampler::new(f).sample(rng)
}

/// Largest Rician truncation order honoured; larger requests are capped.
pub const MAX_R1_TERMS: u32 = 10_000;

/// Terms whose total probability mass `ℬ_r · r!` is below this, past the
/// mode of the mass sequence, are dropped from evaluation.
const NEGLIGIBLE_TERM_MASS: f64 = 1e-18;

/// Unified form of the UAV-to-user SNR density,
///
/// ```text
/// f(x) = Σ_{r=λ4}^{λ5} ℬ_r 𝒜^{r+1} x^r ∫ w^{(r+1)α} e^{-𝒜 x w^α} f_W(w) dw,
/// ```
///
/// with `{λ4, λ5, 𝒜, ℬ_r} = {m-1, m-1, m/(Ω η_u), 1/Γ(m)}` for Nakagami-m
/// and `{0, R1, (1+K)/(Ω η_u), χ_r}` for Rician.
#[derive(Debug, Clone, PartialEq)]
pub struct UnifiedSeries {
    pub lambda4: u32,
    pub lambda5: u32,
    pub a_scale: f64,
    /// `ℬ_r` for `r = λ4..=λ5`.
    pub b_coeffs: Vec<f64>,
    /// True when the requested Rician order exceeded [`MAX_R1_TERMS`].
    pub capped: bool,
    ln_b: Vec<f64>,
    // index past which the term masses decrease monotonically
    mass_mode: f64,
}

impl UnifiedSeries {
    /// `ln ℬ_r` for `r` in `λ4..=λ5`.
    pub fn ln_coeff(&self, r: u32) -> f64 {
        self.ln_b[(r - self.lambda4) as usize]
    }

    /// `(r, ln ℬ_r)` for every term that carries non-negligible mass.
    ///
    /// Term `r` integrates to `ℬ_r r!` over `x`, which bounds how much it
    /// can contribute to any probability built from the density.
    pub fn significant_terms(&self) -> Vec<(u32, f64)> {
        let mut out = Vec::new();
        for r in self.lambda4..=self.lambda5 {
            let ln_b = self.ln_coeff(r);
            if ln_b == f64::NEG_INFINITY {
                continue;
            }
            let ln_mass = ln_b + ln_factorial(r);
            if (r as f64 + 1.0) > self.mass_mode && ln_mass < NEGLIGIBLE_TERM_MASS.ln() {
                break;
            }
            out.push((r, ln_b));
        }
        out
    }

    /// `∫ f(x) dx = Σ_r ℬ_r r!` over every retained term. One for
    /// Nakagami-m; slightly below one for a finite Rician order.
    pub fn total_mass(&self) -> f64 {
        let ln: Vec<f64> = (self.lambda4..=self.lambda5)
            .map(|r| self.ln_coeff(r) + ln_factorial(r))
            .filter(|v| *v > f64::NEG_INFINITY)
            .collect();
        let top = ln.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        top.exp() * ln.iter().map(|v| (v - top).exp()).sum::<f64>()
    }

    /// Evaluates the unified density at `x > 0`.
    pub fn hop_pdf(&self, x: f64, mobility: &MobilityModel, path_loss_exp: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(if self.lambda4 == 0 { self.pdf_at_zero(mobility, path_loss_exp)? } else { 0.0 });
        }
        let terms = self.significant_terms();
        let ln_a = self.a_scale.ln();
        let ln_x = x.ln();
        let integrand = |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            let ln_wa = path_loss_exp * w.ln();
            let u = self.a_scale * x * ln_wa.exp();
            let mut s = 0.0;
            for &(r, ln_b) in &terms {
                let rf = r as f64;
                s += (ln_b + (rf + 1.0) * (ln_a + ln_wa) + rf * ln_x - u).exp();
            }
            s * mobility.distance_pdf(w)
        };
        integrate_piecewise(integrand, &mobility.breakpoints(), Tolerance::new(0.0, 1e-11)).map(|r| r.value)
    }

    fn pdf_at_zero(&self, mobility: &MobilityModel, path_loss_exp: f64) -> Result<f64> {
        let moment = mobility.distance_moment(path_loss_exp)?;
        Ok(self.b_coeffs[0] * self.a_scale * moment)
    }

    /// Single-term small-argument series: the Nakagami series unchanged, the
    /// Rician series cut to `r = 0` with `R1 = 0` (so `ℬ_0 = e^{-K}`).
    pub fn asymptotic(f: &TerrestrialFading, eta_u: f64) -> Result<Self> {
        match *f {
            TerrestrialFading::Nakagami { .. } => unified_series(f, eta_u, 0.0),
            TerrestrialFading::Rician { k_ud, .. } => {
                check_eta(eta_u)?;
                Ok(Self::from_ln(0, 0, f.series_scale(eta_u), vec![-k_ud], false, 0.0))
            }
        }
    }

    fn from_ln(lambda4: u32, lambda5: u32, a_scale: f64, ln_b: Vec<f64>, capped: bool, mass_mode: f64) -> Self {
        UnifiedSeries {
            lambda4,
            lambda5,
            a_scale,
            b_coeffs: ln_b.iter().map(|v| v.exp()).collect(),
            capped,
            ln_b,
            mass_mode,
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::invalid("eta_u", format!("average SNR must be positive and finite, got {eta}")));
    }
    Ok(())
}

/// Marcum second argument `b = sqrt(2 𝒜 x w_max^α)` at the far edge of the
/// cell, used to size the Rician truncation.
pub fn rician_b_at_edge(a_scale: f64, x: f64, mobility: &MobilityModel, path_loss_exp: f64) -> f64 {
    (2.0 * a_scale * x * mobility.max_distance().powf(path_loss_exp)).sqrt()
}

/// Builds the unified series. `b_for_r1` is the Marcum second argument
/// that fixes the Rician truncation `R1 = ceil(50 max(1, a, b))`; it is
/// ignored for Nakagami.
pub fn unified_series(f: &TerrestrialFading, eta_u: f64, b_for_r1: f64) -> Result<UnifiedSeries> {
    check_eta(eta_u)?;
    let a_scale = f.series_scale(eta_u);
    match *f {
        TerrestrialFading::Nakagami { m_ud, .. } => {
            let r = m_ud - 1;
            Ok(UnifiedSeries::from_ln(r, r, a_scale, vec![-ln_factorial(r)], false, 0.0))
        }
        TerrestrialFading::Rician { k_ud, .. } => {
            let a = (2.0 * k_ud).sqrt();
            let wanted = crate::specfun::marcum::truncation_order(a, b_for_r1.max(0.0));
            let capped = wanted > MAX_R1_TERMS;
            let r1 = wanted.min(MAX_R1_TERMS);
            let trunc = MarcumTruncation::new(a, r1);
            let ln_b: Vec<f64> = (0..=r1).map(|r| trunc.ln_coefficient(r)).collect();
            Ok(UnifiedSeries::from_ln(0, r1, a_scale, ln_b, capped, k_ud))
        }
    }
}
