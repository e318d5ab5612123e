//! Outage probability of max-SNDR relay selection.
//!
//! Three independent routes to the same number:
//! [`op_exact`] (finite sums with a Bessel-K kernel under one distance
//! integral), [`op_numeric`] (brute-force nested quadrature over the hop
//! densities) and [`op_asymptotic`] (high-SNR expansion). Monte Carlo lives
//! in [`crate::mcsim`].

use serde::{Deserialize, Serialize};

use crate::channel::{
    rician_b_at_edge, sr_snr_cdf, terrestrial_power_cdf, terrestrial_power_pdf, unified_series, SrFadingParams,
    TerrestrialFading, UnifiedSeries,
};
use crate::error::{Error, Result};
use crate::mobility::MobilityModel;
use crate::quad::{integrate_piecewise, integrate_to_inf, Tolerance};
use crate::specfun::gamma::{ln_binomial, ln_factorial, regularized_lower_gamma};
use crate::specfun::ln_bessel_k_seq;

/// Transceiver distortion levels at the satellite and at the relay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareProfile {
    pub kappa_s: f64,
    pub kappa_u: f64,
}

impl HardwareProfile {
    pub fn new(kappa_s: f64, kappa_u: f64) -> Result<Self> {
        for (name, k) in [("kappa_s", kappa_s), ("kappa_u", kappa_u)] {
            if !(k >= 0.0) || !k.is_finite() {
                return Err(Error::invalid(name, format!("must be non-negative and finite, got {k}")));
            }
        }
        Ok(HardwareProfile { kappa_s, kappa_u })
    }

    pub fn ideal() -> Self {
        HardwareProfile {
            kappa_s: 0.0,
            kappa_u: 0.0,
        }
    }

    pub fn symmetric(kappa: f64) -> Result<Self> {
        Self::new(kappa, kappa)
    }

    /// `κ_s² + κ_u² + κ_s²κ_u²`.
    pub fn lambda1(&self) -> f64 {
        let (s, u) = (self.kappa_s * self.kappa_s, self.kappa_u * self.kappa_u);
        s + u + s * u
    }

    pub fn lambda2(&self) -> f64 {
        1.0 + self.kappa_s * self.kappa_s
    }

    pub fn lambda3(&self) -> f64 {
        1.0 + self.kappa_u * self.kappa_u
    }
}

/// End-to-end SNDR `Λ1Λ2 / (λ1Λ1Λ2 + λ2Λ1 + λ3Λ2 + 1)`.
pub fn sndr(lambda_su: f64, lambda_ud: f64, hw: &HardwareProfile) -> f64 {
    let prod = lambda_su * lambda_ud;
    if !prod.is_finite() {
        // one or both hops saturated: take the limit of the ratio
        return match (lambda_su.is_finite(), lambda_ud.is_finite()) {
            (false, false) => sndr_ceiling(hw),
            (false, true) => lambda_ud / (hw.lambda1() * lambda_ud + hw.lambda3()),
            _ => lambda_su / (hw.lambda1() * lambda_su + hw.lambda2()),
        };
    }
    prod / (hw.lambda1() * prod + hw.lambda2() * lambda_su + hw.lambda3() * lambda_ud + 1.0)
}

/// `1/λ1`, infinite for ideal hardware.
pub fn sndr_ceiling(hw: &HardwareProfile) -> f64 {
    1.0 / hw.lambda1()
}

/// Relay count, threshold and average SNRs of one outage evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageQuery {
    pub num_relays: u32,
    /// Linear SNDR threshold.
    pub threshold: f64,
    pub eta_s: f64,
    pub eta_u: f64,
    pub hardware: HardwareProfile,
}

impl OutageQuery {
    pub fn new(num_relays: u32, threshold: f64, eta_s: f64, eta_u: f64, hardware: HardwareProfile) -> Result<Self> {
        if num_relays == 0 {
            return Err(Error::invalid("num_relays", "at least one relay is required".to_string()));
        }
        if !(threshold >= 0.0) || !threshold.is_finite() {
            return Err(Error::invalid("threshold", format!("must be non-negative and finite, got {threshold}")));
        }
        for (name, eta) in [("eta_s", eta_s), ("eta_u", eta_u)] {
            if !(eta > 0.0) || !eta.is_finite() {
                return Err(Error::invalid(name, format!("average SNR must be positive and finite, got {eta}")));
            }
        }
        Ok(OutageQuery {
            num_relays,
            threshold,
            eta_s,
            eta_u,
            hardware,
        })
    }

    /// Same query with `η_s = η_u = eta`.
    pub fn symmetric(num_relays: u32, threshold: f64, eta: f64, hardware: HardwareProfile) -> Result<Self> {
        Self::new(num_relays, threshold, eta, eta, hardware)
    }

    /// `1 - λ1γ`; outage is certain when this is not positive.
    pub fn lambda9(&self) -> f64 {
        1.0 - self.hardware.lambda1() * self.threshold
    }

    pub fn lambda6(&self) -> f64 {
        self.hardware.lambda3() * self.threshold / self.lambda9()
    }

    pub fn lambda7(&self) -> f64 {
        self.hardware.lambda2() * self.threshold + self.lambda9() / self.hardware.lambda3()
    }

    pub fn lambda8(&self) -> f64 {
        self.hardware.lambda2() * self.threshold
    }

    pub fn beyond_ceiling(&self) -> bool {
        !(self.lambda9() > 0.0)
    }
}

/// Channel statistics and geometry shared by all relays.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub sr: SrFadingParams,
    pub terrestrial: TerrestrialFading,
    pub mobility: MobilityModel,
    pub path_loss_exp: f64,
}

impl Network {
    pub fn new(
        sr: SrFadingParams,
        terrestrial: TerrestrialFading,
        mobility: MobilityModel,
        path_loss_exp: f64,
    ) -> Result<Self> {
        if !(path_loss_exp > 0.0) || !path_loss_exp.is_finite() {
            return Err(Error::invalid(
                "path_loss_exp",
                format!("must be positive and finite, got {path_loss_exp}"),
            ));
        }
        Ok(Network {
            sr,
            terrestrial,
            mobility,
            path_loss_exp,
        })
    }
}

/// Relative accuracy of the distance integrals.
const DISTANCE_TOL: Tolerance = Tolerance {
    abs: 1e-300,
    rel: 1e-12,
    max_intervals: 4000,
};

/// Slack allowed on a single-relay probability before it is reported as a
/// numerical failure instead of being clamped.
const BRACKET_SLACK: f64 = 1e-6;

fn finish(single: f64, q: &OutageQuery) -> Result<f64> {
    if !single.is_finite() || !(-BRACKET_SLACK..=1.0 + BRACKET_SLACK).contains(&single) {
        return Err(Error::Numerical(format!(
            "single-relay outage {single} left [0, 1] beyond tolerance"
        )));
    }
    Ok(single.clamp(0.0, 1.0).powi(q.num_relays as i32))
}

/// `F_Λud(x) = Pr[η_u W^{-α} |g_ud|² < x]`, averaged over the distance law.
pub fn terrestrial_snr_cdf(x: f64, net: &Network, eta_u: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let alpha = net.path_loss_exp;
    let v = net
        .mobility
        .expect(|w| terrestrial_power_cdf(x * w.powf(alpha) / eta_u, &net.terrestrial), DISTANCE_TOL)?;
    Ok(v.clamp(0.0, 1.0))
}

/// The same cdf rebuilt from the unified series: each term integrates in
/// closed form to `ℬ_r r! P(r+1, 𝒜 x w^α)`.
pub fn terrestrial_snr_cdf_from_series(x: f64, series: &UnifiedSeries, net: &Network) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let terms = series.significant_terms();
    let alpha = net.path_loss_exp;
    net.mobility.expect(
        |w| {
            let z = series.a_scale * x * w.powf(alpha);
            terms
                .iter()
                .map(|&(r, ln_b)| {
                    (ln_b + ln_factorial(r)).exp()
                        * regularized_lower_gamma(r as f64 + 1.0, z).expect("valid arguments")
                })
                .sum()
        },
        DISTANCE_TOL,
    )
}

/// Closed-form outage probability.
///
/// The single-relay success probability is a finite sum over the
/// satellite-hop terms `(κ, p, q)` and the terrestrial series terms
/// `(r, n)` of
///
/// ```text
/// W_κpq V_rn ∫ w^{(r+1)α} e^{-u λ8} 2 (β'/u)^{ν/2} K_ν(2 sqrt(β' u)) f_W(w) dw,
/// u = 𝒜 w^α / λ9,  β' = Θ λ6 λ7,  ν = n - q + 1,
/// ```
///
/// evaluated in log space. Outage is the series mass minus that success
/// probability (the mass is exactly 1 for Nakagami-m).
pub fn op_exact(q: &OutageQuery, net: &Network) -> Result<f64> {
    if q.beyond_ceiling() {
        return Ok(1.0);
    }
    if q.threshold == 0.0 {
        return Ok(0.0);
    }
    let series = exact_series(q, net)?;
    let kernel = ExactKernel::new(q, net, &series);
    let success = kernel.success_probability()?;
    finish(series.total_mass() - success, q)
}

/// Unified series used by [`op_exact`]; the Rician order is sized from the
/// Marcum argument at the cell edge with `x = λ6`.
pub fn exact_series(q: &OutageQuery, net: &Network) -> Result<UnifiedSeries> {
    let a_scale = net.terrestrial.series_scale(q.eta_u);
    let b = rician_b_at_edge(a_scale, q.lambda6(), &net.mobility, net.path_loss_exp);
    unified_series(&net.terrestrial, q.eta_u, b)
}

struct ExactKernel<'a> {
    net: &'a Network,
    /// `ln S_q = ln Σ_{κ,p} W_κpq`, indexed by `q`.
    ln_s: Vec<f64>,
    /// `(r, [ln V_r0 .. ln V_rr])`
    ln_v: Vec<(u32, Vec<f64>)>,
    u_scale: f64,
    lambda8: f64,
    ln_beta: f64,
    beta: f64,
    v_max: usize,
}

impl<'a> ExactKernel<'a> {
    fn new(q: &OutageQuery, net: &'a Network, series: &UnifiedSeries) -> Self {
        let sr = &net.sr;
        let (l6, l7, l8, l9) = (q.lambda6(), q.lambda7(), q.lambda8(), q.lambda9());
        let theta = sr.decay() / q.eta_s;
        let ln_theta = theta.ln();
        let m = sr.m_su;
        let mut ln_s = vec![f64::NEG_INFINITY; m as usize];
        for kappa in 0..m {
            let zeta = sr.zeta(kappa);
            if zeta <= 0.0 {
                continue;
            }
            let ln_k = sr.alpha_u.ln() + zeta.ln() - (kappa + 1) as f64 * q.eta_s.ln() + ln_factorial(kappa);
            for p in 0..=kappa {
                let ln_kp = ln_k - ln_factorial(p) - (kappa + 1 - p) as f64 * ln_theta + p as f64 * l6.ln() - theta * l6;
                for qq in 0..=p {
                    let t = ln_kp + ln_binomial(p, qq) + qq as f64 * l7.ln();
                    ln_s[qq as usize] = log_add(ln_s[qq as usize], t);
                }
            }
        }
        let ln_a9 = (series.a_scale / l9).ln();
        let ln_l8 = l8.ln();
        let ln_v: Vec<(u32, Vec<f64>)> = series
            .significant_terms()
            .into_iter()
            .map(|(r, ln_b)| {
                let row = (0..=r)
                    .map(|n| ln_b + (r + 1) as f64 * ln_a9 + ln_binomial(r, n) + (r - n) as f64 * ln_l8)
                    .collect();
                (r, row)
            })
            .collect();
        let r_max = ln_v.last().map_or(0, |(r, _)| *r) as usize;
        let beta = theta * l6 * l7;
        ExactKernel {
            net,
            ln_s,
            ln_v,
            u_scale: series.a_scale / l9,
            lambda8: l8,
            ln_beta: beta.ln(),
            beta,
            v_max: (r_max + 1).max(m as usize),
        }
    }

    /// Integrand of the distance average, without the `f_W` factor.
    fn at_distance(&self, w: f64, ln_g: &mut Vec<f64>, buf: &mut Vec<f64>) -> f64 {
        let alpha = self.net.path_loss_exp;
        let ln_w = w.ln();
        let u = self.u_scale * (alpha * ln_w).exp();
        let ln_u = u.ln();
        let ln_k = ln_bessel_k_seq(self.v_max, 2.0 * (self.beta * u).sqrt());
        let half_log_ratio = 0.5 * (self.ln_beta - ln_u);
        let n_max = self.ln_v.last().map_or(0, |(r, _)| *r) as i64;
        // G_n = Σ_q S_q J_{n-q+1}
        ln_g.clear();
        for n in 0..=n_max {
            let mut acc = f64::NEG_INFINITY;
            for (qq, &ls) in self.ln_s.iter().enumerate() {
                if ls == f64::NEG_INFINITY {
                    continue;
                }
                let nu = n - qq as i64 + 1;
                let ln_j = std::f64::consts::LN_2 + nu as f64 * half_log_ratio + ln_k[nu.unsigned_abs() as usize];
                acc = log_add(acc, ls + ln_j);
            }
            ln_g.push(acc);
        }
        buf.clear();
        let shift = -u * self.lambda8;
        for (r, row) in &self.ln_v {
            let base = (*r + 1) as f64 * alpha * ln_w + shift;
            for (n, &lv) in row.iter().enumerate() {
                buf.push(lv + base + ln_g[n]);
            }
        }
        sum_exp(buf)
    }

    fn success_probability(&self) -> Result<f64> {
        let mob = &self.net.mobility;
        let mut ln_g = Vec::new();
        let mut buf = Vec::new();
        let v = integrate_piecewise(
            |w| {
                if w <= 0.0 {
                    return 0.0;
                }
                let f = mob.distance_pdf(w);
                if f == 0.0 {
                    return 0.0;
                }
                self.at_distance(w, &mut ln_g, &mut buf) * f
            },
            &mob.breakpoints(),
            DISTANCE_TOL,
        )?;
        Ok(v.value)
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    crate::specfun::log_add_exp(a, b)
}

/// `Σ e^{x_i}` with a common shift and Neumaier compensation.
fn sum_exp(xs: &[f64]) -> f64 {
    let top = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return 0.0;
    }
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &x in xs {
        let t = (x - top).exp();
        let s = sum + t;
        comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
        sum = s;
    }
    (sum + comp) * top.exp()
}

/// Brute-force outage probability by nested quadrature over the exact hop
/// densities, written as
/// `F_Λud(λ8/λ9) + ∫ F_Λsu(λ6 (1 + λ7/y)) f_Λud((y + λ8)/λ9) / λ9 dy`
/// so that small outage values keep their relative precision.
pub fn op_numeric(q: &OutageQuery, net: &Network) -> Result<f64> {
    if q.beyond_ceiling() {
        return Ok(1.0);
    }
    if q.threshold == 0.0 {
        return Ok(0.0);
    }
    let (l6, l7, l8, l9) = (q.lambda6(), q.lambda7(), q.lambda8(), q.lambda9());
    let alpha = net.path_loss_exp;
    let mob = &net.mobility;
    let inner_tol = Tolerance::new(1e-300, 1e-10);
    let hop_pdf = |t: f64| -> f64 {
        // f_Λud(t) = E_W[ f_g(t W^α / η_u) W^α / η_u ]
        integrate_piecewise(
            |w| {
                let s = w.powf(alpha) / q.eta_u;
                terrestrial_power_pdf(t * s, &net.terrestrial) * s * mob.distance_pdf(w)
            },
            &mob.breakpoints(),
            inner_tol,
        )
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
    };
    let outer = |y: f64| {
        let f_su = sr_snr_cdf(l6 * (1.0 + l7 / y), &net.sr, q.eta_s);
        if f_su == 0.0 {
            return 0.0;
        }
        f_su * hop_pdf((y + l8) / l9) / l9
    };
    // the satellite cdf decays once y passes about λ6λ7/(η_s-scale), the
    // terrestrial density on the scale η_u / E[W^α]; split there
    let knee = (l6 * l7 * net.sr.decay() / q.eta_s).max(1e-12);
    let spread = q.eta_u * l9 / mob.distance_moment(alpha)?;
    let mut points = vec![0.0, knee.min(spread)];
    points.push(knee.max(spread));
    points.dedup();
    let outer_tol = Tolerance::new(1e-300, 1e-9);
    let mut total = integrate_piecewise(outer, &points, outer_tol)?.value;
    let last = *points.last().expect("non-empty");
    total += integrate_to_inf(outer, last, last.max(spread), outer_tol)?.value;
    if !total.is_finite() {
        return Err(Error::Numerical("inner quadrature failed".into()));
    }
    let head = terrestrial_snr_cdf(l8 / l9, net, q.eta_u)?;
    finish(head + total, q)
}

/// High-SNR outage probability
/// `[α_u λ8/(λ9 η_s) + Σ_r ℬ_r (𝒜 λ6)^{r+1}/(r+1) E[W^{(r+1)α}]]^M`,
/// with the Rician series reduced to its leading `r = 0` term.
pub fn op_asymptotic(q: &OutageQuery, net: &Network) -> Result<f64> {
    if q.beyond_ceiling() {
        return Ok(1.0);
    }
    let (l6, l8, l9) = (q.lambda6(), q.lambda8(), q.lambda9());
    let first = net.sr.alpha_u * l8 / (l9 * q.eta_s);
    let series = UnifiedSeries::asymptotic(&net.terrestrial, q.eta_u)?;
    let mut second = 0.0;
    for r in series.lambda4..=series.lambda5 {
        let k = (r + 1) as f64;
        let moment = net.mobility.distance_moment(k * net.path_loss_exp)?;
        second += (series.ln_coeff(r) + k * (series.a_scale * l6).ln() - k.ln()).exp() * moment;
    }
    Ok((first + second).powi(q.num_relays as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::db_to_linear;
    use crate::channel::sr_power_pdf;
    use crate::mobility::MobilityConfig;

    /// Single-relay outage by direct integration of the satellite-hop cdf
    /// against the terrestrial cdf on a grid: used only as a coarse check.
    fn op_single_relay_by_cdf(q: &OutageQuery, net: &Network) -> Result<f64> {
        let (l6, l7, l8, l9) = (q.lambda6(), q.lambda7(), q.lambda8(), q.lambda9());
        let pdf_su = |x: f64| sr_power_pdf(x / q.eta_s, &net.sr) / q.eta_s;
        // Pr[SNDR < γ] = Pr[X < λ8/λ9] + ∫_{λ8/λ9}^∞ F_Λud(λ6 (1 + λ7/(λ9 x - λ8))) f_X(x) dx
        let head = sr_snr_cdf(l8 / l9, &net.sr, q.eta_s);
        let x0 = l8 / l9;
        let body = integrate_to_inf(
            |x| {
                let y = l9 * x - l8;
                if y <= 0.0 {
                    return pdf_su(x);
                }
                terrestrial_snr_cdf(l6 * (1.0 + l7 / y), net, q.eta_u).unwrap_or(f64::NAN) * pdf_su(x)
            },
            x0,
            q.eta_s / net.sr.decay(),
            Tolerance::new(1e-300, 1e-8),
        )?;
        Ok(head + body.value)
    }

    fn reference_net(f: TerrestrialFading) -> Network {
        let mob = MobilityModel::new(MobilityConfig::reference()).unwrap();
        Network::new(SrFadingParams::heavy(), f, mob, 2.0).unwrap()
    }

    #[test]
    fn hardware_lambdas() {
        let hw = HardwareProfile::ideal();
        assert_eq!((hw.lambda1(), hw.lambda2(), hw.lambda3()), (0.0, 1.0, 1.0));
        let hw = HardwareProfile::symmetric(0.1).unwrap();
        assert!((hw.lambda1() - 0.0201).abs() < 1e-15);
        assert!(HardwareProfile::new(-0.1, 0.0).is_err());
    }

    #[test]
    fn ceiling_values() {
        let db = |k: f64| crate::linear_to_db(sndr_ceiling(&HardwareProfile::symmetric(k).unwrap()));
        assert!((db(0.1) - 16.968).abs() < 1e-3);
        assert!((db(0.3) - 7.2562).abs() < 1e-3);
        assert_eq!(sndr_ceiling(&HardwareProfile::ideal()), f64::INFINITY);
    }

    #[test]
    fn sndr_limits() {
        let hw = HardwareProfile::ideal();
        assert!((sndr(3.0, 5.0, &hw) - 15.0 / 9.0).abs() < 1e-15);
        let hw = HardwareProfile::symmetric(0.3).unwrap();
        let big = 1e200;
        assert!((sndr(f64::INFINITY, 5.0, &hw) - 5.0 / (hw.lambda1() * 5.0 + hw.lambda3())).abs() < 1e-15);
        assert!((sndr(big, big, &hw) - sndr_ceiling(&hw)).abs() < 1e-12);
        assert_eq!(sndr(0.0, 7.0, &hw), 0.0);
    }

    #[test]
    fn query_lambdas_satisfy_the_outage_boundary() {
        // SNDR(x, y) = γ on the curve x = λ6 (1 + λ7 / (λ9 y - λ8))
        let hw = HardwareProfile::new(0.2, 0.3).unwrap();
        let q = OutageQuery::symmetric(1, 1.7, 10.0, hw).unwrap();
        for &y_ud in &[3.0, 10.0, 100.0] {
            let t = q.lambda9() * y_ud - q.lambda8();
            let x_su = q.lambda6() * (1.0 + q.lambda7() / t);
            assert!((sndr(x_su, y_ud, &hw) - 1.7).abs() < 1e-12);
        }
    }

    #[test]
    fn beyond_ceiling_is_certain_outage() {
        let net = reference_net(TerrestrialFading::nakagami(1.0, 1.0).unwrap());
        let hw = HardwareProfile::symmetric(0.3).unwrap();
        let q = OutageQuery::symmetric(2, sndr_ceiling(&hw) * (1.0 + 1e-6), 1e3, hw).unwrap();
        assert_eq!(op_exact(&q, &net).unwrap(), 1.0);
        assert_eq!(op_numeric(&q, &net).unwrap(), 1.0);
        assert_eq!(op_asymptotic(&q, &net).unwrap(), 1.0);
    }

    #[test]
    fn zero_threshold_never_outage() {
        let net = reference_net(TerrestrialFading::nakagami(1.0, 1.0).unwrap());
        let q = OutageQuery::symmetric(1, 0.0, 10.0, HardwareProfile::ideal()).unwrap();
        assert_eq!(op_exact(&q, &net).unwrap(), 0.0);
        assert_eq!(op_numeric(&q, &net).unwrap(), 0.0);
    }

    #[test]
    fn exact_matches_numeric_nakagami() {
        for m in [1.0, 2.0] {
            let net = reference_net(TerrestrialFading::nakagami(m, 1.0).unwrap());
            for &eta_db in &[0.0, 10.0, 20.0] {
                let q = OutageQuery::symmetric(1, 1.0, db_to_linear(eta_db), HardwareProfile::symmetric(0.3).unwrap())
                    .unwrap();
                let e = op_exact(&q, &net).unwrap();
                let n = op_numeric(&q, &net).unwrap();
                assert!((e / n - 1.0).abs() < 1e-6, "m={m} eta={eta_db}: {e} vs {n}");
            }
        }
    }

    #[test]
    fn numeric_matches_cdf_route() {
        let net = reference_net(TerrestrialFading::rician(2.0, 1.0).unwrap());
        let q = OutageQuery::symmetric(1, 1.0, 10.0, HardwareProfile::symmetric(0.1).unwrap()).unwrap();
        let a = op_numeric(&q, &net).unwrap();
        let b = op_single_relay_by_cdf(&q, &net).unwrap();
        assert!((a / b - 1.0).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn series_cdf_tracks_exact_cdf() {
        let f = TerrestrialFading::rician(2.0, 1.0).unwrap();
        let net = reference_net(f);
        let eta = 100.0;
        let a = f.series_scale(eta);
        for &x in &[0.01, 0.1, 0.5, 2.0, 8.0] {
            let s = unified_series(&f, eta, rician_b_at_edge(a, x, &net.mobility, 2.0)).unwrap();
            let exact = terrestrial_snr_cdf(x, &net, eta).unwrap();
            let approx = terrestrial_snr_cdf_from_series(x, &s, &net).unwrap();
            assert!((exact - approx).abs() < 1e-2, "x={x}: {exact} vs {approx}");
        }
    }
}
