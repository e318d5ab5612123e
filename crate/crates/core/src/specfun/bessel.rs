//! Integer-order Bessel functions `J_n`, `I_n` and `K_n` of real argument.
//!
//! `K_n` is also exposed in log form so that high orders at small
//! arguments (which overflow) and large arguments (which underflow) stay
//! representable.

use super::gamma::EULER_GAMMA;
use crate::error::{Error, Result};

/// Below this argument `J_n` uses its ascending series.
const J_SERIES_MAX_X: f64 = 1.0;
/// Below this argument `I_0` uses its ascending series; above it the
/// Hankel asymptotic expansion.
const I0_SERIES_MAX_X: f64 = 25.0;
/// At or below this argument `K_0, K_1` use their logarithmic series;
/// above it the Steed continued fraction.
const K_SERIES_MAX_X: f64 = 2.0;

const RESCALE_BIG: f64 = 1e250;
const RESCALE_SMALL: f64 = 1e-250;

/// Bessel function of the first kind `J_n(x)`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    if x < 0.0 {
        let v = bessel_j(n, -x);
        return if n.is_multiple_of(2) { v } else { -v };
    }
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= J_SERIES_MAX_X {
        return bessel_j_series(n, x);
    }
    bessel_j_miller(n, x)
}

fn bessel_j_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = (n as f64 * half.ln() - super::gamma::ln_factorial(n)).exp();
    let mut sum = term;
    let q = -half * half;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

// Backward recurrence from an order well past max(n, x), normalised with
// J_0 + 2 Σ J_{2k} = 1.
fn bessel_j_miller(n: u32, x: f64) -> f64 {
    let top = (n as f64).max(x);
    let mut start = (top + 20.0 + (60.0 * top).sqrt()).ceil() as u32;
    start += start % 2;
    let two_over_x = 2.0 / x;
    let mut j_next = 0.0;
    let mut j_cur = 1e-30;
    let mut norm = 0.0;
    let mut answer = 0.0;
    for k in (1..=start).rev() {
        let j_prev = k as f64 * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        if j_cur.abs() > RESCALE_BIG {
            j_cur *= RESCALE_SMALL;
            j_next *= RESCALE_SMALL;
            norm *= RESCALE_SMALL;
            answer *= RESCALE_SMALL;
        }
        // j_cur now holds order k-1
        let order = k - 1;
        if order == n {
            answer = j_cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * j_cur;
        }
    }
    norm += j_cur;
    answer / norm
}

/// Modified Bessel function `I_0(x)`.
pub fn bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= I0_SERIES_MAX_X {
        i0_series(x)
    } else {
        i0_asymptotic_scaled(x) * x.exp()
    }
}

/// Exponentially scaled `e^{-x} I_0(x)` for `x >= 0`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= I0_SERIES_MAX_X {
        i0_series(x) * (-x).exp()
    } else {
        i0_asymptotic_scaled(x)
    }
}

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

fn i0_asymptotic_scaled(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (8.0 * x * k as f64);
        if next > term {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// Scaled sequence `e^{-x} I_k(x)`, `k = 0..=n_max`, for `x >= 0`, by
/// backward recurrence normalised with `I_0 + 2 Σ I_k = e^x`.
pub fn bessel_i_scaled_seq(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = n_max + 30 + (12.0 * x.sqrt()).ceil() as usize;
    let two_over_x = 2.0 / x;
    let mut i_next = 0.0;
    let mut i_cur = 1e-30;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let i_prev = k as f64 * two_over_x * i_cur + i_next;
        i_next = i_cur;
        i_cur = i_prev;
        if i_cur > RESCALE_BIG {
            i_cur *= RESCALE_SMALL;
            i_next *= RESCALE_SMALL;
            norm *= RESCALE_SMALL;
            for v in out.iter_mut() {
                *v *= RESCALE_SMALL;
            }
        }
        let order = k - 1;
        if order <= n_max {
            out[order] = i_cur;
        }
        if order > 0 {
            norm += 2.0 * i_cur;
        }
    }
    norm += i_cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// Returns `(e^x K_0(x), e^x K_1(x))` for `x > 0`.
fn k01_scaled(x: f64) -> (f64, f64) {
    if x <= K_SERIES_MAX_X {
        let (k0, k1) = k01_series(x);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else {
        k01_steed(x)
    }
}

fn k01_series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let ln_half = (0.5 * x).ln();
    // K0 = -(ln(x/2) + γ) I0 + Σ_{k≥1} H_k q^k / (k!)²
    let mut i0 = 1.0;
    let mut t0 = 1.0;
    let mut h = 0.0;
    let mut s0 = 0.0;
    // K1 = 1/x + ln(x/2) I1 - (x/4) Σ_{k≥0} (ψ(k+1) + ψ(k+2)) q^k / (k! (k+1)!)
    let mut t1 = 1.0;
    let mut i1 = 0.5 * x;
    let mut psi_k1 = -EULER_GAMMA;
    let mut psi_k2 = 1.0 - EULER_GAMMA;
    let mut s1 = psi_k1 + psi_k2;
    for k in 1..100 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        h += 1.0 / kf;
        i0 += t0;
        s0 += h * t0;
        t1 *= q / (kf * (kf + 1.0));
        psi_k1 += 1.0 / kf;
        psi_k2 += 1.0 / (kf + 1.0);
        i1 += 0.5 * x * t1;
        s1 += (psi_k1 + psi_k2) * t1;
        if t0 < 1e-18 && t1 < 1e-18 {
            break;
        }
    }
    let k0 = -(ln_half + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + ln_half * i1 - 0.25 * x * s1;
    (k0, k1)
}

// Steed's continued fraction (Temme's CF2) at order zero.
fn k01_steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// Modified Bessel function of the second kind `K_v(x)`, integer order.
pub fn bessel_k(v: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::invalid("x", format!("K_v is singular for x <= 0, got {x}")));
    }
    Ok(ln_bessel_k_seq(v as usize, x)[v as usize].exp())
}

/// `ln K_v(x)` for `v = 0..=v_max`, `x > 0`.
///
/// Forward recurrence runs on the ratios `K_{v+1}/K_v`, which is stable
/// and never overflows.
pub fn ln_bessel_k_seq(v_max: usize, x: f64) -> Vec<f64> {
    debug_assert!(x > 0.0);
    let mut out = Vec::with_capacity(v_max + 1);
    let (k0s, k1s) = k01_scaled(x);
    out.push(k0s.ln() - x);
    if v_max == 0 {
        return out;
    }
    out.push(k1s.ln() - x);
    let mut ratio = k1s / k0s;
    let two_over_x = 2.0 / x;
    for v in 1..v_max {
        // K_{v+1}/K_v = K_{v-1}/K_v + 2v/x
        ratio = 1.0 / ratio + v as f64 * two_over_x;
        let last = out[v];
        out.push(last + ratio.ln());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_small_argument_limits() {
        assert_eq!(bessel_j(1, 0.0), 0.0);
        assert_eq!(bessel_j(0, 0.0), 1.0);
        for &x in &[1e-3, 1e-4] {
            let r = bessel_j(3, x) / (x * x * x);
            assert!((r - 1.0 / 48.0).abs() < 1e-6);
        }
        assert!((bessel_j(1, -2.0) + bessel_j(1, 2.0)).abs() < 1e-16);
    }

    #[test]
    fn j_series_and_miller_agree_at_switch() {
        for n in 0..6 {
            let a = bessel_j_series(n, 1.0);
            let b = bessel_j_miller(n, 1.0);
            assert!((a - b).abs() < 1e-15 * a.abs().max(1e-3), "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn j_large_argument() {
        // J_0(100) = 0.01998585030422312...
        assert!((bessel_j(0, 100.0) - 0.019_985_850_304_223_12).abs() < 1e-13);
    }

    #[test]
    fn i0_examples() {
        assert_eq!(bessel_i0(0.0), 1.0);
        let mut prev = 1.0;
        for i in 1..200 {
            let v = bessel_i0(i as f64 * 0.25);
            assert!(v >= prev);
            prev = v;
        }
        let a = i0_series(I0_SERIES_MAX_X) * (-I0_SERIES_MAX_X).exp();
        let b = i0_asymptotic_scaled(I0_SERIES_MAX_X);
        assert!((a - b).abs() < 1e-14 * a);
    }

    #[test]
    fn scaled_i_sequence_matches_i0() {
        for &x in &[1e-6, 0.3, 2.0, 17.0, 400.0] {
            let seq = bessel_i_scaled_seq(4, x);
            let direct = bessel_i0_scaled(x);
            assert!((seq[0] - direct).abs() < 1e-13 * direct, "x={x}");
        }
        assert_eq!(bessel_i_scaled_seq(3, 0.0), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn k_series_and_fraction_agree_at_switch() {
        let (a0, a1) = k01_series(K_SERIES_MAX_X);
        let e = K_SERIES_MAX_X.exp();
        let (b0, b1) = k01_steed(K_SERIES_MAX_X);
        assert!((a0 * e - b0).abs() < 1e-13 * b0);
        assert!((a1 * e - b1).abs() < 1e-13 * b1);
    }

    #[test]
    fn k_rejects_non_positive_argument() {
        assert!(bessel_k(1, 0.0).is_err());
        assert!(bessel_k(0, -1.0).is_err());
    }

    #[test]
    fn k_not_overflowing_in_log_form() {
        let seq = ln_bessel_k_seq(200, 1e-3);
        assert!(seq.iter().all(|v| v.is_finite()));
        let seq = ln_bessel_k_seq(5, 2000.0);
        assert!(seq.iter().all(|v| v.is_finite() && *v < -1999.0));
    }
}
