//! Gamma-family functions: log-gamma, Pochhammer symbol, regularized
//! incomplete gamma, and the integer-order upper incomplete gamma.

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// Factorials are exact in f64 up to 22!; the table goes to 170! (the last
// finite one) so ln_factorial is a lookup in that range.
const FACTORIAL_TABLE_LEN: usize = 171;

fn factorial_table() -> &'static [f64; FACTORIAL_TABLE_LEN] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; FACTORIAL_TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; FACTORIAL_TABLE_LEN];
        for k in 1..FACTORIAL_TABLE_LEN {
            t[k] = t[k - 1] * k as f64;
        }
        t
    })
}

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    if x.fract() == 0.0 && x <= FACTORIAL_TABLE_LEN as f64 {
        return factorial_table()[x as usize - 1].ln();
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `Γ(x)` for `x > 0`; exact for integer arguments up to 171.
pub fn gamma(x: f64) -> f64 {
    if x.fract() == 0.0 && x >= 1.0 && x <= FACTORIAL_TABLE_LEN as f64 {
        return factorial_table()[x as usize - 1];
    }
    ln_gamma(x).exp()
}

/// `n!` as a float (infinite beyond 170!).
pub fn factorial(n: u32) -> f64 {
    factorial_table().get(n as usize).copied().unwrap_or(f64::INFINITY)
}

/// `ln n!`.
pub fn ln_factorial(n: u32) -> f64 {
    match factorial_table().get(n as usize) {
        Some(f) => f.ln(),
        None => ln_gamma(n as f64 + 1.0),
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a + j as f64))
}

const GAMMA_INC_MAX_ITER: usize = 10_000;

fn check_gamma_inc_args(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::invalid("s", format!("shape must be positive and finite, got {s}")));
    }
    if !(x >= 0.0) {
        return Err(Error::invalid("x", format!("argument must be non-negative, got {x}")));
    }
    Ok(())
}

/// Returns `(P(s,x), Q(s,x))`. The series is used below `x = s + 1`, the
/// Lentz continued fraction above, and the other tail by complement.
fn gamma_inc_pair(s: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let log_prefix = s * x.ln() - x - ln_gamma(s);
    if x < s + 1.0 {
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut ap = s;
        for _ in 0..GAMMA_INC_MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        let p = (log_prefix.exp() * sum).min(1.0);
        (p, 1.0 - p)
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - s;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..GAMMA_INC_MAX_ITER {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        let q = (log_prefix.exp() * h).min(1.0);
        (1.0 - q, q)
    }
}

/// Regularized lower incomplete gamma `P(s, x) = γ(s, x) / Γ(s)`.
pub fn regularized_lower_gamma(s: f64, x: f64) -> Result<f64> {
    check_gamma_inc_args(s, x)?;
    Ok(gamma_inc_pair(s, x).0)
}

/// Regularized upper incomplete gamma `Q(s, x) = Γ(s, x) / Γ(s)`.
pub fn regularized_upper_gamma(s: f64, x: f64) -> Result<f64> {
    check_gamma_inc_args(s, x)?;
    Ok(gamma_inc_pair(s, x).1)
}

/// `ln Q(n+1, x)` for integer `n`, via the finite exponential sum
/// `Q(n+1, x) = e^{-x} Σ_{k=0}^{n} x^k / k!`, accumulated in log space.
pub fn ln_regularized_upper_gamma_int(n: u32, x: f64) -> f64 {
    let mut out = f64::NEG_INFINITY;
    for_each_ln_upper_gamma_int(n, x, |k, v| {
        if k == n {
            out = v;
        }
    });
    out
}

/// Calls `visit(k, ln Q(k+1, x))` for `k = 0..=n` in one pass.
pub fn for_each_ln_upper_gamma_int<F: FnMut(u32, f64)>(n: u32, x: f64, mut visit: F) {
    if x == 0.0 {
        for k in 0..=n {
            visit(k, 0.0);
        }
        return;
    }
    let ln_x = x.ln();
    let mut acc = f64::NEG_INFINITY;
    for k in 0..=n {
        let term = -x + k as f64 * ln_x - ln_factorial(k);
        acc = log_add_exp(acc, term);
        visit(k, acc.min(0.0));
    }
}

/// Upper incomplete gamma `Γ(n+1, x)` for integer `n`.
pub fn upper_gamma_int(n: u32, x: f64) -> f64 {
    (ln_factorial(n) + ln_regularized_upper_gamma_int(n, x)).exp()
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}
