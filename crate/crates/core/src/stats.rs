//! Histogram comparisons used to validate samplers against analytic laws.

use crate::quad::{integrate, Tolerance};

/// Equal-width histogram on `[lo, hi]`; samples outside are counted in
/// `outside` so that they still contribute to the L1 distance.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub outside: u64,
    pub total: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(hi > lo && bins > 0);
        Histogram {
            lo,
            hi,
            counts: vec![0; bins],
            outside: 0,
            total: 0,
        }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + i as f64 * w, self.lo + (i + 1) as f64 * w)
    }

    pub fn add(&mut self, x: f64) {
        self.total += 1;
        if !(x >= self.lo && x <= self.hi) {
            self.outside += 1;
            return;
        }
        let i = (((x - self.lo) / self.width()) as usize).min(self.bins() - 1);
        self.counts[i] += 1;
    }

    pub fn extend<I: IntoIterator<Item = f64>>(&mut self, xs: I) {
        for x in xs {
            self.add(x);
        }
    }

    /// Empirical probability of bin `i`.
    pub fn fraction(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.total.max(1) as f64
    }

    /// Probability mass of every bin under `pdf`.
    pub fn analytic_masses<F: Fn(f64) -> f64>(&self, pdf: F) -> Vec<f64> {
        (0..self.bins())
            .map(|i| {
                let (a, b) = self.edges(i);
                integrate(&pdf, a, b, Tolerance::new(1e-13, 1e-10)).map(|r| r.value).unwrap_or(f64::NAN)
            })
            .collect()
    }

    /// `Σ |p̂_i - p_i|` plus the out-of-range fraction.
    pub fn l1_against_pdf<F: Fn(f64) -> f64>(&self, pdf: F) -> f64 {
        let masses = self.analytic_masses(pdf);
        self.l1_against_masses(&masses)
    }

    pub fn l1_against_masses(&self, masses: &[f64]) -> f64 {
        let inside: f64 = masses.iter().enumerate().map(|(i, p)| (self.fraction(i) - p).abs()).sum();
        inside + self.outside as f64 / self.total.max(1) as f64
    }

    /// L1 distance between two histograms with identical binning.
    pub fn l1_against(&self, other: &Histogram) -> f64 {
        assert_eq!(self.bins(), other.bins());
        let inside: f64 = (0..self.bins()).map(|i| (self.fraction(i) - other.fraction(i)).abs()).sum();
        inside
            + (self.outside as f64 / self.total.max(1) as f64 - other.outside as f64 / other.total.max(1) as f64)
                .abs()
    }
}

/// Sample mean and (unbiased) variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_masses() {
        let mut h = Histogram::new(0.0, 1.0, 4);
        h.extend([0.1, 0.3, 0.6, 0.9, 1.5]);
        assert_eq!(h.counts, vec![1, 1, 1, 1]);
        assert_eq!(h.outside, 1);
        let l1 = h.l1_against_pdf(|_| 1.0);
        assert!((l1 - (4.0 * 0.05 + 0.2)).abs() < 1e-12);
    }
}
