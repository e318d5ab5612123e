//! Histogram check of the mobility samplers against the stationary laws.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use hstn_core::mobility::MobilityModel;
use hstn_core::stats::Histogram;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

pub const MOBILITY_SCHEMA: &str = "# hstn-mobility-csv v1";

/// Epoch length of the trajectory run (s).
pub const TRAJECTORY_DT: f64 = 1.0;
/// Epochs discarded before recording.
pub const BURN_IN: usize = 1_000;
pub const ALTITUDE_BINS: usize = 40;
pub const HORIZONTAL_BINS: usize = 40;
pub const DISTANCE_BINS: usize = 100;
/// L1 bound for a 10⁶-sample histogram against its analytic law.
pub const L1_THRESHOLD: f64 = 0.05;

pub const QUANTITIES: [&str; 3] = ["altitude", "horizontal", "distance"];

#[derive(Debug, Clone)]
pub struct SourceCheck {
    pub source: &'static str,
    /// Altitude, horizontal offset and 3D distance histograms.
    pub histograms: [Histogram; 3],
    pub analytic: [Vec<f64>; 3],
    pub l1: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct MobilityCheck {
    pub samples: usize,
    pub snapshot: SourceCheck,
    /// Absent when the stay probability is 0 or 1, where no dwell range
    /// realises it.
    pub trajectory: Option<SourceCheck>,
}

fn empty_histograms(m: &MobilityModel) -> [Histogram; 3] {
    let c = m.config();
    [
        Histogram::new(0.0, c.height_h, ALTITUDE_BINS),
        Histogram::new(0.0, c.radius_r, HORIZONTAL_BINS),
        Histogram::new(0.0, m.max_distance(), DISTANCE_BINS),
    ]
}

fn finish(source: &'static str, m: &MobilityModel, histograms: [Histogram; 3]) -> SourceCheck {
    let analytic = [
        histograms[0].analytic_masses(|x| m.altitude_pdf(x)),
        histograms[1].analytic_masses(|z| m.horizontal_pdf(z)),
        histograms[2].analytic_masses(|w| m.distance_pdf(w)),
    ];
    let l1 = [0, 1, 2].map(|i| histograms[i].l1_against_masses(&analytic[i]));
    SourceCheck {
        source,
        histograms,
        analytic,
        l1,
    }
}

/// Draws `samples` snapshot positions and, when `dynamics` holds, records
/// `samples` epochs of one trajectory.
pub fn run_mobility_check(m: &MobilityModel, samples: usize, seed: u64, dynamics: bool) -> CliResult<MobilityCheck> {
    if samples == 0 {
        return Err(CliError::Config("samples must be at least 1".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut snap = empty_histograms(m);
    for _ in 0..samples {
        let h = m.sample_altitude(&mut rng);
        let [x, y] = m.sample_ground_offset(&mut rng);
        let z = x.hypot(y);
        snap[0].add(h);
        snap[1].add(z);
        snap[2].add(h.hypot(z));
    }
    let snapshot = finish("snapshot", m, snap);

    let trajectory = dynamics.then(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let start = m.initial_state(&mut rng);
        let start = m.simulate(start, TRAJECTORY_DT, BURN_IN, &mut rng, |_, _| {});
        let mut hist = empty_histograms(m);
        m.simulate(start, TRAJECTORY_DT, samples, &mut rng, |_, s| {
            hist[0].add(s.altitude);
            hist[1].add(s.ground_distance());
            hist[2].add(s.distance());
        });
        finish("trajectory", m, hist)
    });
    Ok(MobilityCheck {
        samples,
        snapshot,
        trajectory,
    })
}

impl MobilityCheck {
    fn sources(&self) -> impl Iterator<Item = &SourceCheck> {
        std::iter::once(&self.snapshot).chain(self.trajectory.as_ref())
    }

    /// True when every L1 distance is below [`L1_THRESHOLD`].
    pub fn passes(&self) -> bool {
        self.sources().all(|s| s.l1.iter().all(|&d| d < L1_THRESHOLD))
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in self.sources() {
            let _ = write!(out, "{} L1:", s.source);
            for (q, d) in QUANTITIES.iter().zip(s.l1) {
                let _ = write!(out, " {q}={d:.4}");
            }
            out.push_str("; ");
        }
        if self.trajectory.is_none() {
            out.push_str("trajectory skipped (stay probability at 0 or 1); ");
        }
        let _ = write!(
            out,
            "{} samples, threshold {L1_THRESHOLD}: {}",
            self.samples,
            if self.passes() { "all within" } else { "EXCEEDED" }
        );
        out
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["quantity", "source", "bin_lo", "bin_hi", "empirical", "analytic"]).expect("in-memory write");
        for s in self.sources() {
            for (qi, q) in QUANTITIES.iter().enumerate() {
                let h = &s.histograms[qi];
                for b in 0..h.bins() {
                    let (lo, hi) = h.edges(b);
                    w.write_record([
                        q.to_string(),
                        s.source.to_string(),
                        format!("{lo}"),
                        format!("{hi}"),
                        format!("{:e}", h.fraction(b)),
                        format!("{:e}", s.analytic[qi][b]),
                    ])
                    .expect("in-memory write");
                }
            }
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8");
        format!("{MOBILITY_SCHEMA}\n{body}")
    }

    pub fn write_csv(&self, path: &Path) -> CliResult<()> {
        let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        f.write_all(self.to_csv_string().as_bytes()).map_err(|e| CliError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::MobilitySection;

    #[test]
    fn zero_samples_rejected() {
        let m = MobilitySection::reference().model().unwrap();
        assert!(run_mobility_check(&m, 0, 1, true).is_err());
    }

    #[test]
    fn always_dwelling_altitude_is_flat() {
        let mut sec = MobilitySection::reference();
        sec.stay_probability = Some(1.0);
        let m = sec.model().unwrap();
        let n = 200_000;
        let c = run_mobility_check(&m, n, 3, sec.has_dynamics()).unwrap();
        assert!(c.trajectory.is_none());
        let p = 1.0 / ALTITUDE_BINS as f64;
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        for b in 0..ALTITUDE_BINS {
            assert!((c.snapshot.histograms[0].fraction(b) - p).abs() < 4.5 * sd, "bin {b}");
        }
        assert!(c.summary().contains("skipped"));
    }

    #[test]
    fn csv_has_one_row_per_bin() {
        let m = MobilitySection::reference().model().unwrap();
        let c = run_mobility_check(&m, 1000, 1, true).unwrap();
        let text = c.to_csv_string();
        let bins = ALTITUDE_BINS + HORIZONTAL_BINS + DISTANCE_BINS;
        assert_eq!(text.lines().count(), 2 + 2 * bins);
    }
}
