//! Mixed-mobility model for UAV relays in a cylinder of height `H` and
//! radius `R` centred on the ground user.
//!
//! Vertically a UAV follows random-waypoint legs between uniform altitudes
//! and dwells at each waypoint; while dwelling it random-walks in the
//! horizontal plane with per-epoch probability `p_s`. The stationary
//! altitude law mixes a uniform (dwell) and a `6x(H-x)/H³` (moving)
//! component with weight `p_s`, the ground offset is uniform on the disc,
//! and `W = sqrt(h² + z²)` has the three-piece density in
//! [`MobilityModel::distance_pdf`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_piecewise, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilityConfig {
    /// Cylinder height `H` (m).
    pub height_h: f64,
    /// Cylinder radius `R` (m).
    pub radius_r: f64,
    /// Horizontal walk range `R'` (m).
    pub walk_range: f64,
    /// Vertical speed range (m/s).
    pub v_vert_min: f64,
    pub v_vert_max: f64,
    /// Dwell time range (s).
    pub dwell_min: f64,
    pub dwell_max: f64,
}

impl MobilityConfig {
    /// UAV geometry of the reference scenario (H = 40 m, R = 80 m,
    /// vertical speed in [0.1, 30] m/s, R' = 40 m) with the dwell range
    /// set for `p_s = 0.5`.
    pub fn reference() -> Self {
        let base = MobilityConfig {
            height_h: 40.0,
            radius_r: 80.0,
            walk_range: 40.0,
            v_vert_min: 0.1,
            v_vert_max: 30.0,
            dwell_min: 1.0,
            dwell_max: 1.0,
        };
        base.with_stay_probability(0.5).expect("reference parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be positive and finite, got {v}")))
            }
        };
        positive("height_h", self.height_h)?;
        positive("radius_r", self.radius_r)?;
        positive("walk_range", self.walk_range)?;
        positive("v_vert_min", self.v_vert_min)?;
        if !(self.v_vert_max > self.v_vert_min) || !self.v_vert_max.is_finite() {
            return Err(Error::invalid(
                "v_vert_max",
                format!(
                    "need v_vert_min < v_vert_max (mean movement time is singular at equality), got [{}, {}]",
                    self.v_vert_min, self.v_vert_max
                ),
            ));
        }
        if !(self.dwell_min >= 0.0) || !(self.dwell_max >= self.dwell_min) || !self.dwell_max.is_finite() {
            return Err(Error::invalid(
                "dwell_max",
                format!("need 0 <= dwell_min <= dwell_max, got [{}, {}]", self.dwell_min, self.dwell_max),
            ));
        }
        Ok(())
    }

    /// `E[T_m] = ln(v_max/v_min)/(v_max - v_min) · H/3`.
    pub fn mean_move_time(&self) -> f64 {
        (self.v_vert_max / self.v_vert_min).ln() / (self.v_vert_max - self.v_vert_min) * self.height_h / 3.0
    }

    pub fn mean_dwell_time(&self) -> f64 {
        0.5 * (self.dwell_min + self.dwell_max)
    }

    /// Replaces the dwell range by `[E/2, 3E/2]`, with `E` the mean dwell
    /// time that gives stay probability `ps` in `(0, 1)`.
    pub fn with_stay_probability(mut self, ps: f64) -> Result<Self> {
        if !(ps > 0.0 && ps < 1.0) {
            return Err(Error::invalid("stay_probability", format!("must lie in (0, 1), got {ps}")));
        }
        self.dwell_min = 1.0;
        self.dwell_max = 1.0;
        self.validate()?;
        let mean = ps / (1.0 - ps) * self.mean_move_time();
        self.dwell_min = 0.5 * mean;
        self.dwell_max = 1.5 * mean;
        Ok(self)
    }
}

/// `p_s = E[T_s] / (E[T_s] + E[T_m])`.
pub fn stay_probability(cfg: &MobilityConfig) -> Result<f64> {
    cfg.validate()?;
    let ts = cfg.mean_dwell_time();
    let tm = cfg.mean_move_time();
    if ts + tm == 0.0 {
        return Err(Error::invalid("dwell_max", "zero dwell and movement time"));
    }
    Ok(ts / (ts + tm))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    Dwelling { remaining: f64 },
    Climbing { target_altitude: f64, speed: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavState {
    pub altitude: f64,
    pub ground_offset: [f64; 2],
    pub phase: Phase,
}

impl UavState {
    pub fn ground_distance(&self) -> f64 {
        self.ground_offset[0].hypot(self.ground_offset[1])
    }

    pub fn distance(&self) -> f64 {
        self.altitude.hypot(self.ground_distance())
    }
}

/// A validated mobility configuration together with its stay probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityModel {
    cfg: MobilityConfig,
    stay_prob: f64,
}

impl MobilityModel {
    /// Derives `p_s` from the dwell and speed ranges. Rejects `H > R`, for
    /// which the piecewise distance density does not apply.
    pub fn new(cfg: MobilityConfig) -> Result<Self> {
        let stay_prob = stay_probability(&cfg)?;
        Self::build(cfg, stay_prob)
    }

    /// Uses `ps` in `[0, 1]` for the stationary laws instead of the value
    /// implied by the dwell range. The trajectory simulator still uses `ps`
    /// for its horizontal move decisions.
    pub fn with_stay_probability(cfg: MobilityConfig, ps: f64) -> Result<Self> {
        cfg.validate()?;
        if !(0.0..=1.0).contains(&ps) {
            return Err(Error::invalid("stay_probability", format!("must lie in [0, 1], got {ps}")));
        }
        Self::build(cfg, ps)
    }

    fn build(cfg: MobilityConfig, stay_prob: f64) -> Result<Self> {
        if cfg.height_h > cfg.radius_r {
            return Err(Error::invalid(
                "height_h",
                format!("distance law needs H <= R, got H = {} and R = {}", cfg.height_h, cfg.radius_r),
            ));
        }
        Ok(MobilityModel { cfg, stay_prob })
    }

    pub fn config(&self) -> &MobilityConfig {
        &self.cfg
    }

    pub fn stay_probability(&self) -> f64 {
        self.stay_prob
    }

    /// `sqrt(R² + H²)`, the upper end of the distance support.
    pub fn max_distance(&self) -> f64 {
        self.cfg.radius_r.hypot(self.cfg.height_h)
    }

    /// Kinks of the distance density: `[0, H, R, sqrt(R² + H²)]`.
    pub fn breakpoints(&self) -> [f64; 4] {
        [0.0, self.cfg.height_h, self.cfg.radius_r, self.max_distance()]
    }

    pub fn altitude_pdf(&self, x: f64) -> f64 {
        let h = self.cfg.height_h;
        if !(0.0..=h).contains(&x) {
            return 0.0;
        }
        self.stay_prob / h + (1.0 - self.stay_prob) * mobile_altitude_pdf(x, h)
    }

    pub fn horizontal_pdf(&self, z: f64) -> f64 {
        let r = self.cfg.radius_r;
        if !(0.0..=r).contains(&z) {
            return 0.0;
        }
        2.0 * z / (r * r)
    }

    /// Distance law for a dwelling UAV (uniform altitude).
    pub fn static_distance_pdf(&self, w: f64) -> f64 {
        let (h, r) = (self.cfg.height_h, self.cfg.radius_r);
        let r2 = r * r;
        if w < 0.0 || w > self.max_distance() {
            0.0
        } else if w < h {
            2.0 * w * w / (r2 * h)
        } else if w < r {
            2.0 * w / r2
        } else {
            let s = (w * w - r2).max(0.0).sqrt();
            2.0 * w / r2 - 2.0 * w * s / (r2 * h)
        }
    }

    /// Distance law for a UAV on a vertical leg.
    pub fn mobile_distance_pdf(&self, w: f64) -> f64 {
        let (h, r) = (self.cfg.height_h, self.cfg.radius_r);
        let r2 = r * r;
        if w < 0.0 || w > self.max_distance() {
            0.0
        } else if w < h {
            6.0 * w.powi(3) / (r2 * h * h) - 4.0 * w.powi(4) / (r2 * h.powi(3))
        } else if w < r {
            2.0 * w / r2
        } else {
            let d = (w * w - r2).max(0.0);
            2.0 * w / r2 - 6.0 * w * d / (r2 * h * h) + 4.0 * w * d.powf(1.5) / (r2 * h.powi(3))
        }
    }

    pub fn distance_pdf(&self, w: f64) -> f64 {
        self.stay_prob * self.static_distance_pdf(w) + (1.0 - self.stay_prob) * self.mobile_distance_pdf(w)
    }

    /// `∫ g(w) f_W(w) dw` over the distance support, split at the kinks.
    pub fn expect<G: FnMut(f64) -> f64>(&self, mut g: G, tol: Tolerance) -> Result<f64> {
        let pts = self.breakpoints();
        integrate_piecewise(|w| g(w) * self.distance_pdf(w), &pts, tol).map(|r| r.value)
    }

    /// `E[W^k]`.
    pub fn distance_moment(&self, k: f64) -> Result<f64> {
        self.expect(|w| w.powf(k), Tolerance::new(0.0, 1e-13))
    }

    /// Altitude from the stationary mixture.
    pub fn sample_altitude<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let h = self.cfg.height_h;
        let pick: f64 = rng.random();
        let u: f64 = rng.random();
        if pick < self.stay_prob {
            u * h
        } else {
            h * invert_smoothstep(u)
        }
    }

    /// Ground offset uniform on the disc of radius `R`.
    pub fn sample_ground_offset<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        uniform_in_disc(self.cfg.radius_r, rng)
    }

    /// Snapshot draw of the UAV-to-user distance.
    pub fn sample_distance<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let h = self.sample_altitude(rng);
        let z: f64 = self.cfg.radius_r * rng.random::<f64>().sqrt();
        h.hypot(z)
    }

    /// A state drawn from the stationary laws, to shorten burn-in.
    pub fn initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> UavState {
        let altitude = self.sample_altitude(rng);
        let ground_offset = self.sample_ground_offset(rng);
        let remaining = self.draw_dwell(rng) * rng.random::<f64>();
        UavState {
            altitude,
            ground_offset,
            phase: Phase::Dwelling { remaining },
        }
    }

    fn draw_dwell<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let c = &self.cfg;
        c.dwell_min + (c.dwell_max - c.dwell_min) * rng.random::<f64>()
    }

    /// Advances a UAV by `dt` seconds.
    ///
    /// A dwelling UAV takes one horizontal step with probability `p_s` at
    /// the start of the epoch; proposals leaving the disc are rejected and
    /// the UAV stays put. Phase changes inside the epoch carry the leftover
    /// time, so dwell and leg durations are not quantised to `dt`.
    pub fn trajectory_step<R: Rng + ?Sized>(&self, state: &UavState, dt: f64, rng: &mut R) -> UavState {
        let c = &self.cfg;
        let mut s = *state;
        if let Phase::Dwelling { .. } = s.phase {
            if rng.random::<f64>() < self.stay_prob {
                let step = uniform_in_disc(c.walk_range, rng);
                let next = [s.ground_offset[0] + step[0], s.ground_offset[1] + step[1]];
                if next[0].hypot(next[1]) <= c.radius_r {
                    s.ground_offset = next;
                }
            }
        }
        let mut left = dt;
        while left > 0.0 {
            match s.phase {
                Phase::Dwelling { remaining } => {
                    if remaining > left {
                        s.phase = Phase::Dwelling {
                            remaining: remaining - left,
                        };
                        left = 0.0;
                    } else {
                        left -= remaining;
                        let target_altitude = c.height_h * rng.random::<f64>();
                        let speed = c.v_vert_min + (c.v_vert_max - c.v_vert_min) * rng.random::<f64>();
                        s.phase = Phase::Climbing { target_altitude, speed };
                    }
                }
                Phase::Climbing { target_altitude, speed } => {
                    let gap = target_altitude - s.altitude;
                    let needed = gap.abs() / speed;
                    if needed > left {
                        s.altitude += gap.signum() * speed * left;
                        left = 0.0;
                    } else {
                        s.altitude = target_altitude;
                        left -= needed;
                        s.phase = Phase::Dwelling {
                            remaining: self.draw_dwell(rng),
                        };
                    }
                }
            }
            s.altitude = s.altitude.clamp(0.0, c.height_h);
        }
        s
    }

    /// Runs `steps` epochs of length `dt`, calling `record(t, &state)` after
    /// each one.
    pub fn simulate<R: Rng + ?Sized, F: FnMut(f64, &UavState)>(
        &self,
        start: UavState,
        dt: f64,
        steps: usize,
        rng: &mut R,
        mut record: F,
    ) -> UavState {
        let mut s = start;
        for i in 0..steps {
            s = self.trajectory_step(&s, dt, rng);
            record((i + 1) as f64 * dt, &s);
        }
        s
    }
}

/// `6x/H² - 6x²/H³` on `[0, H]`.
pub fn mobile_altitude_pdf(x: f64, h: f64) -> f64 {
    if !(0.0..=h).contains(&x) {
        return 0.0;
    }
    6.0 * x / (h * h) - 6.0 * x * x / (h * h * h)
}

/// Inverse of `3u² - 2u³` on `[0, 1]`.
pub fn invert_smoothstep(p: f64) -> f64 {
    0.5 - ((1.0 - 2.0 * p).clamp(-1.0, 1.0).asin() / 3.0).sin()
}

/// Point uniform on the disc of radius `radius` centred at the origin.
pub fn uniform_in_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> [f64; 2] {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    [r * phi.cos(), r * phi.sin()]
}
