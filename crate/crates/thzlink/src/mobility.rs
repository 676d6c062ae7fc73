//! Device sway and the beam misalignment it causes.
//!
//! A handheld or mounted device oscillates in yaw, pitch, and roll; each axis
//! follows an independent sinusoid drawn from a mobility class (S1 roughest,
//! S3 calmest). The far end tracks perfectly, so the link drops exactly when
//! the local boresight wanders outside its own cone half-angle, and every
//! recovery pays a fixed realignment latency.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::link::BeamConfig;

#[derive(Debug, Error)]
pub enum MobilityError {
    #[error("timestep must be positive, got {seconds} s")]
    NonPositiveTimestep { seconds: f64 },
    #[error("timestep {timestep_s} s too coarse for duration {duration_s} s (need <= duration/100)")]
    TimestepTooCoarse { timestep_s: f64, duration_s: f64 },
    #[error("realignment latency must be non-negative, got {seconds} s")]
    NegativeLatency { seconds: f64 },
}

/// Per-axis oscillation envelope for one class of device motion.
///
/// Amplitude and frequency bounds apply independently to yaw, pitch, and
/// roll. Bounds with `min == max` pin the axis parameter instead of drawing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityClass {
    pub name: &'static str,
    /// Oscillation amplitude bounds per axis (degrees).
    pub amplitude_deg: (f64, f64),
    /// Oscillation frequency bounds per axis (Hz).
    pub frequency_hz: (f64, f64),
}

impl MobilityClass {
    /// Walking-speed handling: 13-15 degree swings.
    pub fn s1() -> Self {
        Self {
            name: "S1",
            amplitude_deg: (13.0, 15.0),
            frequency_hz: (0.5, 2.0),
        }
    }

    /// Seated or slow handling: 3-5 degree swings.
    pub fn s2() -> Self {
        Self {
            name: "S2",
            amplitude_deg: (3.0, 5.0),
            frequency_hz: (0.2, 1.0),
        }
    }

    /// Resting device: 1-3 degree residual sway.
    pub fn s3() -> Self {
        Self {
            name: "S3",
            amplitude_deg: (1.0, 3.0),
            frequency_hz: (0.05, 0.5),
        }
    }

    /// No motion at all; trajectories sampled from it hold offset zero.
    pub fn stationary() -> Self {
        Self {
            name: "static",
            amplitude_deg: (0.0, 0.0),
            frequency_hz: (0.0, 0.0),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "s1" => Some(Self::s1()),
            "s2" => Some(Self::s2()),
            "s3" => Some(Self::s3()),
            "static" | "stationary" => Some(Self::stationary()),
            _ => None,
        }
    }
}

/// One axis of motion: angle(t) = A * sin(2*pi*f*t + phase).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisMotion {
    pub amplitude_rad: f64,
    pub frequency_hz: f64,
    pub phase_rad: f64,
}

impl AxisMotion {
    #[inline]
    fn angle_at(&self, t_s: f64) -> f64 {
        self.amplitude_rad
            * (std::f64::consts::TAU * self.frequency_hz * t_s + self.phase_rad).sin()
    }
}

/// Seeded sinusoidal orientation history for one device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientationTrajectory {
    pub yaw: AxisMotion,
    pub pitch: AxisMotion,
    pub roll: AxisMotion,
    pub seed: u64,
}

impl OrientationTrajectory {
    /// Yaw, pitch, roll in radians at time `t_s`.
    #[inline]
    pub fn orientation_at(&self, t_s: f64) -> (f64, f64, f64) {
        (
            self.yaw.angle_at(t_s),
            self.pitch.angle_at(t_s),
            self.roll.angle_at(t_s),
        )
    }

    /// Angle between swayed and nominal boresight at time `t_s`.
    #[inline]
    pub fn offset_at(&self, t_s: f64) -> f64 {
        let (yaw, pitch, roll) = self.orientation_at(t_s);
        boresight_offset(yaw, pitch, roll)
    }
}

/// Draws one trajectory from `class`, fully determined by `seed`.
///
/// Per axis, in yaw/pitch/roll order: amplitude, then frequency, then phase,
/// each uniform over its range. Degenerate ranges (`min == max`) take the
/// value without consuming randomness, so a pinned class stays deterministic
/// under future range changes.
pub fn sample_trajectory(class: &MobilityClass, seed: u64) -> OrientationTrajectory {
    fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
        debug_assert!(0.0 <= lo && lo <= hi, "bad class range [{lo}, {hi}]");
        if lo == hi {
            lo
        } else {
            rng.random_range(lo..hi)
        }
    }
    fn axis(rng: &mut ChaCha8Rng, class: &MobilityClass) -> AxisMotion {
        AxisMotion {
            amplitude_rad: draw(rng, class.amplitude_deg).to_radians(),
            frequency_hz: draw(rng, class.frequency_hz),
            phase_rad: rng.random_range(0.0..std::f64::consts::TAU),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let yaw = axis(&mut rng, class);
    let pitch = axis(&mut rng, class);
    let roll = axis(&mut rng, class);
    OrientationTrajectory {
        yaw,
        pitch,
        roll,
        seed,
    }
}

/// Angle between the swayed boresight and its nominal direction.
///
/// The nominal boresight is +x; intrinsic rotations apply yaw about z,
/// then pitch about y, then roll about x. Roll spins the device around the
/// boresight itself, so it never moves the pointing: the rotated x-axis is
/// (cos yaw * cos pitch, ...), roll-free, and the fp evaluation below keeps
/// that exactness (the roll matrix maps e_x to e_x with no rounding).
pub fn boresight_offset(yaw_rad: f64, pitch_rad: f64, roll_rad: f64) -> f64 {
    let nominal = [1.0, 0.0, 0.0];
    let v = rotate_z(yaw_rad, rotate_y(pitch_rad, rotate_x(roll_rad, nominal)));
    let dot = v[0] * nominal[0] + v[1] * nominal[1] + v[2] * nominal[2];
    dot.clamp(-1.0, 1.0).acos()
}

fn rotate_x(a: f64, [x, y, z]: [f64; 3]) -> [f64; 3] {
    let (s, c) = a.sin_cos();
    [x, c * y - s * z, s * y + c * z]
}

fn rotate_y(a: f64, [x, y, z]: [f64; 3]) -> [f64; 3] {
    let (s, c) = a.sin_cos();
    [c * x + s * z, y, c * z - s * x]
}

fn rotate_z(a: f64, [x, y, z]: [f64; 3]) -> [f64; 3] {
    let (s, c) = a.sin_cos();
    [c * x - s * y, s * x + c * y, z]
}

/// Outcome of stepping a trajectory against a beam for a fixed duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentStats {
    /// Share of simulated time the link carried traffic, in [0, 1].
    pub aligned_fraction: f64,
    /// Number of maximal outage stretches.
    pub outage_count: usize,
    /// Average outage length in seconds; 0 when there were no outages.
    pub mean_outage_duration_s: f64,
}

/// Realignment bookkeeping: a link that re-enters the beam stays in outage
/// for `latency_steps` further steps; leaving the beam restarts the clock.
struct RealignGate {
    latency_steps: usize,
    pending: usize,
    prev_in_beam: bool,
}

impl RealignGate {
    fn new(latency_steps: usize) -> Self {
        // Starting inside the beam costs nothing: prev_in_beam = true means
        // step 0 never looks like a re-entry.
        Self {
            latency_steps,
            pending: 0,
            prev_in_beam: true,
        }
    }

    /// Advances one step; returns whether the link is usable this step.
    fn step(&mut self, in_beam: bool) -> bool {
        let aligned = if in_beam {
            if !self.prev_in_beam {
                self.pending = self.latency_steps;
            }
            if self.pending > 0 {
                self.pending -= 1;
                false
            } else {
                true
            }
        } else {
            false
        };
        self.prev_in_beam = in_beam;
        aligned
    }
}

fn check_stepping(
    realign_latency_s: f64,
    duration_s: f64,
    timestep_s: f64,
) -> Result<(usize, usize), MobilityError> {
    if !(timestep_s > 0.0) {
        return Err(MobilityError::NonPositiveTimestep {
            seconds: timestep_s,
        });
    }
    if timestep_s > duration_s / 100.0 {
        return Err(MobilityError::TimestepTooCoarse {
            timestep_s,
            duration_s,
        });
    }
    if !(realign_latency_s >= 0.0) {
        return Err(MobilityError::NegativeLatency {
            seconds: realign_latency_s,
        });
    }
    let steps = (duration_s / timestep_s).round() as usize;
    let latency_steps = (realign_latency_s / timestep_s).round() as usize;
    Ok((steps, latency_steps))
}

/// Steps `trajectory` against the cone of `beam` and accumulates outage
/// statistics. The link is in-beam when the boresight offset is at most half
/// the cone angle; each re-entry pays `realign_latency_s` of extra outage.
pub fn alignment_fraction(
    trajectory: &OrientationTrajectory,
    beam: &BeamConfig,
    realign_latency_s: f64,
    duration_s: f64,
    timestep_s: f64,
) -> Result<AlignmentStats, MobilityError> {
    let (steps, latency_steps) = check_stepping(realign_latency_s, duration_s, timestep_s)?;
    let half_beam = beam.beamwidth_rad / 2.0;
    let mut gate = RealignGate::new(latency_steps);
    let mut aligned_steps = 0usize;
    let mut outage_count = 0usize;
    let mut in_outage = false;
    for i in 0..steps {
        let t = timestep_s * i as f64;
        let aligned = gate.step(trajectory.offset_at(t) <= half_beam);
        if aligned {
            aligned_steps += 1;
            in_outage = false;
        } else {
            if !in_outage {
                outage_count += 1;
            }
            in_outage = true;
        }
    }
    let outage_steps = steps - aligned_steps;
    Ok(AlignmentStats {
        aligned_fraction: aligned_steps as f64 / steps as f64,
        outage_count,
        mean_outage_duration_s: if outage_count == 0 {
            0.0
        } else {
            outage_steps as f64 * timestep_s / outage_count as f64
        },
    })
}

/// One row of a trajectory debug trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t_s: f64,
    pub yaw_rad: f64,
    pub pitch_rad: f64,
    pub roll_rad: f64,
    pub offset_rad: f64,
    /// Usable this step (in-beam and past any realignment latency), matching
    /// `alignment_fraction` exactly.
    pub aligned: bool,
}

/// Full per-step trace of the same simulation `alignment_fraction` runs.
pub fn alignment_trace(
    trajectory: &OrientationTrajectory,
    beam: &BeamConfig,
    realign_latency_s: f64,
    duration_s: f64,
    timestep_s: f64,
) -> Result<Vec<TraceSample>, MobilityError> {
    let (steps, latency_steps) = check_stepping(realign_latency_s, duration_s, timestep_s)?;
    let half_beam = beam.beamwidth_rad / 2.0;
    let mut gate = RealignGate::new(latency_steps);
    let mut out = Vec::with_capacity(steps);
    for i in 0..steps {
        let t_s = timestep_s * i as f64;
        let (yaw_rad, pitch_rad, roll_rad) = trajectory.orientation_at(t_s);
        let offset_rad = boresight_offset(yaw_rad, pitch_rad, roll_rad);
        let aligned = gate.step(offset_rad <= half_beam);
        out.push(TraceSample {
            t_s,
            yaw_rad,
            pitch_rad,
            roll_rad,
            offset_rad,
            aligned,
        });
    }
    Ok(out)
}

/// Long-run throughput of a link that only carries traffic while aligned.
pub fn effective_throughput_bps(capacity_bps: f64, stats: &AlignmentStats) -> f64 {
    capacity_bps * stats.aligned_fraction
}
