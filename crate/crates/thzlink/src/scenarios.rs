//! Deployment studies built on the channel, link, and mobility layers:
//! street-level backhaul chains, kiosk downlinks, and drone-mounted cells.
//!
//! Everything here is deterministic given the configuration and seeds; sweeps
//! iterate their grids in ascending order and tie-break toward the first
//! (smallest) grid value so results never depend on evaluation order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::atmosphere::Atmosphere;
use crate::atmosphere::AbsorptionModel;
use crate::channel::{lowest_feasible_band, Band, ChannelError, WindowScan};
use crate::link::{capacity_bps, BeamConfig, LinkError, RadioHardware};
use crate::mobility::{
    alignment_fraction, sample_trajectory, MobilityClass, MobilityError,
};

/// Distinguishes the position stream from the per-user trajectory seeds that
/// start at `master_seed ^ 0`.
const POSITION_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Mobility(#[from] MobilityError),
    #[error("link cannot carry {rate_bps} bit/s over {bandwidth_hz} Hz even at 1 m")]
    InfeasibleAtMinimumRange { rate_bps: f64, bandwidth_hz: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} grid must not be empty")]
    EmptyGrid { name: &'static str },
    #[error("user field invalid: {message}")]
    BadUserField { message: String },
    #[error("drone corridor needs at least 2 drones, got {count}")]
    TooFewDrones { count: usize },
    #[error("cone angle must lie in (0, pi) for a ground footprint, got {radians} rad")]
    FootprintBeamwidth { radians: f64 },
}

/// Alignment-simulation window shared by every mobility-aware scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentSim {
    pub realign_latency_s: f64,
    pub duration_s: f64,
    pub timestep_s: f64,
}

/// Everything a scenario needs about the propagation environment and radios.
#[derive(Debug, Clone)]
pub struct LinkEnv {
    pub model: AbsorptionModel,
    pub atmosphere: Atmosphere,
    pub hardware: RadioHardware,
    pub scan: WindowScan,
    pub subchannel_width_hz: f64,
    pub alignment: AlignmentSim,
}

impl LinkEnv {
    /// Lowest feasible band of `bandwidth_hz` at `distance_m`, if any.
    pub fn band_at(
        &self,
        distance_m: f64,
        bandwidth_hz: f64,
    ) -> Result<Option<Band>, ScenarioError> {
        Ok(lowest_feasible_band(
            &self.model,
            &self.atmosphere,
            distance_m,
            &self.scan,
            bandwidth_hz,
        )?)
    }

    /// Capacity of `band` at `distance_m` using `hardware` (or an override).
    fn capacity(
        &self,
        hardware: &RadioHardware,
        band: Band,
        distance_m: f64,
    ) -> Result<f64, ScenarioError> {
        Ok(capacity_bps(
            &self.model,
            &self.atmosphere,
            hardware,
            band,
            distance_m,
            self.subchannel_width_hz,
        )?)
    }
}

/// Repeater chain covering a fixed ground distance with equal hops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackhaulPlan {
    /// Equalized hop length (m); total = hop * (repeater_count + 1).
    pub hop_distance_m: f64,
    pub repeater_count: usize,
    /// Capacity of one equalized hop; at least the requested rate.
    pub per_hop_rate_bps: f64,
    /// Band used on every hop, selected at the equalized hop distance.
    pub band: Band,
}

/// Largest distance on the 0.1 m lattice `1.0 + 0.1k` (up to
/// `d_max_search_m`) where some band of `required_bandwidth_hz` still carries
/// `required_rate_bps`.
///
/// Capacity at the selected band is non-increasing in distance (loss grows
/// pointwise, windows only shrink), so bisection over the lattice finds the
/// same point a linear scan would.
pub fn max_hop_distance(
    env: &LinkEnv,
    required_rate_bps: f64,
    required_bandwidth_hz: f64,
    d_max_search_m: f64,
) -> Result<f64, ScenarioError> {
    if !(required_rate_bps > 0.0) {
        return Err(ScenarioError::NonPositive {
            name: "required rate",
            value: required_rate_bps,
        });
    }
    if !(d_max_search_m >= 1.0) {
        return Err(ScenarioError::NonPositive {
            name: "search bound (must reach 1 m)",
            value: d_max_search_m,
        });
    }
    let lattice = |k: usize| 1.0 + 0.1 * k as f64;
    let k_max = ((d_max_search_m - 1.0) / 0.1 + 1e-9).floor() as usize;
    let feasible = |k: usize| -> Result<bool, ScenarioError> {
        let d = lattice(k);
        match env.band_at(d, required_bandwidth_hz)? {
            None => Ok(false),
            Some(band) => Ok(env.capacity(&env.hardware, band, d)? >= required_rate_bps),
        }
    };
    if !feasible(0)? {
        return Err(ScenarioError::InfeasibleAtMinimumRange {
            rate_bps: required_rate_bps,
            bandwidth_hz: required_bandwidth_hz,
        });
    }
    if feasible(k_max)? {
        return Ok(lattice(k_max));
    }
    // Invariant: feasible(lo), not feasible(hi).
    let (mut lo, mut hi) = (0, k_max);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lattice(lo))
}

/// Plans a repeater chain over `total_distance_m`: hops as long as the link
/// allows, then equalized so every hop carries the same margin.
pub fn plan_backhaul(
    env: &LinkEnv,
    total_distance_m: f64,
    required_rate_bps: f64,
    required_bandwidth_hz: f64,
) -> Result<BackhaulPlan, ScenarioError> {
    if !(total_distance_m > 0.0) {
        return Err(ScenarioError::NonPositive {
            name: "total distance",
            value: total_distance_m,
        });
    }
    let max_hop = max_hop_distance(
        env,
        required_rate_bps,
        required_bandwidth_hz,
        total_distance_m.max(1.0),
    )?;
    let longest = max_hop.min(total_distance_m);
    // Smallest repeater count whose equal hops fit under the limit; the ceil
    // guess is corrected against the same comparison the oracle uses, so a
    // borderline ratio cannot round the other way.
    let mut count = (total_distance_m / longest).ceil() as usize - 1;
    while total_distance_m / (count + 1) as f64 > longest {
        count += 1;
    }
    while count > 0 && total_distance_m / count as f64 <= longest {
        count -= 1;
    }
    let hop = total_distance_m / (count + 1) as f64;
    let band = env
        .band_at(hop, required_bandwidth_hz)?
        .ok_or(ScenarioError::InfeasibleAtMinimumRange {
            rate_bps: required_rate_bps,
            bandwidth_hz: required_bandwidth_hz,
        })?;
    Ok(BackhaulPlan {
        hop_distance_m: hop,
        repeater_count: count,
        per_hop_rate_bps: env.capacity(&env.hardware, band, hop)?,
        band,
    })
}

/// Ground users around an access point: positions, shared motion class, and
/// one trajectory seed per user.
#[derive(Debug, Clone, PartialEq)]
pub struct UserField {
    /// (x, y) in meters relative to the AP (or its ground projection).
    pub positions: Vec<[f64; 2]>,
    pub class: MobilityClass,
    pub seeds: Vec<u64>,
}

impl UserField {
    pub fn from_parts(
        positions: Vec<[f64; 2]>,
        class: MobilityClass,
        seeds: Vec<u64>,
    ) -> Result<Self, ScenarioError> {
        if positions.is_empty() {
            return Err(ScenarioError::BadUserField {
                message: "no users".into(),
            });
        }
        if positions.len() != seeds.len() {
            return Err(ScenarioError::BadUserField {
                message: format!(
                    "{} positions but {} seeds",
                    positions.len(),
                    seeds.len()
                ),
            });
        }
        if positions.iter().flatten().any(|c| !c.is_finite()) {
            return Err(ScenarioError::BadUserField {
                message: "non-finite position".into(),
            });
        }
        Ok(Self {
            positions,
            class,
            seeds,
        })
    }

    /// Users spread area-uniformly over an annular sector in front of the AP:
    /// ranges [r_min, r_max], bearings within +-half_angle of the x axis.
    pub fn sector(
        count: usize,
        r_min_m: f64,
        r_max_m: f64,
        half_angle_rad: f64,
        class: MobilityClass,
        master_seed: u64,
    ) -> Result<Self, ScenarioError> {
        if !(r_min_m > 0.0 && r_max_m >= r_min_m) {
            return Err(ScenarioError::BadUserField {
                message: format!("bad range interval [{r_min_m}, {r_max_m}] m"),
            });
        }
        if !(half_angle_rad > 0.0 && half_angle_rad <= std::f64::consts::PI) {
            return Err(ScenarioError::BadUserField {
                message: format!("bad sector half-angle {half_angle_rad} rad"),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ POSITION_SEED_SALT);
        let positions = (0..count)
            .map(|_| {
                // Area-uniform: range drawn as sqrt of a uniform in r^2.
                let r = rng
                    .random_range(r_min_m * r_min_m..r_max_m * r_max_m)
                    .sqrt();
                let theta = rng.random_range(-half_angle_rad..half_angle_rad);
                [r * theta.cos(), r * theta.sin()]
            })
            .collect();
        Self::from_parts(positions, class, derived_seeds(master_seed, count))
    }

    /// Users spread area-uniformly over a disk centered under the AP.
    pub fn disk(
        count: usize,
        radius_m: f64,
        class: MobilityClass,
        master_seed: u64,
    ) -> Result<Self, ScenarioError> {
        if !(radius_m > 0.0) {
            return Err(ScenarioError::BadUserField {
                message: format!("bad disk radius {radius_m} m"),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ POSITION_SEED_SALT);
        let positions = (0..count)
            .map(|_| {
                let r = radius_m * rng.random_range(0.0f64..1.0).sqrt();
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                [r * theta.cos(), r * theta.sin()]
            })
            .collect();
        Self::from_parts(positions, class, derived_seeds(master_seed, count))
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Ground range of user `i` from the AP / ground projection.
    pub fn range_m(&self, i: usize) -> f64 {
        let [x, y] = self.positions[i];
        x.hypot(y)
    }
}

fn derived_seeds(master_seed: u64, count: usize) -> Vec<u64> {
    (0..count).map(|i| master_seed ^ i as u64).collect()
}

/// The swept value a coverage result belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweptParameter {
    Beamwidth { delta_rad: f64 },
    HeightAndBeamwidth { height_m: f64, delta_rad: f64 },
}

/// Coverage outcome at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageResult {
    pub parameter: SweptParameter,
    /// Users whose effective rate meets the demand.
    pub served_count: usize,
    /// Effective per-user rate (time share times alignment), user order.
    pub per_user_rate_bps: Vec<f64>,
}

impl CoverageResult {
    pub fn sum_rate_bps(&self) -> f64 {
        self.per_user_rate_bps.iter().sum()
    }
}

/// Kiosk downlink to a field of users who all use cone angle `delta_rad`.
///
/// The kiosk time-shares equally, so each of the N users gets 1/N of their
/// own link capacity, further scaled by that user's alignment fraction. The
/// kiosk transmit beam stays at its configured width; `delta_rad` is the
/// user-side receive cone, which also gates alignment.
pub fn kiosk_coverage(
    env: &LinkEnv,
    users: &UserField,
    delta_rad: f64,
    bandwidth_hz: f64,
    demand_rate_bps: f64,
) -> Result<CoverageResult, ScenarioError> {
    if users.is_empty() {
        return Err(ScenarioError::BadUserField {
            message: "no users".into(),
        });
    }
    let ue_beam = BeamConfig::along_x(delta_rad)?;
    let hw = RadioHardware {
        rx_beam: ue_beam,
        ..env.hardware
    };
    let mut per_user = Vec::with_capacity(users.len());
    for i in 0..users.len() {
        let d = users.range_m(i);
        let capacity = match env.band_at(d, bandwidth_hz)? {
            Some(band) => env.capacity(&hw, band, d)?,
            None => 0.0,
        };
        let stats = alignment_fraction(
            &sample_trajectory(&users.class, users.seeds[i]),
            &ue_beam,
            env.alignment.realign_latency_s,
            env.alignment.duration_s,
            env.alignment.timestep_s,
        )?;
        per_user.push(capacity / users.len() as f64 * stats.aligned_fraction);
    }
    Ok(CoverageResult {
        parameter: SweptParameter::Beamwidth {
            delta_rad,
        },
        served_count: per_user.iter().filter(|&&r| r >= demand_rate_bps).count(),
        per_user_rate_bps: per_user,
    })
}

/// `kiosk_coverage` at every grid point, ascending.
pub fn kiosk_beamwidth_sweep(
    env: &LinkEnv,
    users: &UserField,
    delta_grid_rad: &[f64],
    bandwidth_hz: f64,
    demand_rate_bps: f64,
) -> Result<Vec<CoverageResult>, ScenarioError> {
    if delta_grid_rad.is_empty() {
        return Err(ScenarioError::EmptyGrid {
            name: "beamwidth",
        });
    }
    delta_grid_rad
        .iter()
        .map(|&d| kiosk_coverage(env, users, d, bandwidth_hz, demand_rate_bps))
        .collect()
}

/// Beamwidth that serves the most users; ties go to the larger total
/// throughput, then to the smaller cone angle.
pub fn kiosk_optimal_beamwidth(
    env: &LinkEnv,
    users: &UserField,
    delta_grid_rad: &[f64],
    bandwidth_hz: f64,
    demand_rate_bps: f64,
) -> Result<(f64, CoverageResult), ScenarioError> {
    let sweep = kiosk_beamwidth_sweep(env, users, delta_grid_rad, bandwidth_hz, demand_rate_bps)?;
    let i = best_coverage_index(&sweep).expect("sweep of a validated grid is non-empty");
    Ok((delta_grid_rad[i], sweep.into_iter().nth(i).unwrap()))
}

/// Index of the lexicographic (served count, sum rate) maximum; only a
/// strictly better cell replaces the incumbent, so exact ties keep the
/// earliest (smallest) grid point. None on an empty slice.
pub fn best_coverage_index(results: &[CoverageResult]) -> Option<usize> {
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, result) in results.iter().enumerate() {
        let sum = result.sum_rate_bps();
        let better = match best {
            None => true,
            Some((_, b_served, b_sum)) => {
                result.served_count > b_served
                    || (result.served_count == b_served && sum > b_sum)
            }
        };
        if better {
            best = Some((i, result.served_count, sum));
        }
    }
    best.map(|(i, _, _)| i)
}

/// Point on a single-user kiosk throughput curve.
#[derive(Debug, Clone, PartialEq)]
pub struct KioskCurvePoint {
    pub delta_rad: f64,
    /// Mean effective throughput over the trial seeds.
    pub mean_throughput_bps: f64,
    /// Effective throughput per trial seed, seed order.
    pub per_seed_bps: Vec<f64>,
}

/// Single-user kiosk link: sweeps the shared cone angle and averages
/// effective throughput over trial trajectories of `class`.
pub fn kiosk_link_curve(
    env: &LinkEnv,
    class: &MobilityClass,
    delta_grid_rad: &[f64],
    distance_m: f64,
    bandwidth_hz: f64,
    trial_seeds: &[u64],
) -> Result<Vec<KioskCurvePoint>, ScenarioError> {
    if delta_grid_rad.is_empty() {
        return Err(ScenarioError::EmptyGrid {
            name: "beamwidth",
        });
    }
    if trial_seeds.is_empty() {
        return Err(ScenarioError::EmptyGrid {
            name: "trial seed",
        });
    }
    let mut curve = Vec::with_capacity(delta_grid_rad.len());
    for &delta in delta_grid_rad {
        let ue_beam = BeamConfig::along_x(delta)?;
        let hw = RadioHardware {
            rx_beam: ue_beam,
            ..env.hardware
        };
        let capacity = match env.band_at(distance_m, bandwidth_hz)? {
            Some(band) => env.capacity(&hw, band, distance_m)?,
            None => 0.0,
        };
        let mut per_seed = Vec::with_capacity(trial_seeds.len());
        for &seed in trial_seeds {
            let stats = alignment_fraction(
                &sample_trajectory(class, seed),
                &ue_beam,
                env.alignment.realign_latency_s,
                env.alignment.duration_s,
                env.alignment.timestep_s,
            )?;
            per_seed.push(capacity * stats.aligned_fraction);
        }
        let mean = per_seed.iter().sum::<f64>() / per_seed.len() as f64;
        curve.push(KioskCurvePoint {
            delta_rad: delta,
            mean_throughput_bps: mean,
            per_seed_bps: per_seed,
        });
    }
    Ok(curve)
}

/// Drone cell at (0, 0, `height_m`) transmitting a cone of `delta_rad`.
///
/// A user at ground range r is inside the footprint iff r <= h*tan(delta/2);
/// in-footprint users time-share equally over their slant distances. The
/// user-side cone (and hence alignment) is the configured receive beam, so
/// alignment fractions do not depend on (h, delta).
pub fn abs_coverage(
    env: &LinkEnv,
    users: &UserField,
    height_m: f64,
    delta_rad: f64,
    bandwidth_hz: f64,
    demand_rate_bps: f64,
) -> Result<CoverageResult, ScenarioError> {
    let fractions = user_alignment_fractions(env, users)?;
    abs_coverage_with_fractions(
        env,
        users,
        &fractions,
        height_m,
        delta_rad,
        bandwidth_hz,
        demand_rate_bps,
    )
}

/// Alignment fraction per user against the configured receive beam; shared
/// by every (h, delta) cell of a drone sweep.
pub fn user_alignment_fractions(
    env: &LinkEnv,
    users: &UserField,
) -> Result<Vec<f64>, ScenarioError> {
    users
        .seeds
        .iter()
        .map(|&seed| {
            Ok(alignment_fraction(
                &sample_trajectory(&users.class, seed),
                &env.hardware.rx_beam,
                env.alignment.realign_latency_s,
                env.alignment.duration_s,
                env.alignment.timestep_s,
            )?
            .aligned_fraction)
        })
        .collect()
}

fn abs_coverage_with_fractions(
    env: &LinkEnv,
    users: &UserField,
    fractions: &[f64],
    height_m: f64,
    delta_rad: f64,
    bandwidth_hz: f64,
    demand_rate_bps: f64,
) -> Result<CoverageResult, ScenarioError> {
    if users.is_empty() {
        return Err(ScenarioError::BadUserField {
            message: "no users".into(),
        });
    }
    if !(height_m > 0.0) {
        return Err(ScenarioError::NonPositive {
            name: "drone height",
            value: height_m,
        });
    }
    if !(delta_rad > 0.0 && delta_rad < std::f64::consts::PI) {
        return Err(ScenarioError::FootprintBeamwidth {
            radians: delta_rad,
        });
    }
    let hw = RadioHardware {
        tx_beam: BeamConfig::along_x(delta_rad)?,
        ..env.hardware
    };
    let footprint = height_m * (delta_rad / 2.0).tan();
    let in_footprint: Vec<bool> = (0..users.len())
        .map(|i| users.range_m(i) <= footprint)
        .collect();
    let sharing = in_footprint.iter().filter(|&&b| b).count();
    let mut per_user = Vec::with_capacity(users.len());
    for i in 0..users.len() {
        if !in_footprint[i] {
            per_user.push(0.0);
            continue;
        }
        let r = users.range_m(i);
        let slant = (height_m * height_m + r * r).sqrt();
        let capacity = match env.band_at(slant, bandwidth_hz)? {
            Some(band) => env.capacity(&hw, band, slant)?,
            None => 0.0,
        };
        per_user.push(capacity / sharing as f64 * fractions[i]);
    }
    Ok(CoverageResult {
        parameter: SweptParameter::HeightAndBeamwidth {
            height_m,
            delta_rad,
        },
        served_count: per_user.iter().filter(|&&r| r >= demand_rate_bps).count(),
        per_user_rate_bps: per_user,
    })
}

/// `abs_coverage` over the full (height, delta) grid, heights outer and
/// ascending, computing each user's alignment fraction once.
pub fn abs_sweep(
    env: &LinkEnv,
    users: &UserField,
    height_grid_m: &[f64],
    delta_grid_rad: &[f64],
    bandwidth_hz: f64,
    demand_rate_bps: f64,
) -> Result<Vec<CoverageResult>, ScenarioError> {
    if height_grid_m.is_empty() {
        return Err(ScenarioError::EmptyGrid {
            name: "height",
        });
    }
    if delta_grid_rad.is_empty() {
        return Err(ScenarioError::EmptyGrid {
            name: "beamwidth",
        });
    }
    let fractions = user_alignment_fractions(env, users)?;
    let mut out = Vec::with_capacity(height_grid_m.len() * delta_grid_rad.len());
    for &h in height_grid_m {
        for &delta in delta_grid_rad {
            out.push(abs_coverage_with_fractions(
                env,
                users,
                &fractions,
                h,
                delta,
                bandwidth_hz,
                demand_rate_bps,
            )?);
        }
    }
    Ok(out)
}

/// Exhaustive grid search for the (height, delta) with the best coverage;
/// ties resolve toward larger total rate, then smaller height, then smaller
/// cone angle.
pub fn abs_optimize(
    env: &LinkEnv,
    users: &UserField,
    height_grid_m: &[f64],
    delta_grid_rad: &[f64],
    bandwidth_hz: f64,
    demand_rate_bps: f64,
) -> Result<(f64, f64, CoverageResult), ScenarioError> {
    let sweep = abs_sweep(
        env,
        users,
        height_grid_m,
        delta_grid_rad,
        bandwidth_hz,
        demand_rate_bps,
    )?;
    let i = best_coverage_index(&sweep).expect("sweep of validated grids is non-empty");
    let (h, d) = (
        height_grid_m[i / delta_grid_rad.len()],
        delta_grid_rad[i % delta_grid_rad.len()],
    );
    Ok((h, d, sweep.into_iter().nth(i).unwrap()))
}

/// Hole-free spacing of `n_drones` along a corridor: the tighter of the even
/// division of the corridor and one footprint diameter.
pub fn abs_spacing(
    n_drones: usize,
    corridor_length_m: f64,
    height_m: f64,
    delta_rad: f64,
) -> Result<f64, ScenarioError> {
    if n_drones < 2 {
        return Err(ScenarioError::TooFewDrones {
            count: n_drones,
        });
    }
    if !(corridor_length_m > 0.0) {
        return Err(ScenarioError::NonPositive {
            name: "corridor length",
            value: corridor_length_m,
        });
    }
    if !(height_m > 0.0) {
        return Err(ScenarioError::NonPositive {
            name: "drone height",
            value: height_m,
        });
    }
    if !(delta_rad > 0.0 && delta_rad < std::f64::consts::PI) {
        return Err(ScenarioError::FootprintBeamwidth {
            radians: delta_rad,
        });
    }
    let even = corridor_length_m / (n_drones - 1) as f64;
    let footprint_diameter = 2.0 * height_m * (delta_rad / 2.0).tan();
    Ok(even.min(footprint_diameter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::find_windows;
    use crate::channel::select_band;
    use crate::link::link_snr_db;
    use crate::link::gain_from_beamwidth;

    fn approx(actual: f64, expected: f64, tol: f64, what: &str) {
        assert!(
            (actual - expected).abs() <= tol,
            "{what}: expected {expected}, got {actual}"
        );
    }

    fn test_env() -> LinkEnv {
        let beam = BeamConfig::along_x(10f64.to_radians()).unwrap();
        LinkEnv {
            model: AbsorptionModel::builtin(),
            atmosphere: Atmosphere::new(293.15, 101.325, 50.0).unwrap(),
            hardware: RadioHardware::new(10.0, 10.0, 290.0, beam, beam).unwrap(),
            scan: WindowScan {
                f_low_hz: 100e9,
                f_high_hz: 3e12,
                step_hz: 100e6,
                loss_threshold_db: 120.0,
            },
            subchannel_width_hz: 100e6,
            // Short window keeps unit tests quick; acceptance runs the full
            // 10 s defaults.
            alignment: AlignmentSim {
                realign_latency_s: 0.01,
                duration_s: 1.0,
                timestep_s: 0.005,
            },
        }
    }

    #[test]
    fn max_hop_matches_linear_scan() {
        let env = test_env();
        let (rate, bw, search) = (200e9, 10e9, 50.0);
        let hop = max_hop_distance(&env, rate, bw, search).unwrap();

        // Linear-scan oracle over the same lattice, via the two-step channel
        // pipeline rather than the fast path.
        let mut best = None;
        let mut k = 0;
        loop {
            let d = 1.0 + 0.1 * k as f64;
            if d > search + 1e-9 {
                break;
            }
            let windows = find_windows(&env.model, &env.atmosphere, d, &env.scan).unwrap();
            if let Ok(band) = select_band(&windows, bw) {
                let cap = capacity_bps(
                    &env.model,
                    &env.atmosphere,
                    &env.hardware,
                    band,
                    d,
                    env.subchannel_width_hz,
                )
                .unwrap();
                if cap >= rate {
                    best = Some(d);
                }
            }
            k += 1;
        }
        assert_eq!(Some(hop), best);
        assert!(hop > 1.0 && hop < search, "expected an interior hop, got {hop}");
    }

    #[test]
    fn max_hop_boundary_behavior() {
        let env = test_env();
        // Trivial demand: everything up to the bound works.
        approx(
            max_hop_distance(&env, 1e-3, 10e9, 50.0).unwrap(),
            50.0,
            1e-9,
            "unconstrained hop",
        );
        // Impossible demand: infeasible even at 1 m.
        assert!(matches!(
            max_hop_distance(&env, 1e16, 10e9, 50.0),
            Err(ScenarioError::InfeasibleAtMinimumRange { .. })
        ));
        assert!(max_hop_distance(&env, 0.0, 10e9, 50.0).is_err());
        assert!(max_hop_distance(&env, 1e9, 10e9, 0.5).is_err());
    }

    #[test]
    fn backhaul_plan_shapes() {
        let env = test_env();
        // 100 Gbps over 10 GHz reaches beyond 40 m, so a 30 m street is one
        // hop.
        let single = plan_backhaul(&env, 30.0, 100e9, 10e9).unwrap();
        assert_eq!(single.repeater_count, 0);
        approx(single.hop_distance_m, 30.0, 1e-12, "single hop spans it all");
        assert!(single.per_hop_rate_bps >= 100e9);

        let chain = plan_backhaul(&env, 1000.0, 100e9, 10e9).unwrap();
        assert!(chain.repeater_count > 0);
        approx(
            chain.hop_distance_m * (chain.repeater_count + 1) as f64,
            1000.0,
            1e-6,
            "hops tile the corridor",
        );
        assert!(chain.per_hop_rate_bps >= 100e9);

        // Minimality against the direct definition.
        let max_hop = max_hop_distance(&env, 100e9, 10e9, 1000.0).unwrap();
        let mut n = 0;
        while 1000.0 / (n + 1) as f64 > max_hop {
            n += 1;
        }
        assert_eq!(chain.repeater_count, n);
    }

    #[test]
    fn sector_field_respects_geometry() {
        let f = UserField::sector(
            40,
            0.5,
            5.0,
            60f64.to_radians(),
            MobilityClass::s1(),
            9,
        )
        .unwrap();
        assert_eq!(f.len(), 40);
        for i in 0..f.len() {
            let r = f.range_m(i);
            assert!((0.5..=5.0).contains(&r), "range {r} outside annulus");
            let [x, y] = f.positions[i];
            let bearing = y.atan2(x).abs();
            assert!(bearing <= 60f64.to_radians() + 1e-12, "bearing {bearing}");
        }
        assert_eq!(f.seeds, (0..40).map(|i| 9 ^ i).collect::<Vec<u64>>());
        assert_eq!(
            f,
            UserField::sector(40, 0.5, 5.0, 60f64.to_radians(), MobilityClass::s1(), 9).unwrap()
        );
    }

    #[test]
    fn disk_field_respects_geometry() {
        let f = UserField::disk(60, 100.0, MobilityClass::s2(), 4).unwrap();
        assert_eq!(f.len(), 60);
        let mut max_r = 0f64;
        for i in 0..f.len() {
            let r = f.range_m(i);
            assert!(r <= 100.0, "range {r} outside disk");
            max_r = max_r.max(r);
        }
        // Area-uniform draws concentrate near the rim; 60 of them reaching
        // only half the radius would mean the sampler is wrong.
        assert!(max_r > 50.0, "draws clumped near the center: max {max_r}");
        // Position stream and trajectory seeds are decoupled: same master
        // seed, different classes, same geometry.
        let g = UserField::disk(60, 100.0, MobilityClass::s3(), 4).unwrap();
        assert_eq!(f.positions, g.positions);
    }

    #[test]
    fn field_construction_errors() {
        assert!(UserField::from_parts(vec![], MobilityClass::s1(), vec![]).is_err());
        assert!(
            UserField::from_parts(vec![[1.0, 0.0]], MobilityClass::s1(), vec![1, 2]).is_err()
        );
        assert!(UserField::sector(5, 0.0, 5.0, 1.0, MobilityClass::s1(), 0).is_err());
        assert!(UserField::disk(5, -1.0, MobilityClass::s1(), 0).is_err());
    }

    #[test]
    fn kiosk_coverage_matches_per_user_recomputation() {
        let env = test_env();
        let users =
            UserField::sector(5, 0.5, 5.0, 60f64.to_radians(), MobilityClass::s1(), 7).unwrap();
        let delta = 15f64.to_radians();
        let result = kiosk_coverage(&env, &users, delta, 50e9, 10e9).unwrap();

        let ue_beam = BeamConfig::along_x(delta).unwrap();
        for i in 0..users.len() {
            let d = users.range_m(i);
            let band = lowest_feasible_band(&env.model, &env.atmosphere, d, &env.scan, 50e9)
                .unwrap()
                .expect("close-range kiosk users always get a band");
            let hw = RadioHardware {
                rx_beam: ue_beam,
                ..env.hardware
            };
            let cap = capacity_bps(&env.model, &env.atmosphere, &hw, band, d, 100e6).unwrap();
            let frac = alignment_fraction(
                &sample_trajectory(&users.class, users.seeds[i]),
                &ue_beam,
                0.01,
                1.0,
                0.005,
            )
            .unwrap()
            .aligned_fraction;
            assert_eq!(
                result.per_user_rate_bps[i],
                cap / 5.0 * frac,
                "user {i} diverges from the direct pipeline"
            );
        }
        assert_eq!(
            result.served_count,
            result
                .per_user_rate_bps
                .iter()
                .filter(|&&r| r >= 10e9)
                .count()
        );
    }

    #[test]
    fn kiosk_serves_one_easy_user() {
        let env = test_env();
        let users = UserField::from_parts(
            vec![[1.0, 0.0]],
            MobilityClass::stationary(),
            vec![0],
        )
        .unwrap();
        let served = kiosk_coverage(&env, &users, 10f64.to_radians(), 50e9, 1.0).unwrap();
        assert_eq!(served.served_count, 1);
        assert!(served.per_user_rate_bps[0] > 1e11);
        let hopeless =
            kiosk_coverage(&env, &users, 10f64.to_radians(), 50e9, f64::INFINITY).unwrap();
        assert_eq!(hopeless.served_count, 0);
    }

    #[test]
    fn static_users_prefer_the_narrowest_beam() {
        let env = test_env();
        let users = UserField::sector(
            6,
            0.5,
            5.0,
            60f64.to_radians(),
            MobilityClass::stationary(),
            3,
        )
        .unwrap();
        let grid: Vec<f64> = (1..=20).map(|d| (d as f64).to_radians()).collect();
        let (best, result) = kiosk_optimal_beamwidth(&env, &users, &grid, 50e9, 1.0).unwrap();
        // Every beamwidth serves everyone, so the strictly larger capacity of
        // the narrower cone decides.
        assert_eq!(result.served_count, 6);
        assert_eq!(best, grid[0]);
    }

    #[test]
    fn single_point_grid_is_its_own_optimum() {
        let env = test_env();
        let users = UserField::from_parts(
            vec![[2.0, 0.0]],
            MobilityClass::s2(),
            vec![1],
        )
        .unwrap();
        let grid = [12f64.to_radians()];
        let (best, _) = kiosk_optimal_beamwidth(&env, &users, &grid, 50e9, 10e9).unwrap();
        assert_eq!(best, grid[0]);
    }

    #[test]
    fn kiosk_curve_for_static_class_decreases() {
        let env = test_env();
        let grid: Vec<f64> = (1..=10).map(|d| (d as f64).to_radians()).collect();
        let seeds: Vec<u64> = (0..4).collect();
        let curve = kiosk_link_curve(
            &env,
            &MobilityClass::stationary(),
            &grid,
            1.0,
            50e9,
            &seeds,
        )
        .unwrap();
        assert_eq!(curve.len(), 10);
        for pair in curve.windows(2) {
            assert!(
                pair[0].mean_throughput_bps > pair[1].mean_throughput_bps,
                "static curve should fall with widening beams"
            );
        }
        // A 2 degree cone under S1 sway barely ever carries traffic.
        let shaky = kiosk_link_curve(
            &env,
            &MobilityClass::s1(),
            &[2f64.to_radians()],
            1.0,
            50e9,
            &seeds,
        )
        .unwrap();
        assert!(shaky[0].mean_throughput_bps < 0.1 * curve[1].mean_throughput_bps);
    }

    #[test]
    fn abs_footprint_gates_service() {
        let env = test_env();
        let users = UserField::from_parts(
            vec![[0.0, 0.0], [50.0, 0.0]],
            MobilityClass::stationary(),
            vec![0, 1],
        )
        .unwrap();
        // 10 m drone with a 10 degree cone: footprint radius 0.87 m.
        let tight = abs_coverage(&env, &users, 10.0, 10f64.to_radians(), 10e9, 1.0).unwrap();
        assert_eq!(tight.served_count, 1);
        assert_eq!(tight.per_user_rate_bps[1], 0.0);
        // Wide enough to cover the 50 m user too.
        let wide = abs_coverage(&env, &users, 60.0, 90f64.to_radians(), 10e9, 1.0).unwrap();
        assert_eq!(wide.served_count, 2);
        let footprint = 60.0 * 45f64.to_radians().tan();
        for i in 0..2 {
            assert!(
                users.range_m(i) <= footprint,
                "served user outside footprint"
            );
        }
    }

    #[test]
    fn abs_time_sharing_splits_capacity() {
        let env = test_env();
        // Two co-located static users: each gets exactly half of one user's
        // solo rate at the same cell.
        let solo_field =
            UserField::from_parts(vec![[3.0, 0.0]], MobilityClass::stationary(), vec![0])
                .unwrap();
        let duo_field = UserField::from_parts(
            vec![[3.0, 0.0], [3.0, 0.0]],
            MobilityClass::stationary(),
            vec![0, 1],
        )
        .unwrap();
        let solo = abs_coverage(&env, &solo_field, 20.0, 30f64.to_radians(), 10e9, 1.0).unwrap();
        let duo = abs_coverage(&env, &duo_field, 20.0, 30f64.to_radians(), 10e9, 1.0).unwrap();
        approx(
            duo.per_user_rate_bps[0],
            solo.per_user_rate_bps[0] / 2.0,
            1e-6,
            "equal time share",
        );
    }

    #[test]
    fn abs_optimize_prefers_smallest_cell_on_ties() {
        let env = test_env();
        let users =
            UserField::from_parts(vec![[0.0, 0.0]], MobilityClass::stationary(), vec![0])
                .unwrap();
        let heights = [10.0, 20.0, 30.0];
        let deltas: Vec<f64> = [5.0f64, 10.0, 20.0]
            .iter()
            .map(|d| d.to_radians())
            .collect();
        // One user at the origin is always in-footprint; served count ties
        // everywhere, total rate then favors low height and narrow beam.
        let (h, d, result) = abs_optimize(&env, &users, &heights, &deltas, 10e9, 1.0).unwrap();
        assert_eq!(result.served_count, 1);
        assert_eq!((h, d), (10.0, deltas[0]));
    }

    #[test]
    fn abs_sweep_agrees_with_per_cell_calls() {
        let env = test_env();
        let users = UserField::disk(8, 40.0, MobilityClass::s2(), 11).unwrap();
        let heights = [20.0, 50.0];
        let deltas: Vec<f64> = [10.0f64, 40.0].iter().map(|d| d.to_radians()).collect();
        let sweep = abs_sweep(&env, &users, &heights, &deltas, 10e9, 2e9).unwrap();
        let mut i = 0;
        for &h in &heights {
            for &d in &deltas {
                let cell = abs_coverage(&env, &users, h, d, 10e9, 2e9).unwrap();
                assert_eq!(sweep[i], cell, "cell ({h}, {d})");
                i += 1;
            }
        }
    }

    #[test]
    fn spacing_reference_points() {
        // Corridor-limited.
        approx(
            abs_spacing(2, 100.0, 100.0, 90f64.to_radians()).unwrap(),
            100.0,
            1e-9,
            "corridor split",
        );
        // Footprint-limited.
        approx(
            abs_spacing(2, 1000.0, 10.0, 90f64.to_radians()).unwrap(),
            20.0,
            1e-9,
            "hole-free limit",
        );
        approx(
            2.0 * 50.0 * 30f64.to_radians().tan(),
            57.735,
            0.01,
            "footprint diameter at 50 m, 60 degrees",
        );
        assert!(matches!(
            abs_spacing(1, 100.0, 10.0, 1.0),
            Err(ScenarioError::TooFewDrones { .. })
        ));
        assert!(abs_spacing(3, 0.0, 10.0, 1.0).is_err());
        assert!(abs_spacing(3, 100.0, 10.0, std::f64::consts::PI).is_err());
    }

    #[test]
    fn scenario_outputs_are_deterministic() {
        let env = test_env();
        let users = UserField::disk(10, 50.0, MobilityClass::s2(), 123).unwrap();
        let a = abs_coverage(&env, &users, 30.0, 20f64.to_radians(), 10e9, 2e9).unwrap();
        let b = abs_coverage(&env, &users, 30.0, 20f64.to_radians(), 10e9, 2e9).unwrap();
        assert_eq!(a, b);
        let ua = UserField::disk(10, 50.0, MobilityClass::s2(), 124).unwrap();
        assert_ne!(users.positions, ua.positions);
    }

    #[test]
    fn per_hop_snr_is_positive_at_plan_distance() {
        // Sanity tie-in across modules: the planned hop has usable margin.
        let env = test_env();
        let plan = plan_backhaul(&env, 200.0, 100e9, 10e9).unwrap();
        let loss = crate::channel::total_path_loss(
            &env.model,
            &env.atmosphere,
            plan.band.center_hz,
            plan.hop_distance_m,
        )
        .unwrap()
        .total_db;
        let snr = link_snr_db(&env.hardware, loss, env.subchannel_width_hz).unwrap();
        assert!(snr > 0.0, "snr {snr} dB");
        assert!(gain_from_beamwidth(10f64.to_radians()).unwrap() > 500.0);
    }
}
