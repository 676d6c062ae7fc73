//! C ABI over the thzlink library.
//!
//! Conventions: fallible calls return [`ThzStatus`] and write results through
//! out pointers; handles are opaque and freed with their matching `_free`
//! call; no call unwinds across the boundary. The most recent failure message
//! is retrievable per thread via [`thz_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use thzlink::atmosphere::AtmosphereError;
use thzlink::channel::{self, ChannelError};
use thzlink::link::{self, LinkError};
use thzlink::mobility::{alignment_fraction, boresight_offset, sample_trajectory, MobilityClass};
use thzlink::scenarios::{plan_backhaul, AlignmentSim, LinkEnv, ScenarioError};
use thzlink::{AbsorptionModel, Atmosphere, Band, BeamConfig, RadioHardware, WindowScan};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThzStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was outside its documented domain.
    InvalidArgument = 2,
    /// The request is valid but cannot be met (for example no band wide
    /// enough under the loss threshold).
    Infeasible = 3,
    /// A path argument was not valid UTF-8.
    Utf8 = 4,
    /// Reading an input file failed.
    Io = 5,
    /// A bug tripped an internal panic; the library state is still sound.
    Internal = 6,
}

/// Opaque absorption model handle.
pub struct ThzModel(AbsorptionModel);

/// Opaque atmospheric-state handle.
pub struct ThzAtmosphere(Atmosphere);

/// Path-loss breakdown in dB.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ThzPathLoss {
    pub spreading_db: f64,
    pub absorption_db: f64,
    pub total_db: f64,
}

/// Radio front-end description; cone angles are full beamwidths in radians.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ThzHardware {
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub system_temperature_k: f64,
    pub tx_beamwidth_rad: f64,
    pub rx_beamwidth_rad: f64,
}

/// One transmission window on the scan grid.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ThzWindow {
    pub f_low_hz: f64,
    pub f_high_hz: f64,
    pub worst_loss_db: f64,
}

/// Beam-alignment summary over one simulated trajectory.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ThzAlignmentStats {
    pub aligned_fraction: f64,
    pub outage_count: u64,
    pub mean_outage_duration_s: f64,
}

/// Equal-hop repeater chain covering a corridor.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ThzBackhaulPlan {
    pub hop_distance_m: f64,
    pub repeater_count: u64,
    pub per_hop_rate_bps: f64,
    pub band_center_hz: f64,
    pub band_bandwidth_hz: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last_error(message: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.into());
}

fn guard(f: impl FnOnce() -> ThzStatus) -> ThzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            ThzStatus::Internal
        }
    }
}

fn atmosphere_status(e: &AtmosphereError) -> ThzStatus {
    match e {
        AtmosphereError::Io { .. } => ThzStatus::Io,
        _ => ThzStatus::InvalidArgument,
    }
}

fn channel_status(e: &ChannelError) -> ThzStatus {
    match e {
        ChannelError::NoFeasibleBand { .. } => ThzStatus::Infeasible,
        ChannelError::Atmosphere(inner) => atmosphere_status(inner),
        _ => ThzStatus::InvalidArgument,
    }
}

fn link_status(e: &LinkError) -> ThzStatus {
    match e {
        LinkError::Channel(inner) => channel_status(inner),
        _ => ThzStatus::InvalidArgument,
    }
}

fn scenario_status(e: &ScenarioError) -> ThzStatus {
    match e {
        ScenarioError::InfeasibleAtMinimumRange { .. } => ThzStatus::Infeasible,
        ScenarioError::Channel(inner) => channel_status(inner),
        ScenarioError::Link(inner) => link_status(inner),
        _ => ThzStatus::InvalidArgument,
    }
}

macro_rules! non_null {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_last_error(concat!(stringify!($ptr), " is null"));
            return ThzStatus::NullPointer;
        }
    };
}

macro_rules! try_status {
    ($expr:expr, $status:expr) => {
        match $expr {
            Ok(value) => value,
            Err(e) => {
                set_last_error(e.to_string());
                return $status(&e);
            }
        }
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn thz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the calling thread's most recent error message into `buffer`
/// (NUL-terminated, truncated to `capacity`). Returns the full message length
/// in bytes, excluding the NUL; query with a null buffer to size one.
#[no_mangle]
pub unsafe extern "C" fn thz_last_error(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let message = e.borrow();
        let bytes = message.as_bytes();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buffer as *mut u8, n);
            *buffer.add(n) = 0;
        }
        bytes.len()
    })
}

/// Creates an atmospheric state. Temperature in kelvin (200 to 330), pressure
/// in kPa, relative humidity in percent (0 to 100).
#[no_mangle]
pub unsafe extern "C" fn thz_atmosphere_new(
    temperature_k: f64,
    pressure_kpa: f64,
    relative_humidity_percent: f64,
    out: *mut *mut ThzAtmosphere,
) -> ThzStatus {
    guard(|| {
        non_null!(out);
        let atmosphere = try_status!(
            Atmosphere::new(temperature_k, pressure_kpa, relative_humidity_percent),
            atmosphere_status
        );
        *out = Box::into_raw(Box::new(ThzAtmosphere(atmosphere)));
        ThzStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn thz_atmosphere_free(atmosphere: *mut ThzAtmosphere) {
    if !atmosphere.is_null() {
        drop(Box::from_raw(atmosphere));
    }
}

/// Creates the built-in nine-line water-vapor absorption model.
#[no_mangle]
pub unsafe extern "C" fn thz_model_builtin(out: *mut *mut ThzModel) -> ThzStatus {
    guard(|| {
        non_null!(out);
        *out = Box::into_raw(Box::new(ThzModel(AbsorptionModel::builtin())));
        ThzStatus::Ok
    })
}

/// Loads spectral lines from a CSV with header `center_hz,strength,half_width_hz`.
#[no_mangle]
pub unsafe extern "C" fn thz_model_from_lines_csv(
    path: *const c_char,
    continuum_np_per_m: f64,
    reference_vapor_density: f64,
    out: *mut *mut ThzModel,
) -> ThzStatus {
    guard(|| {
        non_null!(path);
        non_null!(out);
        let path = match CStr::from_ptr(path).to_str() {
            Ok(s) => s,
            Err(e) => {
                set_last_error(e.to_string());
                return ThzStatus::Utf8;
            }
        };
        let model = try_status!(
            AbsorptionModel::from_lines_csv(
                Path::new(path),
                continuum_np_per_m,
                reference_vapor_density
            ),
            atmosphere_status
        );
        *out = Box::into_raw(Box::new(ThzModel(model)));
        ThzStatus::Ok
    })
}

/// Loads a coefficient lookup table from a CSV with header `frequency_hz,k_np_per_m`.
#[no_mangle]
pub unsafe extern "C" fn thz_model_from_table_csv(
    path: *const c_char,
    reference_vapor_density: f64,
    out: *mut *mut ThzModel,
) -> ThzStatus {
    guard(|| {
        non_null!(path);
        non_null!(out);
        let path = match CStr::from_ptr(path).to_str() {
            Ok(s) => s,
            Err(e) => {
                set_last_error(e.to_string());
                return ThzStatus::Utf8;
            }
        };
        let model = try_status!(
            AbsorptionModel::from_table_csv(Path::new(path), reference_vapor_density),
            atmosphere_status
        );
        *out = Box::into_raw(Box::new(ThzModel(model)));
        ThzStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn thz_model_free(model: *mut ThzModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Absorption coefficient in Np/m at `f_hz` under the given atmosphere.
#[no_mangle]
pub unsafe extern "C" fn thz_absorption_coefficient(
    model: *const ThzModel,
    atmosphere: *const ThzAtmosphere,
    f_hz: f64,
    out: *mut f64,
) -> ThzStatus {
    guard(|| {
        non_null!(model);
        non_null!(atmosphere);
        non_null!(out);
        let k = try_status!(
            (*model).0.absorption_coefficient(f_hz, &(*atmosphere).0),
            atmosphere_status
        );
        *out = k;
        ThzStatus::Ok
    })
}

/// Free-space spreading loss in dB; pure function of frequency and distance.
#[no_mangle]
pub extern "C" fn thz_spreading_loss_db(f_hz: f64, distance_m: f64) -> f64 {
    channel::spreading_loss_db(f_hz, distance_m)
}

/// Spreading plus absorption loss at `f_hz` over `distance_m`.
#[no_mangle]
pub unsafe extern "C" fn thz_path_loss(
    model: *const ThzModel,
    atmosphere: *const ThzAtmosphere,
    f_hz: f64,
    distance_m: f64,
    out: *mut ThzPathLoss,
) -> ThzStatus {
    guard(|| {
        non_null!(model);
        non_null!(atmosphere);
        non_null!(out);
        let b = try_status!(
            channel::total_path_loss(&(*model).0, &(*atmosphere).0, f_hz, distance_m),
            channel_status
        );
        *out = ThzPathLoss {
            spreading_db: b.spreading_db,
            absorption_db: b.absorption_db,
            total_db: b.total_db,
        };
        ThzStatus::Ok
    })
}

/// Linear gain of an ideal cone of full angle `beamwidth_rad` (0 to 2 pi).
#[no_mangle]
pub unsafe extern "C" fn thz_gain_from_beamwidth(beamwidth_rad: f64, out: *mut f64) -> ThzStatus {
    guard(|| {
        non_null!(out);
        let gain = try_status!(link::gain_from_beamwidth(beamwidth_rad), link_status);
        *out = gain;
        ThzStatus::Ok
    })
}

/// Thermal noise floor in dBm over `bandwidth_hz` plus the noise figure.
#[no_mangle]
pub unsafe extern "C" fn thz_thermal_noise_dbm(
    temperature_k: f64,
    bandwidth_hz: f64,
    noise_figure_db: f64,
    out: *mut f64,
) -> ThzStatus {
    guard(|| {
        non_null!(out);
        let noise = try_status!(
            link::thermal_noise_dbm(temperature_k, bandwidth_hz, noise_figure_db),
            link_status
        );
        *out = noise;
        ThzStatus::Ok
    })
}

/// Angle in radians between the rotated boresight and its nominal direction;
/// roll alone never moves it.
#[no_mangle]
pub extern "C" fn thz_boresight_offset(yaw_rad: f64, pitch_rad: f64, roll_rad: f64) -> f64 {
    boresight_offset(yaw_rad, pitch_rad, roll_rad)
}

/// Shannon capacity in bit/s of the band `center_hz` +- `bandwidth_hz`/2,
/// integrated in subchannels of `subchannel_width_hz`.
#[no_mangle]
pub unsafe extern "C" fn thz_capacity_bps(
    model: *const ThzModel,
    atmosphere: *const ThzAtmosphere,
    hardware: *const ThzHardware,
    center_hz: f64,
    bandwidth_hz: f64,
    distance_m: f64,
    subchannel_width_hz: f64,
    out: *mut f64,
) -> ThzStatus {
    guard(|| {
        non_null!(model);
        non_null!(atmosphere);
        non_null!(hardware);
        non_null!(out);
        let hw = try_status!(radio_hardware(&*hardware), link_status);
        let capacity = try_status!(
            link::capacity_bps(
                &(*model).0,
                &(*atmosphere).0,
                &hw,
                Band {
                    center_hz,
                    bandwidth_hz,
                },
                distance_m,
                subchannel_width_hz,
            ),
            link_status
        );
        *out = capacity;
        ThzStatus::Ok
    })
}

/// Scans `f_low_hz..f_high_hz` in `step_hz` steps for windows whose total
/// loss at `distance_m` stays at or below `loss_threshold_db`. Writes up to
/// `capacity` windows into `out_windows` and always stores the total count in
/// `out_count`; call with capacity 0 to size a buffer.
#[no_mangle]
pub unsafe extern "C" fn thz_find_windows(
    model: *const ThzModel,
    atmosphere: *const ThzAtmosphere,
    distance_m: f64,
    f_low_hz: f64,
    f_high_hz: f64,
    step_hz: f64,
    loss_threshold_db: f64,
    out_windows: *mut ThzWindow,
    capacity: usize,
    out_count: *mut usize,
) -> ThzStatus {
    guard(|| {
        non_null!(out_count);
        non_null!(model);
        non_null!(atmosphere);
        if capacity > 0 {
            non_null!(out_windows);
        }
        let scan = WindowScan {
            f_low_hz,
            f_high_hz,
            step_hz,
            loss_threshold_db,
        };
        let windows = try_status!(
            channel::find_windows(&(*model).0, &(*atmosphere).0, distance_m, &scan),
            channel_status
        );
        *out_count = windows.len();
        for (i, w) in windows.iter().take(capacity).enumerate() {
            *out_windows.add(i) = ThzWindow {
                f_low_hz: w.f_low_hz,
                f_high_hz: w.f_high_hz,
                worst_loss_db: w.worst_loss_db,
            };
        }
        ThzStatus::Ok
    })
}

/// Simulates one orientation trajectory of the named mobility class ("s1",
/// "s2", "s3", or "static") and reports how well a cone of `beamwidth_rad`
/// stays aligned when re-alignment takes `realign_latency_s`.
#[no_mangle]
pub unsafe extern "C" fn thz_alignment_stats(
    class_name: *const c_char,
    seed: u64,
    beamwidth_rad: f64,
    realign_latency_s: f64,
    duration_s: f64,
    timestep_s: f64,
    out: *mut ThzAlignmentStats,
) -> ThzStatus {
    guard(|| {
        non_null!(class_name);
        non_null!(out);
        let name = match CStr::from_ptr(class_name).to_str() {
            Ok(s) => s,
            Err(e) => {
                set_last_error(e.to_string());
                return ThzStatus::Utf8;
            }
        };
        let Some(class) = MobilityClass::from_name(name) else {
            set_last_error(format!("unknown mobility class {name:?}"));
            return ThzStatus::InvalidArgument;
        };
        let beam = try_status!(BeamConfig::along_x(beamwidth_rad), link_status);
        let trajectory = sample_trajectory(&class, seed);
        let stats = try_status!(
            alignment_fraction(&trajectory, &beam, realign_latency_s, duration_s, timestep_s),
            |_e: &_| ThzStatus::InvalidArgument
        );
        *out = ThzAlignmentStats {
            aligned_fraction: stats.aligned_fraction,
            outage_count: stats.outage_count as u64,
            mean_outage_duration_s: stats.mean_outage_duration_s,
        };
        ThzStatus::Ok
    })
}

/// Plans the minimal equal-hop repeater chain across `total_distance_m` so
/// every hop carries `required_rate_bps` in some band of
/// `required_bandwidth_hz` under the scan's loss threshold.
#[no_mangle]
pub unsafe extern "C" fn thz_plan_backhaul(
    model: *const ThzModel,
    atmosphere: *const ThzAtmosphere,
    hardware: *const ThzHardware,
    f_low_hz: f64,
    f_high_hz: f64,
    step_hz: f64,
    loss_threshold_db: f64,
    subchannel_width_hz: f64,
    total_distance_m: f64,
    required_rate_bps: f64,
    required_bandwidth_hz: f64,
    out: *mut ThzBackhaulPlan,
) -> ThzStatus {
    guard(|| {
        non_null!(model);
        non_null!(atmosphere);
        non_null!(hardware);
        non_null!(out);
        let hw = try_status!(radio_hardware(&*hardware), link_status);
        let env = LinkEnv {
            model: (*model).0.clone(),
            atmosphere: (*atmosphere).0,
            hardware: hw,
            scan: WindowScan {
                f_low_hz,
                f_high_hz,
                step_hz,
                loss_threshold_db,
            },
            subchannel_width_hz,
            // Backhaul planning never simulates alignment.
            alignment: AlignmentSim {
                realign_latency_s: 0.0,
                duration_s: 1.0,
                timestep_s: 1.0,
            },
        };
        let plan = try_status!(
            plan_backhaul(&env, total_distance_m, required_rate_bps, required_bandwidth_hz),
            scenario_status
        );
        *out = ThzBackhaulPlan {
            hop_distance_m: plan.hop_distance_m,
            repeater_count: plan.repeater_count as u64,
            per_hop_rate_bps: plan.per_hop_rate_bps,
            band_center_hz: plan.band.center_hz,
            band_bandwidth_hz: plan.band.bandwidth_hz,
        };
        ThzStatus::Ok
    })
}

fn radio_hardware(hw: &ThzHardware) -> Result<RadioHardware, LinkError> {
    RadioHardware::new(
        hw.tx_power_dbm,
        hw.noise_figure_db,
        hw.system_temperature_k,
        BeamConfig::along_x(hw.tx_beamwidth_rad)?,
        BeamConfig::along_x(hw.rx_beamwidth_rad)?,
    )
}
