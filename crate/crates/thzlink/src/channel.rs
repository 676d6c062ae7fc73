//! Line-of-sight path loss and transmission-window bookkeeping.
//!
//! Total loss is free-space spreading plus molecular absorption; everything
//! else (rain, foliage, blockage) is out of scope. Windows are found by
//! scanning total loss on a uniform frequency grid and keeping the maximal
//! runs that stay at or below a loss threshold.

use thiserror::Error;

use crate::atmosphere::{AbsorptionModel, Atmosphere, AtmosphereError};
use crate::constants::{DB_PER_NEPER, SPEED_OF_LIGHT};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error(transparent)]
    Atmosphere(#[from] AtmosphereError),
    #[error("distance must be positive, got {meters} m")]
    NonPositiveDistance { meters: f64 },
    #[error("scan grid invalid: {message}")]
    BadScanGrid { message: String },
    #[error(
        "no window of at least {required_hz} Hz; widest available is {widest_hz} Hz"
    )]
    NoFeasibleBand { required_hz: f64, widest_hz: f64 },
    #[error("required bandwidth must be positive, got {hz} Hz")]
    NonPositiveBandwidth { hz: f64 },
}

/// Free-space spreading loss 20*log10(4*pi*d*f/c) in dB.
///
/// Doubling either argument adds exactly 20*log10(2) ~ 6.0206 dB.
#[inline]
pub fn spreading_loss_db(f_hz: f64, distance_m: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * distance_m * f_hz / SPEED_OF_LIGHT).log10()
}

/// Molecular absorption loss in dB over `distance_m`.
pub fn absorption_loss_db(
    model: &AbsorptionModel,
    atmosphere: &Atmosphere,
    f_hz: f64,
    distance_m: f64,
) -> Result<f64, ChannelError> {
    if !(distance_m > 0.0) {
        return Err(ChannelError::NonPositiveDistance {
            meters: distance_m,
        });
    }
    let k = model.absorption_coefficient(f_hz, atmosphere)?;
    Ok(DB_PER_NEPER * k * distance_m)
}

/// Path loss split into its two contributions (dB).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossBreakdown {
    pub spreading_db: f64,
    pub absorption_db: f64,
    pub total_db: f64,
}

/// Total line-of-sight path loss at one frequency.
pub fn total_path_loss(
    model: &AbsorptionModel,
    atmosphere: &Atmosphere,
    f_hz: f64,
    distance_m: f64,
) -> Result<PathLossBreakdown, ChannelError> {
    let absorption_db = absorption_loss_db(model, atmosphere, f_hz, distance_m)?;
    let spreading_db = spreading_loss_db(f_hz, distance_m);
    Ok(PathLossBreakdown {
        spreading_db,
        absorption_db,
        total_db: spreading_db + absorption_db,
    })
}

/// Uniform scan grid and loss threshold used to delimit windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowScan {
    /// First grid frequency (Hz).
    pub f_low_hz: f64,
    /// Last grid frequency (Hz); included when it falls on the grid.
    pub f_high_hz: f64,
    /// Grid spacing (Hz).
    pub step_hz: f64,
    /// A grid point belongs to a window when total loss <= this (dB).
    pub loss_threshold_db: f64,
}

impl WindowScan {
    fn validate(&self) -> Result<(), ChannelError> {
        if !(self.step_hz > 0.0) {
            return Err(ChannelError::BadScanGrid {
                message: format!("step must be positive, got {}", self.step_hz),
            });
        }
        if !(self.f_high_hz > self.f_low_hz) {
            return Err(ChannelError::BadScanGrid {
                message: format!(
                    "range [{}, {}] Hz is empty",
                    self.f_low_hz, self.f_high_hz
                ),
            });
        }
        Ok(())
    }

    /// Number of grid points; point i sits at `f_low_hz + i*step_hz`.
    fn points(&self) -> usize {
        // Tolerate representation error when the span is an exact multiple of
        // the step.
        ((self.f_high_hz - self.f_low_hz) / self.step_hz + 1e-9) as usize + 1
    }

    #[inline]
    fn frequency(&self, index: usize) -> f64 {
        self.f_low_hz + self.step_hz * index as f64
    }

    /// Grid frequencies in ascending order, exactly as the window scan
    /// visits them.
    pub fn frequencies(&self) -> Result<impl Iterator<Item = f64> + '_, ChannelError> {
        self.validate()?;
        Ok((0..self.points()).map(|i| self.frequency(i)))
    }
}

/// A maximal grid run whose total loss stays at or below the threshold.
///
/// `f_low_hz < f_high_hz` always holds; single-point runs carry no usable
/// bandwidth and are dropped during the scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionWindow {
    pub f_low_hz: f64,
    pub f_high_hz: f64,
    /// Highest total loss over the run (dB).
    pub worst_loss_db: f64,
}

impl TransmissionWindow {
    pub fn width_hz(&self) -> f64 {
        self.f_high_hz - self.f_low_hz
    }
}

/// Scans the grid and returns the transmission windows in frequency order.
pub fn find_windows(
    model: &AbsorptionModel,
    atmosphere: &Atmosphere,
    distance_m: f64,
    scan: &WindowScan,
) -> Result<Vec<TransmissionWindow>, ChannelError> {
    scan.validate()?;
    if !(distance_m > 0.0) {
        return Err(ChannelError::NonPositiveDistance {
            meters: distance_m,
        });
    }
    let mut windows = Vec::new();
    let mut run_start: Option<(usize, f64)> = None; // (index, worst loss)
    let points = scan.points();
    for i in 0..points {
        let f = scan.frequency(i);
        let loss = total_path_loss(model, atmosphere, f, distance_m)?.total_db;
        if loss <= scan.loss_threshold_db {
            run_start = match run_start {
                None => Some((i, loss)),
                Some((start, worst)) => Some((start, worst.max(loss))),
            };
        } else if let Some((start, worst)) = run_start.take() {
            push_run(&mut windows, scan, start, i - 1, worst);
        }
    }
    if let Some((start, worst)) = run_start {
        push_run(&mut windows, scan, start, points - 1, worst);
    }
    Ok(windows)
}

fn push_run(
    windows: &mut Vec<TransmissionWindow>,
    scan: &WindowScan,
    start: usize,
    end: usize,
    worst: f64,
) {
    if end > start {
        windows.push(TransmissionWindow {
            f_low_hz: scan.frequency(start),
            f_high_hz: scan.frequency(end),
            worst_loss_db: worst,
        });
    }
}

/// Widest window width in Hz; 0 when there are no windows.
pub fn max_contiguous_bandwidth_hz(windows: &[TransmissionWindow]) -> f64 {
    windows
        .iter()
        .map(TransmissionWindow::width_hz)
        .fold(0.0, f64::max)
}

/// A contiguous allocation inside some window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
}

impl Band {
    pub fn f_low_hz(&self) -> f64 {
        self.center_hz - self.bandwidth_hz / 2.0
    }

    pub fn f_high_hz(&self) -> f64 {
        self.center_hz + self.bandwidth_hz / 2.0
    }
}

/// Picks the lowest-frequency window at least `required_bandwidth_hz` wide and
/// places the band at its low edge.
pub fn select_band(
    windows: &[TransmissionWindow],
    required_bandwidth_hz: f64,
) -> Result<Band, ChannelError> {
    if !(required_bandwidth_hz > 0.0) {
        return Err(ChannelError::NonPositiveBandwidth {
            hz: required_bandwidth_hz,
        });
    }
    for window in windows {
        if window.width_hz() >= required_bandwidth_hz {
            return Ok(Band {
                center_hz: window.f_low_hz + required_bandwidth_hz / 2.0,
                bandwidth_hz: required_bandwidth_hz,
            });
        }
    }
    Err(ChannelError::NoFeasibleBand {
        required_hz: required_bandwidth_hz,
        widest_hz: max_contiguous_bandwidth_hz(windows),
    })
}

/// `find_windows` followed by `select_band`, with early exit.
///
/// Semantically identical to the two-step pipeline but stops as soon as the
/// first sufficient run is confirmed, and abandons the scan once spreading
/// loss alone exceeds the threshold (spreading grows monotonically with
/// frequency, so no later grid point can pass). Returns `Ok(None)` when no
/// window is wide enough.
pub fn lowest_feasible_band(
    model: &AbsorptionModel,
    atmosphere: &Atmosphere,
    distance_m: f64,
    scan: &WindowScan,
    required_bandwidth_hz: f64,
) -> Result<Option<Band>, ChannelError> {
    scan.validate()?;
    if !(distance_m > 0.0) {
        return Err(ChannelError::NonPositiveDistance {
            meters: distance_m,
        });
    }
    if !(required_bandwidth_hz > 0.0) {
        return Err(ChannelError::NonPositiveBandwidth {
            hz: required_bandwidth_hz,
        });
    }
    let mut run_start: Option<usize> = None;
    for i in 0..scan.points() {
        let f = scan.frequency(i);
        if spreading_loss_db(f, distance_m) > scan.loss_threshold_db {
            return Ok(None);
        }
        if total_path_loss(model, atmosphere, f, distance_m)?.total_db
            <= scan.loss_threshold_db
        {
            let start = *run_start.get_or_insert(i);
            if scan.step_hz * (i - start) as f64 >= required_bandwidth_hz {
                return Ok(Some(Band {
                    center_hz: scan.frequency(start) + required_bandwidth_hz / 2.0,
                    bandwidth_hz: required_bandwidth_hz,
                }));
            }
        } else {
            run_start = None;
        }
    }
    Ok(None)
}
