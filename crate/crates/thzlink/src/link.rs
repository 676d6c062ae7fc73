//! Antenna gain, thermal noise, SNR, and Shannon capacity.
//!
//! The antenna is an ideal cone: uniform gain inside the full cone angle,
//! zero outside. That keeps alignment binary (a receiver is either inside the
//! cone or it is not) while conserving radiated power.

use thiserror::Error;

use crate::atmosphere::{AbsorptionModel, Atmosphere};
use crate::channel::{total_path_loss, Band, ChannelError};
use crate::constants::{db_from_linear, linear_from_db, BOLTZMANN};

#[derive(Debug, Error)]
pub enum LinkError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("beamwidth must lie in (0, 2*pi] rad, got {radians}")]
    BeamwidthOutOfRange { radians: f64 },
    #[error("boresight must have unit norm, got |v| = {norm}")]
    NonUnitBoresight { norm: f64 },
    #[error("bandwidth must be positive, got {hz} Hz")]
    NonPositiveBandwidth { hz: f64 },
    #[error("system temperature must be positive, got {kelvin} K")]
    NonPositiveTemperature { kelvin: f64 },
    #[error("noise figure must be non-negative, got {db} dB")]
    NegativeNoiseFigure { db: f64 },
    #[error("subchannel width {width_hz} Hz exceeds band width {band_hz} Hz")]
    SubchannelTooWide { width_hz: f64, band_hz: f64 },
}

/// Cone antenna: full cone angle plus the direction it points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamConfig {
    /// Full cone angle (rad), in (0, 2*pi].
    pub beamwidth_rad: f64,
    /// Unit boresight direction.
    pub boresight: [f64; 3],
}

impl BeamConfig {
    pub fn new(beamwidth_rad: f64, boresight: [f64; 3]) -> Result<Self, LinkError> {
        gain_from_beamwidth(beamwidth_rad)?;
        let norm = boresight.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(LinkError::NonUnitBoresight { norm });
        }
        Ok(Self {
            beamwidth_rad,
            boresight,
        })
    }

    /// Beam pointing along +x, the nominal link axis.
    pub fn along_x(beamwidth_rad: f64) -> Result<Self, LinkError> {
        Self::new(beamwidth_rad, [1.0, 0.0, 0.0])
    }
}

/// Transceiver parameters for one end-to-end link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioHardware {
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub system_temperature_k: f64,
    pub tx_beam: BeamConfig,
    pub rx_beam: BeamConfig,
}

impl RadioHardware {
    pub fn new(
        tx_power_dbm: f64,
        noise_figure_db: f64,
        system_temperature_k: f64,
        tx_beam: BeamConfig,
        rx_beam: BeamConfig,
    ) -> Result<Self, LinkError> {
        if !(system_temperature_k > 0.0) {
            return Err(LinkError::NonPositiveTemperature {
                kelvin: system_temperature_k,
            });
        }
        if !(noise_figure_db >= 0.0) {
            return Err(LinkError::NegativeNoiseFigure {
                db: noise_figure_db,
            });
        }
        Ok(Self {
            tx_power_dbm,
            noise_figure_db,
            system_temperature_k,
            tx_beam,
            rx_beam,
        })
    }
}

/// Directivity of an ideal cone of full angle `beamwidth_rad`: the radiated
/// power squeezed into the spherical cap gives G = 2/(1 - cos(beamwidth/2)).
///
/// Evaluated as 2*(1 + cos)/sin^2 for half-angles up to 90 degrees so the
/// subtraction never cancels; the two forms are algebraically identical.
pub fn gain_from_beamwidth(beamwidth_rad: f64) -> Result<f64, LinkError> {
    if !(beamwidth_rad > 0.0 && beamwidth_rad <= std::f64::consts::TAU) {
        return Err(LinkError::BeamwidthOutOfRange {
            radians: beamwidth_rad,
        });
    }
    let half = beamwidth_rad / 2.0;
    let c = half.cos();
    if c >= 0.0 {
        let s = half.sin();
        Ok(2.0 * (1.0 + c) / (s * s))
    } else {
        Ok(2.0 / (1.0 - c))
    }
}

/// Noise floor 10*log10(k_B * T * B / 1 mW) + NF, in dBm.
pub fn thermal_noise_dbm(
    temperature_k: f64,
    bandwidth_hz: f64,
    noise_figure_db: f64,
) -> Result<f64, LinkError> {
    if !(temperature_k > 0.0) {
        return Err(LinkError::NonPositiveTemperature {
            kelvin: temperature_k,
        });
    }
    if !(bandwidth_hz > 0.0) {
        return Err(LinkError::NonPositiveBandwidth { hz: bandwidth_hz });
    }
    if !(noise_figure_db >= 0.0) {
        return Err(LinkError::NegativeNoiseFigure {
            db: noise_figure_db,
        });
    }
    Ok(db_from_linear(BOLTZMANN * temperature_k * bandwidth_hz / 1e-3) + noise_figure_db)
}

/// SNR in dB: tx power plus both cone gains, minus path loss and the thermal
/// noise floor over `bandwidth_hz`.
pub fn link_snr_db(
    hw: &RadioHardware,
    path_loss_db: f64,
    bandwidth_hz: f64,
) -> Result<f64, LinkError> {
    let gtx = db_from_linear(gain_from_beamwidth(hw.tx_beam.beamwidth_rad)?);
    let grx = db_from_linear(gain_from_beamwidth(hw.rx_beam.beamwidth_rad)?);
    let noise = thermal_noise_dbm(
        hw.system_temperature_k,
        bandwidth_hz,
        hw.noise_figure_db,
    )?;
    Ok(hw.tx_power_dbm + gtx + grx - path_loss_db - noise)
}

/// Shannon capacity over `band` in bit/s.
///
/// The band is chopped into subchannels of `subchannel_width_hz` (the last
/// one pro-rata); each contributes w*log2(1 + SNR) with loss and noise
/// evaluated at the subchannel center and width.
pub fn capacity_bps(
    model: &AbsorptionModel,
    atmosphere: &Atmosphere,
    hw: &RadioHardware,
    band: Band,
    distance_m: f64,
    subchannel_width_hz: f64,
) -> Result<f64, LinkError> {
    if !(subchannel_width_hz > 0.0) {
        return Err(LinkError::NonPositiveBandwidth {
            hz: subchannel_width_hz,
        });
    }
    if subchannel_width_hz > band.bandwidth_hz {
        return Err(LinkError::SubchannelTooWide {
            width_hz: subchannel_width_hz,
            band_hz: band.bandwidth_hz,
        });
    }
    capacity_over(band, subchannel_width_hz, |center_hz, width_hz| {
        let loss = total_path_loss(model, atmosphere, center_hz, distance_m)?.total_db;
        Ok(linear_from_db(link_snr_db(hw, loss, width_hz)?))
    })
}

/// Subchannel summation shared by `capacity_bps` and its tests; `snr_linear`
/// maps (center, width) to a linear SNR.
fn capacity_over(
    band: Band,
    subchannel_width_hz: f64,
    mut snr_linear: impl FnMut(f64, f64) -> Result<f64, LinkError>,
) -> Result<f64, LinkError> {
    let f_low = band.f_low_hz();
    let f_high = band.f_high_hz();
    let count = (band.bandwidth_hz / subchannel_width_hz).ceil() as usize;
    let mut bits = 0.0;
    for i in 0..count {
        let f = f_low + subchannel_width_hz * i as f64;
        let width = (f_high - f).min(subchannel_width_hz);
        if width <= 0.0 {
            continue; // ceil overshoot when the band divides evenly
        }
        let snr = snr_linear(f + width / 2.0, width)?;
        bits += width * (1.0 + snr).log2();
    }
    Ok(bits)
}

/// Spectral efficiency of a link in Gbps per GHz of occupied band.
pub fn rate_density_gbps_per_ghz(capacity_bps: f64, bandwidth_hz: f64) -> Result<f64, LinkError> {
    if !(bandwidth_hz > 0.0) {
        return Err(LinkError::NonPositiveBandwidth { hz: bandwidth_hz });
    }
    Ok(capacity_bps / bandwidth_hz)
}
