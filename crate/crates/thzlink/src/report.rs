//! Plot-ready CSV emission.
//!
//! Every writer prints a header row, `.` decimals, `\n` line endings, and
//! shortest-round-trip floats, so identical inputs always serialize to
//! identical bytes.

use std::io::{self, Write};

use crate::channel::{PathLossBreakdown, TransmissionWindow};
use crate::mobility::TraceSample;
use crate::scenarios::{BackhaulPlan, CoverageResult, SweptParameter};

pub fn write_pathloss_csv(
    w: &mut impl Write,
    rows: &[(f64, PathLossBreakdown)],
) -> io::Result<()> {
    writeln!(w, "frequency_hz,spreading_db,absorption_db,total_db")?;
    for (f, b) in rows {
        writeln!(w, "{},{},{},{}", f, b.spreading_db, b.absorption_db, b.total_db)?;
    }
    Ok(())
}

/// Coefficient curve at the model's reference vapor density; loadable back
/// through the table-based absorption model.
pub fn write_absorption_table_csv(w: &mut impl Write, rows: &[(f64, f64)]) -> io::Result<()> {
    writeln!(w, "frequency_hz,k_np_per_m")?;
    for (f, k) in rows {
        writeln!(w, "{},{}", f, k)?;
    }
    Ok(())
}

pub fn write_windows_csv(w: &mut impl Write, windows: &[TransmissionWindow]) -> io::Result<()> {
    writeln!(w, "f_low_hz,f_high_hz,width_hz,worst_loss_db")?;
    for win in windows {
        writeln!(
            w,
            "{},{},{},{}",
            win.f_low_hz,
            win.f_high_hz,
            win.width_hz(),
            win.worst_loss_db
        )?;
    }
    Ok(())
}

pub fn write_rate_csv(w: &mut impl Write, rows: &[(f64, f64)]) -> io::Result<()> {
    writeln!(w, "frequency_hz,rate_density_gbps_per_ghz")?;
    for (f, density) in rows {
        writeln!(w, "{},{}", f, density)?;
    }
    Ok(())
}

pub fn write_backhaul_csv(
    w: &mut impl Write,
    total_distance_m: f64,
    plan: &BackhaulPlan,
) -> io::Result<()> {
    writeln!(
        w,
        "total_distance_m,hop_distance_m,repeater_count,per_hop_rate_bps,band_center_hz,band_width_hz"
    )?;
    writeln!(
        w,
        "{},{},{},{},{},{}",
        total_distance_m,
        plan.hop_distance_m,
        plan.repeater_count,
        plan.per_hop_rate_bps,
        plan.band.center_hz,
        plan.band.bandwidth_hz
    )?;
    Ok(())
}

/// Shared kiosk schema: the link D sweep reports mean-per-user effective
/// rate and users served; the link C curve reports mean-over-trials rate and
/// trials meeting the demand.
pub fn write_kiosk_csv(w: &mut impl Write, rows: &[(f64, f64, usize)]) -> io::Result<()> {
    writeln!(w, "delta_rad,mean_throughput_bps,served_count")?;
    for (delta, mean, served) in rows {
        writeln!(w, "{},{},{}", delta, mean, served)?;
    }
    Ok(())
}

pub fn write_abs_csv(w: &mut impl Write, cells: &[CoverageResult]) -> io::Result<()> {
    writeln!(w, "height_m,delta_rad,served_count,sum_rate_bps")?;
    for cell in cells {
        let (h, d) = match cell.parameter {
            SweptParameter::HeightAndBeamwidth {
                height_m,
                delta_rad,
            } => (height_m, delta_rad),
            SweptParameter::Beamwidth { delta_rad } => (f64::NAN, delta_rad),
        };
        debug_assert!(h.is_finite(), "kiosk result fed to the drone writer");
        writeln!(
            w,
            "{},{},{},{}",
            h,
            d,
            cell.served_count,
            cell.sum_rate_bps()
        )?;
    }
    Ok(())
}

pub fn write_trajectory_csv(w: &mut impl Write, samples: &[TraceSample]) -> io::Result<()> {
    writeln!(w, "t_s,yaw_rad,pitch_rad,roll_rad,offset_rad,aligned")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            s.t_s,
            s.yaw_rad,
            s.pitch_rad,
            s.roll_rad,
            s.offset_rad,
            s.aligned as u8
        )?;
    }
    Ok(())
}
