//! Water-vapor absorption model for the 0.1-3 THz range.
//!
//! Molecular absorption here is dominated by water vapor, so the model keeps
//! only that species:
//!
//! - saturation vapor pressure from the Buck equation,
//! - absolute humidity from the ideal-gas law for the vapor partial pressure,
//! - an absorption coefficient built from a small set of Lorentzian lines on
//!   top of a flat continuum, scaled linearly with vapor density.
//!
//! A sorted lookup table (coefficient at reference vapor density) can replace
//! the line evaluation for callers that bring their own measured spectrum.

use std::path::Path;

use thiserror::Error;

use crate::constants::{FREQ_MAX_HZ, FREQ_MIN_HZ, WATER_VAPOR_GAS_CONSTANT};

/// Temperature window the Buck fit is trusted over (K).
pub const TEMPERATURE_MIN_K: f64 = 200.0;
/// See [`TEMPERATURE_MIN_K`].
pub const TEMPERATURE_MAX_K: f64 = 330.0;

/// Vapor density the default line strengths are quoted at (g/m^3).
pub const REFERENCE_VAPOR_DENSITY: f64 = 7.5;

/// Flat continuum absorption under the default line set (Np/m at reference density).
pub const DEFAULT_CONTINUUM_NP_PER_M: f64 = 2.0e-4;

#[derive(Debug, Error)]
pub enum AtmosphereError {
    #[error("temperature {kelvin} K outside supported range [{TEMPERATURE_MIN_K}, {TEMPERATURE_MAX_K}] K")]
    TemperatureOutOfRange { kelvin: f64 },
    #[error("pressure must be positive, got {kpa} kPa")]
    NonPositivePressure { kpa: f64 },
    #[error("relative humidity {percent}% outside [0, 100]")]
    HumidityOutOfRange { percent: f64 },
    #[error("frequency {hz} Hz outside model range [{FREQ_MIN_HZ}, {FREQ_MAX_HZ}] Hz")]
    FrequencyOutOfRange { hz: f64 },
    #[error("frequency {hz} Hz outside table span [{lo}, {hi}] Hz; extrapolation refused")]
    TableExtrapolation { hz: f64, lo: f64, hi: f64 },
    #[error("absorption table needs at least two rows")]
    TableTooShort,
    #[error("{path}:{line}: {message}")]
    BadCsv {
        path: String,
        line: usize,
        message: String,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("spectral line {index}: {message}")]
    BadLine { index: usize, message: String },
    #[error("model parameter {name} must be non-negative, got {value}")]
    NegativeParameter { name: &'static str, value: f64 },
}

/// Bulk air state at the link site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atmosphere {
    /// Air temperature (K).
    pub temperature_k: f64,
    /// Total pressure (kPa). Recorded for reporting; the default line widths
    /// are sea-level values and are not rescaled with pressure.
    pub pressure_kpa: f64,
    /// Relative humidity (percent, 0-100).
    pub relative_humidity: f64,
}

impl Atmosphere {
    pub fn new(
        temperature_k: f64,
        pressure_kpa: f64,
        relative_humidity: f64,
    ) -> Result<Self, AtmosphereError> {
        if !(TEMPERATURE_MIN_K..=TEMPERATURE_MAX_K).contains(&temperature_k) {
            return Err(AtmosphereError::TemperatureOutOfRange {
                kelvin: temperature_k,
            });
        }
        if !(pressure_kpa > 0.0) {
            return Err(AtmosphereError::NonPositivePressure { kpa: pressure_kpa });
        }
        if !(0.0..=100.0).contains(&relative_humidity) {
            return Err(AtmosphereError::HumidityOutOfRange {
                percent: relative_humidity,
            });
        }
        Ok(Self {
            temperature_k,
            pressure_kpa,
            relative_humidity,
        })
    }

    /// Water-vapor density (g/m^3) from relative humidity via the ideal-gas law.
    pub fn water_vapor_density(&self) -> f64 {
        let e_pa = 1000.0 * saturation_vapor_pressure_unchecked(self.temperature_k)
            * self.relative_humidity
            / 100.0;
        // kg/m^3 -> g/m^3
        e_pa / (WATER_VAPOR_GAS_CONSTANT * self.temperature_k) * 1000.0
    }
}

/// Saturation vapor pressure over water (kPa) from the Buck equation.
///
/// Valid for temperatures in [200, 330] K; outside that the fit error grows
/// quickly, so the call is refused rather than extrapolated.
pub fn saturation_vapor_pressure(temperature_k: f64) -> Result<f64, AtmosphereError> {
    if !(TEMPERATURE_MIN_K..=TEMPERATURE_MAX_K).contains(&temperature_k) {
        return Err(AtmosphereError::TemperatureOutOfRange {
            kelvin: temperature_k,
        });
    }
    Ok(saturation_vapor_pressure_unchecked(temperature_k))
}

// Buck 1981 fit, arguments in degrees Celsius. Atmosphere::new enforces the
// temperature window, so internal callers skip the range check.
fn saturation_vapor_pressure_unchecked(temperature_k: f64) -> f64 {
    let t = temperature_k - 273.15;
    0.61121 * ((18.678 - t / 234.5) * (t / (257.14 + t))).exp()
}

/// One pressure-broadened absorption line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    /// Line center (Hz).
    pub center_hz: f64,
    /// Integrated line strength at reference vapor density (Hz * Np/m).
    pub strength: f64,
    /// Lorentzian half-width at half maximum (Hz).
    pub half_width_hz: f64,
}

impl SpectralLine {
    /// Unit-area Lorentzian profile evaluated at `f_hz`, times the strength.
    #[inline]
    fn contribution(&self, f_hz: f64) -> f64 {
        let df = f_hz - self.center_hz;
        self.strength * self.half_width_hz
            / (std::f64::consts::PI * (df * df + self.half_width_hz * self.half_width_hz))
    }
}

/// Molecular absorption as a function of frequency and air state.
///
/// Coefficients scale linearly with vapor density relative to
/// [`REFERENCE_VAPOR_DENSITY`]. When a lookup `table` is set it overrides the
/// line sum entirely (same reference-density convention).
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionModel {
    lines: Vec<SpectralLine>,
    continuum_np_per_m: f64,
    reference_vapor_density: f64,
    table: Option<Vec<(f64, f64)>>,
}

impl AbsorptionModel {
    /// Built-in nine-line water-vapor set covering 0.1-3 THz.
    ///
    /// Strengths and widths are coarse sea-level fits chosen so that clear-air
    /// absorption lands near 2e-3 Np/m at 300 GHz, 20 C, 50% RH; window
    /// positions match published low-THz spectra, peak magnitudes are
    /// order-of-magnitude only.
    pub fn builtin() -> Self {
        let ghz = 1e9;
        let lines = vec![
            SpectralLine { center_hz: 183.31 * ghz, strength: 6.1e7, half_width_hz: 3.0 * ghz },
            SpectralLine { center_hz: 325.15 * ghz, strength: 7.0e7, half_width_hz: 3.0 * ghz },
            SpectralLine { center_hz: 380.20 * ghz, strength: 8.7e8, half_width_hz: 3.0 * ghz },
            SpectralLine { center_hz: 448.00 * ghz, strength: 2.8e9, half_width_hz: 3.0 * ghz },
            SpectralLine { center_hz: 556.94 * ghz, strength: 5.1e10, half_width_hz: 3.5 * ghz },
            SpectralLine { center_hz: 752.03 * ghz, strength: 2.5e10, half_width_hz: 3.5 * ghz },
            SpectralLine { center_hz: 987.93 * ghz, strength: 2.9e10, half_width_hz: 4.0 * ghz },
            SpectralLine { center_hz: 1097.36 * ghz, strength: 1.4e10, half_width_hz: 4.0 * ghz },
            SpectralLine { center_hz: 1163.32 * ghz, strength: 4.3e10, half_width_hz: 4.0 * ghz },
        ];
        Self::from_lines(lines, DEFAULT_CONTINUUM_NP_PER_M, REFERENCE_VAPOR_DENSITY)
            .expect("builtin line set is valid")
    }

    /// Builds a line-sum model. `continuum_np_per_m` and the line strengths
    /// are taken at `reference_vapor_density` (g/m^3).
    pub fn from_lines(
        lines: Vec<SpectralLine>,
        continuum_np_per_m: f64,
        reference_vapor_density: f64,
    ) -> Result<Self, AtmosphereError> {
        for (index, line) in lines.iter().enumerate() {
            if !(line.center_hz > 0.0) {
                return Err(AtmosphereError::BadLine {
                    index,
                    message: format!("center must be positive, got {}", line.center_hz),
                });
            }
            if line.strength < 0.0 {
                return Err(AtmosphereError::BadLine {
                    index,
                    message: format!("strength must be non-negative, got {}", line.strength),
                });
            }
            if !(line.half_width_hz > 0.0) {
                return Err(AtmosphereError::BadLine {
                    index,
                    message: format!("half-width must be positive, got {}", line.half_width_hz),
                });
            }
        }
        if continuum_np_per_m < 0.0 {
            return Err(AtmosphereError::NegativeParameter {
                name: "continuum_np_per_m",
                value: continuum_np_per_m,
            });
        }
        if !(reference_vapor_density > 0.0) {
            return Err(AtmosphereError::NegativeParameter {
                name: "reference_vapor_density",
                value: reference_vapor_density,
            });
        }
        Ok(Self {
            lines,
            continuum_np_per_m,
            reference_vapor_density,
            table: None,
        })
    }

    /// Replaces line evaluation with linear interpolation over `(frequency,
    /// coefficient)` pairs quoted at `reference_vapor_density`. Entries must be
    /// strictly increasing in frequency; lookups outside the span error.
    pub fn from_table(
        table: Vec<(f64, f64)>,
        reference_vapor_density: f64,
    ) -> Result<Self, AtmosphereError> {
        if table.len() < 2 {
            return Err(AtmosphereError::TableTooShort);
        }
        for (index, pair) in table.iter().enumerate() {
            if index > 0 && !(pair.0 > table[index - 1].0) {
                return Err(AtmosphereError::BadLine {
                    index,
                    message: format!(
                        "table frequencies must be strictly increasing ({} after {})",
                        pair.0,
                        table[index - 1].0
                    ),
                });
            }
            if pair.1 < 0.0 {
                return Err(AtmosphereError::BadLine {
                    index,
                    message: format!("coefficient must be non-negative, got {}", pair.1),
                });
            }
        }
        if !(reference_vapor_density > 0.0) {
            return Err(AtmosphereError::NegativeParameter {
                name: "reference_vapor_density",
                value: reference_vapor_density,
            });
        }
        Ok(Self {
            lines: Vec::new(),
            continuum_np_per_m: 0.0,
            reference_vapor_density,
            table: Some(table),
        })
    }

    /// Loads a line-sum model from a `center_hz,strength,half_width_hz` CSV.
    pub fn from_lines_csv(
        path: &Path,
        continuum_np_per_m: f64,
        reference_vapor_density: f64,
    ) -> Result<Self, AtmosphereError> {
        let rows = read_csv(path, &["center_hz", "strength", "half_width_hz"])?;
        let lines = rows
            .into_iter()
            .map(|row| SpectralLine {
                center_hz: row[0],
                strength: row[1],
                half_width_hz: row[2],
            })
            .collect();
        Self::from_lines(lines, continuum_np_per_m, reference_vapor_density)
    }

    /// Loads a table model from a `frequency_hz,k_np_per_m` CSV.
    pub fn from_table_csv(
        path: &Path,
        reference_vapor_density: f64,
    ) -> Result<Self, AtmosphereError> {
        let rows = read_csv(path, &["frequency_hz", "k_np_per_m"])?;
        Self::from_table(
            rows.into_iter().map(|row| (row[0], row[1])).collect(),
            reference_vapor_density,
        )
    }

    pub fn lines(&self) -> &[SpectralLine] {
        &self.lines
    }

    pub fn reference_vapor_density(&self) -> f64 {
        self.reference_vapor_density
    }

    /// Absorption coefficient (Np/m) at `f_hz` for the given air state.
    pub fn absorption_coefficient(
        &self,
        f_hz: f64,
        atmosphere: &Atmosphere,
    ) -> Result<f64, AtmosphereError> {
        let scale = atmosphere.water_vapor_density() / self.reference_vapor_density;
        Ok(self.coefficient_at_reference(f_hz)? * scale)
    }

    /// Coefficient at the reference vapor density, before humidity scaling.
    pub fn coefficient_at_reference(&self, f_hz: f64) -> Result<f64, AtmosphereError> {
        if !(FREQ_MIN_HZ..=FREQ_MAX_HZ).contains(&f_hz) {
            return Err(AtmosphereError::FrequencyOutOfRange { hz: f_hz });
        }
        match &self.table {
            Some(table) => interpolate(table, f_hz),
            None => {
                let mut k = self.continuum_np_per_m;
                for line in &self.lines {
                    k += line.contribution(f_hz);
                }
                Ok(k)
            }
        }
    }
}

fn interpolate(table: &[(f64, f64)], f_hz: f64) -> Result<f64, AtmosphereError> {
    let (lo, hi) = (table[0].0, table[table.len() - 1].0);
    if f_hz < lo || f_hz > hi {
        return Err(AtmosphereError::TableExtrapolation { hz: f_hz, lo, hi });
    }
    let idx = table.partition_point(|&(f, _)| f <= f_hz);
    if idx == table.len() {
        return Ok(table[table.len() - 1].1);
    }
    let (f0, k0) = table[idx - 1];
    let (f1, k1) = table[idx];
    Ok(k0 + (k1 - k0) * (f_hz - f0) / (f1 - f0))
}

// Reader for the two fixed input schemas: exact header required, one float per
// column.
fn read_csv(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>, AtmosphereError> {
    let display = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => AtmosphereError::Io {
            path: display.clone(),
            source,
        },
        other => AtmosphereError::BadCsv {
            path: display.clone(),
            line: 1,
            message: format!("{other:?}"),
        },
    })?;
    let found = reader.headers().map_err(|e| AtmosphereError::BadCsv {
        path: display.clone(),
        line: 1,
        message: e.to_string(),
    })?;
    if found.iter().map(str::trim).ne(header.iter().copied()) {
        return Err(AtmosphereError::BadCsv {
            path: display,
            line: 1,
            message: format!(
                "expected header '{}', got '{}'",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| AtmosphereError::BadCsv {
            path: display.clone(),
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != header.len() {
            return Err(AtmosphereError::BadCsv {
                path: display,
                line,
                message: format!("expected {} fields, got {}", header.len(), record.len()),
            });
        }
        let mut row = Vec::with_capacity(header.len());
        for (field, name) in record.iter().zip(header) {
            row.push(
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| AtmosphereError::BadCsv {
                        path: display.clone(),
                        line,
                        message: format!("{name}: {e}"),
                    })?,
            );
        }
        rows.push(row);
    }
    Ok(rows)
}
