//! Eye-safety limits for spontaneous emission escaping the gain medium.
//!
//! The gain medium is treated as an extended source viewed from the most
//! restrictive distance `d_e`. The long-exposure irradiance limit follows the
//! usual correction-factor structure `10 C4 C6 C7` [W/m^2], scaled by a
//! single calibration factor so that 1064 nm at 40 mrad gives
//! 1349 W/m^2. A tabulated limit can replace the formula.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{check_non_negative, check_positive, Error, Result};

/// Supported wavelength band [m].
pub const MIN_WAVELENGTH: f64 = 400e-9;
pub const MAX_WAVELENGTH: f64 = 1400e-9;

/// Smallest and largest angular subtense entering `C6` [rad].
pub const ALPHA_MIN: f64 = 1.5e-3;
pub const ALPHA_MAX: f64 = 100e-3;

/// Ratio between the quoted reference limit at 1064 nm / 40 mrad
/// (1349 W/m^2) and the bare correction-factor product there.
pub const DEFAULT_CALIBRATION: f64 = 1349.0 / (10.0 * 5.0 * (40.0 / 1.5));

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetySpec {
    /// Pump source efficiency `eta_P`.
    pub pump_source_efficiency: f64,
    /// Pump transmission efficiency `eta_t`.
    pub pump_transmission_efficiency: f64,
    /// Absorption efficiency of the gain medium `eta_a`.
    pub absorption_efficiency: f64,
    /// Measurement distance `d_e` [m].
    pub measurement_distance: f64,
    /// Gain-medium aperture radius [m].
    pub gain_aperture: f64,
    /// Emission wavelength [m].
    pub wavelength: f64,
}

impl SafetySpec {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("eta_P", self.pump_source_efficiency),
            ("eta_t", self.pump_transmission_efficiency),
            ("eta_a", self.absorption_efficiency),
        ] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must lie in (0, 1]",
                });
            }
        }
        check_positive("d_e", self.measurement_distance)?;
        check_positive("a_g", self.gain_aperture)?;
        check_positive("lambda", self.wavelength)
    }

    pub fn overall_efficiency(&self) -> f64 {
        self.pump_source_efficiency * self.pump_transmission_efficiency * self.absorption_efficiency
    }

    /// Full angle subtended by the gain aperture at `d_e` [rad].
    pub fn angular_subtense(&self) -> f64 {
        2.0 * self.gain_aperture / self.measurement_distance
    }
}

pub fn absorbed_pump_power(spec: &SafetySpec, pump_power: f64) -> f64 {
    spec.overall_efficiency() * pump_power
}

/// Irradiance at `d_e` [W/m^2]; the rear HR coating doubles the forward
/// emission.
pub fn spontaneous_irradiance(spec: &SafetySpec, pump_power: f64) -> f64 {
    2.0 * absorbed_pump_power(spec, pump_power) / (4.0 * PI * spec.measurement_distance.powi(2))
}

/// Wavelength correction `C4`.
pub fn c4(wavelength_nm: f64) -> f64 {
    if wavelength_nm < 700.0 {
        1.0
    } else if wavelength_nm < 1050.0 {
        10f64.powf(0.002 * (wavelength_nm - 700.0))
    } else {
        5.0
    }
}

/// Source-size correction `C6`.
pub fn c6(alpha: f64) -> f64 {
    alpha.clamp(ALPHA_MIN, ALPHA_MAX) / ALPHA_MIN
}

/// Extended-source correction-factor model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedSourceMpe {
    pub calibration: f64,
}

impl Default for ExtendedSourceMpe {
    fn default() -> Self {
        Self {
            calibration: DEFAULT_CALIBRATION,
        }
    }
}

impl ExtendedSourceMpe {
    /// The bare correction-factor product with no calibration.
    pub fn uncalibrated() -> Self {
        Self { calibration: 1.0 }
    }

    /// Irradiance limit [W/m^2].
    pub fn evaluate(&self, wavelength: f64, alpha: f64) -> Result<f64> {
        check_band(wavelength)?;
        check_positive("alpha", alpha)?;
        let c7 = 1.0;
        Ok(self.calibration * 10.0 * c4(wavelength * 1e9) * c6(alpha) * c7)
    }
}

fn check_band(wavelength: f64) -> Result<()> {
    // Band edges given in nm may land one ulp outside after conversion.
    let slack = 1.0 + 1e-12;
    if wavelength >= MIN_WAVELENGTH / slack && wavelength <= MAX_WAVELENGTH * slack {
        Ok(())
    } else {
        Err(Error::WavelengthOutOfBand(wavelength))
    }
}

/// Calibrated extended-source limit [W/m^2].
pub fn mpe_extended_source(wavelength: f64, alpha: f64) -> Result<f64> {
    ExtendedSourceMpe::default().evaluate(wavelength, alpha)
}

/// User-supplied limit as a function of wavelength, linearly interpolated
/// and independent of the source size.
#[derive(Debug, Clone, PartialEq)]
pub struct MpeTable {
    /// (wavelength [m], MPE [W/m^2]) pairs sorted by wavelength.
    points: Vec<(f64, f64)>,
}

impl MpeTable {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config {
                line: 0,
                msg: "MPE table has no rows".into(),
            });
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Config {
                line: 0,
                msg: "MPE table repeats a wavelength".into(),
            });
        }
        Ok(Self { points })
    }

    /// Parses two whitespace- or comma-separated columns: wavelength [nm]
    /// and MPE [W/m^2]. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let bad = |msg: &str| Error::Config {
                line: index + 1,
                msg: msg.to_string(),
            };
            if fields.len() != 2 {
                return Err(bad("expected two columns: wavelength_nm mpe_w_per_m2"));
            }
            let nm: f64 = fields[0].parse().map_err(|_| bad("unparseable wavelength"))?;
            let mpe: f64 = fields[1].parse().map_err(|_| bad("unparseable MPE"))?;
            if !(mpe >= 0.0) || !nm.is_finite() {
                return Err(bad("MPE must be non-negative and wavelength finite"));
            }
            points.push((nm / 1e9, mpe));
        }
        Self::new(points)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn evaluate(&self, wavelength: f64) -> Result<f64> {
        let first = self.points[0];
        let last = self.points[self.points.len() - 1];
        if wavelength < first.0 || wavelength > last.0 {
            return Err(Error::WavelengthOutOfBand(wavelength));
        }
        let upper = self.points.partition_point(|p| p.0 < wavelength);
        if upper == 0 {
            return Ok(first.1);
        }
        let (x0, y0) = self.points[upper - 1];
        let (x1, y1) = self.points[upper];
        Ok(y0 + (y1 - y0) * (wavelength - x0) / (x1 - x0))
    }
}

/// Source of the irradiance limit.
#[derive(Debug, Clone, PartialEq)]
pub enum MpeSource {
    Formula(ExtendedSourceMpe),
    Table(MpeTable),
}

impl Default for MpeSource {
    fn default() -> Self {
        MpeSource::Formula(ExtendedSourceMpe::default())
    }
}

impl MpeSource {
    pub fn evaluate(&self, wavelength: f64, alpha: f64) -> Result<f64> {
        match self {
            MpeSource::Formula(model) => model.evaluate(wavelength, alpha),
            MpeSource::Table(table) => table.evaluate(wavelength),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafePower {
    /// Largest absorbed power keeping the irradiance at the limit [W].
    pub absorbed: f64,
    /// Corresponding pump source power [W].
    pub source: f64,
}

/// Powers at which the irradiance at `d_e` equals `mpe`.
pub fn safe_power_for_mpe(spec: &SafetySpec, mpe: f64) -> SafePower {
    let absorbed = mpe * 4.0 * PI * spec.measurement_distance.powi(2) / 2.0;
    SafePower {
        absorbed,
        source: absorbed / spec.overall_efficiency(),
    }
}

pub fn max_safe_source_power(spec: &SafetySpec, mpe: &MpeSource) -> Result<SafePower> {
    spec.validate()?;
    let limit = mpe.evaluate(spec.wavelength, spec.angular_subtense())?;
    Ok(safe_power_for_mpe(spec, limit))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyReport {
    pub pump_power: f64,
    pub absorbed_power: f64,
    /// [W/m^2]
    pub irradiance: f64,
    /// [W/m^2]
    pub mpe: f64,
    pub angular_subtense: f64,
    pub safe: SafePower,
}

impl SafetyReport {
    pub fn is_safe(&self) -> bool {
        self.irradiance <= self.mpe
    }
}

pub fn safety_report(spec: &SafetySpec, mpe: &MpeSource, pump_power: f64) -> Result<SafetyReport> {
    check_non_negative("P_in", pump_power)?;
    spec.validate()?;
    let alpha = spec.angular_subtense();
    let limit = mpe.evaluate(spec.wavelength, alpha)?;
    Ok(SafetyReport {
        pump_power,
        absorbed_power: absorbed_pump_power(spec, pump_power),
        irradiance: spontaneous_irradiance(spec, pump_power),
        mpe: limit,
        angular_subtense: alpha,
        safe: safe_power_for_mpe(spec, limit),
    })
}

impl std::fmt::Display for SafetyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "pump power P_in         {:.4} W", self.pump_power)?;
        writeln!(f, "absorbed power P_a      {:.4} W", self.absorbed_power)?;
        writeln!(f, "angular subtense        {:.4} mrad", self.angular_subtense * 1e3)?;
        writeln!(f, "irradiance at d_e       {:.6} W/cm^2", self.irradiance * 1e-4)?;
        writeln!(f, "MPE                     {:.6} W/cm^2", self.mpe * 1e-4)?;
        writeln!(f, "max absorbed P_a,safe   {:.4} W", self.safe.absorbed)?;
        writeln!(f, "max source P_in,safe    {:.4} W", self.safe.source)?;
        write!(f, "verdict                 {}", if self.is_safe() { "below MPE" } else { "ABOVE MPE" })
    }
}
