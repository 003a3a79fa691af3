//! System parameters and the `key = value unit` configuration format.
//!
//! A configuration file lists overrides on top of [`DEFAULTS`]. Values carry
//! optional unit suffixes (`f = 3 cm`, `d_eff = 4.7 pm/V`, `R_M2 = 91.5 %`)
//! and are converted to SI on read; a bare number is taken as SI. Lines are
//! `#`-commented. Unit prefixes shift the decimal exponent of the written
//! number, so `98.51 %` and the literal `0.9851` are the same double.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::channel::{CaptureArea, Concentrator, ItChain, NoiseSpec};
use crate::error::{check_fraction, check_non_negative, check_positive, Error, Result};
use crate::optics::{AxialLayout, CavityGeometry, CavityMode};
use crate::pv::{PtChain, PvSpec};
use crate::resonator::{DiffractionLoss, DiffractionModel, GainMedium, LossBudget, Resonator, ShgCrystal};
use crate::safety::{ExtendedSourceMpe, MpeSource, MpeTable, SafetySpec};
use crate::sweep::{OutputColumn, SweepSpec};

/// Reference system: resonator, receiver and safety parameters of the
/// desk-scale prototype at 6 m and 60 W pump.
pub const DEFAULTS: &str = "\
# cavity geometry
f           = 3 cm
l           = 3.015 cm
d           = 6 m
layout      = symmetric

# gain medium
I_s         = 1.1976e7 W/m^2
lambda      = 1064 nm
a_g         = 2 mm
l_g         = 1 mm
eta_c       = 43.9 %
Gamma_g     = 98.51 %

# frequency doubling
d_eff       = 4.7 pm/V
n0          = 2.23
l_s         = 0.4 mm
Gamma_SHG   = 99 %

# coatings
Gamma_L1    = 99 %
Gamma_L2    = 99 %
Gamma_L3    = 99 %
Gamma_L4    = 99 %
R_M1        = 99.5 %
R_M2        = 91.5 %
R_M5_2nu    = 99.5 %
Gamma_M5_nu = 99 %
Gamma_M2_2nu = 99 %
Gamma_gEOM  = 97.52 %
Gamma_PV    = 99.5 %

# propagation
alpha_air   = 0.0001 1/m
Gamma_diff  = model:clipped_fundamental

# photodiode and concentrator
A_PD        = 0.16 mm^2
Psi_c       = 30 deg
n_c         = 1.5
T_s         = 99.5 %
psi         = 0 deg
capture     = fundamental
gamma       = 0.4 A/W
B           = 800 MHz
R_IL        = 10 kohm
I_bk        = 5100 uA

# photovoltaic panel
rho         = 0.6 A/W
I0          = 0.32 uA
R_sh        = 53.82 ohm
R_s         = 37 mohm
n           = 1.48
n_s         = 1
T           = 298 K

# eye safety
eta_P       = 75 %
eta_t       = 99 %
eta_a       = 91 %
d_e         = 10 cm

# pump
P_in        = 60 W
";

/// Coating and surface factors not owned by a component struct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coatings {
    pub lens1: f64,
    pub lens2: f64,
    pub lens3: f64,
    pub lens4: f64,
    pub m1_reflectivity: f64,
    pub m2_reflectivity: f64,
    /// M5 reflectivity at the second harmonic.
    pub m5_reflectivity_2nu: f64,
    /// M5 transmittance at the fundamental.
    pub m5_transmittance_nu: f64,
    /// M2 transmittance at the second harmonic.
    pub m2_transmittance_2nu: f64,
    /// Gain medium plus modulator, seen by the second harmonic.
    pub gain_eom: f64,
    pub pv_surface: f64,
}

/// Pump-side efficiencies and viewing distance for the safety assessment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyInputs {
    pub pump_source_efficiency: f64,
    pub pump_transmission_efficiency: f64,
    pub absorption_efficiency: f64,
    pub measurement_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub geometry: CavityGeometry,
    pub gain: GainMedium,
    pub shg: ShgCrystal,
    pub coatings: Coatings,
    /// [1/m]
    pub air_attenuation: f64,
    pub diffraction: DiffractionLoss,
    pub concentrator: Concentrator,
    pub capture: CaptureArea,
    pub noise: NoiseSpec,
    pub pv: PvSpec,
    pub safety: SafetyInputs,
    pub mpe: MpeSource,
    /// Pump source power `P_in` [W].
    pub pump_power: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        let mut params = Self::zeroed();
        apply_overrides(&mut params, DEFAULTS, None).expect("embedded defaults parse");
        params
    }
}

impl SystemParams {
    /// A placeholder with every number zero, filled by [`DEFAULTS`].
    fn zeroed() -> Self {
        Self {
            geometry: CavityGeometry {
                focal_length: 0.0,
                lens_mirror_interval: 0.0,
                distance: 0.0,
                layout: AxialLayout::default(),
            },
            gain: GainMedium {
                saturation_intensity: 0.0,
                aperture_radius: 0.0,
                thickness: 0.0,
                pump_efficiency: 0.0,
                transmittance: 0.0,
                wavelength: 0.0,
            },
            shg: ShgCrystal {
                nonlinear_coefficient: 0.0,
                thickness: 0.0,
                refractive_index: 0.0,
                transmittance: 0.0,
            },
            coatings: Coatings {
                lens1: 0.0,
                lens2: 0.0,
                lens3: 0.0,
                lens4: 0.0,
                m1_reflectivity: 0.0,
                m2_reflectivity: 0.0,
                m5_reflectivity_2nu: 0.0,
                m5_transmittance_nu: 0.0,
                m2_transmittance_2nu: 0.0,
                gain_eom: 0.0,
                pv_surface: 0.0,
            },
            air_attenuation: 0.0,
            diffraction: DiffractionLoss::default(),
            concentrator: Concentrator {
                detector_area: 0.0,
                fov_half_angle: 0.0,
                refractive_index: 0.0,
                surface_transmittance: 0.0,
                incidence_angle: 0.0,
            },
            capture: CaptureArea::default(),
            noise: NoiseSpec {
                bandwidth: 0.0,
                temperature: 0.0,
                load_resistance: 0.0,
                background_current: 0.0,
                responsivity: 0.0,
            },
            pv: PvSpec {
                responsivity: 0.0,
                saturation_current: 0.0,
                shunt_resistance: 0.0,
                series_resistance: 0.0,
                ideality: 0.0,
                cells_in_series: 0,
                temperature: 0.0,
            },
            safety: SafetyInputs {
                pump_source_efficiency: 0.0,
                pump_transmission_efficiency: 0.0,
                absorption_efficiency: 0.0,
                measurement_distance: 0.0,
            },
            mpe: MpeSource::default(),
            pump_power: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        CavityGeometry::new(
            self.geometry.focal_length,
            self.geometry.lens_mirror_interval,
            self.geometry.distance,
        )?;
        self.resonator().validate()?;
        let c = &self.coatings;
        for (name, value) in [
            ("Gamma_L3", c.lens3),
            ("Gamma_L4", c.lens4),
            ("R_M5_2nu", c.m5_reflectivity_2nu),
            ("Gamma_M5_nu", c.m5_transmittance_nu),
            ("Gamma_M2_2nu", c.m2_transmittance_2nu),
            ("Gamma_gEOM", c.gain_eom),
            ("Gamma_PV", c.pv_surface),
        ] {
            check_fraction(name, value)?;
        }
        self.concentrator.validate()?;
        self.noise.validate()?;
        self.pv.validate()?;
        self.safety_spec().validate()?;
        check_non_negative("P_in", self.pump_power)
    }

    pub fn loss_budget(&self) -> LossBudget {
        LossBudget {
            lens1_transmittance: self.coatings.lens1,
            lens2_transmittance: self.coatings.lens2,
            m1_reflectivity: self.coatings.m1_reflectivity,
            m2_reflectivity: self.coatings.m2_reflectivity,
            air_attenuation: self.air_attenuation,
            diffraction: self.diffraction,
        }
    }

    pub fn resonator(&self) -> Resonator {
        Resonator {
            gain: self.gain,
            shg: self.shg,
            loss: self.loss_budget(),
        }
    }

    pub fn mode(&self) -> Result<CavityMode> {
        CavityMode::new(&self.geometry, self.gain.aperture_radius, self.gain.wavelength)
    }

    pub fn it_chain(&self) -> ItChain {
        ItChain {
            lens1_transmittance: self.coatings.lens1,
            gain_eom_transmittance: self.coatings.gain_eom,
            lens2_transmittance: self.coatings.lens2,
            m2_transmittance: self.coatings.m2_transmittance_2nu,
            m5_reflectivity: self.coatings.m5_reflectivity_2nu,
            lens4_transmittance: self.coatings.lens4,
            air_attenuation: self.air_attenuation,
        }
    }

    pub fn pt_chain(&self) -> PtChain {
        PtChain {
            pv_surface: self.coatings.pv_surface,
            lens3_transmittance: self.coatings.lens3,
            m5_transmittance: self.coatings.m5_transmittance_nu,
            lens2_transmittance: self.coatings.lens2,
            m2_reflectivity: self.coatings.m2_reflectivity,
            air_attenuation: self.air_attenuation,
        }
    }

    pub fn safety_spec(&self) -> SafetySpec {
        SafetySpec {
            pump_source_efficiency: self.safety.pump_source_efficiency,
            pump_transmission_efficiency: self.safety.pump_transmission_efficiency,
            absorption_efficiency: self.safety.absorption_efficiency,
            measurement_distance: self.safety.measurement_distance,
            gain_aperture: self.gain.aperture_radius,
            wavelength: self.gain.wavelength,
        }
    }
}

/// A parsed configuration: parameters plus optional sweep instructions.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: SystemParams,
    pub sweep: Option<SweepSpec>,
    pub outputs: Option<Vec<OutputColumn>>,
}

impl Scenario {
    /// Parses `text` as overrides on the defaults. Relative file references
    /// resolve against `base_dir` when given.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut params = SystemParams::default();
        let extras = apply_overrides(&mut params, text, base_dir)?;
        Ok(Self {
            params,
            sweep: extras.sweep,
            outputs: extras.outputs,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path.parent())
    }
}

#[derive(Debug, Default)]
pub(crate) struct Extras {
    sweep: Option<SweepSpec>,
    outputs: Option<Vec<OutputColumn>>,
}

/// Physical dimension of a numeric key, which fixes the accepted units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dim {
    Length,
    Area,
    Power,
    Fraction,
    Pure,
    Angle,
    Irradiance,
    Nonlinearity,
    Responsivity,
    Current,
    Resistance,
    Frequency,
    Temperature,
    Attenuation,
}

enum Scale {
    /// Multiply by `10^k`, applied to the decimal text so the result is the
    /// correctly rounded SI value.
    Pow10(i32),
    Degrees,
}

fn unit_scale(dim: Dim, unit: &str) -> Option<Scale> {
    use Scale::*;
    let scale = match (dim, unit) {
        (Dim::Length, "" | "m") => Pow10(0),
        (Dim::Length, "cm") => Pow10(-2),
        (Dim::Length, "mm") => Pow10(-3),
        (Dim::Length, "um" | "µm") => Pow10(-6),
        (Dim::Length, "nm") => Pow10(-9),
        (Dim::Length, "km") => Pow10(3),
        (Dim::Area, "" | "m^2") => Pow10(0),
        (Dim::Area, "cm^2") => Pow10(-4),
        (Dim::Area, "mm^2") => Pow10(-6),
        (Dim::Area, "um^2" | "µm^2") => Pow10(-12),
        (Dim::Power, "" | "W") => Pow10(0),
        (Dim::Power, "mW") => Pow10(-3),
        (Dim::Power, "kW") => Pow10(3),
        (Dim::Fraction | Dim::Pure, "") => Pow10(0),
        (Dim::Fraction, "%") => Pow10(-2),
        (Dim::Angle, "" | "rad") => Pow10(0),
        (Dim::Angle, "mrad") => Pow10(-3),
        (Dim::Angle, "deg") => Degrees,
        (Dim::Irradiance, "" | "W/m^2") => Pow10(0),
        (Dim::Irradiance, "W/cm^2") => Pow10(4),
        (Dim::Nonlinearity, "" | "m/V") => Pow10(0),
        (Dim::Nonlinearity, "pm/V") => Pow10(-12),
        (Dim::Responsivity, "" | "A/W") => Pow10(0),
        (Dim::Current, "" | "A") => Pow10(0),
        (Dim::Current, "mA") => Pow10(-3),
        (Dim::Current, "uA" | "µA") => Pow10(-6),
        (Dim::Current, "nA") => Pow10(-9),
        (Dim::Resistance, "" | "ohm" | "Ω") => Pow10(0),
        (Dim::Resistance, "mohm" | "mΩ") => Pow10(-3),
        (Dim::Resistance, "kohm" | "kΩ") => Pow10(3),
        (Dim::Resistance, "Mohm" | "MΩ") => Pow10(6),
        (Dim::Frequency, "" | "Hz") => Pow10(0),
        (Dim::Frequency, "kHz") => Pow10(3),
        (Dim::Frequency, "MHz") => Pow10(6),
        (Dim::Frequency, "GHz") => Pow10(9),
        (Dim::Temperature, "" | "K") => Pow10(0),
        (Dim::Attenuation, "" | "1/m") => Pow10(0),
        (Dim::Attenuation, "1/km") => Pow10(-3),
        _ => return None,
    };
    Some(scale)
}

/// Parses `value [unit]` into SI, for a quantity of dimension `dim`.
pub(crate) fn parse_quantity(text: &str, dim: Dim) -> std::result::Result<f64, String> {
    let text = text.trim();
    let split = match text.find(char::is_whitespace) {
        Some(at) => at,
        None => text
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | '+' | '-' | 'e' | 'E')))
            .unwrap_or(text.len()),
    };
    let (number, unit) = text.split_at(split);
    let number = number.trim();
    let value: f64 = number.parse().map_err(|_| format!("`{number}` is not a number"))?;
    if !value.is_finite() {
        return Err(format!("`{number}` is not finite"));
    }
    let unit = unit.trim();
    match unit_scale(dim, unit) {
        Some(Scale::Pow10(0)) => Ok(value),
        Some(Scale::Pow10(k)) => shift_decimal(number, k),
        Some(Scale::Degrees) => Ok(value.to_radians()),
        None => Err(format!("unit `{unit}` not accepted for a {dim:?} value")),
    }
}

/// Re-parses `number` with its decimal exponent shifted by `k`.
fn shift_decimal(number: &str, k: i32) -> std::result::Result<f64, String> {
    let (mantissa, exponent) = match number.find(['e', 'E']) {
        Some(at) => (&number[..at], number[at + 1..].parse::<i32>().map_err(|e| e.to_string())?),
        None => (number, 0),
    };
    format!("{mantissa}e{}", exponent + k)
        .parse()
        .map_err(|_| format!("`{number}` is not a number"))
}

type Setter = fn(&mut SystemParams, f64);

const NUMERIC_KEYS: &[(&str, Dim, Setter)] = &[
    ("f", Dim::Length, |p, v| p.geometry.focal_length = v),
    ("l", Dim::Length, |p, v| p.geometry.lens_mirror_interval = v),
    ("d", Dim::Length, |p, v| p.geometry.distance = v),
    ("I_s", Dim::Irradiance, |p, v| p.gain.saturation_intensity = v),
    ("lambda", Dim::Length, |p, v| p.gain.wavelength = v),
    ("a_g", Dim::Length, |p, v| p.gain.aperture_radius = v),
    ("l_g", Dim::Length, |p, v| p.gain.thickness = v),
    ("eta_c", Dim::Fraction, |p, v| p.gain.pump_efficiency = v),
    ("Gamma_g", Dim::Fraction, |p, v| p.gain.transmittance = v),
    ("d_eff", Dim::Nonlinearity, |p, v| p.shg.nonlinear_coefficient = v),
    ("n0", Dim::Pure, |p, v| p.shg.refractive_index = v),
    ("l_s", Dim::Length, |p, v| p.shg.thickness = v),
    ("Gamma_SHG", Dim::Fraction, |p, v| p.shg.transmittance = v),
    ("Gamma_L1", Dim::Fraction, |p, v| p.coatings.lens1 = v),
    ("Gamma_L2", Dim::Fraction, |p, v| p.coatings.lens2 = v),
    ("Gamma_L3", Dim::Fraction, |p, v| p.coatings.lens3 = v),
    ("Gamma_L4", Dim::Fraction, |p, v| p.coatings.lens4 = v),
    ("R_M1", Dim::Fraction, |p, v| p.coatings.m1_reflectivity = v),
    ("R_M2", Dim::Fraction, |p, v| p.coatings.m2_reflectivity = v),
    ("R_M5_2nu", Dim::Fraction, |p, v| p.coatings.m5_reflectivity_2nu = v),
    ("Gamma_M5_nu", Dim::Fraction, |p, v| p.coatings.m5_transmittance_nu = v),
    ("Gamma_M2_2nu", Dim::Fraction, |p, v| p.coatings.m2_transmittance_2nu = v),
    ("Gamma_gEOM", Dim::Fraction, |p, v| p.coatings.gain_eom = v),
    ("Gamma_PV", Dim::Fraction, |p, v| p.coatings.pv_surface = v),
    ("alpha_air", Dim::Attenuation, |p, v| p.air_attenuation = v),
    ("A_PD", Dim::Area, |p, v| p.concentrator.detector_area = v),
    ("Psi_c", Dim::Angle, |p, v| p.concentrator.fov_half_angle = v),
    ("n_c", Dim::Pure, |p, v| p.concentrator.refractive_index = v),
    ("T_s", Dim::Fraction, |p, v| p.concentrator.surface_transmittance = v),
    ("psi", Dim::Angle, |p, v| p.concentrator.incidence_angle = v),
    ("gamma", Dim::Responsivity, |p, v| p.noise.responsivity = v),
    ("B", Dim::Frequency, |p, v| p.noise.bandwidth = v),
    ("R_IL", Dim::Resistance, |p, v| p.noise.load_resistance = v),
    ("I_bk", Dim::Current, |p, v| p.noise.background_current = v),
    ("T_PD", Dim::Temperature, |p, v| p.noise.temperature = v),
    ("rho", Dim::Responsivity, |p, v| p.pv.responsivity = v),
    ("I0", Dim::Current, |p, v| p.pv.saturation_current = v),
    ("R_sh", Dim::Resistance, |p, v| p.pv.shunt_resistance = v),
    ("R_s", Dim::Resistance, |p, v| p.pv.series_resistance = v),
    ("n", Dim::Pure, |p, v| p.pv.ideality = v),
    ("T_PV", Dim::Temperature, |p, v| p.pv.temperature = v),
    ("T", Dim::Temperature, |p, v| {
        p.noise.temperature = v;
        p.pv.temperature = v;
    }),
    ("eta_P", Dim::Fraction, |p, v| p.safety.pump_source_efficiency = v),
    ("eta_t", Dim::Fraction, |p, v| p.safety.pump_transmission_efficiency = v),
    ("eta_a", Dim::Fraction, |p, v| p.safety.absorption_efficiency = v),
    ("d_e", Dim::Length, |p, v| p.safety.measurement_distance = v),
    ("P_in", Dim::Power, |p, v| p.pump_power = v),
];

const OTHER_KEYS: &[&str] = &[
    "layout",
    "Gamma_diff",
    "capture",
    "n_s",
    "mpe_table",
    "mpe_calibration",
    "sweep",
    "outputs",
];

/// Every key the parser accepts.
pub fn known_keys() -> impl Iterator<Item = &'static str> {
    NUMERIC_KEYS.iter().map(|(k, _, _)| *k).chain(OTHER_KEYS.iter().copied())
}

/// Applies `key = value` lines from `text` to `params`. Keys may not repeat
/// within one text.
pub(crate) fn apply_overrides(params: &mut SystemParams, text: &str, base_dir: Option<&Path>) -> Result<Extras> {
    let mut extras = Extras::default();
    let mut seen = HashSet::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let err = |msg: String| Error::Config { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(format!("`{key}` has no value")));
        }
        if !seen.insert(key.to_string()) {
            return Err(err(format!("`{key}` given twice")));
        }
        if let Some((_, dim, set)) = NUMERIC_KEYS.iter().find(|(k, _, _)| *k == key) {
            let v = parse_quantity(value, *dim).map_err(|m| err(format!("{key}: {m}")))?;
            set(params, v);
            continue;
        }
        match key {
            "layout" => {
                params.geometry.layout = match value {
                    "symmetric" => AxialLayout::Symmetric,
                    "literal" => AxialLayout::Literal,
                    _ => return Err(err(format!("layout must be `symmetric` or `literal`, got `{value}`"))),
                }
            }
            "Gamma_diff" => {
                params.diffraction = match value {
                    "model:clipped_fundamental" => DiffractionLoss::Model(DiffractionModel::ClippedFundamental),
                    "model:clipped_multimode" => DiffractionLoss::Model(DiffractionModel::ClippedMultimode),
                    _ => {
                        let v = parse_quantity(value, Dim::Fraction).map_err(|m| {
                            err(format!(
                                "Gamma_diff: {m}; expected a fraction or model:clipped_fundamental / model:clipped_multimode"
                            ))
                        })?;
                        DiffractionLoss::Constant(v)
                    }
                }
            }
            "capture" => {
                params.capture = match value {
                    "fundamental" => CaptureArea::FundamentalMode,
                    "multimode" => CaptureArea::Multimode,
                    "unity" => CaptureArea::Unity,
                    _ => {
                        return Err(err(format!(
                            "capture must be `fundamental`, `multimode` or `unity`, got `{value}`"
                        )))
                    }
                }
            }
            "n_s" => {
                params.pv.cells_in_series = value
                    .parse()
                    .map_err(|_| err(format!("n_s must be a positive integer, got `{value}`")))?;
            }
            "mpe_table" => {
                let path = resolve(base_dir, value);
                let table = MpeTable::load(&path).map_err(|e| err(format!("mpe_table: {e}")))?;
                params.mpe = MpeSource::Table(table);
            }
            "mpe_calibration" => {
                let calibration = parse_quantity(value, Dim::Pure).map_err(|m| err(format!("mpe_calibration: {m}")))?;
                check_positive("mpe_calibration", calibration).map_err(|e| err(e.to_string()))?;
                params.mpe = MpeSource::Formula(ExtendedSourceMpe { calibration });
            }
            "sweep" => {
                extras.sweep = Some(SweepSpec::parse(value).map_err(|e| err(e.to_string()))?);
            }
            "outputs" => {
                let columns = value
                    .split(',')
                    .map(|name| OutputColumn::parse(name.trim()))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| err(e.to_string()))?;
                extras.outputs = Some(columns);
            }
            _ => return Err(err(format!("unknown key `{key}`"))),
        }
    }
    Ok(extras)
}

fn resolve(base_dir: Option<&Path>, value: &str) -> PathBuf {
    let path = PathBuf::from(value);
    match base_dir {
        Some(base) if path.is_relative() => base.join(path),
        _ => path,
    }
}
