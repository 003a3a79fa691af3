//! Information-transfer branch: carrier delivery to the photodiode,
//! concentrator capture, receiver noise and achievable rate.

use std::f64::consts::{E, PI};

use crate::constants::{BOLTZMANN, ELECTRON_CHARGE};
use crate::error::{check_fraction, check_non_negative, check_positive, Error, Result};
use crate::optics::BeamProfile;
use crate::resonator::air_transmittance;

/// Non-imaging concentrator in front of the photodiode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Concentrator {
    /// Detector area `A_PD` [m^2].
    pub detector_area: f64,
    /// Field-of-view semi-angle `Psi_c` [rad].
    pub fov_half_angle: f64,
    /// Internal refractive index `n_c`.
    pub refractive_index: f64,
    /// Surface transmissivity `T_s`.
    pub surface_transmittance: f64,
    /// Incidence angle `psi` [rad].
    pub incidence_angle: f64,
}

impl Concentrator {
    pub fn validate(&self) -> Result<()> {
        check_positive("A_PD", self.detector_area)?;
        if !(self.fov_half_angle > 0.0 && self.fov_half_angle <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter {
                name: "Psi_c",
                value: self.fov_half_angle,
                reason: "must lie in (0, pi/2]",
            });
        }
        if !(self.refractive_index >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "n_c",
                value: self.refractive_index,
                reason: "must be at least 1",
            });
        }
        check_fraction("T_s", self.surface_transmittance)?;
        check_non_negative("psi", self.incidence_angle)
    }

    fn in_view(&self) -> bool {
        self.incidence_angle <= self.fov_half_angle
    }
}

/// `n_c^2 / sin^2(Psi_c)` inside the field of view, zero outside.
pub fn concentrator_gain(spec: &Concentrator) -> f64 {
    if spec.in_view() {
        (spec.refractive_index / spec.fov_half_angle.sin()).powi(2)
    } else {
        0.0
    }
}

/// `A_PD T_s g(psi) cos(psi)` inside the field of view, zero outside.
pub fn effective_area(spec: &Concentrator) -> f64 {
    if spec.in_view() {
        spec.detector_area * spec.surface_transmittance * concentrator_gain(spec) * spec.incidence_angle.cos()
    } else {
        0.0
    }
}

/// Captured fraction `min(A_eff / A_o, 1)`.
pub fn pd_capture_ratio(effective_area: f64, beam_area: f64) -> Result<f64> {
    check_positive("A_o", beam_area)?;
    Ok((effective_area / beam_area).min(1.0))
}

/// Beam cross-section used for the photodiode capture ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CaptureArea {
    /// `pi w00^2` at the detector plane.
    #[default]
    FundamentalMode,
    /// `pi w^2` with the multimode radius.
    Multimode,
    /// Every carrier photon reaches the detector (`Gamma_PD = 1`).
    Unity,
}

impl CaptureArea {
    /// `Gamma_PD` for a beam with the given profile at the detector.
    pub fn capture_ratio(self, concentrator: &Concentrator, profile: &BeamProfile) -> Result<f64> {
        let radius = match self {
            CaptureArea::Unity => return Ok(1.0),
            CaptureArea::FundamentalMode => profile.w00,
            CaptureArea::Multimode => profile.w,
        };
        pd_capture_ratio(effective_area(concentrator), PI * radius * radius)
    }
}

/// Factors between the SHG crystal and the photodiode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItChain {
    pub lens1_transmittance: f64,
    pub gain_eom_transmittance: f64,
    pub lens2_transmittance: f64,
    /// M2 transmittance at the second harmonic.
    pub m2_transmittance: f64,
    /// M5 reflectivity at the second harmonic.
    pub m5_reflectivity: f64,
    pub lens4_transmittance: f64,
    pub air_attenuation: f64,
}

impl ItChain {
    pub fn validate(&self) -> Result<()> {
        check_fraction("Gamma_L1", self.lens1_transmittance)?;
        check_fraction("Gamma_gEOM", self.gain_eom_transmittance)?;
        check_fraction("Gamma_L2", self.lens2_transmittance)?;
        check_fraction("Gamma_M2_2nu", self.m2_transmittance)?;
        check_fraction("R_M5_2nu", self.m5_reflectivity)?;
        check_fraction("Gamma_L4", self.lens4_transmittance)?;
        check_non_negative("alpha_air", self.air_attenuation)
    }

    pub fn transmittance(&self, distance: f64) -> f64 {
        self.lens4_transmittance
            * self.m5_reflectivity
            * self.m2_transmittance
            * self.lens2_transmittance
            * air_transmittance(self.air_attenuation, distance)
            * self.gain_eom_transmittance
            * self.lens1_transmittance
    }
}

pub fn received_it_power(carrier_power: f64, chain: &ItChain, distance: f64, capture_ratio: f64) -> f64 {
    capture_ratio * chain.transmittance(distance) * carrier_power
}

/// Photodiode receiver noise parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Bandwidth [Hz].
    pub bandwidth: f64,
    /// Temperature [K].
    pub temperature: f64,
    /// Load resistance [ohm].
    pub load_resistance: f64,
    /// Background photocurrent [A].
    pub background_current: f64,
    /// Photodiode responsivity `gamma` [A/W].
    pub responsivity: f64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        check_positive("B", self.bandwidth)?;
        check_positive("T", self.temperature)?;
        check_positive("R_IL", self.load_resistance)?;
        check_non_negative("I_bk", self.background_current)?;
        check_positive("gamma", self.responsivity)
    }

    /// Thermal noise floor `4 k T B / R_IL` [A^2].
    pub fn thermal_floor(&self) -> f64 {
        4.0 * BOLTZMANN * self.temperature * self.bandwidth / self.load_resistance
    }
}

/// Shot plus thermal noise variance [A^2].
pub fn noise_variance(spec: &NoiseSpec, received_power: f64) -> f64 {
    2.0 * ELECTRON_CHARGE * (spec.responsivity * received_power + spec.background_current) * spec.bandwidth
        + spec.thermal_floor()
}

/// Lower bound on the intensity-channel capacity [bit/s/Hz]:
/// `0.5 log2(1 + (gamma P)^2 / (2 pi e sigma^2))`.
pub fn achievable_rate(spec: &NoiseSpec, received_power: f64) -> f64 {
    let signal = spec.responsivity * received_power;
    let snr = signal * signal / (2.0 * PI * E * noise_variance(spec, received_power));
    0.5 * snr.log2_1p()
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    fn log2_1p(self) -> f64 {
        self.ln_1p() / std::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItResult {
    pub received_power: f64,
    pub noise_variance: f64,
    pub rate: f64,
}

pub fn evaluate_it(spec: &NoiseSpec, received_power: f64) -> ItResult {
    ItResult {
        received_power,
        noise_variance: noise_variance(spec, received_power),
        rate: achievable_rate(spec, received_power),
    }
}
