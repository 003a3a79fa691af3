//! Intracavity power: Rigrod analysis of the equivalent two-mirror
//! resonator coupled to the intracavity frequency-doubling loss.
//!
//! The four traveling-wave powers follow the usual convention: `P4` is
//! incident on the left (transmitter-side) equivalent mirror, `P1 = R1 P4`
//! leaves it, the gain medium amplifies `P1` into `P2`, and `P3 = R2 P2`
//! returns from the right equivalent mirror.

use std::f64::consts::PI;

use crate::constants::{SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::error::{check_fraction, check_non_negative, check_positive, Error, Result};
use crate::optics::CavityMode;

/// Relative change of `P4` between iterates that counts as converged.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-10;
/// Iteration cap for the coupled power/SHG solve.
pub const FIXED_POINT_MAX_ITERATIONS: usize = 10_000;
/// Weight of the previous iterate in the damped update.
pub const FIXED_POINT_DAMPING: f64 = 0.5;
/// Above this conversion efficiency the small-signal SHG model is suspect.
pub const SMALL_SIGNAL_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainMedium {
    /// Saturation intensity `I_s` [W/m^2].
    pub saturation_intensity: f64,
    /// Aperture radius `a_g` [m].
    pub aperture_radius: f64,
    /// Thickness `l_g` [m].
    pub thickness: f64,
    /// Combined pumping efficiency `eta_c`.
    pub pump_efficiency: f64,
    /// Round-trip transmittance `Gamma_g` of the gain medium surfaces.
    pub transmittance: f64,
    /// Lasing wavelength [m].
    pub wavelength: f64,
}

impl GainMedium {
    pub fn volume(&self) -> f64 {
        PI * self.aperture_radius.powi(2) * self.thickness
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("I_s", self.saturation_intensity)?;
        check_positive("a_g", self.aperture_radius)?;
        check_positive("l_g", self.thickness)?;
        check_fraction("eta_c", self.pump_efficiency)?;
        check_fraction("Gamma_g", self.transmittance)?;
        check_positive("lambda", self.wavelength)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShgCrystal {
    /// Effective nonlinear coefficient `d_eff` [m/V].
    pub nonlinear_coefficient: f64,
    /// Crystal thickness `l_s` [m].
    pub thickness: f64,
    /// Refractive index `n0`.
    pub refractive_index: f64,
    /// Transmittance `Gamma_SHG` excluding conversion loss.
    pub transmittance: f64,
}

impl ShgCrystal {
    pub fn validate(&self) -> Result<()> {
        check_non_negative("d_eff", self.nonlinear_coefficient)?;
        check_positive("l_s", self.thickness)?;
        if !(self.refractive_index > 1.0) {
            return Err(Error::InvalidParameter {
                name: "n0",
                value: self.refractive_index,
                reason: "must exceed 1",
            });
        }
        check_fraction("Gamma_SHG", self.transmittance)
    }

    /// Conversion efficiency per unit intensity [m^2/W]:
    /// `8 pi^2 d_eff^2 l_s^2 / (eps0 c lambda^2 n0^3)`.
    pub fn efficiency_per_intensity(&self, wavelength: f64) -> f64 {
        8.0 * PI * PI * self.nonlinear_coefficient.powi(2) * self.thickness.powi(2)
            / (VACUUM_PERMITTIVITY * SPEED_OF_LIGHT * wavelength.powi(2) * self.refractive_index.powi(3))
    }
}

/// How the single-pass diffraction factor is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiffractionModel {
    /// TEM00 mode at the receiver pupil clipped by an aperture of radius `a_g`.
    #[default]
    ClippedFundamental,
    /// Multimode beam at the receiver pupil clipped by `a_g`. The multimode
    /// radius equals `a_g` at the gain pupil by construction, so this variant
    /// is nearly distance-independent and very lossy.
    ClippedMultimode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiffractionLoss {
    Model(DiffractionModel),
    Constant(f64),
}

impl Default for DiffractionLoss {
    fn default() -> Self {
        DiffractionLoss::Model(DiffractionModel::default())
    }
}

/// Cavity-side loss factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBudget {
    pub lens1_transmittance: f64,
    pub lens2_transmittance: f64,
    pub m1_reflectivity: f64,
    pub m2_reflectivity: f64,
    /// Air attenuation coefficient [1/m].
    pub air_attenuation: f64,
    pub diffraction: DiffractionLoss,
}

impl LossBudget {
    pub fn validate(&self) -> Result<()> {
        check_fraction("Gamma_L1", self.lens1_transmittance)?;
        check_fraction("Gamma_L2", self.lens2_transmittance)?;
        check_fraction("R_M1", self.m1_reflectivity)?;
        check_fraction("R_M2", self.m2_reflectivity)?;
        check_non_negative("alpha_air", self.air_attenuation)?;
        if let DiffractionLoss::Constant(value) = self.diffraction {
            check_fraction("Gamma_diff", value)?;
        }
        Ok(())
    }

    /// `Gamma_RR1 = Gamma_L1^2 R_M1`.
    pub fn rr1_factor(&self) -> f64 {
        self.lens1_transmittance.powi(2) * self.m1_reflectivity
    }

    /// `Gamma_RR2 = Gamma_L2^2 R_M2`.
    pub fn rr2_factor(&self) -> f64 {
        self.lens2_transmittance.powi(2) * self.m2_reflectivity
    }
}

/// Everything the intracavity solve needs besides geometry and pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonator {
    pub gain: GainMedium,
    pub shg: ShgCrystal,
    pub loss: LossBudget,
}

impl Resonator {
    pub fn validate(&self) -> Result<()> {
        self.gain.validate()?;
        self.shg.validate()?;
        self.loss.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LasingStatus {
    Lasing,
    BelowThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelWarning {
    /// Crystal thicker than the Rayleigh range at the crystal, so the
    /// plane-wave conversion formula is outside its validity range.
    PlaneWaveInvalid { crystal_thickness: f64, rayleigh_range: f64 },
    /// Conversion efficiency above the small-signal limit.
    LargeConversion { eta_shg: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntracavitySolution {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub eta_shg: f64,
    pub r1: f64,
    pub r2: f64,
    /// Frequency-doubled carrier power `2 eta P4` [W].
    pub carrier_power: f64,
    pub gamma_diff: f64,
    pub status: LasingStatus,
    pub iterations: usize,
    pub warnings: Vec<ModelWarning>,
}

pub fn air_transmittance(attenuation: f64, distance: f64) -> f64 {
    (-attenuation * distance).exp()
}

/// Power fraction of a Gaussian of radius `w` inside a centred aperture of
/// radius `a`.
pub fn clipped_gaussian_fraction(aperture: f64, beam_radius: f64) -> f64 {
    -(-2.0 * (aperture / beam_radius).powi(2)).exp_m1()
}

/// Diffraction factor `Gamma_diff` for the given mode.
pub fn diffraction_loss(mode: &CavityMode, gain_aperture: f64, loss: &DiffractionLoss) -> Result<f64> {
    match *loss {
        DiffractionLoss::Constant(value) => Ok(value),
        DiffractionLoss::Model(model) => {
            let profile = mode.profile(mode.geometry.z_receiver_pupil())?;
            let radius = match model {
                DiffractionModel::ClippedFundamental => profile.w00,
                DiffractionModel::ClippedMultimode => profile.w,
            };
            Ok(clipped_gaussian_fraction(gain_aperture, radius))
        }
    }
}

/// Voltage reflection coefficients of the equivalent mirrors:
/// `r1 = (1 - eta) Gamma_SHG sqrt(Gamma_RR1)` and
/// `r2 = Gamma_g Gamma_air sqrt(Gamma_RR2 Gamma_diff)`.
pub fn equivalent_reflectances(
    loss: &LossBudget,
    shg: &ShgCrystal,
    gain: &GainMedium,
    eta_shg: f64,
    distance: f64,
    gamma_diff: f64,
) -> (f64, f64) {
    let r1 = (1.0 - eta_shg) * shg.transmittance * loss.rr1_factor().sqrt();
    let r2 = gain.transmittance
        * air_transmittance(loss.air_attenuation, distance)
        * (loss.rr2_factor() * gamma_diff).sqrt();
    (r1, r2)
}

/// Small-signal SHG efficiency for a standing wave of one-way power `P4`
/// and radius `w0` at the crystal (intensity `2 P4 / (pi w0^2)`).
pub fn shg_efficiency(shg: &ShgCrystal, p4: f64, w0: f64, wavelength: f64) -> f64 {
    shg.efficiency_per_intensity(wavelength) * 2.0 * p4 / (PI * w0 * w0)
}

/// Pump power at which the Rigrod bracket vanishes.
pub fn threshold_pump_power(gain: &GainMedium, r1: f64, r2: f64) -> f64 {
    (1.0 / (r1 * r2)).ln() * gain.saturation_intensity * PI * gain.aperture_radius.powi(2) / gain.pump_efficiency
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigrodPower {
    pub p4: f64,
    pub status: LasingStatus,
}

/// Rigrod output power incident on the left equivalent mirror.
pub fn rigrod_p4(gain: &GainMedium, r1: f64, r2: f64, pump_power: f64) -> Result<RigrodPower> {
    let round_trip = r1 * r2;
    if round_trip >= 1.0 {
        return Err(Error::LosslessCavity(round_trip));
    }
    let mode_area_power = PI * gain.aperture_radius.powi(2) * gain.saturation_intensity;
    let small_signal = gain.thickness * gain.pump_efficiency * pump_power / (gain.saturation_intensity * gain.volume());
    let bracket = small_signal - (1.0 / round_trip).ln();
    if !(bracket > 0.0) {
        return Ok(RigrodPower {
            p4: 0.0,
            status: LasingStatus::BelowThreshold,
        });
    }
    let p4 = mode_area_power / ((1.0 + r1 / r2) * (1.0 - round_trip)) * bracket;
    Ok(RigrodPower {
        p4,
        status: LasingStatus::Lasing,
    })
}

/// Self-consistent intracavity solution for pump power `pump_power`.
///
/// The SHG efficiency depends on `P4`, which in turn depends on the SHG
/// loss through `r1`; the pair is found by damped fixed-point iteration on
/// `eta`.
pub fn solve_intracavity(resonator: &Resonator, mode: &CavityMode, pump_power: f64) -> Result<IntracavitySolution> {
    check_non_negative("P_in", pump_power)?;
    let Resonator { gain, shg, loss } = resonator;
    let gamma_diff = diffraction_loss(mode, gain.aperture_radius, &loss.diffraction)?;
    let distance = mode.geometry.distance;
    let w0 = mode.profile(0.0)?.w;

    let mut warnings = Vec::new();
    let rayleigh_range = mode.rayleigh_range_at_mirror();
    if shg.thickness >= rayleigh_range {
        warnings.push(ModelWarning::PlaneWaveInvalid {
            crystal_thickness: shg.thickness,
            rayleigh_range,
        });
    }

    let power_at = |eta: f64| -> Result<(f64, f64, RigrodPower)> {
        let (r1, r2) = equivalent_reflectances(loss, shg, gain, eta, distance, gamma_diff);
        Ok((r1, r2, rigrod_p4(gain, r1, r2, pump_power)?))
    };

    let (_, _, unloaded) = power_at(0.0)?;
    if unloaded.status == LasingStatus::BelowThreshold {
        let (r1, r2) = equivalent_reflectances(loss, shg, gain, 0.0, distance, gamma_diff);
        return Ok(IntracavitySolution {
            p1: 0.0,
            p2: 0.0,
            p3: 0.0,
            p4: 0.0,
            eta_shg: 0.0,
            r1,
            r2,
            carrier_power: 0.0,
            gamma_diff,
            status: LasingStatus::BelowThreshold,
            iterations: 0,
            warnings,
        });
    }

    let mut eta = 0.0;
    let mut previous_p4 = unloaded.p4;
    for iteration in 1..=FIXED_POINT_MAX_ITERATIONS {
        let target = shg_efficiency(shg, previous_p4, w0, gain.wavelength);
        eta = (FIXED_POINT_DAMPING * eta + (1.0 - FIXED_POINT_DAMPING) * target).clamp(0.0, 1.0 - f64::EPSILON);
        let (r1, r2, rigrod) = power_at(eta)?;
        let p4 = rigrod.p4;
        let change = (p4 - previous_p4).abs();
        previous_p4 = p4;
        if change <= FIXED_POINT_TOLERANCE * p4.max(f64::MIN_POSITIVE) {
            if p4 == 0.0 {
                break;
            }
            if eta > SMALL_SIGNAL_LIMIT {
                warnings.push(ModelWarning::LargeConversion { eta_shg: eta });
            }
            let p2 = r1 / r2 * p4;
            return Ok(IntracavitySolution {
                p1: r1 * r1 * p4,
                p2,
                p3: r2 * r2 * p2,
                p4,
                eta_shg: eta,
                r1,
                r2,
                carrier_power: 2.0 * eta * p4,
                gamma_diff,
                status: LasingStatus::Lasing,
                iterations: iteration,
                warnings,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: FIXED_POINT_MAX_ITERATIONS,
        last_p4: previous_p4,
        last_eta: eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::CavityGeometry;
    use approx::assert_relative_eq;

    fn gain() -> GainMedium {
        GainMedium {
            saturation_intensity: 1.1976e7,
            aperture_radius: 2e-3,
            thickness: 1e-3,
            pump_efficiency: 0.439,
            transmittance: 0.9851,
            wavelength: 1064e-9,
        }
    }

    fn shg() -> ShgCrystal {
        ShgCrystal {
            nonlinear_coefficient: 4.7e-12,
            thickness: 0.4e-3,
            refractive_index: 2.23,
            transmittance: 0.99,
        }
    }

    fn loss(diffraction: DiffractionLoss) -> LossBudget {
        LossBudget {
            lens1_transmittance: 0.99,
            lens2_transmittance: 0.99,
            m1_reflectivity: 0.995,
            m2_reflectivity: 0.915,
            air_attenuation: 1e-4,
            diffraction,
        }
    }

    fn mode(d: f64) -> CavityMode {
        CavityMode::new(&CavityGeometry::new(0.03, 0.03015, d).unwrap(), 2e-3, 1064e-9).unwrap()
    }

    #[test]
    fn air_transmittance_examples() {
        assert_eq!(air_transmittance(1e-4, 0.0), 1.0);
        assert_eq!(air_transmittance(0.0, 100.0), 1.0);
        assert_relative_eq!(air_transmittance(1e-4, 6.0), 0.999_400_179_964_00, max_relative = 1e-12);
    }

    #[test]
    fn lossless_reflectances() {
        let unit = LossBudget {
            lens1_transmittance: 1.0,
            lens2_transmittance: 1.0,
            m1_reflectivity: 1.0,
            m2_reflectivity: 1.0,
            air_attenuation: 0.0,
            diffraction: DiffractionLoss::Constant(1.0),
        };
        let crystal = ShgCrystal { transmittance: 1.0, ..shg() };
        let medium = GainMedium { transmittance: 1.0, ..gain() };
        assert_eq!(equivalent_reflectances(&unit, &crystal, &medium, 0.0, 5.0, 1.0), (1.0, 1.0));
        assert_eq!(equivalent_reflectances(&unit, &crystal, &medium, 1.0, 5.0, 1.0).0, 0.0);
    }

    #[test]
    fn table_reflectances() {
        let (r1, r2) = equivalent_reflectances(&loss(DiffractionLoss::Constant(1.0)), &shg(), &gain(), 0.0, 6.0, 1.0);
        // Oracle: plain factor products.
        let r1_oracle = 0.99 * (0.99f64 * 0.99 * 0.995).sqrt();
        let r2_oracle = 0.9851 * (-6e-4f64).exp() * (0.99f64 * 0.99 * 0.915).sqrt();
        assert_relative_eq!(r1, r1_oracle, max_relative = 1e-14);
        assert_relative_eq!(r2, r2_oracle, max_relative = 1e-14);
        assert!((r1 - 0.9777).abs() < 1e-4);
        assert!((r2 - 0.9323).abs() < 1e-4);
        assert!((r1 * r1 - 0.9558).abs() < 1e-4);
        assert!((r2 * r2 - 0.8692).abs() < 1e-4);
    }

    #[test]
    fn threshold_matches_bracket_zero() {
        let (r1, r2) = equivalent_reflectances(&loss(DiffractionLoss::Constant(1.0)), &shg(), &gain(), 0.0, 6.0, 1.0);
        let threshold = threshold_pump_power(&gain(), r1, r2);
        assert!((threshold - 31.8).abs() < 0.1, "threshold {threshold}");
        // Oracle: bisection on the sign of the Rigrod bracket.
        let bracket = |p: f64| {
            let g = gain();
            g.thickness * g.pump_efficiency * p / (g.saturation_intensity * g.volume()) - (1.0 / (r1 * r2)).ln()
        };
        let (mut lo, mut hi) = (0.0, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if bracket(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert_relative_eq!(threshold, lo, max_relative = 1e-12);
        assert_eq!(rigrod_p4(&gain(), r1, r2, 0.99 * threshold).unwrap().status, LasingStatus::BelowThreshold);
        assert_eq!(rigrod_p4(&gain(), r1, r2, 1.01 * threshold).unwrap().status, LasingStatus::Lasing);
    }

    #[test]
    fn rigrod_at_sixty_watts() {
        let (r1, r2) = equivalent_reflectances(&loss(DiffractionLoss::Constant(1.0)), &shg(), &gain(), 0.0, 6.0, 1.0);
        let p4 = rigrod_p4(&gain(), r1, r2, 60.0).unwrap().p4;
        // Independent arithmetic: prefactor 150.50 W / ((1 + r1/r2)(1 - r1 r2)),
        // bracket 60 * 0.439 / 150.50 - ln(1/(r1 r2)).
        let area_power = PI * 4e-6 * 1.1976e7;
        let oracle = area_power / ((1.0 + r1 / r2) * (1.0 - r1 * r2)) * (60.0 * 0.439 / area_power - (1.0 / (r1 * r2)).ln());
        assert_relative_eq!(p4, oracle, max_relative = 1e-12);
        assert!((p4 - 68.4).abs() < 0.1, "P4 = {p4}");
    }

    #[test]
    fn lossless_cavity_is_an_error() {
        assert!(matches!(rigrod_p4(&gain(), 1.0, 1.0, 10.0), Err(Error::LosslessCavity(_))));
    }

    #[test]
    fn shg_efficiency_scaling() {
        let crystal = shg();
        assert_eq!(shg_efficiency(&crystal, 0.0, 1e-5, 1064e-9), 0.0);
        let base = shg_efficiency(&crystal, 68.0, 1e-5, 1064e-9);
        let thick = ShgCrystal { thickness: 0.8e-3, ..crystal };
        assert_relative_eq!(shg_efficiency(&thick, 68.0, 1e-5, 1064e-9), 4.0 * base, max_relative = 1e-12);
        // Constant-by-constant recomputation with rounded constants.
        let coefficient = 8.0 * PI * PI * (4.7e-12f64).powi(2) * (4e-4f64).powi(2)
            / (8.854e-12 * 2.998e8 * (1064e-9f64).powi(2) * 2.23f64.powi(3));
        let oracle = coefficient * 2.0 * 68.0 / (PI * 1e-10);
        assert_relative_eq!(base, oracle, max_relative = 1e-3);
    }

    #[test]
    fn clipped_gaussian_limits() {
        assert_eq!(clipped_gaussian_fraction(1.0, 1e-6), 1.0);
        assert_relative_eq!(clipped_gaussian_fraction(1.0, 1.0), 1.0 - (-2.0f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn diffraction_constant_override() {
        let m = mode(6.0);
        assert_eq!(diffraction_loss(&m, 2e-3, &DiffractionLoss::Constant(0.98)).unwrap(), 0.98);
    }

    #[test]
    fn diffraction_vanishes_at_short_range() {
        let m = mode(0.01);
        let g = diffraction_loss(&m, 2e-3, &DiffractionLoss::default()).unwrap();
        assert!(g > 1.0 - 1e-9, "{g}");
    }

    #[test]
    fn diffraction_grows_with_distance() {
        let values: Vec<f64> = [1.0, 3.0, 6.0, 9.0, 11.0]
            .iter()
            .map(|&d| diffraction_loss(&mode(d), 2e-3, &DiffractionLoss::default()).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
    }

    #[test]
    fn below_threshold_is_all_zero() {
        let resonator = Resonator {
            gain: gain(),
            shg: shg(),
            loss: loss(DiffractionLoss::Constant(1.0)),
        };
        let s = solve_intracavity(&resonator, &mode(6.0), 1.0).unwrap();
        assert_eq!(s.status, LasingStatus::BelowThreshold);
        assert_eq!((s.p1, s.p2, s.p3, s.p4, s.eta_shg, s.carrier_power), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn converged_solution_identities() {
        let resonator = Resonator {
            gain: gain(),
            shg: shg(),
            loss: loss(DiffractionLoss::default()),
        };
        let s = solve_intracavity(&resonator, &mode(6.0), 60.0).unwrap();
        assert_eq!(s.status, LasingStatus::Lasing);
        assert_relative_eq!(s.p1 * s.p4, s.p2 * s.p3, max_relative = 1e-10);
        assert_relative_eq!(s.p1, s.r1 * s.r1 * s.p4, max_relative = 1e-14);
        assert_relative_eq!(s.p3, s.r2 * s.r2 * s.p2, max_relative = 1e-14);
        assert!(s.p1 <= s.p4 && s.p3 <= s.p2);
        assert!(s.eta_shg > 0.0 && s.eta_shg < SMALL_SIGNAL_LIMIT);
        let expected_eta = shg_efficiency(&resonator.shg, s.p4, mode(6.0).profile(0.0).unwrap().w, 1064e-9);
        assert_relative_eq!(s.eta_shg, expected_eta, max_relative = 1e-8);
        assert!(s
            .warnings
            .iter()
            .any(|w| matches!(w, ModelWarning::PlaneWaveInvalid { .. })));
    }

    #[test]
    fn zero_nonlinearity_reduces_to_rigrod() {
        let resonator = Resonator {
            gain: gain(),
            shg: ShgCrystal {
                nonlinear_coefficient: 0.0,
                ..shg()
            },
            loss: loss(DiffractionLoss::Constant(1.0)),
        };
        let s = solve_intracavity(&resonator, &mode(6.0), 60.0).unwrap();
        let (r1, r2) = equivalent_reflectances(&resonator.loss, &resonator.shg, &resonator.gain, 0.0, 6.0, 1.0);
        assert_eq!(s.eta_shg, 0.0);
        assert_eq!(s.carrier_power, 0.0);
        assert_eq!(s.p4, rigrod_p4(&resonator.gain, r1, r2, 60.0).unwrap().p4);
    }

    #[test]
    fn constant_diffraction_equal_to_model_gives_same_powers() {
        let m = mode(6.0);
        let modelled = Resonator {
            gain: gain(),
            shg: shg(),
            loss: loss(DiffractionLoss::default()),
        };
        let a = solve_intracavity(&modelled, &m, 60.0).unwrap();
        let pinned = Resonator {
            loss: loss(DiffractionLoss::Constant(a.gamma_diff)),
            ..modelled
        };
        let b = solve_intracavity(&pinned, &m, 60.0).unwrap();
        assert_relative_eq!(a.p4, b.p4, max_relative = 1e-12);
        assert_relative_eq!(a.carrier_power, b.carrier_power, max_relative = 1e-12);
    }

    #[test]
    fn p4_non_decreasing_in_pump() {
        let resonator = Resonator {
            gain: gain(),
            shg: shg(),
            loss: loss(DiffractionLoss::default()),
        };
        let m = mode(6.0);
        let mut last = 0.0;
        for i in 1..=50 {
            let s = solve_intracavity(&resonator, &m, 2.0 * i as f64).unwrap();
            assert!(s.p4 >= last, "P4 dropped at pump {}", 2 * i);
            last = s.p4;
        }
        assert!(last > 0.0);
    }

    #[test]
    fn p4_non_increasing_in_conversion() {
        let l = loss(DiffractionLoss::Constant(1.0));
        let mut last = f64::INFINITY;
        for i in 0..50 {
            let eta = i as f64 * 0.002;
            let (r1, r2) = equivalent_reflectances(&l, &shg(), &gain(), eta, 6.0, 1.0);
            let p4 = rigrod_p4(&gain(), r1, r2, 60.0).unwrap().p4;
            assert!(p4 <= last);
            last = p4;
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GainMedium { pump_efficiency: 1.2, ..gain() }.validate().is_err());
        assert!(ShgCrystal { refractive_index: 0.9, ..shg() }.validate().is_err());
        assert!(loss(DiffractionLoss::Constant(0.0)).validate().is_err());
    }
}
