//! Power-transfer branch: extraction through the output coupler, the
//! single-diode photovoltaic model and maximum-power-point tracking.

use crate::constants::thermal_voltage;
use crate::error::{check_fraction, check_non_negative, check_positive, Error, Result};
use crate::numeric::{bisect_decreasing, golden_section_max, is_unimodal, linspace};
use crate::resonator::{air_transmittance, IntracavitySolution, LasingStatus};

/// Width of the final golden-section bracket [V].
pub const MPPT_VOLTAGE_TOLERANCE: f64 = 1e-10;
/// Exponent arguments are clamped here to keep `exp` finite.
const MAX_EXPONENT: f64 = 700.0;
const UNIMODALITY_SAMPLES: usize = 257;
const FALLBACK_SCAN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvSpec {
    /// Optical-to-electrical responsivity `rho` [A/W].
    pub responsivity: f64,
    /// Reverse saturation current `I0` [A].
    pub saturation_current: f64,
    /// Shunt resistance [ohm].
    pub shunt_resistance: f64,
    /// Series resistance [ohm].
    pub series_resistance: f64,
    /// Diode ideality factor `n`.
    pub ideality: f64,
    pub cells_in_series: u32,
    /// Cell temperature [K].
    pub temperature: f64,
}

impl PvSpec {
    pub fn validate(&self) -> Result<()> {
        check_positive("rho", self.responsivity)?;
        check_positive("I0", self.saturation_current)?;
        check_positive("R_sh", self.shunt_resistance)?;
        check_non_negative("R_s", self.series_resistance)?;
        check_positive("n", self.ideality)?;
        check_positive("n_s", self.cells_in_series as f64)?;
        check_positive("T", self.temperature)
    }

    /// `n_s n V_T`.
    fn diode_voltage_scale(&self) -> f64 {
        self.cells_in_series as f64 * self.ideality * thermal_voltage(self.temperature)
    }

    pub fn diode_current(&self, diode_voltage: f64) -> f64 {
        let exponent = (diode_voltage / self.diode_voltage_scale()).min(MAX_EXPONENT);
        self.saturation_current * exponent.exp_m1()
    }

    /// Photocurrent minus diode and shunt currents at diode voltage `vd`.
    fn node_current(&self, photo_current: f64, vd: f64) -> f64 {
        photo_current - self.diode_current(vd) - vd / self.shunt_resistance
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub v_charge: f64,
    pub i_charge: f64,
    pub p_charge: f64,
    pub v_diode: f64,
    pub i_diode: f64,
    /// Implied load resistance `V/I` (infinite at open circuit).
    pub r_load: f64,
}

impl OperatingPoint {
    fn zero() -> Self {
        Self {
            v_charge: 0.0,
            i_charge: 0.0,
            p_charge: 0.0,
            v_diode: 0.0,
            i_diode: 0.0,
            r_load: f64::NAN,
        }
    }

    fn from_diode(spec: &PvSpec, photo_current: f64, v_charge: f64, v_diode: f64) -> Self {
        let i_diode = spec.diode_current(v_diode);
        let i_charge = photo_current - i_diode - v_diode / spec.shunt_resistance;
        Self {
            v_charge,
            i_charge,
            p_charge: v_charge * i_charge,
            v_diode,
            i_diode,
            r_load: v_charge / i_charge,
        }
    }
}

/// Relative residuals of the three circuit equations (node current, diode
/// law, series drop), each scaled by the largest current or voltage involved.
pub fn kirchhoff_residuals(spec: &PvSpec, photo_current: f64, op: &OperatingPoint) -> [f64; 3] {
    let current_scale = photo_current
        .abs()
        .max(op.i_diode.abs())
        .max(op.i_charge.abs())
        .max(f64::MIN_POSITIVE);
    let node = (op.i_charge - (photo_current - op.i_diode - op.v_diode / spec.shunt_resistance)).abs() / current_scale;
    let diode = (op.i_diode - spec.diode_current(op.v_diode)).abs() / current_scale;
    let voltage_scale = op.v_diode.abs().max(op.v_charge.abs()).max(f64::MIN_POSITIVE);
    let series = (op.v_diode - (op.v_charge + op.i_charge * spec.series_resistance)).abs() / voltage_scale;
    [node, diode, series]
}

/// Factors on the way from the output coupler to the PV panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtChain {
    pub pv_surface: f64,
    pub lens3_transmittance: f64,
    pub m5_transmittance: f64,
    pub lens2_transmittance: f64,
    /// Output coupler reflectivity at the fundamental; its transmittance is
    /// taken as `1 - R_M2`.
    pub m2_reflectivity: f64,
    pub air_attenuation: f64,
}

impl PtChain {
    pub fn validate(&self) -> Result<()> {
        check_fraction("Gamma_PV", self.pv_surface)?;
        check_fraction("Gamma_L3", self.lens3_transmittance)?;
        check_fraction("Gamma_M5_nu", self.m5_transmittance)?;
        check_fraction("Gamma_L2", self.lens2_transmittance)?;
        check_fraction("R_M2", self.m2_reflectivity)?;
        check_non_negative("alpha_air", self.air_attenuation)
    }

    pub fn transmittance(&self, distance: f64) -> f64 {
        self.pv_surface
            * self.lens3_transmittance
            * self.m5_transmittance
            * (1.0 - self.m2_reflectivity)
            * self.lens2_transmittance
            * air_transmittance(self.air_attenuation, distance)
    }
}

/// Optical power reaching the PV panel, `chain * P2` with `P2 = (r1/r2) P4`.
pub fn received_pt_power(solution: &IntracavitySolution, chain: &PtChain, distance: f64) -> f64 {
    if solution.status == LasingStatus::BelowThreshold {
        return 0.0;
    }
    chain.transmittance(distance) * (solution.r1 / solution.r2) * solution.p4
}

pub fn photo_current(spec: &PvSpec, received_power: f64) -> f64 {
    spec.responsivity * received_power
}

/// Open-circuit voltage: the diode voltage at which the photocurrent is
/// fully absorbed by the diode and the shunt.
pub fn open_circuit_voltage(spec: &PvSpec, photo_current: f64) -> f64 {
    if photo_current <= 0.0 {
        return 0.0;
    }
    // Without the shunt the diode alone would reach this voltage.
    let upper = spec.diode_voltage_scale() * (photo_current / spec.saturation_current).ln_1p();
    bisect_decreasing(|v| spec.node_current(photo_current, v), 0.0, upper)
}

/// Operating point at terminal voltage `v_charge`.
pub fn solve_operating_point(spec: &PvSpec, photo_current: f64, v_charge: f64) -> Result<OperatingPoint> {
    check_non_negative("I_ph", photo_current)?;
    check_non_negative("V_charge", v_charge)?;
    let series = spec.series_resistance;
    let residual = |vd: f64| {
        let current = if series > 0.0 { (vd - v_charge) / series } else { 0.0 };
        spec.node_current(photo_current, vd) - current
    };
    let lo = v_charge;
    let at_lo = residual(lo);
    let scale = photo_current.max(spec.saturation_current);
    if at_lo < 0.0 {
        // Within rounding of open circuit counts as open circuit.
        if at_lo >= -1e-12 * scale {
            return Ok(OperatingPoint::from_diode(spec, photo_current, v_charge, v_charge));
        }
        return Err(Error::InconsistentCircuit(format!(
            "V_charge = {v_charge} V exceeds the open-circuit voltage for I_ph = {photo_current} A"
        )));
    }
    if series == 0.0 {
        return Ok(OperatingPoint::from_diode(spec, photo_current, v_charge, v_charge));
    }
    let hi = v_charge + photo_current * series;
    let vd = bisect_decreasing(residual, lo, hi);
    Ok(OperatingPoint::from_diode(spec, photo_current, v_charge, vd))
}

/// Operating point for a resistive load `r_load`, from
/// `V_d = I (R_PL + R_s)`.
pub fn solve_operating_point_with_load(spec: &PvSpec, photo_current: f64, r_load: f64) -> Result<OperatingPoint> {
    check_non_negative("I_ph", photo_current)?;
    check_non_negative("R_PL", r_load)?;
    if photo_current == 0.0 {
        return Ok(OperatingPoint::zero());
    }
    let v_oc = open_circuit_voltage(spec, photo_current);
    if r_load.is_infinite() {
        return Ok(OperatingPoint::from_diode(spec, photo_current, v_oc, v_oc));
    }
    let total = r_load + spec.series_resistance;
    if total == 0.0 {
        return Err(Error::InconsistentCircuit("zero total load resistance".into()));
    }
    let vd = bisect_decreasing(|vd| spec.node_current(photo_current, vd) - vd / total, 0.0, v_oc);
    let mut op = OperatingPoint::from_diode(spec, photo_current, 0.0, vd);
    op.v_charge = op.i_charge * r_load;
    op.p_charge = op.v_charge * op.i_charge;
    op.r_load = r_load;
    Ok(op)
}

/// Maximum-power point on `[0, V_oc]`.
///
/// Golden-section search is used when a coarse pre-scan confirms the power
/// curve is unimodal; otherwise the best point of a dense scan is refined
/// locally.
pub fn mppt(spec: &PvSpec, photo_current: f64) -> Result<OperatingPoint> {
    check_non_negative("I_ph", photo_current)?;
    if photo_current == 0.0 {
        return Ok(OperatingPoint::zero());
    }
    let v_oc = open_circuit_voltage(spec, photo_current);
    let power = |v: f64| {
        solve_operating_point(spec, photo_current, v)
            .map(|op| op.p_charge)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let coarse: Vec<f64> = linspace(0.0, v_oc, UNIMODALITY_SAMPLES).into_iter().map(power).collect();
    let (lo, hi) = if is_unimodal(&coarse) {
        (0.0, v_oc)
    } else {
        let grid = linspace(0.0, v_oc, FALLBACK_SCAN_SAMPLES);
        let step = v_oc / (FALLBACK_SCAN_SAMPLES - 1) as f64;
        let best = grid
            .iter()
            .copied()
            .max_by(|a, b| power(*a).total_cmp(&power(*b)))
            .unwrap_or(0.0);
        ((best - step).max(0.0), (best + step).min(v_oc))
    };
    let (v_best, _) = golden_section_max(power, lo, hi, MPPT_VOLTAGE_TOLERANCE);
    solve_operating_point(spec, photo_current, v_best)
}
