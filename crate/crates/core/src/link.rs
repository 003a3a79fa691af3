//! End-to-end evaluation of one operating point.

use std::fmt;

use crate::channel::{achievable_rate, received_it_power};
use crate::config::SystemParams;
use crate::error::Result;
use crate::optics::{stability_check, Stability};
use crate::pv::{mppt, photo_current, received_pt_power, OperatingPoint};
use crate::resonator::{solve_intracavity, IntracavitySolution, LasingStatus};
use crate::safety::{safety_report, SafetyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkStatus {
    Ok,
    BelowThreshold,
    Unstable,
}

impl LinkStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkStatus::Ok => "ok",
            LinkStatus::BelowThreshold => "below_threshold",
            LinkStatus::Unstable => "unstable",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "ok" => Some(LinkStatus::Ok),
            "below_threshold" => Some(LinkStatus::BelowThreshold),
            "unstable" => Some(LinkStatus::Unstable),
            _ => None,
        }
    }
}

impl fmt::Display for LinkStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkResult {
    /// Fundamental-wave power at the PV panel [W].
    pub received_pt_power: f64,
    /// Second-harmonic power at the photodiode [W].
    pub received_it_power: f64,
    /// Electrical charging power at the maximum-power point [W].
    pub max_charge_power: f64,
    /// Achievable rate [bit/s/Hz].
    pub rate: f64,
    /// PV terminal voltage at the maximum-power point [V].
    pub v_mpp: f64,
    pub eta_shg: f64,
    pub gamma_diff: f64,
    pub gamma_pd: f64,
    pub status: LinkStatus,
    /// Present whenever the cavity has a mode, including below threshold.
    pub intracavity: Option<IntracavitySolution>,
    pub operating_point: Option<OperatingPoint>,
}

impl LinkResult {
    fn dark(status: LinkStatus, intracavity: Option<IntracavitySolution>) -> Self {
        Self {
            received_pt_power: 0.0,
            received_it_power: 0.0,
            max_charge_power: 0.0,
            rate: 0.0,
            v_mpp: 0.0,
            eta_shg: 0.0,
            gamma_diff: intracavity.as_ref().map_or(0.0, |s| s.gamma_diff),
            gamma_pd: 0.0,
            status,
            intracavity,
            operating_point: None,
        }
    }
}

impl fmt::Display for LinkResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "status                  {}", self.status)?;
        if let Some(s) = &self.intracavity {
            writeln!(f, "intracavity P4          {:.6} W", s.p4)?;
            writeln!(f, "r1, r2                  {:.6}, {:.6}", s.r1, s.r2)?;
        }
        writeln!(f, "Gamma_diff              {:.6}", self.gamma_diff)?;
        writeln!(f, "eta_SHG                 {:.6e}", self.eta_shg)?;
        writeln!(f, "P_recv,PT               {:.6} W", self.received_pt_power)?;
        writeln!(f, "Gamma_PD                {:.6}", self.gamma_pd)?;
        writeln!(f, "P_recv,IT               {:.6} mW", self.received_it_power * 1e3)?;
        writeln!(f, "max charging power      {:.6} W", self.max_charge_power)?;
        writeln!(f, "V_mpp                   {:.6} V", self.v_mpp)?;
        write!(f, "achievable rate R_b     {:.4} bit/s/Hz", self.rate)
    }
}

/// Runs stability, mode, intracavity, PT and IT stages for `params`.
///
/// Unstable or marginal cavities and pumps below threshold are reported
/// through [`LinkResult::status`] with every power zero. Other failures are
/// wrapped with the name of the stage that raised them.
pub fn evaluate_link(params: &SystemParams) -> Result<LinkResult> {
    params.validate().map_err(|e| e.at_stage("config"))?;
    if stability_check(&params.geometry) != Stability::Stable {
        return Ok(LinkResult::dark(LinkStatus::Unstable, None));
    }
    let mode = params.mode().map_err(|e| e.at_stage("optics"))?;
    let solution =
        solve_intracavity(&params.resonator(), &mode, params.pump_power).map_err(|e| e.at_stage("resonator"))?;
    if solution.status == LasingStatus::BelowThreshold {
        return Ok(LinkResult::dark(LinkStatus::BelowThreshold, Some(solution)));
    }

    let distance = params.geometry.distance;
    let pt_power = received_pt_power(&solution, &params.pt_chain(), distance);
    let operating_point = mppt(&params.pv, photo_current(&params.pv, pt_power)).map_err(|e| e.at_stage("pv"))?;

    let profile = mode
        .profile(params.geometry.z_pv())
        .map_err(|e| e.at_stage("channel"))?;
    let gamma_pd = params
        .capture
        .capture_ratio(&params.concentrator, &profile)
        .map_err(|e| e.at_stage("channel"))?;
    let it_power = received_it_power(solution.carrier_power, &params.it_chain(), distance, gamma_pd);

    Ok(LinkResult {
        received_pt_power: pt_power,
        received_it_power: it_power,
        max_charge_power: operating_point.p_charge,
        rate: achievable_rate(&params.noise, it_power),
        v_mpp: operating_point.v_charge,
        eta_shg: solution.eta_shg,
        gamma_diff: solution.gamma_diff,
        gamma_pd,
        status: LinkStatus::Ok,
        intracavity: Some(solution),
        operating_point: Some(operating_point),
    })
}

/// Eye-safety report at the configured pump power.
pub fn evaluate_safety(params: &SystemParams) -> Result<SafetyReport> {
    safety_report(&params.safety_spec(), &params.mpe, params.pump_power).map_err(|e| e.at_stage("safety"))
}
