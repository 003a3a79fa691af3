//! Self-consistent intracavity powers and frequency-doubling efficiency
//! as the pump power rises through threshold.

use rbswipt::resonator::{solve_intracavity, threshold_pump_power, LasingStatus};
use rbswipt::SystemParams;

fn main() -> rbswipt::Result<()> {
    let params = SystemParams::default();
    let resonator = params.resonator();
    let mode = params.mode()?;

    let reference = solve_intracavity(&resonator, &mode, params.pump_power)?;
    println!("Gamma_diff  {:.6}", reference.gamma_diff);
    println!("r1, r2      {:.6}, {:.6}", reference.r1, reference.r2);
    println!("threshold   {:.3} W", threshold_pump_power(&params.gain, reference.r1, reference.r2));
    for warning in &reference.warnings {
        println!("warning     {warning:?}");
    }
    println!();
    println!("{:>8} {:>10} {:>10} {:>12} {:>12} {:>6}", "P_in [W]", "P4 [W]", "P1 [W]", "eta_SHG", "P_c [mW]", "iter");
    for pump in [10.0, 20.0, 30.0, 40.0, 60.0, 80.0, 100.0, 150.0] {
        let s = solve_intracavity(&resonator, &mode, pump)?;
        let mark = if s.status == LasingStatus::BelowThreshold { "  below threshold" } else { "" };
        println!(
            "{:>8.1} {:>10.4} {:>10.4} {:>12.4e} {:>12.4} {:>6}{mark}",
            pump,
            s.p4,
            s.p1,
            s.eta_shg,
            s.carrier_power * 1e3,
            s.iterations
        );
    }
    Ok(())
}
