//! Photovoltaic I-V curve and maximum-power-point tracking.
//!
//! cargo run --example pv_mppt -- [received_power_W]

use rbswipt::pv::{mppt, open_circuit_voltage, photo_current, solve_operating_point};
use rbswipt::SystemParams;

fn main() -> rbswipt::Result<()> {
    let received: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("power in watts"))
        .unwrap_or(4.426);
    let spec = SystemParams::default().pv;
    let i_ph = photo_current(&spec, received);
    let v_oc = open_circuit_voltage(&spec, i_ph);
    println!("received  {received:.4} W");
    println!("I_ph      {i_ph:.4} A");
    println!("V_oc      {v_oc:.4} V");
    println!();
    println!("{:>8} {:>10} {:>10}", "V [V]", "I [A]", "P [W]");
    for k in 0..=10 {
        let v = v_oc * f64::from(k) / 10.0;
        let op = solve_operating_point(&spec, i_ph, v)?;
        println!("{:>8.4} {:>10.4} {:>10.4}", op.v_charge, op.i_charge, op.p_charge);
    }
    let best = mppt(&spec, i_ph)?;
    println!();
    println!("MPP       {:.4} V, {:.4} A, {:.4} W", best.v_charge, best.i_charge, best.p_charge);
    println!("load      {:.4} ohm", best.r_load);
    println!("efficiency {:.2} %", 100.0 * best.p_charge / received);
    Ok(())
}
