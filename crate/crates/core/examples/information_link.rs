//! Second-harmonic data link: concentrator gain, photodiode capture,
//! noise variance and achievable rate against received power.

use rbswipt::channel::{concentrator_gain, effective_area, evaluate_it, received_it_power};
use rbswipt::resonator::solve_intracavity;
use rbswipt::SystemParams;

fn main() -> rbswipt::Result<()> {
    let params = SystemParams::default();
    let conc = &params.concentrator;
    println!("concentrator gain  {:.3}", concentrator_gain(conc));
    println!("effective area     {:.4} mm^2", effective_area(conc) * 1e6);
    println!("thermal floor      {:.4e} A^2", params.noise.thermal_floor());

    let mode = params.mode()?;
    let geom = params.geometry;
    let beam = mode.profile(geom.z_pv())?;
    let capture = params.capture.capture_ratio(conc, &beam)?;
    let solution = solve_intracavity(&params.resonator(), &mode, params.pump_power)?;
    let received = received_it_power(solution.carrier_power, &params.it_chain(), geom.distance, capture);
    println!("capture ratio      {capture:.4}");
    println!("carrier power      {:.4} mW", solution.carrier_power * 1e3);
    println!("received power     {:.4} mW", received * 1e3);
    println!();

    println!("{:>12} {:>14} {:>14}", "P [mW]", "sigma^2 [A^2]", "R_b [bit/s/Hz]");
    for p_mw in [0.01, 0.1, 1.0, 10.0, received * 1e3, 100.0] {
        let it = evaluate_it(&params.noise, p_mw * 1e-3);
        println!("{:>12.4} {:>14.4e} {:>14.4}", p_mw, it.noise_variance, it.rate);
    }
    Ok(())
}
