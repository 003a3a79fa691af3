//! Eye-safety check of the spontaneous emission escaping the gain medium,
//! and the safe pump power across the visible and near-infrared band.

use rbswipt::safety::{max_safe_source_power, safety_report, MpeSource};
use rbswipt::SystemParams;

fn main() -> rbswipt::Result<()> {
    let params = SystemParams::default();
    let spec = params.safety_spec();
    println!("{}", safety_report(&spec, &params.mpe, params.pump_power)?);
    println!();

    println!("{:>8} {:>14}", "lambda", "P_in,safe [W]");
    for nm in [400.0, 600.0, 700.0, 800.0, 900.0, 1000.0, 1064.0, 1100.0, 1400.0] {
        let mut at = spec;
        at.wavelength = nm / 1e9;
        let safe = max_safe_source_power(&at, &params.mpe)?;
        println!("{:>5} nm {:>14.2}", nm, safe.source);
    }

    let table = MpeSource::Table(rbswipt::safety::MpeTable::new(vec![(1064e-9, 300.0), (1100e-9, 320.0)])?);
    let safe = max_safe_source_power(&spec, &table)?;
    println!();
    println!("tabulated limit 300 W/m^2 at 1064 nm: P_in,safe = {:.2} W", safe.source);
    Ok(())
}
