//! Full link evaluation at the reference operating point, optionally with
//! a configuration file of overrides.
//!
//! cargo run --example headline -- [scenarios/headline.conf]

use std::path::Path;

use rbswipt::{evaluate_link, evaluate_safety, Scenario};

fn main() -> rbswipt::Result<()> {
    let scenario = match std::env::args().nth(1) {
        Some(path) => Scenario::load(Path::new(&path))?,
        None => Scenario::parse("", None)?,
    };
    let result = evaluate_link(&scenario.params)?;
    println!("{result}");
    println!();
    println!("{}", evaluate_safety(&scenario.params)?);

    // A one-line override changes the answer without touching the rest.
    let closer = Scenario::parse("d = 3 m", None)?;
    let near = evaluate_link(&closer.params)?;
    println!();
    println!(
        "at 3 m: P_charge = {:.4} W, R_b = {:.3} bit/s/Hz",
        near.max_charge_power, near.rate
    );
    Ok(())
}
