//! Cavity geometry, stability and the beam radius along the unfolded axis.
//!
//! cargo run --example cavity_mode -- [distance_m]

use rbswipt::optics::{single_pass_abcd, stability_check, Stability};
use rbswipt::SystemParams;

fn main() -> rbswipt::Result<()> {
    let mut params = SystemParams::default();
    if let Some(d) = std::env::args().nth(1) {
        params.geometry.distance = d.parse().expect("distance in metres");
    }
    let geom = params.geometry;
    let abcd = single_pass_abcd(&geom);
    println!("f_RR           {:.4} m", geom.retroreflector_focal_length());
    println!("stability edge {:.4} m", geom.max_stable_distance());
    println!("ABCD           [{:.6} {:.6}; {:.6} {:.6}]", abcd.a, abcd.b, abcd.c, abcd.d);
    println!("det            {:.3e}", abcd.determinant() - 1.0);

    let status = stability_check(&geom);
    println!("stability      {status:?}");
    if status != Stability::Stable {
        return Ok(());
    }

    let mode = params.mode()?;
    println!("M (w/w00)      {:.4}", mode.propagation_factor);
    println!();
    println!("{:>10} {:>12} {:>12}", "z [m]", "w00 [mm]", "w [mm]");
    let marks = [
        ("M1", 0.0),
        ("L1", geom.z_l1()),
        ("gain", geom.z_gain()),
        ("pupil", geom.z_receiver_pupil()),
        ("L2", geom.z_l2()),
        ("L3", geom.z_l3()),
        ("PV", geom.z_pv()),
    ];
    for (name, z) in marks {
        let p = mode.profile(z)?;
        println!("{:>10.5} {:>12.5} {:>12.5}  {name}", z, p.w00 * 1e3, p.w * 1e3);
    }
    Ok(())
}
