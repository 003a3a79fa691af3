//! Runs every sweep scenario under scenarios/ and writes a CSV and an SVG
//! per scenario.
//!
//! cargo run --release --example figure_sweeps -- [out_dir]

use std::path::{Path, PathBuf};

use rbswipt::sweep::{emit_csv, emit_plot_data, OutputColumn};
use rbswipt::{run_sweep, Scenario};

fn main() -> rbswipt::Result<()> {
    let out_dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&out_dir).map_err(|source| rbswipt::Error::Io {
        path: out_dir.clone(),
        source,
    })?;
    let scenarios = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut paths: Vec<_> = std::fs::read_dir(&scenarios)
        .expect("scenarios directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "conf"))
        .collect();
    paths.sort();

    for path in paths {
        let scenario = Scenario::load(&path)?;
        let Some(spec) = scenario.sweep else { continue };
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let rows = run_sweep(&scenario.params, &spec)?;
        let columns = scenario.outputs.as_deref().unwrap_or(&OutputColumn::DEFAULT_PLOT);
        emit_csv(&rows, &out_dir.join(format!("{stem}.csv")))?;
        emit_plot_data(&rows, spec.axis, columns, &out_dir.join(format!("{stem}.svg")))?;
        let best = rows
            .iter()
            .max_by(|a, b| a.result.max_charge_power.total_cmp(&b.result.max_charge_power))
            .unwrap();
        println!(
            "{stem:<20} {:>4} rows over {:<5} peak P_charge {:.4} W at {:.4e}",
            rows.len(),
            spec.axis.name(),
            best.result.max_charge_power,
            best.value
        );
    }
    println!("written to {}", out_dir.display());
    Ok(())
}
