//! Regenerates the synthetic instances bundled in `data/`.
//!
//! Usage: `cargo run -p pareto-nrpa --example make_standins -- <out dir>`

use std::path::PathBuf;

use pareto_nrpa::tsptw::{synthetic_instance, SyntheticSpec};

const SIDE: f64 = 100.0;
const SERVICE: f64 = 10.0;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "crates/core/data".into()),
    );
    std::fs::create_dir_all(&out)?;
    let specs = [
        ("syn04", 4, 200.0, 600.0, 1),
        ("syn06", 6, 200.0, 600.0, 2),
        ("syn08", 8, 200.0, 600.0, 3),
        ("syn24_wide", 24, 200.0, 600.0, 4),
        ("syn32_tight", 32, 30.0, 90.0, 5),
    ];
    for (name, n, min_width, max_width, seed) in specs {
        let inst = synthetic_instance(SyntheticSpec {
            n,
            side: SIDE,
            service: SERVICE,
            min_width,
            max_width,
            seed,
        })?;
        let path = out.join(format!("{name}.txt"));
        let header = format!(
            "# synthetic instance {name}: n={n} side={SIDE} service={SERVICE} width=[{min_width},{max_width}] seed={seed}\n"
        );
        std::fs::write(&path, header + &inst.to_text())?;
        println!("{}", path.display());
    }
    Ok(())
}
