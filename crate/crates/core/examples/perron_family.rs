//! Builds Perron families at several depths and prints their union measure.

use besicovitch_lab::besicovitch::{build_perron_family, verify_family, PerronParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("depth      N   eps_meas    err_bound  reaches_disjoint");
    for depth in 0..=10 {
        let fam = build_perron_family(PerronParams {
            depth,
            ..PerronParams::default()
        })?;
        let rep = verify_family(&fam, 1.0 + 1e-9);
        println!(
            "{depth:>5} {:>6} {:>10.6} {:>12.3e}  {}",
            fam.len(),
            fam.achieved_eps.value,
            fam.achieved_eps.err_bound,
            rep.reaches_disjoint
        );
    }
    Ok(())
}
