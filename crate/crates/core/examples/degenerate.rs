//! Degenerate normals (v, 2v, -3v): collinear configuration triangles, both
//! non-i inputs swept reaches.

use besicovitch_lab::certificates::{degenerate_certificate, DegenerateOptions, ExponentTriple};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p: ExponentTriple = "4,8,8/5".parse()?;
    let t = std::time::Instant::now();
    let r = degenerate_certificate(2.0, &p, &(4..=10).collect::<Vec<_>>(), &DegenerateOptions::default())?;
    println!("depth   area       lhs   n*window   ratio");
    for row in &r.rows {
        println!(
            "{:>5} {:>7.1e} {:>9.6} {:>9.6} {:>8.5}",
            row["depth"], row["max_triangle_area"], row["lhs"], row["min_window_times_n"], row["certified_ratio"]
        );
    }
    for (name, v) in &r.verdicts {
        println!("{name:<22} {}", if v.pass { "pass" } else { "FAIL" });
    }
    println!("({:.2?})", t.elapsed());
    Ok(())
}
