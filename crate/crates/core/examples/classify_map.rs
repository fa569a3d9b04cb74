//! Case, fixed points, multipliers and local radii for a handful of maps.

use padyn::{CaseTag, MapParams};

fn main() {
    let maps = [
        (3, "0", "2", "1", "1"),
        (3, "1", "1", "1", "0"),
        (5, "0", "2", "1", "1"),
        (3, "0", "0", "2", "1"),
        (7, "1", "-3", "3", "2"),
        (3, "0", "-2", "1", "0"),
        (5, "2", "0", "1", "2"),
    ];
    for (p, a, b, c, d) in maps {
        let f = MapParams::parse(p, a, b, c, d).unwrap();
        println!("{f}: {}", f.case());
        match f.case() {
            CaseTag::NoFixed => {
                let cyc = f.two_cycle().unwrap();
                println!("  2-cycle {} <-> {}, h = {}", cyc.points[0], cyc.points[1], cyc.h);
                println!("  cycle multiplier {} (norm {}, {:?})", cyc.cycle_multiplier, cyc.cycle_multiplier_norm, cyc.local_type);
            }
            CaseTag::Identity => println!("  every point is fixed"),
            _ => {
                let fps = f.fixed_points().unwrap();
                for fp in &fps.points {
                    println!(
                        "  x* = {}, f'(x*) = {} (norm {}, {:?}), zero radius {}, pole radius {}",
                        fp.point, fp.multiplier, fp.multiplier_norm, fp.local_type, fp.zero_radius, fp.pole_radius
                    );
                }
            }
        }
    }
}
