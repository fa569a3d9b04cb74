//! A repelling fixed point: radii climb one exponent per step until they leave the disk.

use padyn::orbit::{iterate, sphere_point, IterateOptions};
use padyn::radius::{predict_c1, C1Model};
use padyn::{ExactElement, MapParams, Radius};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let f = MapParams::parse(3, "0", "2", "1", "1").unwrap();
    let fp = f.fixed_points().unwrap().points.remove(0);
    let model = C1Model::new(fp.local_type.into(), fp.pole_radius.clone(), fp.multiplier_norm.clone()).unwrap();
    println!("{f}: x* = {}, |f'(x*)| = {}, δ = {}", fp.point, model.q, model.delta);

    let t = iterate(&f, &ExactElement::from_int(11), 3, &IterateOptions::default()).unwrap();
    for (n, x) in t.points.iter().enumerate() {
        println!("x_{n} = {x}, |x_{n} - x*| = {}", t.radius(0, n));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let anchor = fp.point.as_rational().unwrap().clone();
    for e in [-6, -4] {
        let x = sphere_point(&anchor, f.p(), e, &mut rng);
        let steps = (-e) as usize + 3;
        let t = iterate(&f, &x, steps, &IterateOptions::default()).unwrap();
        let pred = predict_c1(&model, &Radius::exp(e), steps, |n| t.star(0, n));
        let show = |v: &[Radius]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ");
        println!("start on 3^{e}:");
        println!("  observed  {}", show(&t.radius_logs[0]));
        println!("  predicted {}", show(&pred.schedule.values().into_iter().flatten().collect::<Vec<_>>()));
    }
}
