//! Temporary: oscillatory remainder measure across p, auto vs pinned grid.

use bethe_iba::iba::{oscillation_scaled, solve, IbaConfig};
use bethe_iba::partitions::Partition;
use bethe_iba::special::alpha_context;
use std::time::Instant;

fn main() {
    let ctx = alpha_context(2.0).unwrap();
    for (tag, cfg) in [
        ("auto ", IbaConfig::default()),
        (
            "xim60",
            IbaConfig {
                xi_max: 60.0,
                k_max: 40,
                ..IbaConfig::default()
            },
        ),
    ] {
        let mut vals = Vec::new();
        for &p in &[10.0_f64, 20.0, 40.0] {
            let t0 = Instant::now();
            let sol = solve(&ctx, p, &Partition::ground(), &cfg).unwrap();
            let m = oscillation_scaled(&sol, 0);
            println!("[{tag}] p={p:>2}: oscillation_scaled = {m:.6} ({:.2?})", t0.elapsed());
            vals.push(m);
        }
        let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
        let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
        println!("[{tag}] variation factor = {:.3}", hi / lo);
    }
}
