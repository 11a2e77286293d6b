//! Temporary: crosscheck scaling across p.

use bethe_iba::iba::IbaConfig;
use bethe_iba::odeim::crosscheck;
use bethe_iba::partitions::Partition;
use bethe_iba::special::alpha_context;
use std::time::Instant;

fn main() {
    let ctx = alpha_context(2.0).unwrap();
    let nu = Partition::ground();
    let config = IbaConfig {
        k_max: 8,
        ..IbaConfig::default()
    };
    let mut devs = Vec::new();
    for p in [10.0, 20.0, 40.0] {
        let t0 = Instant::now();
        let rep = crosscheck(&ctx, p, &nu, 0, 5, &config).unwrap();
        println!(
            "p={p}: ell={} anchor={} max_dev={:.6e} slope_iba={:.6} slope_ode={:.6} ref={:.6} ({:?})",
            rep.ell,
            rep.anchor_level,
            rep.max_abs_deviation,
            rep.slope_iba,
            rep.slope_ode,
            rep.slope_reference,
            t0.elapsed()
        );
        for r in &rep.rows {
            println!(
                "  k={} x={:.9e} E={:.9e} ratio={:.9} dev={:+.3e}",
                r.k, r.x, r.e, r.scaled_ratio, r.deviation
            );
        }
        devs.push(rep.max_abs_deviation);
    }
    println!(
        "shrink 10->20: {:.3}, 20->40: {:.3}",
        devs[0] / devs[1],
        devs[1] / devs[2]
    );
}
