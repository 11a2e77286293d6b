//! Temporary: deviation-floor anatomy for the spectral crosscheck.

use bethe_iba::iba::{residuals, solve, IbaConfig};
use bethe_iba::odeim::crosscheck;
use bethe_iba::partitions::Partition;
use bethe_iba::special::alpha_context;
use std::time::Instant;

fn run(tag: &str, cfg: IbaConfig) {
    let ctx = alpha_context(2.0).unwrap();
    let nu = Partition::ground();
    let mut devs = Vec::new();
    for &p in &[10.0_f64, 20.0, 40.0] {
        let t0 = Instant::now();
        let rep = crosscheck(&ctx, p, &nu, 0, 5, &cfg).unwrap();
        let per_k: Vec<String> = rep
            .rows
            .iter()
            .map(|r| format!("{:+.2e}", r.deviation))
            .collect();
        println!(
            "[{tag}] p={p:>2}: max_dev={:.3e} slopes iba/ode {:.6}/{:.6} ({:.2?})  per-k {}",
            rep.max_abs_deviation,
            rep.slope_iba,
            rep.slope_ode,
            t0.elapsed(),
            per_k.join(" ")
        );
        devs.push(rep.max_abs_deviation);
    }
    println!(
        "[{tag}] shrink 10->20: {:.3}   20->40: {:.3}",
        devs[0] / devs[1],
        devs[1] / devs[2]
    );
}

fn main() {
    let defaults = IbaConfig::default();

    // Independent multiplicative-BAE residual at the resolved roots.
    let ctx = alpha_context(2.0).unwrap();
    let nu = Partition::ground();
    for &(p, xim) in &[(10.0_f64, 60.0_f64), (40.0, 60.0)] {
        let cfg = IbaConfig {
            xi_max: xim,
            k_max: 40,
            ..defaults
        };
        let sol = solve(&ctx, p, &nu, &cfg).unwrap();
        print!("p={p} xim={xim}: mult/2pi:");
        for k in 0..6 {
            let r = residuals(&sol, k).unwrap();
            print!(" {:.2e}", r.mult_bae / (2.0 * std::f64::consts::PI));
        }
        println!("  (log {:.1e})", residuals(&sol, 0).unwrap().log_bae);
    }

    run("auto", defaults);
    run(
        "xim60",
        IbaConfig {
            xi_max: 60.0,
            k_max: 40,
            ..defaults
        },
    );
    run(
        "xim100",
        IbaConfig {
            xi_max: 100.0,
            k_max: 40,
            grid_size: 600,
            ..defaults
        },
    );
    run(
        "xim150",
        IbaConfig {
            xi_max: 150.0,
            k_max: 40,
            grid_size: 800,
            tol_fp: 1e-12,
            tol_root: 1e-12,
            tail_tol: 1e-11,
            ..defaults
        },
    );
}
