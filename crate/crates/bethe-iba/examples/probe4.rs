//! Probe: loose-solve residual pairs (counting vs multiplicative).

use bethe_iba::iba::{residuals, solve, IbaConfig};
use bethe_iba::partitions::Partition;
use bethe_iba::special::AlphaContext;

fn main() {
    let ctx = AlphaContext::new(2.0).unwrap();
    let cfg = IbaConfig {
        tol_fp: 1e-6,
        k_max: 60,
        ..IbaConfig::default()
    };
    let sol = solve(&ctx, 10.0, &Partition::ground(), &cfg).unwrap();
    for k in [0, 1, 2, 5, 10, 19, 40] {
        let r = residuals(&sol, k).unwrap();
        let lin = 2.0 * std::f64::consts::PI * r.log_bae.abs();
        println!(
            "k={k:>3}: log={:+.3e}  mult={:.3e}  2pi|log|={:.3e}  ratio={:.3}",
            r.log_bae,
            r.mult_bae,
            lin,
            r.mult_bae / lin
        );
    }
}
