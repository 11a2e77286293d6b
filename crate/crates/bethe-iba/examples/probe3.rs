//! Probe: anchor-equivalence error vs configuration scale.

use bethe_iba::iba::{solve, solve_at_omega, z_eval, IbaConfig};
use bethe_iba::partitions::Partition;
use bethe_iba::special::AlphaContext;
use bethe_iba::wkb::omega_window;

fn main() {
    let ctx = AlphaContext::new(2.0).unwrap();
    let p = 10.0;
    let nu = Partition::parse("1").unwrap();
    for (xi_max, grid, tol) in [
        (f64::NAN, 400usize, 1e-10f64),
        (30.0, 400, 1e-10),
        (50.0, 400, 1e-10),
        (50.0, 800, 1e-10),
    ] {
        let cfg = IbaConfig {
            k_max: 200,
            xi_max,
            grid_size: grid,
            tol_fp: tol,
            ..IbaConfig::default()
        };
        let a = solve(&ctx, p, &nu, &cfg).unwrap();
        let (_, upper) = omega_window(&ctx, p, 1, 0.25).unwrap();
        let b = solve_at_omega(&ctx, p, &nu, &cfg, upper).unwrap();
        println!(
            "xi_max={xi_max} grid={grid} tol={tol:.0e}: omega_a={:.6} omega_b={:.6}",
            a.omega, b.omega
        );
        for x in [80.0, 100.0, 150.0, 300.0, 600.0, 1200.0] {
            let za = z_eval(&a, x);
            let zb = z_eval(&b, x);
            println!("  x={x:>7.1}: za={za:>16.9} zb-za={:+.3e}", zb - za);
        }
    }
}
