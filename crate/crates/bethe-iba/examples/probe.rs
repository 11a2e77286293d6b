use bethe_iba::special::AlphaContext;
use bethe_iba::wkb::{linearized_solution, omega_h, tau, dtau, tail_c2};

fn main() {
    let ctx = AlphaContext::new(2.0).unwrap();
    let p = 10.0;
    for h in [0u32, 1, 2] {
        let omega = omega_h(&ctx, p, h).unwrap();
        let lin = linearized_solution(&ctx, p, omega).unwrap();
        let (c, d, e1) = lin.tail_coeffs();
        let s = ctx.s_exp();
        println!("H={h}: omega={omega:.6} c={c:.9} d={d:.3} e1={e1:.9}");
        for xi in [1e2, 1e3, 1e4, 1e5, 1e6] {
            let v = lin.value(xi);
            let model = c * xi.powf(s) + d + e1 * xi.powf(-s);
            println!("  xi={xi:>9.0}: l={v:>20.9}  deficit={:+.6e}", v - model);
        }
    }
    // Raw tau/dtau deficits at large xi.
    let a = ctx.a_const;
    let s = ctx.s_exp();
    let c2 = tail_c2(&ctx);
    for xi in [1e3, 1e5, 1e6] {
        let t = tau(&ctx, xi);
        let tm = (a * xi).powf(s) - 3.0 + c2 * xi.powf(-s);
        let dt = dtau(&ctx, xi);
        println!("xi={xi:>9.0}: tau deficit {:+.3e}   dtau={dt:.9}", t - tm);
    }
}
