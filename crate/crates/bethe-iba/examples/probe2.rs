use bethe_iba::special::AlphaContext;
use bethe_iba::wkb::{tau, turning_points, tail_c2};

fn main() {
    let ctx = AlphaContext::new(2.0).unwrap();
    let a = ctx.a_const;
    let s = ctx.s_exp();
    let c2 = tail_c2(&ctx);
    for xi in [1e5, 2e5, 4e5, 7e5, 1e6] {
        let x = ctx.rho * xi;
        let tp = turning_points(&ctx, x).unwrap();
        let t = tau(&ctx, xi);
        let tm = (s * (a * xi).ln()).exp() - 3.0 + c2 * (-s * xi.ln()).exp();
        println!(
            "xi={xi:>9.0}: u1={:.12e} u2={:.8} tau={t:.9} model={tm:.9} deficit={:+.3e}",
            tp.u1, tp.u2, t - tm
        );
    }
}
