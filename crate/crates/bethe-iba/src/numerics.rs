//! Shared numerical building blocks.
//!
//! Nothing in this module knows about Bethe roots or potentials; it provides
//! the generic machinery the rest of the crate is built on: Gauss–Legendre
//! rules with cached nodes, an adaptive Simpson integrator, Brent's method,
//! a secant refiner, monotone cubic interpolation, one embedded
//! Dormand–Prince 5(4) step, log-gamma for real and complex argument, and a
//! tiny least-squares polynomial fit.

use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

// ---------------------------------------------------------------------------
// Gauss–Legendre quadrature
// ---------------------------------------------------------------------------

fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on P_n with the classical Chebyshev-like initial
    // guess; nodes are symmetric so only half are computed.
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = 0.0;
    }
    (xs, ws)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1],
/// computed once per order and shared.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(legendre_nodes(n)))
        .clone()
}

/// Integral of `f` over [a, b] by the `n`-point Gauss–Legendre rule.
pub fn integrate_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let (xs, ws) = (&rule.0, &rule.1);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in xs.iter().zip(ws) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Gauss–Legendre with order doubling until two consecutive orders agree to
/// `tol` (absolute, relative to the magnitude of the running value).
pub fn integrate_gl_doubling<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    n0: usize,
    n_max: usize,
) -> f64 {
    let mut n = n0.max(8);
    let mut prev = integrate_gl(&mut f, a, b, n);
    loop {
        n *= 2;
        let cur = integrate_gl(&mut f, a, b, n);
        if (cur - prev).abs() <= tol * cur.abs().max(1.0) || n >= n_max {
            return cur;
        }
        prev = cur;
    }
}

// ---------------------------------------------------------------------------
// Adaptive Simpson
// ---------------------------------------------------------------------------

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson integration of `f` over [a, b] to absolute tolerance
/// `tol`, with a recursion depth cap that in practice is never hit by the
/// smooth integrands this crate feeds it.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, b - a);
    adaptive_simpson_rec(&mut f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson_rec<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= 15.0 * tol {
        return left + right + err / 15.0;
    }
    adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// Brent's method on a bracketing interval [a, b] with f(a)·f(b) <= 0.
///
/// Returns the abscissa once the bracket is shorter than
/// `xtol + 4·eps·|x|` or an exact zero is hit.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> Option<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa * fb > 0.0 {
        return None;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation (secant if only two points).
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0));
                q = (q0 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Some(b)
}

/// Expand a bracket upward from `a` by the multiplicative `factor` until the
/// sign of `f` changes, then polish with Brent. Returns `None` if no sign
/// change occurs within `max_steps` expansions.
pub fn bracket_upward<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    factor: f64,
    max_steps: usize,
    xtol: f64,
) -> Option<f64> {
    let mut lo = a;
    let mut flo = f(lo);
    if flo == 0.0 {
        return Some(lo);
    }
    let mut hi = lo;
    for _ in 0..max_steps {
        hi *= factor;
        let fhi = f(hi);
        if flo * fhi <= 0.0 {
            return brent(f, lo, hi, xtol);
        }
        lo = hi;
        flo = fhi;
    }
    None
}

/// Secant iteration kept inside a maintained bracket (falls back to
/// bisection); the initial endpoints must straddle the root.
pub fn secant_bracketed<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    max_iter: usize,
) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa * fb > 0.0 {
        return None;
    }
    for _ in 0..max_iter {
        if (b - a).abs() <= xtol {
            break;
        }
        // Secant proposal, clipped into the bracket interior; fall back to
        // the midpoint when the proposal degenerates.
        let mut x = if fb != fa {
            b - fb * (b - a) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        let lo = a.min(b);
        let hi = a.max(b);
        if !(x > lo && x < hi) {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fa * fx < 0.0 {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
    }
    Some(0.5 * (a + b))
}

// ---------------------------------------------------------------------------
// Monotone cubic interpolation
// ---------------------------------------------------------------------------

/// Piecewise-cubic Hermite interpolant on a strictly increasing grid.
///
/// Built either from prescribed derivatives (`from_derivatives`) when the
/// caller knows them exactly, or with Fritsch–Carlson monotone slopes
/// (`pchip`) when only values are available.
#[derive(Debug, Clone)]
pub struct CubicHermite {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl CubicHermite {
    /// Interpolant with exact derivatives at the nodes.
    pub fn from_derivatives(xs: Vec<f64>, ys: Vec<f64>, ds: Vec<f64>) -> Self {
        assert!(xs.len() >= 2 && xs.len() == ys.len() && xs.len() == ds.len());
        debug_assert!(xs.windows(2).all(|w| w[0] < w[1]));
        CubicHermite { xs, ys, ds }
    }

    /// Shape-preserving (Fritsch–Carlson) interpolant from values alone.
    pub fn pchip(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n);
        let mut ds = vec![0.0; n];
        if n == 2 {
            let d = (ys[1] - ys[0]) / (xs[1] - xs[0]);
            ds[0] = d;
            ds[1] = d;
            return CubicHermite { xs, ys, ds };
        }
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        for i in 1..n - 1 {
            if del[i - 1] * del[i] <= 0.0 {
                ds[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                ds[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
            }
        }
        ds[0] = pchip_end(h[0], h[1], del[0], del[1]);
        ds[n - 1] = pchip_end(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        CubicHermite { xs, ys, ds }
    }

    fn segment(&self, x: f64) -> usize {
        match self
            .xs
            .binary_search_by(|v| v.partial_cmp(&x).expect("non-finite abscissa"))
        {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.xs.len() - 2),
        }
    }

    /// Interpolated value (linear extrapolation beyond the end nodes).
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1]
    }

    /// Derivative of the interpolant.
    pub fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        (6.0 * t * t - 6.0 * t) * (self.ys[i] - self.ys[i + 1]) / h
            + (3.0 * t * t - 4.0 * t + 1.0) * self.ds[i]
            + (3.0 * t * t - 2.0 * t) * self.ds[i + 1]
    }

    /// Grid abscissas.
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    /// Node values.
    pub fn ys(&self) -> &[f64] {
        &self.ys
    }
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

/// Fourth-order finite-difference slopes of `ys` sampled on a uniform grid
/// of spacing `h` (central five-point stencils inside, one-sided five-point
/// stencils at the edges). Needs at least five samples.
///
/// Feeding these into [`CubicHermite::from_derivatives`] yields an
/// interpolant whose error floor scales like h⁴ for smooth data, unlike
/// pchip's h³ slope bias; several tabulated quantities here need that extra
/// order to stay below downstream tolerances.
pub fn fd_slopes_uniform(h: f64, ys: &[f64]) -> Vec<f64> {
    let n = ys.len();
    assert!(n >= 5, "fd_slopes_uniform needs at least 5 samples, got {n}");
    assert!(h > 0.0);
    let mut ds = vec![0.0; n];
    for (i, d) in ds.iter_mut().enumerate() {
        *d = if i >= 2 && i + 2 < n {
            (ys[i - 2] - 8.0 * ys[i - 1] + 8.0 * ys[i + 1] - ys[i + 2]) / (12.0 * h)
        } else {
            // One-sided five-point stencils at the edges, mirrored on the
            // right (mirroring flips the sign of odd derivatives).
            let (sgn, base) = if i < 2 { (1.0, i) } else { (-1.0, n - 1 - i) };
            let f = |k: usize| if sgn > 0.0 { ys[k] } else { ys[n - 1 - k] };
            let c = match base {
                0 => [-25.0, 48.0, -36.0, 16.0, -3.0],
                _ => [-3.0, -10.0, 18.0, -6.0, 1.0],
            };
            let off = if base == 0 { 0 } else { base - 1 };
            sgn * (0..5).map(|k| c[k] * f(off + k)).sum::<f64>() / (12.0 * h)
        };
    }
    ds
}

fn pchip_end(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    // One-sided three-point estimate, limited to preserve shape.
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d * del0 <= 0.0 {
        0.0
    } else if del0 * del1 < 0.0 && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

// ---------------------------------------------------------------------------
// Embedded Runge–Kutta step (Dormand–Prince 5(4)), scalar state
// ---------------------------------------------------------------------------

/// Outcome of a single adaptive step attempt.
pub struct StepOutcome {
    /// New abscissa (unchanged if the step was rejected).
    pub t: f64,
    /// New state (unchanged if the step was rejected).
    pub y: f64,
    /// Suggested size for the next attempt (signed).
    pub h_next: f64,
    /// Whether the step was accepted.
    pub accepted: bool,
}

/// One Dormand–Prince 5(4) step for a scalar ODE y' = f(t, y).
///
/// `h` is signed, so the same routine integrates forward and backward.
pub fn dopri_step<F: FnMut(f64, f64) -> f64>(
    f: &mut F,
    t: f64,
    y: f64,
    h: f64,
    rtol: f64,
    atol: f64,
) -> StepOutcome {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;

    let k1 = f(t, y);
    let k2 = f(t + A21 * h, y + h * A21 * k1);
    let k3 = f(t + 0.3 * h, y + h * (A31 * k1 + A32 * k2));
    let k4 = f(t + 0.8 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
    let k5 = f(
        t + 8.0 / 9.0 * h,
        y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4),
    );
    let k6 = f(
        t + h,
        y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
    );
    let y5 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    let k7 = f(t + h, y5);
    let err_est = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    let scale = atol + rtol * y.abs().max(y5.abs());
    let err = (err_est / scale).abs().max(1e-300);
    if err <= 1.0 {
        let grow = (0.9 * err.powf(-0.2)).min(5.0).max(0.2);
        StepOutcome {
            t: t + h,
            y: y5,
            h_next: h * grow,
            accepted: true,
        }
    } else {
        let shrink = (0.9 * err.powf(-0.2)).max(0.1);
        StepOutcome {
            t,
            y,
            h_next: h * shrink,
            accepted: false,
        }
    }
}

// ---------------------------------------------------------------------------
// Log-gamma, real and complex
// ---------------------------------------------------------------------------

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of |Gamma(x)| for real x > 0 (the only range the crate uses).
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    if x < 0.5 {
        // Reflection keeps the Lanczos core in its accurate half-plane.
        let s = (std::f64::consts::PI * x).sin();
        return std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Gamma(x) for real x > 0.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Principal-branch log-gamma for complex argument.
///
/// The value is continuous on Re z > 1/2; elsewhere reflection may shift the
/// imaginary part by multiples of 2π, which is harmless to callers that only
/// exponentiate sums of log-gammas.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // ln Γ(z) = ln π − ln sin(πz) − ln Γ(1−z)
        let pi = std::f64::consts::PI;
        return Complex64::new(pi.ln(), 0.0)
            - ln_sin_complex(pi * z)
            - ln_gamma_complex(Complex64::new(1.0, 0.0) - z);
    }
    let zm = z - Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += Complex64::new(c, 0.0) / (zm + Complex64::new(i as f64, 0.0));
    }
    let t = zm + Complex64::new(LANCZOS_G + 0.5, 0.0);
    Complex64::new(0.5 * (2.0 * std::f64::consts::PI).ln(), 0.0)
        + (zm + Complex64::new(0.5, 0.0)) * t.ln()
        - t
        + acc.ln()
}

/// log(sin w) computed without overflow for large |Im w|.
///
/// The imaginary part may differ from the principal value by a multiple of
/// 2π; callers only ever exponentiate sums that contain this term.
fn ln_sin_complex(w: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    if w.im <= 0.0 {
        // sin w = e^{iw} (1 − e^{−2iw}) / (2i); |e^{−2iw}| ≤ 1 here.
        i * w + (one - (-i * w * 2.0).exp()).ln() - Complex64::new(0.0, 2.0).ln()
    } else {
        // sin w = −e^{−iw} (1 − e^{2iw}) / (2i) = e^{−iw} (1 − e^{2iw}) (i/2)
        -i * w + (one - (i * w * 2.0).exp()).ln() + Complex64::new(0.0, 0.5).ln()
    }
}

// ---------------------------------------------------------------------------
// Small least-squares polynomial fit
// ---------------------------------------------------------------------------

/// Least-squares fit of a degree-`deg` polynomial to the points
/// (us[i], ys[i]); returns the coefficients in ascending-power order.
/// Solved via normal equations with Gaussian elimination — adequate for the
/// tiny, well-conditioned fits this crate performs (deg <= 2).
pub fn fit_poly(us: &[f64], ys: &[f64], deg: usize) -> Vec<f64> {
    assert!(us.len() == ys.len() && us.len() > deg);
    let m = deg + 1;
    let mut ata = vec![vec![0.0; m]; m];
    let mut atb = vec![0.0; m];
    for (&u, &y) in us.iter().zip(ys) {
        let mut pw = vec![1.0; m];
        for j in 1..m {
            pw[j] = pw[j - 1] * u;
        }
        for i in 0..m {
            atb[i] += pw[i] * y;
            for j in 0..m {
                ata[i][j] += pw[i] * pw[j];
            }
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&a, &b| ata[a][col].abs().partial_cmp(&ata[b][col].abs()).unwrap())
            .unwrap();
        ata.swap(col, piv);
        atb.swap(col, piv);
        let d = ata[col][col];
        for row in col + 1..m {
            let fac = ata[row][col] / d;
            for j in col..m {
                ata[row][j] -= fac * ata[col][j];
            }
            atb[row] -= fac * atb[col];
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let mut s = atb[row];
        for j in row + 1..m {
            s -= ata[row][j] * x[j];
        }
        x[row] = s / ata[row][row];
    }
    x
}

/// `n` logarithmically spaced points from `a` to `b` inclusive (a, b > 0).
pub fn log_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && n >= 2);
    let la = a.ln();
    let lb = b.ln();
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Evaluate a polynomial with complex coefficients (ascending powers) at z.
pub fn horner_complex(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}
