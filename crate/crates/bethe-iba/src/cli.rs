//! Command-line front end: argument parsing, solver orchestration, and
//! bit-stable table emission.
//!
//! Exit codes: 0 on success, 1 on usage errors (including α ≤ 1, which the
//! kernel construction rejects), 2 on numeric/solver failures. Numeric
//! failures are reported as machine-readable JSON objects on stderr and
//! mirrored into `--out` when one was requested, so a pipeline never reads
//! a stale artifact after a failed run. Files are written atomically
//! (temporary sibling + rename), floats serialize in shortest round-trip
//! decimal, JSON keys come out sorted: identical invocations produce
//! byte-identical artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::iba::{
    check_asymptotics, oscillation_scaled, residuals, solve, IbaConfig, IbaSolution,
};
use crate::odeim::{crosscheck, eigenvalues, solve_monster, CrosscheckReport};
use crate::partitions::Partition;
use crate::special::alpha_context;
use crate::wkb::{dtau, tail_c2, tau};

/// Residual threshold the `verify` command holds recomputed counting
/// residuals to before exiting 0.
const VERIFY_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "bethe-iba",
    version,
    about = "Purely real Bethe-root states of quantum KdV and their Schrödinger partners",
    long_about = "Solves the counting-function form of the Bethe ansatz equations for \
excited states indexed by integer partitions, tabulates the WKB linearization, builds \
the partner anharmonic potentials, and compares the two spectra.\n\nExit codes: \
0 success, 1 usage error, 2 numeric failure (a JSON error object is printed to stderr \
and mirrored into --out when given)."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Solve one state and emit its roots, holes, and convergence record.
    Solve(SolveArgs),
    /// Solve one state, recompute both Bethe-condition residuals at the
    /// retained roots, and fail (exit 2) if any counting residual exceeds
    /// 1e-6.
    Verify(VerifyArgs),
    /// Tabulate the scaled WKB action tau and its logarithmic derivative.
    WkbTable(WkbTableArgs),
    /// Build the partner potential for a partition and emit its spectrum.
    Ode(OdeArgs),
    /// Compare Bethe roots against partner eigenvalues level by level.
    Crosscheck(CrosscheckArgs),
    /// Solve the same state across a list of momenta and emit the scaling
    /// columns (one CSV row per p).
    Sweep(SweepArgs),
}

/// Output encodings; every command supports both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Pretty-printed JSON with sorted keys.
    Json,
    /// Comma-separated values, `.` decimal point, LF line endings, run
    /// metadata on leading `#` lines.
    Csv,
}

/// Reject non-finite or ≤ 1 anharmonicities at the flag level: below α = 1
/// the kernel angle passes π and the purely-real regime breaks down.
fn parse_alpha(text: &str) -> std::result::Result<f64, String> {
    let alpha: f64 = text
        .parse()
        .map_err(|e| format!("not a number ({e})"))?;
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(format!(
            "alpha must be finite and > 1 (the kernel angle 2*pi/(1+alpha) must stay below pi), got {alpha}"
        ));
    }
    Ok(alpha)
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Anharmonicity exponent alpha (> 1).
    #[arg(long, value_parser = parse_alpha)]
    alpha: f64,
    /// Momentum parameter p (> 0); states need 2p >= N + 1/2.
    #[arg(long)]
    p: f64,
    /// Partition "n1,n2,..." with weakly decreasing parts; empty for the
    /// ground state.
    #[arg(long, default_value = "")]
    partition: String,
    /// Highest retained root level (default 200).
    #[arg(long)]
    k_max: Option<i64>,
    /// Fixed-point tolerance; the root polish runs at tol/10 and the
    /// convolution-tail certificate at 10*tol (default 1e-10).
    #[arg(long)]
    tol: Option<f64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// How many of the lowest retained roots to recheck (default 20).
    #[arg(long, default_value_t = 20)]
    levels: usize,
}

#[derive(Debug, Args)]
struct WkbTableArgs {
    /// Anharmonicity exponent alpha (> 1).
    #[arg(long, value_parser = parse_alpha)]
    alpha: f64,
    /// Upper edge of the log-spaced xi grid (default 50).
    #[arg(long, default_value_t = 50.0)]
    xi_max: f64,
    /// Number of grid points (default 200).
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct OdeArgs {
    /// Anharmonicity exponent alpha (> 1).
    #[arg(long, value_parser = parse_alpha)]
    alpha: f64,
    /// Angular-momentum parameter ell (> 0).
    #[arg(long)]
    ell: f64,
    /// Partition selecting the auxiliary points of the potential; empty
    /// for the plain |t|^(2 alpha) well.
    #[arg(long, default_value = "")]
    partition: String,
    /// Number of eigenvalues to compute (default 10).
    #[arg(long, default_value_t = 10)]
    levels: usize,
    /// Newton tolerance on the auxiliary-system residual (default 1e-9).
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct CrosscheckArgs {
    /// Anharmonicity exponent alpha (> 1).
    #[arg(long, value_parser = parse_alpha)]
    alpha: f64,
    /// Momentum parameter p of the counting side.
    #[arg(long)]
    p: f64,
    /// Partition labelling the state on both sides.
    #[arg(long, default_value = "")]
    partition: String,
    /// Highest compared level k (default 5).
    #[arg(long, default_value_t = 5)]
    levels: i64,
    /// Retained-level override for the counting solve (default 40, grid
    /// edge pinned at xi = 60 so the comparison floor does not move with p).
    #[arg(long)]
    k_max: Option<i64>,
    /// Fixed-point tolerance override (default 1e-10).
    #[arg(long)]
    tol: Option<f64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Anharmonicity exponent alpha (> 1).
    #[arg(long, value_parser = parse_alpha)]
    alpha: f64,
    /// Comma-separated momenta, e.g. "20,40,80" (nonempty).
    #[arg(long)]
    p_list: String,
    /// Partition solved at every momentum.
    #[arg(long, default_value = "")]
    partition: String,
    /// Highest retained root level (default 200).
    #[arg(long)]
    k_max: Option<i64>,
    /// Fixed-point tolerance (default 1e-10).
    #[arg(long)]
    tol: Option<f64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// Entry point of the `bethe-iba` binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version arrive here too; they print to stdout
            // and exit 0, anything else is a usage error.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(err) => {
            let text = render_json(&error_json(&err));
            eprint!("{text}");
            if let Some(path) = out_path(&cli.command) {
                let _ = write_atomic(path, text.as_bytes());
            }
            err.exit_code()
        }
    }
}

fn dispatch(cmd: &Cmd) -> Result<()> {
    match cmd {
        Cmd::Solve(a) => run_solve(a),
        Cmd::Verify(a) => run_verify(a),
        Cmd::WkbTable(a) => run_wkb_table(a),
        Cmd::Ode(a) => run_ode(a),
        Cmd::Crosscheck(a) => run_crosscheck(a),
        Cmd::Sweep(a) => run_sweep(a),
    }
}

fn out_path(cmd: &Cmd) -> Option<&PathBuf> {
    match cmd {
        Cmd::Solve(a) => a.out.as_ref(),
        Cmd::Verify(a) => a.solve.out.as_ref(),
        Cmd::WkbTable(a) => a.out.as_ref(),
        Cmd::Ode(a) => a.out.as_ref(),
        Cmd::Crosscheck(a) => a.out.as_ref(),
        Cmd::Sweep(a) => a.out.as_ref(),
    }
}

/// Structured JSON object for a failure, carrying the stable kind tag, the
/// human-readable message, and the variant's numeric fields.
pub fn error_json(err: &Error) -> Value {
    let mut obj = json!({
        "error": err.kind(),
        "message": err.to_string(),
    });
    let extra = match err {
        Error::Admissibility { two_p, bound } => json!({ "two_p": two_p, "bound": bound }),
        Error::NonConvergence {
            iterations,
            last_delta,
            ratio,
        } => json!({ "iterations": iterations, "last_delta": last_delta, "ratio": ratio }),
        Error::ConstraintViolation { got, expected } => {
            json!({ "got": got, "expected": expected })
        }
        Error::MonotonicityViolation { level, near } => json!({ "level": level, "near": near }),
        Error::TailTolUnreachable { tol, bound, cutoff } => {
            json!({ "tol": tol, "bound": bound, "cutoff": cutoff })
        }
        Error::DegenerateRoots { i, j, sep } => json!({ "i": i, "j": j, "sep": sep }),
        Error::RealAxisSingularity { min_dist, at } => {
            json!({ "min_dist": min_dist, "at": at })
        }
        Error::Verification { worst, tol } => json!({ "worst": worst, "tol": tol }),
        _ => Value::Null,
    };
    if let (Value::Object(base), Value::Object(extra)) = (&mut obj, extra) {
        base.extend(extra);
    }
    obj
}

fn render_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain JSON value");
    text.push('\n');
    text
}

fn parse_partition_flag(text: &str) -> Result<Partition> {
    Partition::parse(text).map_err(|e| Error::Usage(format!("--partition: {e}")))
}

/// Apply the `--k-max`/`--tol` overrides to a base solver configuration.
fn build_config(base: IbaConfig, k_max: Option<i64>, tol: Option<f64>) -> Result<IbaConfig> {
    let mut cfg = base;
    if let Some(k) = k_max {
        cfg.k_max = k;
    }
    if let Some(t) = tol {
        if !(t > 0.0 && t < 1e-2) {
            return Err(Error::Usage(format!(
                "--tol must lie in (0, 1e-2), got {t}"
            )));
        }
        cfg.tol_fp = t;
        cfg.tol_root = t / 10.0;
        cfg.tail_tol = t * 10.0;
    }
    cfg.validate()
        .map_err(|e| Error::Usage(format!("solver configuration: {e}")))?;
    Ok(cfg)
}

/// Write through a temporary sibling and rename, so readers only ever see
/// complete artifacts.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Usage(format!("--out needs a file path, got {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp.{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, bytes)?;
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(Error::Io(e));
    }
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// solve / verify
// ---------------------------------------------------------------------------

fn run_solve(a: &SolveArgs) -> Result<()> {
    let ctx = alpha_context(a.alpha)?;
    let nu = parse_partition_flag(&a.partition)?;
    let cfg = build_config(IbaConfig::default(), a.k_max, a.tol)?;
    let sol = solve(&ctx, a.p, &nu, &cfg)?;
    let text = match a.format {
        Format::Json => render_json(&sol.to_json()),
        Format::Csv => solution_csv(&sol),
    };
    emit(&a.out, &text)
}

/// `kind,k,value` rows (holes first, then roots, each ascending in k) under
/// `#` metadata lines.
fn solution_csv(sol: &IbaSolution) -> String {
    let d = &sol.diagnostics;
    let mut out = String::new();
    out.push_str(&format!(
        "# alpha={} p={} partition={} omega={}\n",
        sol.ctx.alpha,
        sol.p,
        sol.partition().to_text(),
        sol.omega
    ));
    out.push_str(&format!(
        "# iterations={} contraction_ratio={} residual_max={} state_norm={}\n",
        d.iterations, d.contraction_ratio, d.residual_max, d.state_norm
    ));
    out.push_str("kind,k,value\n");
    for (k, h) in sol.holeset.finite_holes.iter().zip(&sol.h) {
        out.push_str(&format!("hole,{k},{h}\n"));
    }
    for (k, x) in &sol.roots {
        out.push_str(&format!("root,{k},{x}\n"));
    }
    out
}

fn run_verify(a: &VerifyArgs) -> Result<()> {
    let ctx = alpha_context(a.solve.alpha)?;
    let nu = parse_partition_flag(&a.solve.partition)?;
    let cfg = build_config(IbaConfig::default(), a.solve.k_max, a.solve.tol)?;
    let sol = solve(&ctx, a.solve.p, &nu, &cfg)?;

    let levels: Vec<i64> = sol.roots.keys().copied().take(a.levels).collect();
    let mut rows = Vec::with_capacity(levels.len());
    let mut worst: f64 = 0.0;
    for &k in &levels {
        let r = residuals(&sol, k)?;
        worst = worst.max(r.log_bae.abs());
        rows.push((k, r));
    }
    let asym = check_asymptotics(&sol);
    let verified = worst < VERIFY_TOL;

    let text = match a.solve.format {
        Format::Json => render_json(&json!({
            "solution": sol.to_json(),
            "residuals": rows
                .iter()
                .map(|(k, r)| json!({ "k": k, "log_bae": r.log_bae, "mult_bae": r.mult_bae }))
                .collect::<Vec<_>>(),
            "asymptotics": {
                "max_scaled_deviation": asym.max_scaled_deviation,
                "tail_constant": asym.tail_constant,
                "state_norm": asym.state_norm,
            },
            "tolerance": VERIFY_TOL,
            "worst_residual": worst,
            "verified": verified,
        })),
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&format!(
                "# alpha={} p={} partition={} verified={} worst_residual={} tolerance={}\n",
                sol.ctx.alpha,
                sol.p,
                sol.partition().to_text(),
                verified,
                worst,
                VERIFY_TOL
            ));
            out.push_str("k,log_bae,mult_bae\n");
            for (k, r) in &rows {
                out.push_str(&format!("{k},{},{}\n", r.log_bae, r.mult_bae));
            }
            out
        }
    };
    emit(&a.solve.out, &text)?;
    if !verified {
        return Err(Error::Verification {
            worst,
            tol: VERIFY_TOL,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// wkb-table
// ---------------------------------------------------------------------------

fn run_wkb_table(a: &WkbTableArgs) -> Result<()> {
    if !(a.xi_max > 1.0 && a.xi_max.is_finite()) {
        return Err(Error::Usage(format!(
            "--xi-max must be finite and > 1, got {}",
            a.xi_max
        )));
    }
    if a.points < 2 {
        return Err(Error::Usage(format!(
            "--points must be at least 2, got {}",
            a.points
        )));
    }
    let ctx = alpha_context(a.alpha)?;
    let c2 = tail_c2(&ctx);
    let span = a.xi_max.ln();
    let rows: Vec<(f64, f64, f64)> = (0..a.points)
        .map(|i| {
            let xi = (span * i as f64 / (a.points - 1) as f64).exp();
            (xi, tau(&ctx, xi), dtau(&ctx, xi))
        })
        .collect();
    let text = match a.format {
        Format::Json => render_json(&json!({
            "alpha": ctx.alpha,
            "s": ctx.s_exp(),
            "rho": ctx.rho,
            "a": ctx.a_const,
            "c2": c2,
            "eta": ctx.eta,
            "rows": rows
                .iter()
                .map(|(xi, t, dt)| json!({ "xi": xi, "tau": t, "dtau": dt }))
                .collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&format!(
                "# alpha={} s={} rho={} A={} c2={} eta={}\n",
                ctx.alpha,
                ctx.s_exp(),
                ctx.rho,
                ctx.a_const,
                c2,
                ctx.eta
            ));
            out.push_str("xi,tau,dtau\n");
            for (xi, t, dt) in &rows {
                out.push_str(&format!("{xi},{t},{dt}\n"));
            }
            out
        }
    };
    emit(&a.out, &text)
}

// ---------------------------------------------------------------------------
// ode
// ---------------------------------------------------------------------------

fn run_ode(a: &OdeArgs) -> Result<()> {
    let ctx = alpha_context(a.alpha)?;
    let nu = parse_partition_flag(&a.partition)?;
    if a.levels == 0 {
        return Err(Error::Usage("--levels must be at least 1".into()));
    }
    let monster = solve_monster(&ctx, a.ell, &nu, a.tol)?;
    let es = eigenvalues(&ctx, a.ell, &monster.z, a.levels)?;
    let text = match a.format {
        Format::Json => render_json(&monster.to_json(&es)),
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&format!(
                "# alpha={} ell={} N={} newton_steps={} residual_norm={}\n",
                ctx.alpha,
                a.ell,
                monster.n(),
                monster.steps,
                monster.residual_norm()
            ));
            for (i, z) in monster.z.iter().enumerate() {
                out.push_str(&format!("# z_{i}={},{}\n", z.re, z.im));
            }
            out.push_str("k,E_k\n");
            for (k, e) in es.iter().enumerate() {
                out.push_str(&format!("{k},{e}\n"));
            }
            out
        }
    };
    emit(&a.out, &text)
}

// ---------------------------------------------------------------------------
// crosscheck
// ---------------------------------------------------------------------------

/// Counting-side configuration the comparison runs at: the grid edge is
/// pinned (rather than derived from k_max) so the comparison floor — set by
/// the convolution-tail model at the edge — does not move with p.
fn crosscheck_config() -> IbaConfig {
    IbaConfig {
        xi_max: 60.0,
        k_max: 40,
        ..IbaConfig::default()
    }
}

fn crosscheck_json(rep: &CrosscheckReport) -> Value {
    json!({
        "alpha": rep.alpha,
        "p": rep.p,
        "partition": rep.partition,
        "ell": rep.ell,
        "eta": rep.eta,
        "eta_power": rep.eta_power,
        "dictionary": rep.dictionary,
        "sigma_stated": rep.sigma_stated,
        "sigma_consistent": rep.sigma_consistent,
        "anchor_level": rep.anchor_level,
        "slope_iba": rep.slope_iba,
        "slope_ode": rep.slope_ode,
        "slope_reference": rep.slope_reference,
        "max_abs_deviation": rep.max_abs_deviation,
        "rows": rep
            .rows
            .iter()
            .map(|r| json!({
                "k": r.k,
                "x": r.x,
                "e": r.e,
                "scaled_ratio": r.scaled_ratio,
                "deviation": r.deviation,
            }))
            .collect::<Vec<_>>(),
    })
}

fn run_crosscheck(a: &CrosscheckArgs) -> Result<()> {
    if a.levels < 0 {
        return Err(Error::Usage(format!(
            "--levels must be non-negative, got {}",
            a.levels
        )));
    }
    let ctx = alpha_context(a.alpha)?;
    let nu = parse_partition_flag(&a.partition)?;
    let cfg = build_config(crosscheck_config(), a.k_max, a.tol)?;
    let rep = crosscheck(&ctx, a.p, &nu, 0, a.levels, &cfg)?;
    let text = match a.format {
        Format::Json => render_json(&crosscheck_json(&rep)),
        Format::Csv => rep.to_csv(),
    };
    emit(&a.out, &text)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn parse_p_list(text: &str) -> Result<Vec<f64>> {
    let ps: Vec<f64> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Usage(format!("--p-list entry {s:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    if ps.is_empty() {
        return Err(Error::Usage("--p-list must name at least one momentum".into()));
    }
    if let Some(bad) = ps.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::Usage(format!(
            "--p-list momenta must be finite and positive, got {bad}"
        )));
    }
    Ok(ps)
}

/// Thread cap for the sweep fan-out: BETHE_IBA_THREADS when set, otherwise
/// one thread per momentum up to the machine's parallelism.
fn sweep_threads(jobs: usize) -> Result<usize> {
    match std::env::var("BETHE_IBA_THREADS") {
        Ok(text) => {
            let n: usize = text.parse().map_err(|e| {
                Error::Usage(format!("BETHE_IBA_THREADS={text:?} is not a thread count: {e}"))
            })?;
            if n == 0 {
                return Err(Error::Usage(
                    "BETHE_IBA_THREADS must be at least 1".into(),
                ));
            }
            Ok(n.min(jobs))
        }
        Err(_) => {
            let cores = std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1);
            Ok(cores.min(jobs))
        }
    }
}

/// One sweep row: the solve record plus the scaling quantities the other
/// commands gate on (first-root expansion deviation scaled by p², the
/// uniform oscillatory-remainder amplitude, and the linear-prediction
/// deviation scaled by p²).
fn sweep_row(
    ctx: &crate::special::AlphaContext,
    p: f64,
    nu: &Partition,
    cfg: &IbaConfig,
) -> Result<BTreeMap<&'static str, Value>> {
    let sol = solve(ctx, p, nu, cfg)?;
    let d = &sol.diagnostics;
    let (&k0, &x0) = sol
        .roots
        .iter()
        .next()
        .ok_or_else(|| Error::Domain("no retained roots to report".into()))?;
    let holes = sol.holeset.finite_holes.len() as f64;
    let lead = ctx.a_const * p.powf(2.0 * ctx.alpha / (1.0 + ctx.alpha));
    let c1 = 2.0_f64.sqrt() * ctx.alpha / (1.0 + ctx.alpha).powf(1.5);
    let xi0 = x0 / sol.omega;
    let sub = (xi0 - 1.0 - c1 * (k0 as f64 + 0.5 + holes) / p).abs() * p * p;
    let asym = check_asymptotics(&sol);
    let osc = oscillation_scaled(&sol, 0);
    let mut row: BTreeMap<&'static str, Value> = BTreeMap::new();
    row.insert("alpha", json!(ctx.alpha));
    row.insert("p", json!(p));
    row.insert("partition", json!(sol.partition().to_text()));
    row.insert("hole_count", json!(sol.holeset.finite_holes.len()));
    row.insert("omega", json!(sol.omega));
    row.insert("iterations", json!(d.iterations));
    row.insert("contraction_ratio", json!(d.contraction_ratio));
    row.insert("residual_max", json!(d.residual_max));
    row.insert("k0", json!(k0));
    row.insert("x0", json!(x0));
    row.insert("x0_over_lead", json!(x0 / lead));
    row.insert("xi0", json!(xi0));
    row.insert("subleading_scaled", json!(sub));
    row.insert("max_scaled_deviation", json!(asym.max_scaled_deviation));
    row.insert("oscillation_scaled", json!(osc));
    row.insert("state_norm", json!(d.state_norm));
    Ok(row)
}

const SWEEP_COLUMNS: [&str; 16] = [
    "alpha",
    "p",
    "partition",
    "hole_count",
    "omega",
    "iterations",
    "contraction_ratio",
    "residual_max",
    "k0",
    "x0",
    "x0_over_lead",
    "xi0",
    "subleading_scaled",
    "max_scaled_deviation",
    "oscillation_scaled",
    "state_norm",
];

fn run_sweep(a: &SweepArgs) -> Result<()> {
    let ps = parse_p_list(&a.p_list)?;
    let ctx = alpha_context(a.alpha)?;
    let nu = parse_partition_flag(&a.partition)?;
    let cfg = build_config(IbaConfig::default(), a.k_max, a.tol)?;
    let threads = sweep_threads(ps.len())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("sweep thread pool: {e}")))?;
    let rows: Vec<BTreeMap<&'static str, Value>> = pool.install(|| {
        use rayon::prelude::*;
        ps.par_iter()
            .map(|&p| sweep_row(&ctx, p, &nu, &cfg))
            .collect::<Result<Vec<_>>>()
    })?;
    let text = match a.format {
        Format::Json => render_json(&json!(rows)),
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&SWEEP_COLUMNS.join(","));
            out.push('\n');
            for row in &rows {
                let cells: Vec<String> = SWEEP_COLUMNS
                    .iter()
                    .map(|col| match &row[col] {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
    };
    emit(&a.out, &text)
}
