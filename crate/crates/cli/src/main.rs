mod output;

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use spherekern::addition::{addition_constants, verify_addition};
use spherekern::catalog::{named_kernel, KERNEL_NAMES};
use spherekern::expansion::{musin_coeffs, schoenberg_coeffs, synth_bundle_kernel, BundleExpansion, DEFAULT_D_MAX};
use spherekern::gegenbauer::eval_gegenbauer;
use spherekern::kernel::{check_invariance, check_pd, Kernel, DEFAULT_PD_TOL};
use spherekern::lp_bound::{certify, delsarte_lp_with, LPBoundProblem, LPCertificate, Normalization};
use spherekern::sphere::{random_unit, rng_from_seed, stream_rng, SphereConfig};
use spherekern::Error;

use output::{render, Format, Report, Table};

#[derive(Parser)]
#[command(
    name = "spherekern",
    version,
    about = "Invariant p.d. kernels on spheres and sphere bundles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, env = "SPHEREKERN_SEED", default_value_t = 0)]
    seed: u64,

    /// Omit the timestamp field from JSON reports.
    #[arg(long, global = true)]
    no_timestamp: bool,

    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args)]
struct KernelArgs {
    /// One of: dot, neg-dot, gegenbauer:K, const[:V], coord, bundle.
    #[arg(long)]
    kernel: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    r: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Raw,
    Unit,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate P_d^alpha at one or more points.
    Gegenbauer {
        #[arg(long, short)]
        degree: usize,
        /// Comma-separated evaluation points in [-1, 1].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        t: Vec<f64>,
        #[arg(long, conflicts_with = "n")]
        alpha: Option<f64>,
        /// Use alpha = n/2 - 1.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Schoenberg coefficients of a sphere kernel.
    Expand {
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_D_MAX)]
        dmax: usize,
    },
    /// Randomized Gram-matrix test of positive definiteness.
    CheckPd {
        #[command(flatten)]
        k: KernelArgs,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 30)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_PD_TOL)]
        tol: f64,
    },
    /// Randomized test of O_n-invariance.
    CheckInvariance {
        #[command(flatten)]
        k: KernelArgs,
        #[arg(long, default_value_t = 200)]
        draws: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Random feature-map bundle kernel, checked for p.d. and invariance.
    SynthBundle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 4)]
        dmax: usize,
        #[arg(long, default_value_t = 3)]
        features: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 30)]
        points: usize,
        #[arg(long, default_value_t = 200)]
        draws: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol_pd: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol_inv: f64,
    },
    /// Coefficient kernels of a stabilizer-invariant kernel at a random Z.
    Musin {
        #[command(flatten)]
        k: KernelArgs,
        #[arg(long, default_value_t = DEFAULT_D_MAX)]
        dmax: usize,
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Check the bundle addition formula on random configurations.
    VerifyAddition {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Check that T1 inverts T2 and that T2 separates points.
    VerifyT1t2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Delsarte LP bound for codes with minimum angle theta.
    LpBound {
        #[arg(long)]
        n: usize,
        /// Radians, or degrees with a `deg` suffix.
        #[arg(long, value_parser = parse_angle)]
        theta: f64,
        #[arg(long, default_value_t = 12)]
        dmax: usize,
        #[arg(long, default_value_t = spherekern::lp_bound::DEFAULT_GRID_POINTS)]
        grid_points: usize,
        #[arg(long, value_enum, default_value = "raw")]
        normalization: NormArg,
    },
    /// Re-check an LP certificate on a refined grid.
    Certify {
        /// JSON certificate, bare or as written by `lp-bound`.
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long, default_value_t = spherekern::lp_bound::CERTIFY_REFINE)]
        refine: usize,
        #[arg(long, default_value_t = spherekern::lp_bound::DEFAULT_GRID_POINTS)]
        grid_points: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gegenbauer { .. } => "gegenbauer",
            Command::Expand { .. } => "expand",
            Command::CheckPd { .. } => "check-pd",
            Command::CheckInvariance { .. } => "check-invariance",
            Command::SynthBundle { .. } => "synth-bundle",
            Command::Musin { .. } => "musin",
            Command::VerifyAddition { .. } => "verify-addition",
            Command::VerifyT1t2 { .. } => "verify-t1t2",
            Command::LpBound { .. } => "lp-bound",
            Command::Certify { .. } => "certify",
        }
    }
}

fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (num, scale) = match s.strip_suffix("deg") {
        Some(d) => (d.trim(), PI / 180.0),
        None => (s, 1.0),
    };
    let v: f64 = num.parse().map_err(|_| format!("invalid angle {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("invalid angle {s:?}"));
    }
    Ok(v * scale)
}

enum Failure {
    Usage(String),
    Verification(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotPositiveDefinite { .. } | Error::NotInvariant { .. } | Error::Refinement { .. } => {
                Failure::Verification(e)
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn columns(cfg: &SphereConfig) -> Vec<Vec<f64>> {
    cfg.z().column_iter().map(|c| c.iter().copied().collect()).collect()
}

fn run(cmd: &Command, seed: u64) -> Result<Report, Failure> {
    Ok(match cmd {
        Command::Gegenbauer { degree, t, alpha, n } => {
            let alpha = match (alpha, n) {
                (Some(a), _) => *a,
                (None, Some(n)) => *n as f64 / 2.0 - 1.0,
                (None, None) => return Err(Failure::Usage("give --alpha or --n".into())),
            };
            let mut table = Table::new(&["t", "value"]);
            let mut values = Vec::new();
            for &x in t {
                let v = eval_gegenbauer(alpha, *degree, x)?;
                table.push(vec![x.to_string(), v.to_string()]);
                values.push(json!({"t": x, "value": v}));
            }
            Report {
                command: "gegenbauer",
                pass: true,
                result: json!({"alpha": alpha, "degree": degree, "values": values}),
                table: Some(table),
            }
        }
        Command::Expand { kernel, n, dmax } => {
            let k = named_kernel(kernel, *n, 0, false, seed)?;
            let e = schoenberg_coeffs(&k, *dmax)?;
            let mut table = Table::new(&["k", "coefficient"]);
            for (i, c) in e.coefficients.iter().enumerate() {
                table.push(vec![i.to_string(), c.to_string()]);
            }
            let mut result = to_value(&e.to_record());
            result["kernel"] = json!(kernel);
            result["min_coefficient"] = json!(e.min_coefficient());
            result["positive_definite"] = json!(e.is_positive_definite(DEFAULT_PD_TOL));
            Report {
                command: "expand",
                pass: true,
                result,
                table: Some(table),
            }
        }
        Command::CheckPd { k, trials, points, tol } => {
            let kernel = named_kernel(&k.kernel, k.n, k.r, true, seed)?;
            let rep = check_pd(&kernel, *trials, *points, seed, *tol)?;
            let mut table = Table::new(&["trial", "m", "min_eigenvalue", "max_eigenvalue", "scaled_tol", "pass"]);
            for (i, r) in rep.reports.iter().enumerate() {
                table.push(vec![
                    i.to_string(),
                    r.m.to_string(),
                    r.min_eigenvalue.to_string(),
                    r.max_eigenvalue.to_string(),
                    r.scaled_tol.to_string(),
                    r.pass.to_string(),
                ]);
            }
            let mut result = to_value(&rep);
            result["kernel"] = json!(k.kernel);
            Report {
                command: "check-pd",
                pass: rep.pass,
                result,
                table: Some(table),
            }
        }
        Command::CheckInvariance { k, draws, tol } => {
            let kernel = named_kernel(&k.kernel, k.n, k.r, true, seed)?;
            let rep = check_invariance(&kernel, *draws, seed, *tol)?;
            let mut result = to_value(&rep);
            result["kernel"] = json!(k.kernel);
            Report {
                command: "check-invariance",
                pass: rep.pass,
                result,
                table: None,
            }
        }
        Command::SynthBundle {
            n,
            r,
            dmax,
            features,
            trials,
            points,
            draws,
            tol_pd,
            tol_inv,
        } => {
            let e = BundleExpansion::random(*n, *r, *dmax, *features, seed)?;
            let record = e.to_record()?;
            let k = synth_bundle_kernel(e)?;
            let pd = check_pd(&k, *trials, *points, seed, *tol_pd)?;
            let inv = check_invariance(&k, *draws, seed, *tol_inv)?;
            let min_eig = pd
                .reports
                .iter()
                .map(|r| r.min_eigenvalue)
                .fold(f64::INFINITY, f64::min);
            let pass = pd.pass && inv.pass;
            Report {
                command: "synth-bundle",
                pass,
                result: json!({
                    "expansion": record,
                    "pd_pass": pd.pass,
                    "min_eigenvalue": min_eig,
                    "pd_witness": pd.witness,
                    "invariance_pass": inv.pass,
                    "invariance_residual": inv.max_residual,
                }),
                table: None,
            }
        }
        Command::Musin { k, dmax, pairs, tol } => {
            if k.r == 0 {
                return Err(Failure::Usage("musin needs --r >= 1".into()));
            }
            let kernel = named_kernel(&k.kernel, k.n, k.r, false, seed)?;
            let mut rng = rng_from_seed(seed);
            let cfg = SphereConfig::random_full_rank(k.n, k.r, &mut rng)?;
            let m = musin_coeffs(&kernel, &cfg, *dmax)?;
            let mut table = Table::new(&["pair", "degree", "coefficient"]);
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for p in 0..*pairs {
                let x = random_unit(k.n, &mut rng);
                let y = random_unit(k.n, &mut rng);
                let (u1, u2) = (cfg.coordinates(&x)?, cfg.coordinates(&y)?);
                let d = m.coefficients(&u1, &u2)?;
                let err = (m.reconstruct(&x, &y)? - kernel.eval(&x, &y, Some(&cfg))?).abs();
                worst = worst.max(err);
                for (i, c) in d.iter().enumerate() {
                    table.push(vec![p.to_string(), i.to_string(), c.to_string()]);
                }
                rows.push(json!({"u1": u1, "u2": u2, "coefficients": d, "reconstruction_error": err}));
            }
            Report {
                command: "musin",
                pass: worst < *tol,
                result: json!({
                    "kernel": k.kernel,
                    "n": k.n,
                    "r": k.r,
                    "alpha": m.alpha(),
                    "d_max": dmax,
                    "z": columns(&cfg),
                    "pairs": rows,
                    "max_reconstruction_error": worst,
                    "tol": tol,
                }),
                table: Some(table),
            }
        }
        Command::VerifyAddition { n, r, k, samples, tol } => {
            let rep = verify_addition(*n, *r, *k, *samples, seed, *tol)?;
            let constants = addition_constants(rep.alpha, *k)?;
            let mut table = Table::new(&["degree", "max_residual"]);
            for (d, v) in rep.residuals.iter().enumerate() {
                table.push(vec![d.to_string(), v.to_string()]);
            }
            let mut result = to_value(&rep);
            result["constants"] = to_value(&constants);
            Report {
                command: "verify-addition",
                pass: rep.pass,
                result,
                table: Some(table),
            }
        }
        Command::VerifyT1t2 { n, r, draws, tol } => {
            let (roundtrip, separation) = t1t2_margins(*n, *r, *draws, seed)?;
            let pass = roundtrip < *tol && separation > 1e-9;
            Report {
                command: "verify-t1t2",
                pass,
                result: json!({
                    "n": n,
                    "r": r,
                    "draws": draws,
                    "tol": tol,
                    "max_roundtrip_error": roundtrip,
                    "min_separation": separation,
                }),
                table: None,
            }
        }
        Command::LpBound {
            n,
            theta,
            dmax,
            grid_points,
            normalization,
        } => {
            let p = lp_problem(*n, *theta, *dmax, *grid_points)?;
            let norm = match normalization {
                NormArg::Raw => Normalization::Raw,
                NormArg::Unit => Normalization::Unit,
            };
            let cert = delsarte_lp_with(&p, norm)?;
            let mut table = Table::new(&["k", "coefficient"]);
            for (i, c) in cert.coefficients.iter().enumerate() {
                table.push(vec![i.to_string(), c.to_string()]);
            }
            Report {
                command: "lp-bound",
                pass: true,
                result: to_value(&cert),
                table: Some(table),
            }
        }
        Command::Certify {
            certificate,
            refine,
            grid_points,
        } => {
            let text = fs::read_to_string(certificate)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", certificate.display())))?;
            let mut v: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad JSON: {e}")))?;
            if let Some(inner) = v.get("result") {
                v = inner.clone();
            }
            let cert: LPCertificate =
                serde_json::from_value(v).map_err(|e| Failure::Usage(format!("not a certificate: {e}")))?;
            let p = lp_problem(cert.n, cert.theta, cert.d_max, *grid_points)?;
            let rep = certify(&cert, &p, *refine);
            Report {
                command: "certify",
                pass: rep.pass,
                result: to_value(&rep),
                table: None,
            }
        }
    })
}

fn lp_problem(n: usize, theta: f64, d_max: usize, points: usize) -> spherekern::Result<LPBoundProblem> {
    let grid = spherekern::lp_bound::chebyshev_lobatto(-1.0, theta.cos(), points);
    LPBoundProblem::with_grid(n, theta, d_max, grid)
}

/// Largest `|T1(T2(x)) - x|` and smallest `|T2(x) - T2(y)|` over random draws.
fn t1t2_margins(n: usize, r: usize, draws: usize, seed: u64) -> spherekern::Result<(f64, f64)> {
    let mut roundtrip = 0.0f64;
    let mut separation = f64::INFINITY;
    for i in 0..draws {
        let mut rng = stream_rng(seed, i as u64);
        let cfg = SphereConfig::random_full_rank(n, r, &mut rng)?;
        let x = random_unit(n, &mut rng);
        let y = random_unit(n, &mut rng);
        let (v, u) = cfg.map_t2(&x)?;
        let back = cfg.map_t1(&v, &u)?;
        roundtrip = roundtrip.max(x.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        let gap = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if gap > 1e-6 {
            let (w, s) = cfg.map_t2(&y)?;
            let d = v
                .iter()
                .zip(&w)
                .chain(u.iter().zip(&s))
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>();
            separation = separation.min(d.sqrt());
        }
    }
    Ok((roundtrip, separation))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let report = match run(&cli.command, cli.seed) {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            if msg.starts_with("unknown kernel") {
                eprintln!("kernels: {KERNEL_NAMES}");
            }
            return ExitCode::from(2);
        }
        Err(Failure::Verification(e)) => {
            let report = Report {
                command: cli.command.name(),
                pass: false,
                result: json!({"error": e.to_string()}),
                table: None,
            };
            let _ = emit(&cli, &report);
            eprintln!("verification failed: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(msg) = emit(&cli, &report) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<(), String> {
    let text = render(report, cli.format, cli.seed, !cli.no_timestamp);
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert!((parse_angle("60deg").unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((parse_angle("90 deg").unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert!(parse_angle("sixty").is_err());
        assert!(parse_angle("inf").is_err());
    }

    #[test]
    fn argument_definitions() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
