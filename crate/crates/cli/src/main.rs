//! `gribov`: batch computations on the Gribov operator family with
//! machine-readable, byte-reproducible output.
//!
//! Exit codes: 0 success, 1 computation or verification failure, 2 invalid
//! input.  Failures print a JSON object `{"error": .., "detail": ..}` on
//! standard error.  Output schemas are documented in docs/io.md and frozen
//! by golden-file tests.

mod output;
mod svg;

use clap::{Parser, Subcommand, ValueEnum};
use gribov_core::basis::{BasisKind, CoefficientVector};
use gribov_core::deficiency::{eigenvector_at, km_block_test};
use gribov_core::inverse::{
    apply_quadrature, eval_u_basis, nystrom_perron, right_inverse_residual, KernelSpec,
};
use gribov_core::jacobi::{sigma0_curve, ScalarJacobiSpec};
use gribov_core::ortho::{first_second_eval, kouba_polys, plasma_polys, PolySeq};
use gribov_core::verify::all_checks;
use num_complex::Complex64;
use output::{emit, fmt_f64, Csv};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gribov",
    version,
    about = "Spectral computations for the Gribov operator family",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sigma0Method {
    Matrix,
    Nystrom,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolyFamily {
    Kouba,
    Plasma,
    First,
    Second,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of the n x n truncation of H_{mu,lambda}
    Spectrum {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// sigma_0(mu) over a grid, by matrix truncation, Nystrom, or both
    Sigma0 {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        /// Comma-separated mu values, e.g. 0.5,1,2
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Sigma0Method::Matrix)]
        method: Sigma0Method,
        /// Domain truncation for the Nystrom discretization
        #[arg(long, default_value_t = 12.0)]
        length: f64,
        #[arg(long, default_value_t = 400)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-8, allow_negative_numbers = true)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Apply the integral kernel K_{mu,lambda} to a coefficient vector
    KernelApply {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        /// Path to a coefficient-vector JSON file (u-basis, real entries)
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        ymax: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 12.0)]
        length: f64,
        #[arg(long, default_value_t = 400)]
        nodes: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Max residual of H_lambda K_{0,lambda} u_n = u_n over 2 <= n <= nmax
    InverseCheck {
        #[arg(long)]
        nmax: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Complete-indeterminacy test for H^{p,m}
    Deficiency {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        jmax: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Polynomial families: exact coefficients or point evaluations
    Polys {
        #[arg(long, value_enum)]
        kind: PolyFamily,
        #[arg(long)]
        n: usize,
        /// Evaluation point (first/second kind only)
        #[arg(long)]
        x_re: Option<f64>,
        #[arg(long)]
        x_im: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Eigenvector of H_I at an arbitrary complex point
    Eigvec {
        #[arg(long, allow_negative_numbers = true)]
        xi_re: f64,
        #[arg(long, allow_negative_numbers = true)]
        xi_im: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the full invariant suite
    Verify {
        /// Only run checks whose name contains the substring
        #[arg(long)]
        filter: Option<String>,
    },
}

struct Failure {
    code: u8,
    kind: &'static str,
    detail: String,
}

impl Failure {
    fn invalid(detail: impl Into<String>) -> Self {
        Self {
            code: 2,
            kind: "invalid_input",
            detail: detail.into(),
        }
    }
}

impl From<gribov_core::Error> for Failure {
    fn from(e: gribov_core::Error) -> Self {
        use gribov_core::Error::*;
        let kind = match &e {
            NonConvergence { .. } => "non_convergence",
            Domain(_) => "invalid_input",
            NonPositiveTerm { .. } => "non_positive_term",
            Overflow { .. } => "overflow",
            IdentityViolation { .. } => "identity_violation",
            BoundViolation { .. } => "bound_violation",
            NoConvergence { .. } => "no_convergence",
        };
        let code = if matches!(e, Domain(_)) { 2 } else { 1 };
        Self {
            code,
            kind,
            detail: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: 1,
            kind: "io_error",
            detail: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    if let Err(f) = init_thread_pool() {
        report(&f);
        return ExitCode::from(f.code);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            report(&f);
            ExitCode::from(f.code)
        }
    }
}

fn report(f: &Failure) {
    eprintln!(
        "{}",
        serde_json::json!({"error": f.kind, "detail": f.detail})
    );
}

/// GRIBOV_THREADS caps internal parallelism (quadrature grids, disc sweeps).
fn init_thread_pool() -> Result<(), Failure> {
    if let Ok(raw) = std::env::var("GRIBOV_THREADS") {
        let threads: usize = raw.parse().ok().filter(|&t| t >= 1).ok_or_else(|| {
            Failure::invalid(format!(
                "GRIBOV_THREADS must be a positive integer, got {raw:?}"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure {
                code: 1,
                kind: "io_error",
                detail: e.to_string(),
            })?;
    }
    Ok(())
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Spectrum {
            mu,
            lambda,
            n,
            tol,
            format,
            output,
        } => {
            if tol <= 0.0 {
                return Err(Failure::invalid("tol must be positive"));
            }
            let spec = ScalarJacobiSpec::new(mu, lambda, n).map_err(Failure::from)?;
            let result = spec.truncated_spectrum(tol)?;
            let content = match format {
                Format::Csv => {
                    let mut csv = Csv::new("eig_re,eig_im,residual");
                    for (z, r) in result.eigenvalues.iter().zip(&result.residuals) {
                        csv.row(&[fmt_f64(z.re), fmt_f64(z.im), fmt_f64(*r)]);
                    }
                    csv.finish()
                }
                Format::Json => serde_json::to_string_pretty(&result).unwrap() + "\n",
                Format::Svg => {
                    return Err(Failure::invalid(
                        "svg output is only available for curve-producing subcommands",
                    ))
                }
            };
            emit(output.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Sigma0 {
            lambda,
            mu,
            n,
            method,
            length,
            nodes,
            tol,
            format,
            output,
        } => {
            if tol <= 0.0 {
                return Err(Failure::invalid("tol must be positive"));
            }
            let mu_grid = parse_mu_list(&mu)?;
            if format == Format::Json {
                return Err(Failure::invalid("sigma0 emits csv or svg"));
            }
            let matrix_points = if method != Sigma0Method::Nystrom {
                Some(sigma0_curve(lambda, &mu_grid, n, tol)?)
            } else {
                None
            };
            let nystrom_points = if method != Sigma0Method::Matrix {
                let mut v = Vec::with_capacity(mu_grid.len());
                for &m in &mu_grid {
                    let spec = KernelSpec::new(m, lambda, length, nodes)?;
                    v.push(nystrom_perron(&spec)?);
                }
                Some(v)
            } else {
                None
            };
            let content = match (matrix_points.as_ref(), nystrom_points.as_ref()) {
                (Some(mat), None) => {
                    if format == Format::Svg {
                        let pts: Vec<(f64, f64)> =
                            mat.iter().map(|p| (p.mu, p.sigma0.re)).collect();
                        svg::curve(&pts, "mu", "sigma0")
                    } else {
                        let mut csv = Csv::new("mu,sigma0_re,sigma0_im,residual");
                        for p in mat {
                            csv.row(&[
                                fmt_f64(p.mu),
                                fmt_f64(p.sigma0.re),
                                fmt_f64(p.sigma0.im),
                                fmt_f64(p.residual),
                            ]);
                        }
                        csv.finish()
                    }
                }
                (None, Some(nys)) => {
                    if format == Format::Svg {
                        let pts: Vec<(f64, f64)> = mu_grid
                            .iter()
                            .zip(nys)
                            .map(|(&m, r)| (m, r.sigma0))
                            .collect();
                        svg::curve(&pts, "mu", "sigma0")
                    } else {
                        let mut csv = Csv::new("mu,sigma0,rho,iterations");
                        for (&m, r) in mu_grid.iter().zip(nys) {
                            csv.row(&[
                                fmt_f64(m),
                                fmt_f64(r.sigma0),
                                fmt_f64(r.rho),
                                r.iterations.to_string(),
                            ]);
                        }
                        csv.finish()
                    }
                }
                (Some(mat), Some(nys)) => {
                    if format == Format::Svg {
                        let pts: Vec<(f64, f64)> =
                            mat.iter().map(|p| (p.mu, p.sigma0.re)).collect();
                        svg::curve(&pts, "mu", "sigma0")
                    } else {
                        let mut csv = Csv::new(
                            "mu,sigma0_matrix_re,sigma0_matrix_im,residual_matrix,sigma0_nystrom,rel_diff",
                        );
                        for (p, r) in mat.iter().zip(nys) {
                            let rel = (p.sigma0.re - r.sigma0).abs() / r.sigma0.abs();
                            csv.row(&[
                                fmt_f64(p.mu),
                                fmt_f64(p.sigma0.re),
                                fmt_f64(p.sigma0.im),
                                fmt_f64(p.residual),
                                fmt_f64(r.sigma0),
                                fmt_f64(rel),
                            ]);
                        }
                        csv.finish()
                    }
                }
                (None, None) => unreachable!(),
            };
            emit(output.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::KernelApply {
            mu,
            lambda,
            input,
            ymax,
            samples,
            length,
            nodes,
            format,
            output,
        } => {
            if !ymax.is_finite() || ymax <= 0.0 || samples < 2 {
                return Err(Failure::invalid("need ymax > 0 and samples >= 2"));
            }
            if format == Format::Json {
                return Err(Failure::invalid("kernel-apply emits csv or svg"));
            }
            let raw = std::fs::read_to_string(&input)?;
            let vector: CoefficientVector = serde_json::from_str(&raw)
                .map_err(|e| Failure::invalid(format!("cannot parse {}: {e}", input.display())))?;
            if vector.basis() != BasisKind::U {
                return Err(Failure::invalid("kernel-apply expects a u-basis vector"));
            }
            if vector.entries().iter().any(|c| c.im != 0.0) {
                return Err(Failure::invalid(
                    "kernel-apply expects real coefficients (the kernel is real)",
                ));
            }
            if !vector.entries().is_empty() && vector.start() < 1 {
                return Err(Failure::invalid("input must be supported on indices >= 1"));
            }
            let spec = KernelSpec::new(mu, lambda, length, nodes)?;
            let grid = spec.grid();
            let psi: Vec<f64> = grid
                .nodes
                .iter()
                .map(|&s| eval_u_basis(&vector, s).re)
                .collect();
            let ys: Vec<f64> = (0..samples)
                .map(|k| ymax * k as f64 / (samples - 1) as f64)
                .collect();
            let values = apply_quadrature(&spec, &psi, &ys)?;
            let content = if format == Format::Svg {
                let pts: Vec<(f64, f64)> = ys.iter().copied().zip(values).collect();
                svg::curve(&pts, "y", "K psi")
            } else {
                let mut csv = Csv::new("y,value");
                for (y, v) in ys.iter().zip(&values) {
                    csv.row(&[fmt_f64(*y), fmt_f64(*v)]);
                }
                csv.finish()
            };
            emit(output.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::InverseCheck {
            nmax,
            lambda,
            output,
        } => {
            let residual = right_inverse_residual(lambda, nmax)?;
            let content =
                serde_json::to_string_pretty(&serde_json::json!({"max_residual": residual}))
                    .unwrap()
                    + "\n";
            emit(output.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Deficiency { p, m, jmax, output } => {
            let report = km_block_test(p, m, jmax)?;
            let content = serde_json::to_string_pretty(&report.report).unwrap() + "\n";
            emit(output.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Polys {
            kind,
            n,
            x_re,
            x_im,
            output,
        } => {
            let content = match kind {
                PolyFamily::Kouba => {
                    if n > 60 {
                        return Err(Failure::invalid(
                            "kouba coefficients are exact up to n = 60",
                        ));
                    }
                    let (p, q) = kouba_polys(n);
                    serde_json::to_string_pretty(&serde_json::json!([
                        poly_json(&p, n),
                        poly_json(&q, n),
                    ]))
                    .unwrap()
                        + "\n"
                }
                PolyFamily::Plasma => {
                    if n > 20 {
                        return Err(Failure::invalid(
                            "plasma coefficients are exact up to n = 20",
                        ));
                    }
                    let (p, q, value) = plasma_polys(n)?;
                    serde_json::to_string_pretty(&serde_json::json!([
                        poly_json(&p, n),
                        poly_json(&q, n),
                        {"kind": "plasma_identity", "n": n, "value": value.to_string()},
                    ]))
                    .unwrap()
                        + "\n"
                }
                PolyFamily::First | PolyFamily::Second => {
                    if n < 1 {
                        return Err(Failure::invalid("first/second kind need n >= 1"));
                    }
                    let x = Complex64::new(x_re.unwrap_or(0.0), x_im.unwrap_or(0.0));
                    let (p, q) = first_second_eval(n, x);
                    serde_json::to_string_pretty(&serde_json::json!({
                        "kind": if kind == PolyFamily::First { "first" } else { "second" },
                        "n": n,
                        "x_re": x.re,
                        "x_im": x.im,
                        "P": [p.re, p.im],
                        "Q": [q.re, q.im],
                    }))
                    .unwrap()
                        + "\n"
                }
            };
            emit(output.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Eigvec {
            xi_re,
            xi_im,
            n,
            format,
            output,
        } => {
            let tail = eigenvector_at(Complex64::new(xi_re, xi_im), n)?;
            let content = match format {
                Format::Json => {
                    let half = tail.partial_l2[n / 2 - 1];
                    let full = tail.partial_l2[n - 1];
                    serde_json::to_string_pretty(&serde_json::json!({
                        "xi_re": xi_re,
                        "xi_im": xi_im,
                        "n": n,
                        "bound_m": tail.bound_constant,
                        "bound_attained_at": tail.bound_attained_at,
                        "l2_half": half,
                        "l2_full": full,
                        "cauchy_ratio": (full - half) / half,
                    }))
                    .unwrap()
                        + "\n"
                }
                Format::Csv => {
                    let mut csv = Csv::new("n,u_re,u_im,abs");
                    for (idx, v) in tail.values.iter().enumerate() {
                        csv.row(&[
                            (idx + 1).to_string(),
                            fmt_f64(v.re),
                            fmt_f64(v.im),
                            fmt_f64(v.norm()),
                        ]);
                    }
                    csv.finish()
                }
                Format::Svg => {
                    let pts: Vec<(f64, f64)> = tail
                        .values
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| v.norm() > 0.0)
                        .map(|(idx, v)| (((idx + 1) as f64).ln(), v.norm().ln()))
                        .collect();
                    svg::curve(&pts, "ln n", "ln |u_n|")
                }
            };
            emit(output.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify { filter } => {
            let mut failed = Vec::new();
            let mut ran = 0usize;
            for check in all_checks() {
                if let Some(f) = &filter {
                    if !check.name.contains(f.as_str()) {
                        continue;
                    }
                }
                ran += 1;
                match (check.run)() {
                    Ok(()) => println!("ok   {}", check.name),
                    Err(detail) => {
                        println!("FAIL {}: {detail}", check.name);
                        failed.push(check.name);
                    }
                }
            }
            println!("verified {}/{} checks", ran - failed.len(), ran);
            if failed.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                Err(Failure {
                    code: 1,
                    kind: "verification_failure",
                    detail: failed.join(", "),
                })
            }
        }
    }
}

fn parse_mu_list(raw: &str) -> Result<Vec<f64>, Failure> {
    let values: Result<Vec<f64>, _> = raw.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match values {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(Failure::invalid(format!("cannot parse mu list {raw:?}"))),
    }
}

/// Exact polynomials as `[numerator, denominator]` string pairs, ascending
/// powers; these families have integer coefficients, so denominators are 1.
fn poly_json(p: &PolySeq, n: usize) -> serde_json::Value {
    let coeffs: Vec<[String; 2]> = p
        .coeffs
        .iter()
        .map(|c| [c.to_string(), "1".to_string()])
        .collect();
    serde_json::json!({
        "kind": p.kind.name(),
        "n": n,
        "coeffs": coeffs,
    })
}
