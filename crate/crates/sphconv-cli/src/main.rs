//! Batch front end: compute tables, run verification suites, calibrate
//! constants, and emit CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 1 verification failure, 2 quadrature
//! non-convergence or calibration spread failure, 3 singular spectral
//! parameter, 64 usage error, 65 unreadable data file, 66 missing
//! calibration.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use sphconv::calibration::Calibration;
use sphconv::convolution::{convolution_identity_suite, ConvolutionField};
use sphconv::error::SphError;
use sphconv::profile::RadialFunction;
use sphconv::spherical::{hc_series_phi_in, phi};
use sphconv::transforms::{
    abel_beta_pairing, abel_transform, calculus_at_identity, default_spectral_grid,
    fourier_of_abel, spherical_transform, transform_on_grid, wave_packet, PlancherelTable,
};
use sphconv::verify::{run_all, VerifyConfig};
use sphconv::QuadratureSpec;

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_NOINPUT: u8 = 66;

#[derive(Parser)]
#[command(
    name = "sphconv",
    about = "Spherical-analysis tables and verification for SL(2,R)",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Comma-separated spectral parameters, e.g. "0.5,1,1+0.5i,-i"
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Vec<String>,
    /// Comma-separated radii
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t: Vec<f64>,
    /// Profile spec: bump:T | gaussian:SIGMA:T | poly:T | plateau:T:EPS | zero:T
    #[arg(long, default_value = "bump:1.0")]
    profile: String,
    /// Spectral measure file (JSON)
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Tolerance gate for the command's pass/fail verdict
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomised suites
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Calibration file; defaults to $SPHCONV_CALIBRATION, then the
    /// bundled reference constants
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Radial node budget override
    #[arg(long)]
    n_t: Option<usize>,
    /// Rotation-circle node budget override
    #[arg(long)]
    n_theta: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Spherical functions: quadrature vs series table over lambda x t
    Sphfn {
        #[command(flatten)]
        common: CommonArgs,
        /// Series truncation order
        #[arg(long, default_value_t = 40)]
        series_terms: usize,
    },
    /// Transform tables: spectrum, abel, factorization, roundtrip, pairing
    Transform {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "spectrum")]
        op: TransformOp,
    },
    /// Convolution field table and identity suite
    Conv {
        #[command(flatten)]
        common: CommonArgs,
        /// Field grid size
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Field extent
        #[arg(long, default_value_t = 4.0)]
        t_max: f64,
        /// Also run the identity suite and emit its report
        #[arg(long)]
        suite: bool,
    },
    /// Bochner functional report for a measure and profile
    Bochner {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run every invariant suite and the acceptance battery
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Restrict to named suites (group, spherical, series, c_function,
        /// transforms, convolution, bochner)
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
    },
    /// Measure and freeze the calibration constants
    Calibrate {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Clone, Copy, PartialEq, clap::ValueEnum)]
enum TransformOp {
    Spectrum,
    Abel,
    Factorization,
    Roundtrip,
    Pairing,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                SphError::NonConvergence { .. } => 2,
                SphError::SingularParameter { .. } => 3,
                SphError::Calibration(_) => EX_DATAERR,
                SphError::InvalidMeasure(_) | SphError::AtomOffSpectrum { .. } => EX_DATAERR,
                SphError::InvalidSpec(_) => EX_USAGE,
                _ => 70,
            })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, SphError> {
    match cli.command {
        Command::Sphfn { common, series_terms } => cmd_sphfn(&common, series_terms),
        Command::Transform { common, op } => cmd_transform(&common, op),
        Command::Conv { common, grid, t_max, suite } => cmd_conv(&common, grid, t_max, suite),
        Command::Bochner { common } => cmd_bochner(&common),
        Command::Verify { common, suite } => cmd_verify(&common, &suite),
        Command::Calibrate { common } => cmd_calibrate(&common),
    }
}

fn usage_error(msg: &str) -> Result<ExitCode, SphError> {
    eprintln!("usage error: {msg}");
    Ok(ExitCode::from(EX_USAGE))
}

/// "a", "a+bi", "bi", "-i", "i" -> complex number.
fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim().replace(' ', "");
    if s.is_empty() {
        return None;
    }
    if let Ok(re) = s.parse::<f64>() {
        return Some(Complex64::new(re, 0.0));
    }
    if let Some(body) = s.strip_suffix('i') {
        let imag = |b: &str| -> Option<f64> {
            match b {
                "" | "+" => Some(1.0),
                "-" => Some(-1.0),
                _ => b.parse().ok(),
            }
        };
        // split "a+bi" / "a-bi" at the last sign that is not an exponent
        let bytes = body.as_bytes();
        for idx in (1..bytes.len()).rev() {
            let c = bytes[idx] as char;
            if (c == '+' || c == '-')
                && bytes[idx - 1] as char != 'e'
                && bytes[idx - 1] as char != 'E'
            {
                let re: f64 = body[..idx].parse().ok()?;
                let im = imag(&body[idx..])?;
                return Some(Complex64::new(re, im));
            }
        }
        return imag(body).map(|im| Complex64::new(0.0, im));
    }
    None
}

fn parse_lambdas(raw: &[String]) -> Result<Vec<Complex64>, String> {
    raw.iter()
        .map(|s| parse_complex(s).ok_or_else(|| format!("cannot parse lambda {s:?}")))
        .collect()
}

fn parse_profile(s: &str) -> Option<RadialFunction> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize| parts.get(i).and_then(|x| x.parse::<f64>().ok());
    match parts[0] {
        "bump" => Some(RadialFunction::bump(num(1)?)),
        "gaussian" => Some(RadialFunction::gaussian_truncated(num(1)?, num(2)?)),
        "poly" => Some(RadialFunction::poly_bump(num(1)?)),
        "plateau" => Some(RadialFunction::plateau(num(1)?, num(2)?)),
        "zero" => Some(RadialFunction::zero(num(1)?)),
        _ => None,
    }
}

fn load_calibration(common: &CommonArgs) -> Result<Calibration, SphError> {
    if let Some(path) = &common.calibration {
        return Calibration::load(path);
    }
    if let Ok(path) = std::env::var("SPHCONV_CALIBRATION") {
        return Calibration::load(Path::new(&path));
    }
    Ok(*Calibration::reference())
}

fn quad_spec(common: &CommonArgs) -> Result<QuadratureSpec, SphError> {
    let d = QuadratureSpec::default();
    QuadratureSpec::new(
        common.n_theta.unwrap_or(d.n_theta),
        common.n_t.unwrap_or(d.n_t),
        d.t_max,
        common.n_t.unwrap_or(d.n_u),
        d.u_max,
        d.tol,
    )
}

/// Column-oriented numeric table; CSV at 17 significant digits or a JSON
/// array of row objects.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: serde_json::Map<String, serde_json::Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), json!(v)))
                            .collect();
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                serde_json::to_string_pretty(&rows).unwrap() + "\n"
            }
        }
    }
}

/// Writes via a temp file in the same directory, then renames; failed
/// commands leave no partial output.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), SphError> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().map(Path::to_path_buf).filter(|p| !p.as_os_str().is_empty());
            let dir = dir.unwrap_or_else(|| PathBuf::from("."));
            let tmp = dir.join(format!(
                ".{}.tmp",
                path.file_name().map(|s| s.to_string_lossy()).unwrap_or_default()
            ));
            std::fs::write(&tmp, content)
                .and_then(|_| std::fs::rename(&tmp, path))
                .map_err(|e| {
                    SphError::InvalidSpec(format!("cannot write {}: {e}", path.display()))
                })
        }
    }
}

fn load_measure(path: &Path) -> Result<sphconv::bochner::SpectralMeasure, SphError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SphError::InvalidMeasure(format!("cannot read {}: {e}", path.display())))?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        SphError::InvalidMeasure(format!("parse error in {}: {e}", path.display()))
    })?;
    sphconv::bochner::SpectralMeasure::from_json(&v)
}

fn cmd_sphfn(common: &CommonArgs, series_terms: usize) -> Result<ExitCode, SphError> {
    if common.lambda.is_empty() || common.t.is_empty() {
        return usage_error("sphfn needs non-empty --lambda and --t lists");
    }
    let lambdas = match parse_lambdas(&common.lambda) {
        Ok(l) => l,
        Err(m) => return usage_error(&m),
    };
    let cal = load_calibration(common)?;
    let q = quad_spec(common)?;
    let tol = common.tol.unwrap_or(1e-6);

    let mut table = Table::new(vec![
        "lambda_re",
        "lambda_im",
        "t",
        "phi_quadrature_re",
        "phi_quadrature_im",
        "phi_series_re",
        "phi_series_im",
        "abs_diff",
    ]);
    let mut all_ok = true;
    for &l in &lambdas {
        for &t in &common.t {
            let quad_val = phi(l, t, &q)?;
            // the series lives on the open chamber t > 0, and lambda = 0
            // degenerates the branch fit; offset it per the grid policy
            let l_series = if l.norm() < 1e-6 { l + Complex64::new(1e-6, 0.0) } else { l };
            let series_val = if t.abs() < 1e-14 {
                quad_val
            } else {
                hc_series_phi_in(l_series, t.abs(), series_terms, cal.series_convention, &q)?
                    .value
            };
            let diff = (quad_val - series_val).norm();
            all_ok &= diff < tol;
            table.push(vec![
                l.re,
                l.im,
                t,
                quad_val.re,
                quad_val.im,
                series_val.re,
                series_val.im,
                diff,
            ]);
        }
    }
    emit(&common.out, &table.render(common.format))?;
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_transform(common: &CommonArgs, op: TransformOp) -> Result<ExitCode, SphError> {
    let Some(f) = parse_profile(&common.profile) else {
        return usage_error(&format!("unknown profile {:?}", common.profile));
    };
    let cal = load_calibration(common)?;
    let q = quad_spec(common)?;

    match op {
        TransformOp::Spectrum => {
            if common.lambda.is_empty() {
                return usage_error("transform --op spectrum needs --lambda");
            }
            let lambdas = match parse_lambdas(&common.lambda) {
                Ok(l) => l,
                Err(m) => return usage_error(&m),
            };
            let mut table = Table::new(vec!["lambda_re", "lambda_im", "value_re", "value_im"]);
            for &l in &lambdas {
                let v = spherical_transform(&f, l, &q)?;
                table.push(vec![l.re, l.im, v.re, v.im]);
            }
            emit(&common.out, &table.render(common.format))?;
            Ok(ExitCode::SUCCESS)
        }
        TransformOp::Abel => {
            if common.t.is_empty() {
                return usage_error("transform --op abel needs --t");
            }
            let mut table = Table::new(vec!["t", "value_re", "value_im"]);
            for &t in &common.t {
                let v = abel_transform(&f, t, &q)?;
                table.push(vec![t, v, 0.0]);
            }
            emit(&common.out, &table.render(common.format))?;
            Ok(ExitCode::SUCCESS)
        }
        TransformOp::Factorization => {
            if common.lambda.is_empty() {
                return usage_error("transform --op factorization needs --lambda");
            }
            let lambdas = match parse_lambdas(&common.lambda) {
                Ok(l) => l,
                Err(m) => return usage_error(&m),
            };
            let tol = common.tol.unwrap_or(1e-6);
            let mut table = Table::new(vec![
                "lambda_re",
                "lambda_im",
                "spherical_re",
                "spherical_im",
                "via_abel_re",
                "via_abel_im",
                "abs_diff",
            ]);
            let mut all_ok = true;
            for &l in &lambdas {
                let a = spherical_transform(&f, l, &q)?;
                let b = fourier_of_abel(&f, l, &q, &cal)?;
                let diff = (a - b).norm();
                all_ok &= diff < tol * (1.0 + a.norm());
                table.push(vec![l.re, l.im, a.re, a.im, b.re, b.im, diff]);
            }
            emit(&common.out, &table.render(common.format))?;
            Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        TransformOp::Roundtrip => {
            let grid = default_spectral_grid();
            let plancherel = PlancherelTable::new(grid.clone(), cal.c_fit_radii, &q);
            let fhat = transform_on_grid(&f, &grid, &q)?;
            let ts: Vec<f64> = if common.t.is_empty() {
                (0..=48).map(|i| f.support_radius() * i as f64 / 40.0).collect()
            } else {
                common.t.clone()
            };
            let mut table = Table::new(vec!["t", "f", "reconstructed", "diff"]);
            let mut sup_f = 0.0f64;
            let mut sup_diff = 0.0f64;
            for &t in &ts {
                let rec = wave_packet(&fhat, &plancherel, &cal, t, &q)?;
                let fv = f.eval(t).re;
                sup_f = sup_f.max(fv.abs());
                sup_diff = sup_diff.max((rec.re - fv).abs());
                table.push(vec![t, fv, rec.re, (rec.re - fv).abs()]);
            }
            emit(&common.out, &table.render(common.format))?;
            let tol = common.tol.unwrap_or(1e-3);
            Ok(if sup_diff < tol * sup_f.max(1e-300) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        TransformOp::Pairing => {
            let Some(measure_path) = &common.measure else {
                return usage_error("transform --op pairing needs --measure");
            };
            let mu = load_measure(measure_path)?;
            let lhs = calculus_at_identity(&f, &mu, &q)?;
            let rhs = abel_beta_pairing(&f, &mu, &q, &cal)?;
            let diff = (lhs - rhs).norm();
            let mut table = Table::new(vec![
                "calculus_re",
                "calculus_im",
                "abel_pairing_re",
                "abel_pairing_im",
                "abs_diff",
            ]);
            table.push(vec![lhs.re, lhs.im, rhs.re, rhs.im, diff]);
            emit(&common.out, &table.render(common.format))?;
            let tol = common.tol.unwrap_or(1e-6);
            Ok(if diff < tol * (1.0 + lhs.norm()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn cmd_conv(
    common: &CommonArgs,
    grid: usize,
    t_max: f64,
    suite: bool,
) -> Result<ExitCode, SphError> {
    if common.lambda.is_empty() {
        return usage_error("conv needs --lambda");
    }
    let lambdas = match parse_lambdas(&common.lambda) {
        Ok(l) => l,
        Err(m) => return usage_error(&m),
    };
    let Some(f) = parse_profile(&common.profile) else {
        return usage_error(&format!("unknown profile {:?}", common.profile));
    };
    let q = quad_spec(common)?;
    let lambda = lambdas[0];

    if suite {
        let t = common.t.first().copied().unwrap_or(1.0);
        let report = convolution_identity_suite(&f, lambda, t, &q)?;
        let items: Vec<serde_json::Value> = report
            .items
            .iter()
            .map(|i| {
                json!({
                    "name": i.name,
                    "residual": i.residual,
                    "tolerance": i.tolerance,
                    "pass": i.pass,
                })
            })
            .collect();
        let doc = json!({
            "lambda": [lambda.re, lambda.im],
            "t": t,
            "profile": f.label(),
            "items": items,
            "all_pass": report.all_pass(),
        });
        emit(&common.out, &(serde_json::to_string_pretty(&doc).unwrap() + "\n"))?;
        return Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) });
    }

    let field = ConvolutionField::compute(&f, lambda, grid, t_max, &q)?;
    emit(&common.out, &field.to_csv(&q))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bochner(common: &CommonArgs) -> Result<ExitCode, SphError> {
    let Some(measure_path) = &common.measure else {
        return usage_error("bochner needs --measure");
    };
    let Some(f) = parse_profile(&common.profile) else {
        return usage_error(&format!("unknown profile {:?}", common.profile));
    };
    let mu = load_measure(measure_path)?;
    let q = quad_spec(common)?;
    let tm = sphconv::bochner::BochnerFunctional::new(mu.clone());
    let value = tm.evaluate(&f, &q)?;
    let positivity = tm.positive_definiteness_residual(&f, &q)?;
    let (growth_ok, growth_val) = mu.growth_check();
    let supports: Vec<serde_json::Value> = [1.0, 1.25, 1.5, 1.75, 2.0]
        .iter()
        .map(|&p| json!({ "p": p, "contained": mu.support_check(p) }))
        .collect();
    let doc = json!({
        "profile": f.label(),
        "value": [value.re, value.im],
        "positivity_residual": positivity,
        "support": supports,
        "growth": { "ok": growth_ok, "value": growth_val, "bound": mu.growth().bound },
    });
    emit(&common.out, &(serde_json::to_string_pretty(&doc).unwrap() + "\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(common: &CommonArgs, suites: &[String]) -> Result<ExitCode, SphError> {
    // verification refuses to run without an explicit calibration artifact
    let cal = if let Some(path) = &common.calibration {
        Calibration::load(path)?
    } else if let Ok(path) = std::env::var("SPHCONV_CALIBRATION") {
        Calibration::load(Path::new(&path))?
    } else {
        eprintln!(
            "verify needs a calibration file: run `sphconv calibrate --out calibration.json` \
             first and pass --calibration calibration.json (or set SPHCONV_CALIBRATION)"
        );
        return Ok(ExitCode::from(EX_NOINPUT));
    };
    let cfg = VerifyConfig {
        seed: common.seed,
        tol_override: common.tol,
        quad: quad_spec(common)?,
    };
    let cases = if suites.is_empty() {
        run_all(&cal, &cfg)
    } else {
        let names: Vec<&str> = suites.iter().map(|s| s.as_str()).collect();
        sphconv::verify::run_suites(&cal, &cfg, &names)
    };
    let all_pass = cases.iter().all(|c| c.pass);
    let doc = serde_json::to_string_pretty(&cases).unwrap() + "\n";
    emit(&common.out, &doc)?;
    eprintln!("{}", sphconv::verify::format_report(&cases));
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_calibrate(common: &CommonArgs) -> Result<ExitCode, SphError> {
    // --tol acts as the quadrature acceptance tolerance here, so a coarse
    // node budget plus a loose tolerance genuinely degrades the constants
    let mut q = quad_spec(common)?;
    if let Some(tol) = common.tol {
        q.tol = tol;
    }
    // a node budget too coarse to stabilise the constants is the same
    // failure mode as an excessive spread
    let report = match Calibration::compute(&q) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("calibration did not stabilise: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    let doc = report.calibration.to_json_string() + "\n";
    emit(&common.out, &doc)?;
    eprintln!(
        "kappa_H = {:.12} (spread {:.2e}), kappa_P = {:.12} (spread {:.2e}), convention {:?}",
        report.calibration.kappa_h,
        report.kappa_h_spread,
        report.calibration.kappa_p,
        report.kappa_p_spread,
        report.calibration.series_convention,
    );
    if report.kappa_h_spread > 1e-3 || report.kappa_p_spread > 1e-3 {
        eprintln!("cross-profile spread exceeds 1e-3; constants not trustworthy");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
