//! Command-line driver: verify the isomorphism, construct chi, report
//! geometry statistics, and export incidence files.
//!
//! Exit codes: 0 success, 1 check failure, 2 enumeration budget exceeded,
//! 64 usage error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use geomred::chi::{chi_algebraic, chi_inductive, verify_chi, ChiResult};
use geomred::field::factor_prime_power;
use geomred::geometry::{
    build_tstar_d, build_x, build_y, geometry_stats, write_incidence, GeometryError,
    GeometryStats,
};
use geomred::iso::{verify_isomorphism, Construction, IsoError, VerifyOptions};
use geomred::projective::{PPoint, SpaceError, Subspace};
use geomred::reduction::ReductionMap;
use geomred::subgeometry::Subgeometry;

const EXIT_OK: u8 = 0;
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 64;

const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Parser)]
#[command(
    name = "geomred",
    version,
    about = "Finite-geometry verifier: field reduction, chi construction, and certified point-line geometry isomorphisms"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the isomorphism between Y(s,t,q) and X(s,t,q) and write a
    /// certificate.
    Verify(RunArgs),
    /// Construct chi and report the per-point verification table.
    ConstructChi(RunArgs),
    /// Parameter statistics for X, Y and T*(D).
    Stats(RunArgs),
    /// Export X and Y as incidence files.
    Export(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Field order q (a prime power, at least 2).
    #[arg(long)]
    q: u32,
    /// Spread parameter s (at least 0).
    #[arg(long)]
    s: u32,
    /// Dimension parameter t (at least 1).
    #[arg(long)]
    t: u32,
    /// chi construction: inductive, algebraic, or both.
    #[arg(long, default_value = "both")]
    construction: String,
    /// Seed for randomized spot checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumeration budget (default 10^7; env GEOMRED_BUDGET overrides).
    #[arg(long)]
    budget: Option<u64>,
    /// Output path (verify/construct-chi/stats: file; export: directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; only json is supported.
    #[arg(long, default_value = "json")]
    format: String,
}

struct Config {
    q: u32,
    s: u32,
    t: u32,
    construction: Construction,
    seed: u64,
    budget: u64,
    out: Option<PathBuf>,
}

fn parse_config(args: &RunArgs) -> Result<Config, String> {
    if args.q < 2 || factor_prime_power(args.q as u64).is_err() {
        return Err(format!("--q {} is not a prime power >= 2", args.q));
    }
    if args.t < 1 {
        return Err("--t must be at least 1".to_string());
    }
    let construction: Construction = args.construction.parse()?;
    let budget = match args.budget {
        Some(b) => b,
        None => match std::env::var("GEOMRED_BUDGET") {
            Ok(v) => v
                .parse()
                .map_err(|_| format!("GEOMRED_BUDGET is not a number: {v}"))?,
            Err(_) => DEFAULT_BUDGET,
        },
    };
    if budget == 0 {
        return Err("--budget must be positive".to_string());
    }
    if args.format != "json" {
        return Err(format!("--format {} is not supported", args.format));
    }
    Ok(Config {
        q: args.q,
        s: args.s,
        t: args.t,
        construction,
        seed: args.seed,
        budget,
        out: args.out.clone(),
    })
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                let _ = e.print();
                return ExitCode::from(EXIT_OK);
            }
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let (args, run): (&RunArgs, fn(&Config) -> Result<u8, CmdError>) = match &cli.cmd {
        Cmd::Verify(a) => (a, cmd_verify),
        Cmd::ConstructChi(a) => (a, cmd_construct_chi),
        Cmd::Stats(a) => (a, cmd_stats),
        Cmd::Export(a) => (a, cmd_export),
    };
    let config = match parse_config(args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(&config) {
        Ok(code) => ExitCode::from(code),
        Err(CmdError::Budget(msg)) => {
            eprintln!("error: budget exceeded: {msg}");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(CmdError::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
    }
}

enum CmdError {
    Budget(String),
    Other(String),
}

impl From<IsoError> for CmdError {
    fn from(e: IsoError) -> Self {
        if e.is_budget() {
            CmdError::Budget(e.to_string())
        } else {
            CmdError::Other(e.to_string())
        }
    }
}

impl From<GeometryError> for CmdError {
    fn from(e: GeometryError) -> Self {
        match &e {
            GeometryError::Space(SpaceError::BudgetExceeded { .. }) => {
                CmdError::Budget(e.to_string())
            }
            _ => CmdError::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Other(e.to_string())
    }
}

fn cmd_verify(cfg: &Config) -> Result<u8, CmdError> {
    let opts = VerifyOptions {
        construction: cfg.construction,
        seed: cfg.seed,
        budget: cfg.budget,
    };
    let cert = verify_isomorphism(cfg.q, cfg.s, cfg.t, &opts)?;
    let path = cfg.out.clone().unwrap_or_else(|| {
        PathBuf::from(format!(
            "geomred-cert-q{}-s{}-t{}.json",
            cfg.q, cfg.s, cfg.t
        ))
    });
    fs::write(&path, cert.to_json_bytes())?;
    for check in &cert.checks {
        let status = if check.pass { "pass" } else { "FAIL" };
        eprintln!("{:<24} {} ({} items)", check.name, status, check.count);
        for wtn in &check.witnesses {
            eprintln!("    {wtn}");
        }
    }
    eprintln!("certificate written to {}", path.display());
    Ok(if cert.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Serialize)]
struct ChiReportFile {
    q: u32,
    s: u32,
    t: u32,
    construction: String,
    chi_basis: Vec<String>,
    trace: geomred::chi::ChiTrace,
    trace_digest: String,
    checks: Vec<(String, bool)>,
    pass: bool,
}

fn build_chi(
    rm: &ReductionMap,
    construction: Construction,
) -> Result<Vec<ChiResult>, CmdError> {
    let t = rm.t();
    let rm_r = rm.restrict(t - 1);
    let c_r = Subgeometry::canonical(&rm_r, t as usize - 1, t as usize - 1);
    let mut out = Vec::new();
    let mk = |r: Result<ChiResult, geomred::chi::ChiError>| {
        r.map_err(|e| CmdError::Other(e.to_string()))
    };
    match construction {
        Construction::Inductive => out.push(mk(chi_inductive(&rm_r, &c_r))?),
        Construction::Algebraic => out.push(mk(chi_algebraic(&rm_r, &c_r))?),
        Construction::Both => {
            out.push(mk(chi_inductive(&rm_r, &c_r))?);
            out.push(mk(chi_algebraic(&rm_r, &c_r))?);
        }
    }
    Ok(out)
}

fn cmd_construct_chi(cfg: &Config) -> Result<u8, CmdError> {
    let rm = ReductionMap::new(cfg.q, cfg.s, cfg.t)
        .map_err(|e| CmdError::Other(e.to_string()))?;
    let rm_r = rm.restrict(cfg.t - 1);
    let c_r = Subgeometry::canonical(&rm_r, cfg.t as usize - 1, cfg.t as usize - 1);
    let results = build_chi(&rm, cfg.construction)?;
    let mut all_pass = true;
    let mut reports = Vec::new();
    for res in &results {
        let report = verify_chi(&rm_r, &res.chi, &c_r);
        let pass = report.pass();
        all_pass &= pass;
        let mut checks = vec![("chi_dimension".to_string(), report.chi_pdim_ok)];
        checks.extend(
            report
                .per_point
                .iter()
                .map(|(l, ok)| (format!("meets image of {l}"), *ok)),
        );
        let passed = checks.iter().filter(|(_, ok)| *ok).count();
        eprintln!(
            "{} chi: dimension {}, {}/{} checks pass",
            res.construction,
            res.chi.pdim(),
            passed,
            checks.len()
        );
        reports.push(ChiReportFile {
            q: cfg.q,
            s: cfg.s,
            t: cfg.t,
            construction: res.construction.to_string(),
            chi_basis: basis_rows(&res.chi),
            trace: res.trace.clone(),
            trace_digest: res.trace.digest(),
            checks,
            pass,
        });
    }
    let path = cfg.out.clone().unwrap_or_else(|| {
        PathBuf::from(format!("geomred-chi-q{}-s{}-t{}.json", cfg.q, cfg.s, cfg.t))
    });
    let mut bytes = serde_json::to_vec_pretty(&reports).expect("report serializes");
    bytes.push(b'\n');
    fs::write(&path, bytes)?;
    eprintln!("chi report written to {}", path.display());
    Ok(if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn basis_rows(s: &Subspace) -> Vec<String> {
    (0..s.rank())
        .map(|i| {
            s.basis()
                .row(i)
                .iter()
                .map(|c| c.code().to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect()
}

#[derive(Serialize)]
struct StatsReport {
    q: u32,
    s: u32,
    t: u32,
    x: GeometryStats,
    y: GeometryStats,
    tstar_d: GeometryStats,
    point_counts_equal: bool,
    records_equal: bool,
}

fn canonical_geometries(
    cfg: &Config,
) -> Result<(geomred::geometry::BuiltX, geomred::geometry::BuiltY), CmdError> {
    let rm = ReductionMap::new(cfg.q, cfg.s, cfg.t)
        .map_err(|e| CmdError::Other(e.to_string()))?;
    let big = rm.big().clone();
    let small = rm.small().clone();
    let n = cfg.t as usize;
    let sigma = Subspace::from_rows(
        &big,
        n,
        (0..n).map(|i| PPoint::unit(n, i).coords().to_vec()).collect(),
    );
    let c = Subgeometry::from_vectors(
        &rm,
        (0..n).map(|i| PPoint::unit(n, i).coords().to_vec()).collect(),
    )
    .map_err(GeometryError::from)?;
    let xn = (cfg.s + cfg.t) as usize;
    let pi = Subspace::from_rows(
        &small,
        xn,
        (0..=cfg.s as usize)
            .map(|i| PPoint::unit(xn, i).coords().to_vec())
            .collect(),
    );
    let x = build_x(&small, cfg.s, cfg.t, &pi, cfg.budget)?;
    let y = build_y(&rm, &sigma, &c)?;
    Ok((x, y))
}

fn cmd_stats(cfg: &Config) -> Result<u8, CmdError> {
    let (x, y) = canonical_geometries(cfg)?;
    let xs = geometry_stats(&x.geometry);
    let ys = geometry_stats(&y.geometry);
    let ts = geometry_stats(&build_tstar_d(cfg.q, cfg.s, cfg.t)?);
    let report = StatsReport {
        q: cfg.q,
        s: cfg.s,
        t: cfg.t,
        point_counts_equal: xs.points == ys.points,
        records_equal: xs == ys && ys == ts,
        x: xs,
        y: ys,
        tstar_d: ts,
    };
    eprintln!(
        "|P_X| = {} , |P_Y| = {} ({})",
        report.x.points,
        report.y.points,
        if report.point_counts_equal {
            "equal"
        } else {
            "MISMATCH"
        }
    );
    eprintln!(
        "records X/Y/T*(D) {}",
        if report.records_equal {
            "coincide"
        } else {
            "DIFFER"
        }
    );
    let mut bytes = serde_json::to_vec_pretty(&report).expect("report serializes");
    bytes.push(b'\n');
    match &cfg.out {
        Some(path) => {
            fs::write(path, bytes)?;
            eprintln!("stats written to {}", path.display());
        }
        None => {
            let text = String::from_utf8(bytes).expect("json is utf-8");
            println!("{text}");
        }
    }
    Ok(EXIT_OK)
}

fn cmd_export(cfg: &Config) -> Result<u8, CmdError> {
    let (x, y) = canonical_geometries(cfg)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let x_path = dir.join(format!("X_q{}_s{}_t{}.inc", cfg.q, cfg.s, cfg.t));
    let y_path = dir.join(format!("Y_q{}_s{}_t{}.inc", cfg.q, cfg.s, cfg.t));
    fs::write(&x_path, write_incidence(&x.geometry))?;
    fs::write(&y_path, write_incidence(&y.geometry))?;
    eprintln!("wrote {}", x_path.display());
    eprintln!("wrote {}", y_path.display());
    Ok(EXIT_OK)
}
