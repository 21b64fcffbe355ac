use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use klab::bessel::frobenius::truncation_bound;
use klab::bessel::{FrobParams, FrobRecord};
use klab::exact::lpoly::BoundRow;
use klab::exact::{l_sym_k_coeffs, BoundStatus, LPolyRecord};
use klab::harness::verify::{self, Runs};
use klab::harness::{load_parts, load_setup, Cache, CacheStats, RunConfig, Status, VerificationReport};
use klab::padic::max_storage_precision;
use klab::profile::PrecisionProfile;
use klab::sym::{closed_points, l_sym_inf, l_unit_euler, l_unit_ratio, KappaValue, LSeriesRecord};
use klab::{Error, Result};

/// Exit status for rejected input; 0, 1 and 2 are report outcomes.
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "klab", version, about = "Exact and p-adic tools for the Kloosterman family and its symmetric powers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Residue characteristic, a prime >= 5.
    #[arg(long, default_value_t = 5)]
    p: u32,
    /// q = p^a.
    #[arg(long, default_value_t = 1)]
    a: u32,
    /// Storage precision in p-adic digits (default: the largest supported).
    #[arg(long)]
    prec: Option<u32>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cache directory; LAB_CACHE_DIR takes precedence.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Args, Clone)]
struct Window {
    /// t-degree cap of the operator window.
    #[arg(long, default_value_t = 24)]
    tdeg: usize,
    /// w-degree cap of the operator window.
    #[arg(long, default_value_t = 64)]
    wdeg: usize,
    /// Number of L-function coefficients after c_0.
    #[arg(long = "Tdeg", alias = "terms", default_value_t = 4)]
    t_terms: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact L-polynomial of Sym^k Kl and its Newton points.
    Lpoly {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: u32,
        #[arg(long, alias = "Tdeg", default_value_t = 4)]
        terms: usize,
    },
    /// Newton points as CSV, exact for --k or p-adic for --kappa.
    Newton {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "kappa")]
        k: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        kappa: Option<String>,
        #[command(flatten)]
        window: Window,
    },
    /// Frobenius matrix of the Kloosterman family.
    Frobmat {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        level: u32,
        /// t-degree of the A-series.
        #[arg(long, default_value_t = 12)]
        tdeg: usize,
        /// |x-exponent| window of the reduction.
        #[arg(long, default_value_t = 80)]
        ux: usize,
    },
    /// L-function of the kappa-th infinite symmetric power.
    Lsyminf {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        kappa: String,
        #[command(flatten)]
        window: Window,
    },
    /// Unit-root L-function by the ratio and Euler-product routes.
    Lunit {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        kappa: String,
        #[command(flatten)]
        window: Window,
    },
    /// Finite symmetric power against the quotient of infinite ones.
    VerifyIdentity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        window: Window,
    },
    /// The full cross-check suite.
    VerifyAll {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        window: Window,
    },
}

/// Wrapper for every JSON output: the configuration that produced it and
/// the result.
#[derive(Serialize)]
struct Output<'a, T: Serialize> {
    config: &'a RunConfig,
    result: T,
}

#[derive(Serialize)]
struct LpolyResult {
    #[serde(flatten)]
    record: LPolyRecord,
    bound: Vec<BoundRow>,
    status: Status,
}

#[derive(Serialize)]
struct FrobResult {
    params: FrobParams,
    /// Digits guaranteed by the truncations.
    n_eff: u32,
    matrix: FrobRecord,
}

#[derive(Serialize)]
struct UnitResult {
    ratio: LSeriesRecord,
    euler: LSeriesRecord,
    /// Digits of agreement per coefficient.
    agree_digits: Vec<u32>,
    status: Status,
}

fn profile(c: &Common, w: Option<&Window>) -> PrecisionProfile {
    let mut prof = PrecisionProfile::default_for(c.p);
    prof.a = c.a;
    let max = max_storage_precision(c.p.clamp(5, 13));
    prof.n_padic = match c.prec {
        Some(n) if n > max && c.p >= 5 => {
            eprintln!("warning: --prec {n} exceeds the storage limit {max} for p = {}; using {max}", c.p);
            max
        }
        Some(n) => n,
        None => max,
    };
    if let Some(w) = w {
        prof.n_t = w.tdeg;
        prof.m_w = w.wdeg;
        prof.m_t = w.t_terms;
    }
    prof
}

fn config(name: &str, c: &Common, w: Option<&Window>) -> RunConfig {
    let mut cfg = RunConfig::new(name, profile(c, w));
    cfg.out = c.out.clone();
    cfg.cache = c.cache.clone();
    cfg.seed = c.seed;
    cfg
}

fn parse_kappa(s: &str, p: u32) -> Result<KappaValue> {
    let k = KappaValue::parse(s)?;
    k.check(p)?;
    Ok(k)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, text)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(cfg: &RunConfig, result: T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(&Output { config: cfg, result })?;
    s.push('\n');
    emit(cfg.out.as_deref(), &s)
}

fn open_cache(cfg: &RunConfig) -> Result<Option<Cache>> {
    Cache::from_env_or(cfg.cache.as_deref())
}

fn report_stats(stats: CacheStats) {
    if stats != CacheStats::default() {
        eprintln!(
            "cache: {} hit(s), {} miss(es), {} corrupt",
            stats.hits, stats.misses, stats.corrupt
        );
    }
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Indeterminate => 2,
    }
}

fn finish_report(report: &VerificationReport) -> Result<u8> {
    for line in report.summary_lines() {
        eprintln!("{line}");
    }
    let t = report.totals;
    eprintln!("{} pass, {} fail, {} indeterminate", t.pass, t.fail, t.indeterminate);
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    emit(report.config.out.as_deref(), &s)?;
    Ok(report.exit_code() as u8)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Lpoly { common, k, terms } => {
            let mut cfg = config("lpoly", &common, None);
            cfg.k = Some(k);
            cfg.profile.m_t = terms;
            cfg.validate_exact()?;
            let l = l_sym_k_coeffs(common.p, common.a, k, terms)?;
            let bound = l.bound_report();
            let status = if bound.iter().all(|r| r.proven == BoundStatus::Holds) {
                Status::Pass
            } else {
                Status::Fail
            };
            if let Some(out) = &cfg.out {
                fs::create_dir_all(out.parent().unwrap_or(Path::new(".")))?;
                fs::write(out.with_extension("newton.csv"), l.newton_polygon().to_csv())?;
            }
            emit_json(
                &cfg,
                LpolyResult {
                    record: l.to_record(),
                    bound,
                    status,
                },
            )?;
            Ok(status_code(status))
        }
        Cmd::Newton {
            common,
            k,
            kappa,
            window,
        } => {
            let mut cfg = config("newton", &common, Some(&window));
            let csv = if let Some(k) = k {
                cfg.k = Some(k);
                cfg.validate_exact()?;
                l_sym_k_coeffs(common.p, common.a, k, window.t_terms)?
                    .newton_polygon()
                    .to_csv()
            } else {
                let s = kappa.ok_or_else(|| Error::config("either --k or --kappa is required"))?;
                let kappa = parse_kappa(&s, common.p)?;
                cfg.kappa = Some(kappa.clone());
                cfg.validate()?;
                let (setup, stats) = load_setup(&cfg.profile, open_cache(&cfg)?.as_ref())?;
                report_stats(stats);
                klab::exact::newton_polygon(&l_sym_inf(&setup, &kappa)?.newton_points()).to_csv()
            };
            emit(cfg.out.as_deref(), &csv)?;
            Ok(0)
        }
        Cmd::Frobmat {
            common,
            level,
            tdeg,
            ux,
        } => {
            let mut cfg = config("frobmat", &common, None);
            cfg.profile.u_x = ux;
            cfg.validate()?;
            if level == 0 || level > 4 {
                return Err(Error::config("--level must be in 1..=4"));
            }
            let params = FrobParams { t_deg: tdeg, u_max: ux };
            let (_, frob, stats) = load_parts(&cfg.profile, params, open_cache(&cfg)?.as_ref())?;
            report_stats(stats);
            let n_eff = truncation_bound(common.p, &params).min(frob.ctx().cap()) / (common.p - 1);
            let m = if level == 1 { frob } else { frob.level(level)? };
            emit_json(
                &cfg,
                FrobResult {
                    params,
                    n_eff,
                    matrix: m.to_record(),
                },
            )?;
            Ok(0)
        }
        Cmd::Lsyminf {
            common,
            kappa,
            window,
        } => {
            let mut cfg = config("lsyminf", &common, Some(&window));
            let kappa = parse_kappa(&kappa, common.p)?;
            cfg.kappa = Some(kappa.clone());
            cfg.validate()?;
            let (setup, stats) = load_setup(&cfg.profile, open_cache(&cfg)?.as_ref())?;
            report_stats(stats);
            let l = l_sym_inf(&setup, &kappa)?;
            emit_json(&cfg, l.to_record()?)?;
            Ok(0)
        }
        Cmd::Lunit {
            common,
            kappa,
            window,
        } => {
            let mut cfg = config("lunit", &common, Some(&window));
            let kappa = parse_kappa(&kappa, common.p)?;
            cfg.kappa = Some(kappa.clone());
            cfg.validate()?;
            let (setup, stats) = load_setup(&cfg.profile, open_cache(&cfg)?.as_ref())?;
            report_stats(stats);
            let ratio = l_unit_ratio(&setup, &kappa)?;
            let points = closed_points(&setup.theta, cfg.profile.m_t as u32)?;
            let euler = l_unit_euler(&points, setup.ctx(), &kappa, cfg.profile.m_t)?;
            let p = common.p;
            let mut agree = Vec::new();
            let mut status = Status::Pass;
            for (a, b) in ratio.coeffs.iter().zip(&euler.coeffs) {
                let d = *a - *b;
                let avail = d.precision_digits();
                let got = (d.val_units() / (p - 1)).min(avail);
                agree.push(got);
                if got < avail {
                    status = Status::Fail;
                }
            }
            emit_json(
                &cfg,
                UnitResult {
                    ratio: ratio.to_record()?,
                    euler: euler.to_record()?,
                    agree_digits: agree,
                    status,
                },
            )?;
            Ok(status_code(status))
        }
        Cmd::VerifyIdentity { common, k, window } => {
            let mut cfg = config("verify-identity", &common, Some(&window));
            cfg.k = Some(k);
            cfg.validate()?;
            let (setup, stats) = load_setup(&cfg.profile, open_cache(&cfg)?.as_ref())?;
            report_stats(stats);
            let mut report = VerificationReport::new(cfg.clone());
            let mut runs = Runs::new(&setup);
            verify::check_identity(&mut report, &mut runs, k);
            finish_report(&report)
        }
        Cmd::VerifyAll { common, window } => {
            let cfg = config("verify-all", &common, Some(&window));
            cfg.validate()?;
            let (setup, stats) = load_setup(&cfg.profile, open_cache(&cfg)?.as_ref())?;
            report_stats(stats);
            let report = verify::verify_all(&cfg, &setup)?;
            finish_report(&report)
        }
    }
}

/// Accepts `--kappa -- -7` by folding the separator into `--kappa=-7`, so
/// that later flags are still parsed as flags.
fn normalize_args(args: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.into_iter().peekable();
    while let Some(a) = it.next() {
        if a == "--kappa" && it.peek().is_some_and(|n| n == "--") {
            it.next();
            match it.next() {
                Some(v) => out.push(format!("--kappa={v}")),
                None => out.push(a),
            }
        } else {
            out.push(a);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(normalize_args(std::env::args().collect())) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_precision_starvation() { 2 } else { EXIT_USAGE })
        }
    }
}
