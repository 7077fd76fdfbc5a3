//! Command-line front end.
//!
//! Every run prints `seed=` and `n_samples=` first; rerunning with the same
//! values reproduces every number. Output is `key=value` lines, or one JSON
//! object with `--json`. Exit codes: 0 success, 1 a check failed, 2 invalid
//! input.

pub mod formats;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gpsparsify::bench::{
    a_n, gen_coordinate_example, gen_regular_polygon, gen_shifted_polytope, run_suite, SuiteParams,
};
use gpsparsify::mc::{estimate_gaussian_distance, estimate_l1_gap, estimate_width};
use gpsparsify::norm::{multiplicative_failure, sparsify_norm};
use gpsparsify::polytope::{sparsify_polytope_with_report, Route};
use gpsparsify::sparsify::{center, sparsify_with_report};
use gpsparsify::verify::{
    check_anticoncentration, check_cck, check_distance, check_gamma2_sandwich, check_sparsifier, check_tail,
};
use gpsparsify::{CenterParams, CheckReport, LiftConfig, McConfig, SparseSup, SupFn};
use serde_json::{json, Map, Value};

use formats::{load, store, to_text, CheckReportFile, PolytopeFile, SparseSupFile, VectorSetFile};

/// Stream used for every measurement that must be independent of the
/// construction it measures.
const TAG_MEASURE: u64 = 0x4d45_4153;

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Io(String),
    Core(gpsparsify::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<gpsparsify::Error> for CliError {
    fn from(e: gpsparsify::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "gpsparsify", version, about = "Sparsify Gaussian process suprema, norms and polytopes")]
struct Cli {
    /// Monte Carlo samples per estimate.
    #[arg(long, global = true, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, global = true, env = "GPSPARSIFY_SEED", default_value_t = 0)]
    seed: u64,
    /// Emit one JSON object instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,
    /// Where to write the constructed object (or check reports).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Estimate the Gaussian width of a vector set.
    Width {
        #[arg(long)]
        input: PathBuf,
    },
    /// Sparsify the supremum over a vector set.
    Sparsify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Replace the shifts of a sparsifier by auxiliary coordinates.
    Center {
        /// A sparsifier file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        aux: AuxArgs,
    },
    /// Junta approximation of the norm with the given dual vectors.
    Norm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        aux: AuxArgs,
        /// Accept an asymmetric set by adding its negation.
        #[arg(long)]
        symmetrize: bool,
    },
    /// Sparse approximation of an intersection of halfspaces.
    Polytope {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        lift: LiftArgs,
    },
    /// Run inequality checks.
    Check(CheckArgs),
    /// Lower-bound demonstrations.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct AuxArgs {
    #[arg(long, default_value_t = CenterParams::default().a_cap)]
    a_cap: usize,
    #[arg(long, default_value_t = CenterParams::default().kappa)]
    kappa: f64,
}

impl AuxArgs {
    fn params(&self) -> CenterParams {
        CenterParams { a_cap: self.a_cap, kappa: self.kappa }
    }
}

#[derive(Debug, Args)]
struct LiftArgs {
    #[arg(long, default_value_t = LiftConfig::default().m_cap)]
    m_cap: usize,
    #[arg(long, default_value_t = LiftConfig::default().tau)]
    tau: f64,
    /// Fix the lifting parameter Q instead of deriving it.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, default_value_t = LiftConfig::default().y_candidates)]
    y_candidates: usize,
}

impl LiftArgs {
    fn config(&self) -> LiftConfig {
        LiftConfig { q: self.q, m_cap: self.m_cap, y_candidates: self.y_candidates, tau: self.tau }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Tail,
    Anticoncentration,
    Cck,
    Sandwich,
    Sparsifier,
    Distance,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Run every check on the benchmark suite.
    #[arg(long, conflicts_with = "kind")]
    suite: Option<Suite>,
    /// Run one check on the files given.
    #[arg(long, requires = "input")]
    kind: Option<Kind>,
    /// Vector set (or polytope for `distance`).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Sparsifier for `sparsifier`, approximating polytope for `distance`.
    #[arg(long)]
    against: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Deviation for `tail`; defaults to three times the largest norm.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, default_value_t = 30.0)]
    c_sandwich: f64,
    #[command(flatten)]
    aux: AuxArgs,
    #[command(flatten)]
    lift: LiftArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Case {
    /// Supremum over the first m of n scaled coordinate vectors.
    Coordinate,
    /// The first m of the n shifted halfspaces.
    Polytope,
    /// Inscribed regular m-gon against a fine polygon standing in for the disk.
    Disk,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    case: Case,
    #[arg(long, default_value_t = 4096)]
    n: usize,
    /// Keep m = n^(1 - subset_frac) of the n vectors or halfspaces.
    #[arg(long, default_value_t = 0.5)]
    subset_frac: f64,
    /// Polygon size for the disk case.
    #[arg(long, default_value_t = 16)]
    m: usize,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
}

/// Ordered output fields plus optional check reports.
struct Output {
    fields: Vec<(String, Value)>,
    reports: Vec<CheckReport>,
    failed: bool,
    /// One check on user files: JSON output is the bare report.
    single: bool,
}

impl Output {
    fn new(cfg: &McConfig) -> Self {
        let mut o = Self { fields: vec![], reports: vec![], failed: false, single: false };
        o.put("seed", cfg.seed);
        o.put("n_samples", cfg.n_samples);
        o
    }

    fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.push((key.to_string(), value.into()));
    }

    fn report(&mut self, r: CheckReport) {
        self.failed |= !r.pass;
        self.reports.push(r);
    }

    fn write(&self, json: bool, out: &mut dyn Write) -> std::io::Result<()> {
        if json {
            let v = if self.single {
                serde_json::to_value(CheckReportFile::from(&self.reports[0])).expect("serializable")
            } else {
                let mut m: Map<String, Value> = self.fields.iter().cloned().collect();
                if !self.reports.is_empty() {
                    m.insert("pass".into(), Value::Bool(!self.failed));
                    m.insert("reports".into(), serde_json::to_value(self.report_files()).expect("serializable"));
                }
                Value::Object(m)
            };
            return out.write_all(to_text(&v).as_bytes());
        }
        for (k, v) in &self.fields {
            match v {
                Value::String(s) => writeln!(out, "{k}={s}")?,
                other => writeln!(out, "{k}={other}")?,
            }
        }
        for r in &self.reports {
            writeln!(
                out,
                "check={} bound={} measured={} std_err={} pass={}",
                r.name,
                json!(r.bound),
                json!(r.measured),
                json!(r.std_err),
                r.pass
            )?;
        }
        if !self.reports.is_empty() {
            writeln!(out, "pass={}", !self.failed)?;
        }
        Ok(())
    }

    fn report_files(&self) -> Vec<CheckReportFile> {
        self.reports.iter().map(CheckReportFile::from).collect()
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let cfg = McConfig::new(cli.samples, cli.seed);
    match execute(&cli, &cfg) {
        Ok(o) => {
            if let Err(e) = o.write(cli.json, out) {
                let _ = writeln!(err, "io error: {e}");
                return 2;
            }
            i32::from(o.failed)
        }
        Err(e) => {
            let _ = writeln!(err, "seed={}", cfg.seed);
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(cli: &Cli, cfg: &McConfig) -> Result<Output, CliError> {
    cfg.validate()?;
    let mut o = Output::new(cfg);
    let out = cli.out.as_deref();
    match &cli.cmd {
        Cmd::Width { input } => {
            let t = load::<VectorSetFile>(input)?.into_set()?;
            let w = estimate_width(&t, cfg);
            o.put("n_points", t.len());
            o.put("dim", t.dim());
            o.put("width", w.mean);
            o.put("std_err", w.std_err);
        }
        Cmd::Sparsify { input, eps } => {
            let t = load::<VectorSetFile>(input)?.into_set()?;
            let (sp, rep) = sparsify_with_report(&t, *eps, cfg)?;
            let check = check_sparsifier(&t, &sp, *eps, &cfg.derive(TAG_MEASURE))?;
            o.put("n_points", t.len());
            o.put("size", sp.len());
            o.put("width", rep.width.mean);
            o.put("width_std_err", rep.width.std_err);
            o.put("delta", rep.delta);
            o.put("terminal_stage", rep.terminal_stage);
            o.put("relative_bound", rep.relative_bound);
            o.put("shifts_out_of_range", rep.shifts_out_of_range);
            o.put("gap", check.measured);
            o.put("gap_std_err", check.std_err);
            write_out(out, &SparseSupFile::from_sparse(&sp))?;
        }
        Cmd::Center { input, eps, aux } => {
            let sp = load::<SparseSupFile>(input)?.into_sparse()?;
            let c = center(&sp, *eps, &aux.params())?;
            let gap = estimate_l1_gap(sp.as_sup_fn(), SupFn::plain(&c.set), c.set.dim(), &cfg.derive(TAG_MEASURE))?;
            o.put("a", c.a);
            o.put("capped", c.capped);
            o.put("mu_a", c.mu_a);
            o.put("size", c.set.len());
            o.put("dim", c.set.dim());
            o.put("gap", gap.mean);
            o.put("gap_std_err", gap.std_err);
            write_out(out, &VectorSetFile::from_set(&c.set))?;
        }
        Cmd::Norm { input, eps, aux, symmetrize } => {
            let t = load::<VectorSetFile>(input)?.into_set()?;
            let psi = sparsify_norm(&t, *eps, &aux.params(), *symmetrize, cfg)?;
            let t_sym = if t.is_symmetric() { t } else { t.symmetrize() };
            let fail = multiplicative_failure(&t_sym, &psi, *eps, &cfg.derive(TAG_MEASURE))?;
            o.put("support_size", psi.support_size);
            o.put("size", psi.directions.len());
            o.put("ambient_pad", psi.ambient_pad);
            if let Some(g) = psi.measured_gap {
                o.put("gap", g.mean);
                o.put("gap_std_err", g.std_err);
            }
            o.put("failure_prob", fail.mean);
            o.put("failure_std_err", fail.std_err);
            write_out(out, &VectorSetFile::from_set(&psi.directions))?;
        }
        Cmd::Polytope { input, eps, lift } => {
            let k = load::<PolytopeFile>(input)?.into_polytope()?;
            let (l, rep) = sparsify_polytope_with_report(&k, *eps, cfg, &lift.config())?;
            let d = estimate_gaussian_distance(&k, &l, &cfg.derive(TAG_MEASURE))?;
            o.put("route", route_name(&rep.route));
            o.put("r", rep.r);
            o.put("n_halfspaces", k.len());
            o.put("size", l.len());
            if let Some(q) = rep.q {
                o.put("q", q);
                if let Some(qt) = rep.q_theory {
                    o.put("q_theory", qt);
                }
                o.put("q_capped", rep.q_capped);
                o.put("aux_dim", rep.aux_dim);
            }
            o.put("distance", d.mean);
            o.put("distance_std_err", d.std_err);
            write_out(out, &PolytopeFile::from_polytope(&l))?;
        }
        Cmd::Check(a) => {
            check(a, cfg, &mut o)?;
            match out {
                Some(p) if o.single => store(p, &o.report_files()[0])?,
                Some(p) => store(p, &o.report_files())?,
                None => {}
            }
        }
        Cmd::Bench(a) => {
            bench(a, cfg, &mut o)?;
            if let Some(p) = out {
                store(p, &o.report_files())?;
            }
        }
    }
    Ok(o)
}

fn write_out<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    match path {
        Some(p) => store(p, value),
        None => Ok(()),
    }
}

fn route_name(r: &Route) -> String {
    match r {
        Route::Trivial => "trivial".into(),
        Route::Pruned => "pruned".into(),
        Route::VolumeShortcut(s) => format!("shortcut_{}", format!("{s:?}").to_lowercase()),
        Route::Uniform => "uniform".into(),
        Route::Lifted => "lifted".into(),
    }
}

fn need<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    p.as_deref().ok_or_else(|| CliError::Invalid(format!("--{flag} is required for this check")))
}

fn check(a: &CheckArgs, cfg: &McConfig, o: &mut Output) -> Result<(), CliError> {
    let kind = match (a.suite, a.kind) {
        (Some(Suite::All), _) => {
            let params = SuiteParams {
                c_sandwich: a.c_sandwich,
                center: a.aux.params(),
                lift: a.lift.config(),
                ..SuiteParams::default()
            };
            for r in run_suite(cfg, &params)? {
                o.report(r);
            }
            return Ok(());
        }
        (None, Some(k)) => k,
        (None, None) => return Err(CliError::Invalid("give --suite all or --kind".into())),
    };
    let input = need(&a.input, "input")?;
    let r = match kind {
        Kind::Distance => {
            let k = load::<PolytopeFile>(input)?.into_polytope()?;
            let l = load::<PolytopeFile>(need(&a.against, "against")?)?.into_polytope()?;
            check_distance(&k, &l, a.eps, cfg)?
        }
        _ => {
            let t = load::<VectorSetFile>(input)?.into_set()?;
            match kind {
                Kind::Tail => {
                    let rho = a.rho.unwrap_or(3.0 * t.max_norm());
                    check_tail(&t, rho, cfg)?
                }
                Kind::Anticoncentration => check_anticoncentration(&t, a.eps, cfg)?,
                Kind::Cck => check_cck(&t, a.theta, a.eps, cfg)?,
                Kind::Sandwich => check_gamma2_sandwich(&t, a.c_sandwich, cfg)?,
                Kind::Sparsifier => {
                    let sp = load::<SparseSupFile>(need(&a.against, "against")?)?.into_sparse()?;
                    check_sparsifier(&t, &sp, a.eps, cfg)?
                }
                Kind::Distance => unreachable!(),
            }
        }
    };
    o.single = true;
    o.report(r);
    Ok(())
}

fn bench(a: &BenchArgs, cfg: &McConfig, o: &mut Output) -> Result<(), CliError> {
    if !(a.subset_frac > 0.0 && a.subset_frac < 1.0) {
        return Err(CliError::Invalid(format!("subset-frac must lie in (0, 1), got {}", a.subset_frac)));
    }
    if a.eps.is_nan() || a.eps <= 0.0 {
        return Err(CliError::Invalid(format!("eps must be positive, got {}", a.eps)));
    }
    let m = ((a.n as f64).powf(1.0 - a.subset_frac).round() as usize).clamp(1, a.n);
    match a.case {
        Case::Coordinate => {
            let t = gen_coordinate_example::<f64>(a.n)?;
            let sub = SparseSup::identity(&t, 1.0).truncated(m)?;
            let gap = estimate_l1_gap(SupFn::plain(&t), sub.as_sup_fn(), a.n, cfg)?;
            o.put("n", a.n);
            o.put("m", m);
            o.put("oracle_gap", (a_n(a.n as u64) - a_n(m as u64)) / a_n(a.n as u64));
            o.put("asymptotic_gap", 1.0 - (1.0 - a.subset_frac).sqrt());
            o.report(CheckReport::new("coordinate_subset_gap", a.eps, gap.mean, gap.std_err, cfg));
        }
        Case::Polytope => {
            let k = gen_shifted_polytope::<f64>(a.n)?;
            let l = k.select(&(0..m).collect::<Vec<_>>())?;
            o.put("n", a.n);
            o.put("m", m);
            let mut r = check_distance(&k, &l, a.eps, cfg)?;
            r.name = "polytope_subset_distance".into();
            o.report(r);
        }
        Case::Disk => {
            const FINE: usize = 4096;
            if a.m < 3 {
                return Err(CliError::Invalid("m must be at least 3".into()));
            }
            let apothem = |m: usize| (std::f64::consts::PI / m as f64).cos();
            let phase = |m: usize| std::f64::consts::PI / m as f64;
            let disk = gen_regular_polygon::<f64>(FINE, apothem(FINE), phase(FINE))?;
            let p = gen_regular_polygon::<f64>(a.m, apothem(a.m), phase(a.m))?;
            o.put("m", a.m);
            o.put("surrogate_sides", FINE);
            let mut r = check_distance(&disk, &p, a.eps, cfg)?;
            r.name = "disk_polygon_distance".into();
            o.report(r);
        }
    }
    Ok(())
}
