use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fracext::lab::config::{parse_list, Config};
use fracext::lab::regularity::default_eps;
use fracext::lab::report::{inequality_csv, loglog_svg};
use fracext::lab::studies::DEFAULT_YS;
use fracext::lab::{cauchy_study, inequality_suite, regularity_probe, truncation_study, write_report, ReportFormat};
use fracext::synthesis::{radial_functional, FunctionalKind, RadialProfile};
use fracext::{Cutoff, FracParams};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Solution norms for each cutoff in the Y list and for the full half-space
    Solve,
    /// Truncation error against Y with a fitted decay rate
    TruncationStudy,
    /// Growth of weighted derivative moments of the mode profile
    RegularityProbe,
    /// Differences along the cutoffs (3/2)^n Y0
    CauchyStudy,
    /// Randomised trace, Poincare and Hardy inequality checks
    InequalitySuite,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Datum {
    Gaussian,
    Bump,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Both,
}

/// Flags shared by all subcommands; anything unset falls back to the config file.
#[derive(Parser, Default)]
struct Overrides {
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    beta: Option<String>,
    #[arg(long, global = true)]
    s: Option<String>,
    #[arg(long, global = true)]
    dim: Option<String>,
    #[arg(long = "y-list", global = true)]
    y_list: Option<String>,
    #[arg(long = "f", global = true, value_enum)]
    f: Option<Datum>,
    #[arg(long, global = true)]
    eps: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Parser)]
#[command(name = "decay-lab", version, about = "Truncation, regularity and inequality experiments")]
struct Root {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Clone)]
struct Settings {
    params: FracParams,
    datum: RadialProfile,
    ys: Vec<f64>,
    eps: f64,
    seed: u64,
    trials: usize,
    y0: f64,
    n_max: usize,
    ell_max: usize,
    out: PathBuf,
    format: ReportFormat,
}

fn merged(o: &Overrides) -> Result<Config> {
    let mut c = match &o.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let flags = [("beta", &o.beta), ("s", &o.s), ("dim", &o.dim), ("y_list", &o.y_list), ("eps", &o.eps), ("seed", &o.seed)];
    for (k, v) in flags {
        if let Some(v) = v {
            c.set(k, v.clone());
        }
    }
    if let Some(f) = o.f {
        c.set("f", if f == Datum::Gaussian { "gaussian" } else { "bump" });
    }
    if let Some(f) = o.format {
        c.set("format", ["csv", "svg", "both"][f as usize]);
    }
    if let Some(out) = &o.out {
        c.set("out", out.to_string_lossy());
    }
    Ok(c)
}

const KEYS: [&str; 14] =
    ["beta", "s", "dim", "y_list", "f", "width", "eps", "seed", "trials", "y0", "n_max", "ell_max", "out", "format"];

fn settings(c: &Config) -> Result<Settings> {
    if let Some(k) = c.keys().find(|k| !KEYS.contains(k)) {
        bail!("unknown config key {k:?}");
    }
    let params = FracParams::new(
        c.parsed("beta")?.unwrap_or(0.5),
        c.parsed("s")?.unwrap_or(1.0),
        c.parsed("dim")?.unwrap_or(3),
    )?;
    let width = c.parsed("width")?.unwrap_or(1.0);
    let datum = match c.get("f").unwrap_or("gaussian") {
        "gaussian" => RadialProfile::gaussian(params.dim(), width)?,
        "bump" => RadialProfile::bump(params.dim(), width)?,
        other => bail!("unknown datum {other:?} (gaussian, bump)"),
    };
    let ys = match c.get("y_list") {
        Some(v) => parse_list(v)?,
        None => DEFAULT_YS.to_vec(),
    };
    if ys.is_empty() || ys.iter().any(|y| !(*y > 0.0) || !y.is_finite()) {
        bail!("y_list must hold positive finite cutoffs");
    }
    let eps = c.parsed("eps")?.unwrap_or_else(|| default_eps(params.alpha()));
    Ok(Settings {
        params,
        datum,
        ys,
        eps,
        seed: c.parsed("seed")?.unwrap_or(42),
        trials: c.parsed("trials")?.unwrap_or(1000),
        y0: c.parsed("y0")?.unwrap_or(1.0),
        n_max: c.parsed("n_max")?.unwrap_or(6),
        ell_max: c.parsed("ell_max")?.unwrap_or(8),
        out: PathBuf::from(c.get("out").unwrap_or("out")),
        format: c.get("format").unwrap_or("both").parse()?,
    })
}

fn put(dir: &Path, name: &str, body: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn solve(st: &Settings) -> Result<bool> {
    let mut csv = String::from("Y,energy_sq,trace_sq,combined\n");
    let mut pts = Vec::new();
    let mut ok = true;
    let cutoffs = st.ys.iter().map(|&y| Cutoff::Finite(y)).chain([Cutoff::Infinite]);
    for cutoff in cutoffs {
        let n = radial_functional(&st.datum, &st.params, cutoff, FunctionalKind::SolutionNorms)?;
        ok &= n.energy_sq.is_finite() && n.trace_sq.is_finite();
        let label = match cutoff {
            Cutoff::Finite(y) => {
                pts.push((y, n.energy_sq));
                y.to_string()
            }
            Cutoff::Infinite => "inf".into(),
        };
        writeln!(csv, "{label},{:e},{:e},{:e}", n.energy_sq, n.trace_sq, n.combined)?;
        println!("Y={label} energy_sq={:.6e} trace_sq={:.6e}", n.energy_sq, n.trace_sq);
    }
    if st.format.csv() {
        put(&st.out, "solve.csv", &csv)?;
    }
    if st.format.svg() {
        put(&st.out, "solve.svg", &loglog_svg("solution energy", &pts, None))?;
    }
    Ok(ok)
}

fn truncation(st: &Settings) -> Result<bool> {
    let study = truncation_study(&st.params, &st.datum, &st.ys)?;
    write_report(&st.out, &study.records, Some((&study.fit, study.pass)), &[], st.format)?;
    println!(
        "rate {:.4} vs mu {} (residual {:.2e}) {}",
        -study.fit.slope,
        study.params.mu().mu,
        study.fit.residual,
        verdict(study.pass)
    );
    Ok(study.pass)
}

fn regularity(st: &Settings) -> Result<bool> {
    let probe = regularity_probe(&st.params, &st.datum, st.ell_max, st.eps)?;
    let mut csv = String::from("ell,r,growth\n");
    for row in &probe.rows {
        let g = row.growth.map(|g| g.to_string()).unwrap_or_default();
        writeln!(csv, "{},{:e},{g}", row.ell, row.r)?;
    }
    if st.format.csv() {
        put(&st.out, "regularity.csv", &csv)?;
    }
    if st.format.svg() {
        let pts: Vec<(f64, f64)> = probe.rows.iter().map(|r| (r.ell as f64, r.r)).collect();
        put(&st.out, "regularity.svg", &loglog_svg("derivative moments", &pts, None))?;
    }
    println!(
        "eps {} max growth {:.4} blow-up trend {} {}",
        probe.eps,
        probe.max_growth,
        probe.blow_up_trend,
        verdict(probe.pass)
    );
    Ok(probe.pass)
}

fn cauchy(st: &Settings) -> Result<bool> {
    let c = cauchy_study(&st.params, &st.datum, st.y0, st.n_max)?;
    let mut csv = String::from("n,Y,difference,ratio,bound\n");
    for (n, d) in c.differences.iter().enumerate() {
        let r = c.ratios.get(n).map(|r| r.to_string()).unwrap_or_default();
        writeln!(csv, "{n},{},{d:e},{r},{}", c.cutoffs[n], c.bound)?;
    }
    if st.format.csv() {
        put(&st.out, "cauchy.csv", &csv)?;
    }
    if st.format.svg() {
        let pts: Vec<(f64, f64)> = c.cutoffs.iter().copied().zip(c.differences.iter().copied()).collect();
        put(&st.out, "cauchy.svg", &loglog_svg("Cauchy differences", &pts, None))?;
    }
    let worst = c.ratios.iter().copied().fold(0.0, f64::max);
    println!("max ratio {worst:.4} vs bound {:.4} {}", c.bound, verdict(c.pass));
    Ok(c.pass)
}

fn inequalities(st: &Settings) -> Result<bool> {
    let reports = inequality_suite(&st.params, st.seed, st.trials)?;
    if st.format.csv() {
        put(&st.out, "inequalities.csv", &inequality_csv(&reports))?;
    }
    let mut ok = true;
    for r in &reports {
        ok &= !r.violated && r.max_ratio.is_finite();
        println!("{} max ratio {:.6} bound {:.6} {}", r.name, r.max_ratio, r.bound, verdict(!r.violated));
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let root = match Root::try_parse() {
        Ok(r) => r,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let st = match merged(&root.overrides).and_then(|c| settings(&c)) {
        Ok(st) => st,
        Err(e) => {
            eprintln!("decay-lab: {e:#}");
            return ExitCode::from(2);
        }
    };
    let run = match root.command {
        Command::Solve => solve(&st),
        Command::TruncationStudy => truncation(&st),
        Command::RegularityProbe => regularity(&st),
        Command::CauchyStudy => cauchy(&st),
        Command::InequalitySuite => inequalities(&st),
    };
    match run {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("decay-lab: {e:#}");
            ExitCode::from(1)
        }
    }
}
