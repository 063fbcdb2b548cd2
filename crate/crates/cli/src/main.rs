use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use transverse_core::closure::{admissible_k_ranges, closure_from_pq, ClosureSolution, KCase};
use transverse_core::curves::{companion_curve, curve_from_solution, legendrian_defect, linking_number, CurveSet, Linking};
use transverse_core::export::{export, export_companion, Format};
use transverse_core::framegen::WaveFrame;
use transverse_core::hierarchy::{conserved_charge, density, identity_sums, InvariantGrid};
use transverse_core::validate::{frame_suite, hierarchy_suite, FrameOptions, Report};
use transverse_core::Error;

const OUT_DIR_ENV: &str = "TRANSVERSE_OUT_DIR";

#[derive(Parser)]
#[command(name = "transverse", version, about = "Closed transverse curves in S³ from YO plane waves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Admissible k intervals for (p, q), or the closure data at a given k.
    Closure {
        #[command(flatten)]
        pq: PqArgs,
        #[arg(short, allow_negative_numbers = true)]
        k: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        json: bool,
    },
    /// Sample one closed curve and write it to disk.
    Curve {
        #[command(flatten)]
        wave: WaveArgs,
        #[arg(short, default_value_t = 1024)]
        n: usize,
        #[arg(short, long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Output file; defaults to a generated name in $TRANSVERSE_OUT_DIR or `.`.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the Legendrian companion and report the linking number.
        #[arg(long)]
        companion: bool,
    },
    /// Run the residual suites and exit nonzero on any failure.
    Validate {
        #[command(flatten)]
        wave: WaveArgs,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Samples per period for the curve checks.
        #[arg(short, default_value_t = 1024)]
        n: usize,
        /// Perturb the dispersion relation; the zero-curvature check must fail.
        #[arg(long)]
        break_dispersion: bool,
        #[arg(long)]
        json: bool,
    },
    /// Generate a family of curves over a k range and write a manifest.
    Sweep {
        #[command(flatten)]
        pq: PqArgs,
        #[arg(long, allow_negative_numbers = true, required_unless_present = "k_values")]
        k_from: Option<f64>,
        #[arg(long, allow_negative_numbers = true, required_unless_present = "k_values")]
        k_to: Option<f64>,
        #[arg(long, required_unless_present = "k_values")]
        step: Option<f64>,
        /// Explicit comma-separated k list instead of a range.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["k_from", "k_to", "step"])]
        k_values: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(short, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(short, default_value_t = 1024)]
        n: usize,
        #[arg(short, long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        companion: bool,
    },
    /// Conserved densities and hierarchy identities for the plane wave.
    Hierarchy {
        #[command(flatten)]
        wave: WaveArgs,
        #[arg(short, default_value_t = 256)]
        n: usize,
    },
}

#[derive(Args)]
struct PqArgs {
    #[arg(short)]
    p: u32,
    #[arg(short)]
    q: u32,
}

#[derive(Args)]
struct WaveArgs {
    #[command(flatten)]
    pq: PqArgs,
    #[arg(short, allow_negative_numbers = true)]
    k: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(short, default_value_t = 0.0, allow_negative_numbers = true)]
    t: f64,
}

impl WaveArgs {
    fn solve(&self) -> Result<ClosureSolution, Error> {
        closure_from_pq(self.pq.p, self.pq.q, self.k, self.lambda)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Obj,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Obj => Format::Obj,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Frames,
    Hierarchy,
    All,
}

enum Failure {
    Validation,
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Closure { pq, k, lambda, json } => closure_cmd(&pq, k, lambda, json),
        Command::Curve { wave, n, format, output, companion } => curve_cmd(&wave, n, format.into(), output, companion),
        Command::Validate { wave, suite, n, break_dispersion, json } => validate_cmd(&wave, suite, n, break_dispersion, json),
        Command::Sweep { pq, k_from, k_to, step, k_values, lambda, t, n, format, out_dir, companion } => {
            let ks = match k_values {
                Some(ks) => Ok(ks),
                None => k_range(k_from.unwrap(), k_to.unwrap(), step.unwrap()),
            };
            ks.map_err(Failure::from).and_then(|ks| {
                let plan = SweepPlan { lambda, t, n, format: format.into(), companion };
                sweep_cmd(&pq, &ks, &plan, out_dir)
            })
        }
        Command::Hierarchy { wave, n } => hierarchy_cmd(&wave, n),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) | Error::Json(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn print_json<T: Serialize>(v: &T) -> CmdResult {
    println!("{}", serde_json::to_string_pretty(v).map_err(Error::from)?);
    Ok(())
}

fn closure_cmd(pq: &PqArgs, k: Option<f64>, lambda: f64, json: bool) -> CmdResult {
    let Some(k) = k else {
        let r = admissible_k_ranges(pq.p, pq.q)?;
        if json {
            return print_json(&r);
        }
        println!("inner: {} < k < {}", r.inner.0, r.inner.1);
        println!("outer: k > {}", r.outer_lo);
        return Ok(());
    };
    let sol = closure_from_pq(pq.p, pq.q, k, lambda)?;
    if json {
        return print_json(&sol);
    }
    let case = match sol.case {
        KCase::Inner => "inner",
        KCase::Outer => "outer",
    };
    println!("p = {}, q = {}, k = {}, lambda = {}  ({case} interval)", sol.p, sol.q, sol.k, sol.lambda);
    println!("m = [{:.12}, {:.12}, {:.12}]", sol.m[0], sol.m[1], sol.m[2]);
    println!("n = [{:.12}, {:.12}, {:.12}]", sol.n[0], sol.n[1], sol.n[2]);
    println!("a = {:.15}", sol.a);
    println!("b = {:.15}", sol.b);
    println!("Lambda = {:.15}", sol.frequency);
    println!("epsilon = {}, omega = {:.15} {:+.15}i", sol.epsilon, sol.omega.re, sol.omega.im);
    for w in &sol.warnings {
        println!("warning: {w:?}");
    }
    Ok(())
}

fn default_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

fn curve_name(p: u32, q: u32, k: f64, lambda: f64, format: Format) -> String {
    format!("curve_p{p}_q{q}_k{k}_l{lambda}.{}", format.extension())
}

fn companion_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("curve");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_companion.{ext}"),
        None => format!("{stem}_companion"),
    };
    path.with_file_name(name)
}

fn build_curve(sol: &ClosureSolution, t: f64, n: usize, companion: bool) -> Result<CurveSet, Error> {
    if companion {
        companion_curve(sol, t, n)
    } else {
        curve_from_solution(sol, t, n)
    }
}

/// `max |Im⟨V_x, V⟩|` over the sample grid.
fn companion_defect(sol: &ClosureSolution, curve: &CurveSet) -> Result<f64, Error> {
    let wf = WaveFrame::from_solution(sol)?;
    let xs: Vec<f64> = curve.samples.iter().map(|s| s.x).collect();
    Ok(legendrian_defect(&wf, curve.meta.t, &xs).into_iter().fold(0.0, f64::max))
}

fn curve_cmd(wave: &WaveArgs, n: usize, format: Format, output: Option<PathBuf>, companion: bool) -> CmdResult {
    let sol = wave.solve()?;
    let curve = build_curve(&sol, wave.t, n, companion)?;
    let path = output.unwrap_or_else(|| default_dir().join(curve_name(sol.p, sol.q, sol.k, sol.lambda, format)));
    export(&curve, format, &path)?;
    println!("wrote {}", path.display());
    println!("a = {:.15}", sol.a);
    let b0 = sol.b + sol.lambda * sol.lambda;
    println!("b = {:.15}  (b at lambda = 0: {:.15})", sol.b, b0);
    println!("closure gap = {:.3e}", curve.closure_gap());
    println!("min |contact determinant| = {:.6e}", curve.min_contact_determinant());
    if companion {
        let cpath = companion_path(&path);
        export_companion(&curve, format, &cpath)?;
        println!("wrote {}", cpath.display());
        println!("companion closure gap = {:.3e}", curve.companion_gap().unwrap_or(f64::NAN));
        println!("companion Legendrian defect = {:.3e}", companion_defect(&sol, &curve)?);
        match linking_number(&curve, &curve.companion_set().expect("companion requested")) {
            Ok(l) => println!("linking number = {} (integral {:.6})", l.value, l.integral),
            Err(e) => println!("linking number unavailable: {e}"),
        }
    }
    Ok(())
}

fn validate_cmd(wave: &WaveArgs, suite: Suite, n: usize, break_dispersion: bool, json: bool) -> CmdResult {
    let sol = wave.solve()?;
    let mut report = Report::default();
    if suite != Suite::Hierarchy {
        let opts = FrameOptions { n, break_dispersion, ..FrameOptions::default() };
        report.checks.extend(frame_suite(&sol, &opts)?.checks);
    }
    if suite != Suite::Frames {
        report.checks.extend(hierarchy_suite(&sol)?.checks);
    }
    if json {
        print_json(&report)?;
    } else {
        for c in &report.checks {
            println!("{}", c.line());
        }
        let failed = report.failures();
        if failed.is_empty() {
            println!("all {} checks passed", report.checks.len());
        } else {
            let names: Vec<&str> = failed.iter().map(|c| c.name.as_str()).collect();
            println!("{} of {} checks failed: {}", failed.len(), report.checks.len(), names.join(", "));
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn k_range(from: f64, to: f64, step: f64) -> Result<Vec<f64>, Error> {
    if !(step > 0.0) || !from.is_finite() || !to.is_finite() {
        return Err(Error::Parameter(format!("step must be positive and bounds finite, got step {step}")));
    }
    if to < from {
        return Err(Error::Parameter(format!("empty k range: {from} > {to}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize;
    // drop the last-bit noise of from + i*step so -3.85 + 5*0.81 prints as 0.2
    Ok((0..=count).map(|i| ((from + i as f64 * step) * 1e12).round() / 1e12).collect())
}

struct SweepPlan {
    lambda: f64,
    t: f64,
    n: usize,
    format: Format,
    companion: bool,
}

#[derive(Serialize)]
struct SweepEntry {
    k: f64,
    a: f64,
    b: f64,
    frequency: f64,
    closure_gap: f64,
    min_abs_z: f64,
    file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    companion_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    linking: Option<Linking>,
}

#[derive(Serialize)]
struct Manifest {
    p: u32,
    q: u32,
    lambda: f64,
    t: f64,
    n: usize,
    format: Format,
    case: KCase,
    entries: Vec<SweepEntry>,
}

fn sweep_cmd(pq: &PqArgs, ks: &[f64], plan: &SweepPlan, out_dir: Option<PathBuf>) -> CmdResult {
    if ks.is_empty() {
        return Err(Error::Parameter("empty k list".into()).into());
    }
    let ranges = admissible_k_ranges(pq.p, pq.q)?;
    // validate the whole list before writing anything
    let cases: Vec<Option<KCase>> = ks.iter().map(|&k| ranges.classify(k)).collect();
    let straddles = cases.iter().any(Option::is_some) && (cases.iter().any(Option::is_none) || cases.windows(2).any(|w| w[0] != w[1]));
    if straddles {
        return Err(Error::Parameter(format!(
            "k values straddle the admissible intervals ({}, {}) and ({}, inf)",
            ranges.inner.0, ranges.inner.1, ranges.outer_lo
        ))
        .into());
    }
    let sols = ks
        .iter()
        .map(|&k| closure_from_pq(pq.p, pq.q, k, plan.lambda))
        .collect::<Result<Vec<_>, _>>()?;
    let case = sols[0].case;
    let dir = out_dir.unwrap_or_else(default_dir);
    std::fs::create_dir_all(&dir)?;
    let mut entries = Vec::with_capacity(sols.len());
    for (i, sol) in sols.iter().enumerate() {
        let curve = build_curve(sol, plan.t, plan.n, plan.companion)?;
        let name = format!("curve_{i:03}.{}", plan.format.extension());
        export(&curve, plan.format, &dir.join(&name))?;
        let (companion_file, linking) = if plan.companion {
            let cname = format!("curve_{i:03}_companion.{}", plan.format.extension());
            export_companion(&curve, plan.format, &dir.join(&cname))?;
            let link = linking_number(&curve, &curve.companion_set().expect("companion requested")).ok();
            (Some(cname), link)
        } else {
            (None, None)
        };
        println!("k = {:<10} a = {:.6}  gap = {:.2e}  -> {name}", sol.k, sol.a, curve.closure_gap());
        entries.push(SweepEntry {
            k: sol.k,
            a: sol.a,
            b: sol.b,
            frequency: sol.frequency,
            closure_gap: curve.closure_gap(),
            min_abs_z: sol.a,
            file: name,
            companion_file,
            linking,
        });
    }
    let manifest = Manifest {
        p: pq.p,
        q: pq.q,
        lambda: plan.lambda,
        t: plan.t,
        n: plan.n,
        format: plan.format,
        case,
        entries,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(Error::from)?;
    std::fs::write(&path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn hierarchy_cmd(wave: &WaveArgs, n: usize) -> CmdResult {
    let sol = wave.solve()?;
    let grid = InvariantGrid::from_plane_wave(&sol.plane_wave(), wave.t, n)?;
    println!("grid: {} points over period {:.12}", grid.len(), grid.period);
    for j in 1..=4 {
        let rho = density(j, &grid)?;
        let spread = rho.iter().fold(0.0f64, |m, v| m.max((v - rho[0]).abs()));
        println!("rho_{j} = {:+.12e}  (spread {spread:.1e})  H_{j} = {:+.12e}", rho[0], conserved_charge(j, &grid)?);
    }
    let sums = identity_sums(&grid, 4)?;
    println!("identity sums: even_2 = {:.3e}, odd_3 = {:.3e}, even_4 = {:.3e}", sums.even_2, sums.odd_3, sums.even_4);
    let report = hierarchy_suite(&sol)?;
    for c in &report.checks {
        println!("{}", c.line());
    }
    Ok(())
}
