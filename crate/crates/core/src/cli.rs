//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 argument or parameter validation,
//! 3 non-realizable moments, 4 Lanczos breakdown.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::combinatorics::{wachter_moment_exact, wachter_pyramid};
use crate::error::{Error, Result};
use crate::experiment::{run_figure2, run_figure3, run_figure4, Bandwidth, ExperimentConfig};
use crate::io::{self, InputData};
use crate::jacobi::{
    lanczos_discrete, moments_to_jacobi, to_bordered, toeplitz_distance, BorderedJacobi,
    DiscretizedMeasure, JacobiParams, MomentSequence,
};
use crate::laws::{Law, LawSpec};
use crate::recover::recover_density;

#[derive(Parser, Debug)]
#[command(name = "nearly-toeplitz", version, about = "Random matrix laws, Jacobi parameters and measure recovery")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Moments, cumulants, density, Cauchy transform and Jacobi parameters of a law.
    Law(LawArgs),
    /// Coefficient pyramid of a Wachter moment.
    Pyramid(PyramidArgs),
    /// Jacobi parameters of a measure or moment CSV.
    Jacobi(JacobiArgs),
    /// Recover a density from a measure or moment CSV.
    Recover(RecoverArgs),
    /// Run one of the numerical experiments.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LawName {
    Wigner,
    #[value(alias = "marchenko-pastur")]
    Mp,
    #[value(alias = "kesten-mckay")]
    Km,
    Wachter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct LawArgs {
    #[arg(long, value_enum)]
    pub law: LawName,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub v: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// First N moments m_0..m_{N-1}.
    #[arg(long, value_name = "N")]
    pub moments: Option<usize>,
    /// First N free cumulants k_1..k_N.
    #[arg(long, value_name = "N")]
    pub cumulants: Option<usize>,
    /// Density on G interior points of the support.
    #[arg(long, value_name = "G")]
    pub density: Option<usize>,
    /// Cauchy transform on G points just above the real axis.
    #[arg(long, value_name = "G")]
    pub cauchy: Option<usize>,
    /// Boundary and tail Jacobi parameters.
    #[arg(long)]
    pub jacobi: bool,
    /// Cosine-grid discretization with G points, as an `x,w` measure CSV.
    #[arg(long, value_name = "G")]
    pub measure: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; a directory when several CSV sections are requested.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PyramidArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct JacobiArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RecoverArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Boundary depth; entries from index k on are taken as the tail.
    #[arg(long)]
    pub k: Option<usize>,
    /// Recurrence steps to compute (default k + 1, else all the data allows).
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Density CSV; the JSON report goes next to it with a `.json` extension.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
    pub figure: u8,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Boundary depth (with `--figure 2` or `--figure 3`).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 400)]
    pub m: usize,
    #[arg(long, default_value_t = 1200)]
    pub n: usize,
    #[arg(long, default_value_t = 5.0)]
    pub mu: f64,
    #[arg(long, default_value = "auto")]
    pub bandwidth: String,
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    /// Number of moments (with `--figure 4`).
    #[arg(long, default_value_t = 20)]
    pub moments: usize,
    /// Directory for `figureN_<seed>.{json,csv}`.
    #[arg(long, default_value = ".")]
    pub output: PathBuf,
}

/// Map an error to the documented exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter { .. }
        | Error::InvalidArgument(_)
        | Error::InvalidMeasure(_)
        | Error::Domain(_)
        | Error::Pole { .. } => 2,
        Error::NotRealizable { .. } => 3,
        Error::Breakdown { .. } => 4,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Law(args) => cmd_law(&args),
        Command::Pyramid(args) => cmd_pyramid(&args),
        Command::Jacobi(args) => cmd_jacobi(&args),
        Command::Recover(args) => cmd_recover(&args),
        Command::Experiment(args) => cmd_experiment(&args),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_text(header: &[&str], rows: Vec<Vec<f64>>) -> Result<String> {
    let mut buf = Vec::new();
    io::write_rows(&mut buf, header, rows.into_iter())?;
    Ok(String::from_utf8(buf).expect("csv emits UTF-8"))
}

fn require(value: Option<f64>, flag: &str, law: &str) -> Result<f64> {
    value.ok_or_else(|| Error::InvalidArgument(format!("{law} needs --{flag}")))
}

pub fn law_spec(args: &LawArgs) -> Result<LawSpec> {
    let law = match args.law {
        LawName::Wigner => Law::WignerSemicircle,
        LawName::Mp => Law::MarchenkoPastur {
            lambda: require(args.lambda, "lambda", "mp")?,
        },
        LawName::Km => Law::KestenMcKay {
            v: require(args.v, "v", "km")?,
        },
        LawName::Wachter => Law::Wachter {
            a: require(args.a, "a", "wachter")?,
            b: require(args.b, "b", "wachter")?,
        },
    };
    LawSpec::new(law)
}

struct Section {
    name: &'static str,
    header: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

fn law_sections(spec: &LawSpec, args: &LawArgs) -> Result<Vec<Section>> {
    let support = spec.support();
    let mut sections = Vec::new();
    let nothing_requested = args.moments.is_none()
        && args.cumulants.is_none()
        && args.density.is_none()
        && args.cauchy.is_none()
        && args.measure.is_none()
        && !args.jacobi;
    let (moments, cumulants, density, cauchy, jacobi) = if nothing_requested {
        (Some(8), Some(8), Some(64), Some(16), true)
    } else {
        (args.moments, args.cumulants, args.density, args.cauchy, args.jacobi)
    };
    if let Some(n) = moments {
        sections.push(Section {
            name: "moments",
            header: vec!["moment"],
            rows: (0..n as u32).map(|i| vec![spec.moment(i)]).collect(),
        });
    }
    if let Some(n) = cumulants {
        sections.push(Section {
            name: "cumulants",
            header: vec!["n", "cumulant"],
            rows: (1..=n as u32).map(|i| vec![i as f64, spec.free_cumulant(i)]).collect(),
        });
    }
    if let Some(g) = density {
        if g == 0 {
            return Err(Error::InvalidArgument("--density needs at least one point".into()));
        }
        let h = support.width() / g as f64;
        sections.push(Section {
            name: "density",
            header: vec!["x", "density"],
            rows: (0..g)
                .map(|i| {
                    let x = support.lo + (i as f64 + 0.5) * h;
                    vec![x, spec.density(x)]
                })
                .collect(),
        });
    }
    if let Some(g) = cauchy {
        if g < 2 {
            return Err(Error::InvalidArgument("--cauchy needs at least two points".into()));
        }
        // a window twice the support width, a hundredth of it above the axis
        let w = support.width();
        let (lo, eta) = (support.lo - 0.5 * w, 0.01 * w);
        let step = 2.0 * w / (g - 1) as f64;
        let mut rows = Vec::with_capacity(g);
        for i in 0..g {
            let z = Complex64::new(lo + i as f64 * step, eta);
            let value = spec.cauchy_transform(z)?;
            rows.push(vec![z.re, z.im, value.re, value.im]);
        }
        sections.push(Section {
            name: "cauchy",
            header: vec!["re_z", "im_z", "re_g", "im_g"],
            rows,
        });
    }
    if jacobi {
        let j = spec.jacobi_params();
        sections.push(Section {
            name: "jacobi",
            header: vec!["n", "alpha", "beta"],
            rows: (0..=j.k()).map(|i| vec![i as f64, j.alpha(i), j.beta(i)]).collect(),
        });
    }
    if let Some(g) = args.measure {
        let mu = spec.discretize(g)?;
        sections.push(Section {
            name: "measure",
            header: vec!["x", "w"],
            rows: mu.points().iter().zip(mu.weights()).map(|(&x, &w)| vec![x, w]).collect(),
        });
    }
    Ok(sections)
}

fn cmd_law(args: &LawArgs) -> Result<()> {
    let spec = law_spec(args)?;
    let sections = law_sections(&spec, args)?;
    let output = args.output.as_deref();
    match args.format {
        Format::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("law".into(), serde_json::to_value(spec)?);
            doc.insert(
                "support".into(),
                json!({ "lo": spec.support().lo, "hi": spec.support().hi }),
            );
            for s in &sections {
                let rows: Vec<serde_json::Value> = s
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: serde_json::Map<String, serde_json::Value> = s
                            .header
                            .iter()
                            .zip(row)
                            .map(|(k, v)| (k.to_string(), json_number(k, *v)))
                            .collect();
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                doc.insert(s.name.into(), serde_json::Value::Array(rows));
            }
            emit(output, &io::to_json_string(&doc)?)
        }
        Format::Csv if sections.len() == 1 => {
            let s = &sections[0];
            let text = csv_text(&s.header, s.rows.clone())?;
            emit(output, &text)
        }
        Format::Csv => {
            let dir = output.ok_or_else(|| {
                Error::InvalidArgument(
                    "several CSV sections need --output <directory> (or use --format json)".into(),
                )
            })?;
            std::fs::create_dir_all(dir)?;
            for s in &sections {
                let text = csv_text(&s.header, s.rows.clone())?;
                std::fs::write(dir.join(format!("{}.csv", s.name)), text)?;
            }
            Ok(())
        }
    }
}

/// Index columns named `n` hold integers.
fn json_number(key: &str, v: f64) -> serde_json::Value {
    if key == "n" {
        json!(v as u64)
    } else {
        json!(v)
    }
}

fn cmd_pyramid(args: &PyramidArgs) -> Result<()> {
    if args.k == 0 {
        return Err(Error::InvalidArgument("--k must be at least 1".into()));
    }
    let triangle = wachter_pyramid(args.k)?;
    let exact = wachter_moment_exact(args.k)?;
    let doc = json!({
        "moment_index": args.k,
        "rows": triangle.to_strings(),
        "numerator": exact.numerator.to_string(),
        "denominator": format!("(a+b)^{}", exact.denominator_power),
    });
    emit(args.output.as_deref(), &io::to_json_string(&doc)?)
}

enum Source {
    Measure(DiscretizedMeasure),
    Moments(MomentSequence),
}

fn read_source(path: &Path) -> Result<Source> {
    Ok(match io::read_input_csv(path)? {
        InputData::Measure(x, w) => Source::Measure(DiscretizedMeasure::new(x, w)?),
        InputData::Moments(m) => Source::Moments(MomentSequence::new(m)?),
    })
}

fn jacobi_of(source: &Source, steps: usize) -> Result<JacobiParams> {
    match source {
        Source::Measure(mu) => lanczos_discrete(mu, steps),
        Source::Moments(m) => moments_to_jacobi(m, steps),
    }
}

fn cmd_jacobi(args: &JacobiArgs) -> Result<()> {
    let params = jacobi_of(&read_source(&args.input)?, args.steps)?;
    match args.format {
        Format::Csv => match &args.output {
            Some(path) => io::write_jacobi_csv(path, &params),
            None => {
                let rows = (0..params.len())
                    .map(|i| vec![i as f64, params.alphas[i], params.betas[i]])
                    .collect();
                emit(None, &csv_text(&["n", "alpha", "beta"], rows)?)
            }
        },
        Format::Json => {
            let doc = json!({
                "alphas": params.alphas,
                "betas": params.betas,
                "toeplitz_distance": toeplitz_distance(&params.alphas, &params.betas),
            });
            emit(args.output.as_deref(), &io::to_json_string(&doc)?)
        }
    }
}

#[derive(Serialize)]
struct RecoverReport<'a> {
    input: String,
    steps: usize,
    params: &'a JacobiParams,
    bordered: &'a BorderedJacobi,
    toeplitz_distance: f64,
    support: crate::laws::SupportInterval,
    grid_size: usize,
    continuous_mass: f64,
    clamped: usize,
    min_raw_value: f64,
    suspected_atoms: &'a [crate::recover::SuspectedAtom],
}

fn cmd_recover(args: &RecoverArgs) -> Result<()> {
    let source = read_source(&args.input)?;
    let available = match &source {
        Source::Measure(mu) => mu.len() - 1,
        Source::Moments(m) => m.max_steps(),
    };
    let steps = args
        .steps
        .or(args.k.map(|k| k + 1))
        .unwrap_or(available);
    if let Some(k) = args.k {
        if steps < k + 1 {
            return Err(Error::InvalidArgument(format!(
                "--k {k} needs at least {} steps, got {steps}",
                k + 1
            )));
        }
    }
    let params = jacobi_of(&source, steps)?;
    let bordered = match args.k {
        Some(k) => BorderedJacobi::new(
            params.alphas[..k].to_vec(),
            params.betas[..k].to_vec(),
            params.alphas[k],
            params.betas[k],
        )?,
        None => to_bordered(&params.alphas, &params.betas)?,
    };
    let density = recover_density(&bordered, args.grid)?;
    io::write_density_csv(&args.output, &density)?;
    let report = RecoverReport {
        input: args.input.display().to_string(),
        steps,
        params: &params,
        bordered: &bordered,
        toeplitz_distance: toeplitz_distance(&params.alphas, &params.betas),
        support: density.support,
        grid_size: args.grid,
        continuous_mass: density.continuous_mass(),
        clamped: density.clamped,
        min_raw_value: density.min_raw_value,
        suspected_atoms: &density.suspected_atoms,
    };
    io::write_json(&args.output.with_extension("json"), &report)
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<()> {
    let report = match args.figure {
        2 => run_figure2(args.seed, args.k.unwrap_or(3))?,
        _ => {
            let cfg = ExperimentConfig {
                seed: args.seed,
                m: args.m,
                n: args.n,
                mu_shift: args.mu,
                bandwidth: args.bandwidth.parse::<Bandwidth>()?,
                lanczos_steps: args.k.unwrap_or(5),
                grid_size: args.grid,
                moment_count: args.moments,
            };
            if args.figure == 3 {
                run_figure3(&cfg)?
            } else {
                run_figure4(&cfg)?
            }
        }
    };
    let (json, csv) = report.write(&args.output)?;
    println!("{}", json.display());
    println!("{}", csv.display());
    Ok(())
}
