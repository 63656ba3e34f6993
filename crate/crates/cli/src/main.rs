//! `omtrop` command line: run closures, the perturbed flow and avalanche
//! experiments on a scene file, render the resulting corner locus.
//!
//! Exit codes: 0 success/pass, 1 check failed or runtime error, 2 usage or
//! input error, 3 resource limit (step cap, lattice cap).

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod selftest;

use clap::{Parser, Subcommand};
use omtrop::dynamics::{add_monomial, wave_closure, FlowTrace};
use omtrop::experiments::{avalanche_experiment, fit_report, write_csv, XMinPolicy};
use omtrop::perturb::run_pipeline;
use omtrop::render::{render_obj, render_svg, SvgStyle};
use omtrop::scene::{Scene, SceneConfig};
use omtrop::series::TropicalSeries;
use omtrop::subdivision::{extract_geometry, is_mild};
use omtrop::{Error, Mode, Scalar};
use serde_json::json;

#[derive(Parser)]
#[command(name = "omtrop", version, about = "Tropical series and wave dynamics on convex domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Scene JSON file.
    scene: PathBuf,
    /// Output directory (overrides the scene's `output.dir`).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Wave closure of the scene's point set; writes the result series,
    /// trace, mildness report and pictures.
    Run {
        #[command(flatten)]
        common: Common,
        /// Also write one SVG per applied wave (planar domains only).
        #[arg(long)]
        frames: bool,
    },
    /// Perturbed-flow pipeline; exit code 0 iff every check passes.
    Perturb {
        #[command(flatten)]
        common: Common,
        /// Override the scene's epsilon (e.g. "1/4").
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Sequential avalanche experiment with power-law fits.
    Avalanche {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Fixed x_min for the fits; defaults to a KS scan.
        #[arg(long)]
        x_min: Option<f64>,
    },
    /// Render the closure's corner locus as SVG (2-D) or OBJ (2-D and 3-D).
    Render {
        #[command(flatten)]
        common: Common,
        /// Label linearity regions with their exponents.
        #[arg(long)]
        labels: bool,
    },
    /// Built-in consistency checks on small fixtures.
    Selftest,
}

enum Failure {
    Check(String),
    Err(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Err(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Err(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Err(e.into())
    }
}

type CliResult = std::result::Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    if e.is_resource() {
        3
    } else {
        match e {
            Error::Parse(_)
            | Error::Json(_)
            | Error::Invalid(_)
            | Error::ModeMismatch { .. }
            | Error::DimensionMismatch { .. }
            | Error::DegenerateDomain(_)
            | Error::NotCompact
            | Error::EmptyPointSet
            | Error::DuplicatePoint(..)
            | Error::NotInterior
            | Error::OutsideDomain
            | Error::EpsilonTooLarge(_) => 2,
            Error::Io(io) if io.kind() == std::io::ErrorKind::NotFound => 2,
            _ => 1,
        }
    }
}

fn load(common: &Common) -> Result<(Scene, PathBuf), Error> {
    let scene = SceneConfig::load(&common.scene)?.build()?;
    let out = common
        .out
        .clone()
        .or_else(|| scene.config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out)?;
    Ok((scene, out))
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn closure(scene: &Scene) -> Result<(TropicalSeries, TropicalSeries, FlowTrace), Error> {
    let init = scene.initial_series()?;
    let (f, trace) = wave_closure(&init, scene.points(), &scene.closure_options())?;
    Ok((init, f, trace))
}

/// SVG and OBJ of `f` when the domain is a planar or spatial polytope.
fn write_pictures(scene: &Scene, f: &TropicalSeries, out: &Path, labels: bool) -> Result<Vec<PathBuf>, Error> {
    let mut written = Vec::new();
    if scene.domain.mode() != Mode::Exact || !(2..=3).contains(&scene.domain.dim()) {
        return Ok(written);
    }
    let complex = extract_geometry(f)?;
    if complex.dim == 2 {
        let style = SvgStyle {
            labels,
            ..SvgStyle::default()
        };
        let p = out.join("locus.svg");
        fs::write(&p, render_svg(&complex, scene.points(), &style)?)?;
        written.push(p);
    }
    let p = out.join("locus.obj");
    fs::write(&p, render_obj(&complex))?;
    written.push(p);
    Ok(written)
}

fn cmd_run(common: &Common, frames: bool) -> CliResult {
    let (scene, out) = load(common)?;
    let (init, f, trace) = closure(&scene)?;
    // Ball domains have no finite dominating set; report raised entries.
    let (series, mild) = if scene.domain.mode() == Mode::Exact {
        let mild = if (2..=3).contains(&scene.domain.dim()) {
            Some(is_mild(&f)?)
        } else {
            None
        };
        (f.small_canonical_form()?.to_json(), mild)
    } else {
        (f.to_json(), None)
    };
    write_json(
        &out.join("result.json"),
        &json!({
            "series": series,
            "status": trace.status,
            "passes": trace.passes,
            "waves": trace.waves,
            "total_increment": trace.total_increment(f.mode()),
            "steps": trace.steps_json(),
            "mildness": mild,
        }),
    )?;
    let pictures = write_pictures(&scene, &f, &out, scene.config.output.labels)?;
    if frames && scene.domain.dim() == 2 && scene.domain.mode() == Mode::Exact {
        let dir = out.join("frames");
        fs::create_dir_all(&dir)?;
        let style = SvgStyle {
            labels: scene.config.output.labels,
            ..SvgStyle::default()
        };
        let mut g = init.clone();
        let one = Scalar::one(g.mode());
        for (k, s) in std::iter::once(None).chain(trace.steps.iter().map(Some)).enumerate() {
            if let Some(s) = s {
                g = add_monomial(&g, &s.q0, &s.c, &one)?;
            }
            let svg = render_svg(&extract_geometry(&g)?, scene.points(), &style)?;
            fs::write(dir.join(format!("frame_{k:04}.svg")), svg)?;
        }
    }
    println!(
        "closure {:?}: {} nonzero waves over {} passes",
        trace.status,
        trace.steps.len(),
        trace.passes
    );
    for p in pictures {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn cmd_perturb(common: &Common, epsilon: Option<&str>) -> CliResult {
    let (scene, out) = load(common)?;
    let mut cfg = match &scene.config.perturb {
        Some(s) => s.to_config(),
        None => match epsilon {
            Some(_) => omtrop::perturb::PerturbConfig::new(Scalar::one(Mode::Exact)),
            None => return Err(Error::Invalid("scene has no \"perturb\" section and no --epsilon given".into()).into()),
        },
    };
    if let Some(e) = epsilon {
        cfg.epsilon = Scalar::parse(e, scene.domain.mode())?;
    }
    let report = run_pipeline(&scene.domain, scene.points(), &cfg)?;
    write_json(&out.join("perturb.json"), &serde_json::to_value(&report)?)?;
    println!(
        "perturb epsilon={} shifted={} unshifted={} mild_steps={}/{} -> {}",
        report.epsilon,
        report.distance.shifted.to_decimal(6),
        report.distance.unshifted.to_decimal(6),
        report.steps.iter().filter(|s| s.mild).count(),
        report.steps.len(),
        if report.pass { "PASS" } else { "FAIL" }
    );
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Check(report.failure.unwrap_or_else(|| "perturbed flow check failed".into())))
    }
}

fn cmd_avalanche(common: &Common, samples: Option<usize>, seed: Option<u64>, x_min: Option<f64>) -> CliResult {
    let (scene, out) = load(common)?;
    let settings = scene.config.experiment.clone();
    let count = samples
        .or(settings.as_ref().map(|s| s.samples))
        .ok_or_else(|| Error::Invalid("no sample count: add \"experiment\" to the scene or pass --samples".into()))?;
    let seed = seed.or(settings.as_ref().map(|s| s.seed)).unwrap_or(0);
    let policy = match x_min {
        Some(x) => XMinPolicy::Fixed(x),
        None => settings.map_or(XMinPolicy::KsScan, |s| s.policy()),
    };
    let run = avalanche_experiment(&scene.domain, count, seed)?;
    let csv = out.join("avalanche.csv");
    let mut w = BufWriter::new(fs::File::create(&csv)?);
    write_csv(&run.samples, scene.domain.dim(), &mut w)?;
    drop(w);
    let fit = match fit_report(&run.samples, policy) {
        Ok(r) => json!({ "fit": r }),
        Err(e) => json!({ "fit": null, "error": e.to_string() }),
    };
    write_json(&out.join("fit.json"), &fit)?;
    println!("wrote {} samples to {}", run.samples.len(), csv.display());
    if let Some(a) = fit["fit"]["mle"]["alpha"].as_f64() {
        println!("mle alpha = {a:.4}");
    }
    Ok(())
}

fn cmd_render(common: &Common, labels: bool) -> CliResult {
    let (scene, out) = load(common)?;
    if scene.domain.mode() != Mode::Exact || !(2..=3).contains(&scene.domain.dim()) {
        return Err(Error::Unsupported("rendering needs a planar or spatial polytope domain".into()).into());
    }
    let (_, f, _) = closure(&scene)?;
    for p in write_pictures(&scene, &f, &out, labels || scene.config.output.labels)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn selftest() -> CliResult {
    if selftest::run() {
        Ok(())
    } else {
        Err(Failure::Check("selftest failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Run { common, frames } => cmd_run(common, *frames),
        Command::Perturb { common, epsilon } => cmd_perturb(common, epsilon.as_deref()),
        Command::Avalanche {
            common,
            samples,
            seed,
            x_min,
        } => cmd_avalanche(common, *samples, *seed, *x_min),
        Command::Render { common, labels } => cmd_render(common, *labels),
        Command::Selftest => selftest(),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("omtrop: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Err(e)) => {
            eprintln!("omtrop: error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
