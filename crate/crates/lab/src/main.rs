use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use coble_core::cases;
use coble_core::chow::{self, RingPresentation};
use coble_core::heisenberg::{semi_invariant_forms, CharacterLabel};
use serde_json::json;

use coble_lab::config::RunConfig;
use coble_lab::formats;
use coble_lab::pipeline::{Artifacts, Pipeline, Stage};
use coble_lab::report::{exit_code, Report, CONFIG_ERROR_EXIT};

#[derive(Parser)]
#[command(name = "coble-lab", version, about = "Numerical and symbolic checks for the Coble cubic and its dual")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions of semi-invariant forms per degree and character, as JSON.
    Invariants {
        #[arg(long, default_value_t = 3)]
        max_degree: u32,
        /// Restrict to one character, written a0a1b0b1 (e.g. 0000).
        #[arg(long)]
        character: Option<String>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Fit the quadrics through J and the invariant cubic singular along J.
    FitCubic {
        #[command(flatten)]
        run: RunArgs,
        /// Directory receiving `coble_cubic.poly` and `quadrics.poly`.
        #[arg(long)]
        poly_dir: Option<PathBuf>,
    },
    /// Cubic fit, dual map, dual sextic and the P^4/P^3 checks.
    VerifyDuality {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Intersection numbers in a presented Chow ring.
    Chow {
        #[command(subcommand)]
        command: ChowCommand,
    },
    /// The arithmetic case analysis, as JSON.
    CaseAnalysis {
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Every check, in pipeline order.
    RunAll {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Subcommand)]
enum ChowCommand {
    /// Integrate an expression; prints a rational.
    Eval {
        /// Built-in ring name (`su2xJ`, `su2xJ.ring`) or path to a ring file.
        #[arg(long, default_value = "su2xJ")]
        ring: String,
        #[arg(long)]
        expr: String,
    },
    /// deg Sigma with its binomial breakdown, as JSON.
    DegSigma {
        #[arg(long, default_value = "su2xJ")]
        ring: String,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative singular-value threshold for rank decisions.
    #[arg(long)]
    tol: Option<f64>,
    /// Number of held-out samples per check.
    #[arg(long)]
    samples: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Directory receiving CSV dumps of the sampled points.
    #[arg(long)]
    csv_dir: Option<PathBuf>,
    /// Record per-stage wall-clock time in the report.
    #[arg(long)]
    timings: bool,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(tol) = self.tol {
            config.tol_rank = tol;
        }
        if let Some(n) = self.samples {
            config.samples.held_out = n;
        }
        config.validate()?;
        Ok(config)
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => formats::write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_ring(name: &str) -> Result<RingPresentation> {
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(chow::parse_presentation(&text)?);
    }
    match name {
        "su2xJ" | "su2xJ.ring" => Ok(chow::su2xj()),
        _ => bail!("unknown ring {name:?}: not a file and not a built-in name"),
    }
}

fn parse_character(s: &str) -> Result<CharacterLabel> {
    let digits: Vec<u8> = s
        .chars()
        .map(|c| c.to_digit(3).map(|d| d as u8))
        .collect::<Option<_>>()
        .filter(|d: &Vec<u8>| d.len() == 4)
        .with_context(|| format!("character must be four digits in 0..3, got {s:?}"))?;
    Ok(CharacterLabel::new([digits[0], digits[1]], [digits[2], digits[3]]))
}

fn invariants_table(max_degree: u32, character: Option<CharacterLabel>) -> serde_json::Value {
    let characters = character.map_or_else(CharacterLabel::all, |c| vec![c]);
    let degrees: Vec<_> = (1..=max_degree)
        .map(|d| {
            let entries: Vec<_> = characters
                .iter()
                .map(|chi| {
                    let space = semi_invariant_forms(d, chi);
                    json!({
                        "character": chi.to_string(),
                        "dimension": space.dimension(),
                        "obstruction": space.obstruction.map(|o| o.to_string()),
                    })
                })
                .collect();
            json!({ "degree": d, "characters": entries })
        })
        .collect();
    json!({ "degrees": degrees })
}

fn case_analysis_json() -> serde_json::Value {
    let nodes = cases::plane_curve_nodes(6, 2).ok();
    let conic = cases::conic_fiber_incidence();
    let adjunction = cases::adjunction_bound(&cases::SurfaceClass::uniform(6, 2)).ok();
    let decompositions: Vec<_> = cases::enumerate_decompositions(36, 6, 2)
        .into_iter()
        .map(|d| json!({ "parts": d.parts, "gcd": d.gcd }))
        .collect();
    json!({
        "plane_curve_nodes": nodes,
        "conic_fiber": {
            "curve_genus": conic.curve_genus,
            "curve_degree": conic.curve_degree,
            "xa_degree": conic.xa_degree,
            "conic_degree": conic.conic_degree,
            "incidence": conic.incidence,
        },
        "adjunction": adjunction.map(|a| json!({
            "twice_genus_minus_two": a.twice_genus_minus_two,
            "genus": a.genus,
        })),
        "decompositions": decompositions,
    })
}

fn dump_csv(dir: &Path, artifacts: &Artifacts) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    if !artifacts.jacobian_samples.is_empty() {
        let file = std::fs::File::create(dir.join("jacobian.csv"))?;
        formats::write_point_csv(file, &artifacts.jacobian_samples)?;
    }
    for (i, samples) in artifacts.xa_samples.iter().enumerate() {
        let file = std::fs::File::create(dir.join(format!("xa_{i}.csv")))?;
        formats::write_point_csv(file, samples)?;
    }
    Ok(())
}

/// Runs the given stages; `Err` carries the exit code for a configuration error.
fn run_stages(run: &RunArgs, stages: &[Stage]) -> Result<(Report, Artifacts), ExitCode> {
    let config = run.config().map_err(|e| {
        eprintln!("configuration error: {e:#}");
        ExitCode::from(CONFIG_ERROR_EXIT)
    })?;
    Ok(Pipeline::new(&config, run.timings).run(stages))
}

fn finish(run: &RunArgs, report: &Report, artifacts: &Artifacts) -> Result<ExitCode> {
    if let Some(dir) = &run.csv_dir {
        dump_csv(dir, artifacts)?;
    }
    emit(&report.to_json(), run.json.as_deref())?;
    let failures = report.failures();
    if failures > 0 {
        for c in report.claims.iter().filter(|c| !c.passed()) {
            eprintln!("FAIL {}", c.id);
        }
    }
    Ok(ExitCode::from(exit_code(failures)))
}

fn run_report(run: &RunArgs, stages: &[Stage]) -> Result<ExitCode> {
    match run_stages(run, stages) {
        Ok((report, artifacts)) => finish(run, &report, &artifacts),
        Err(code) => Ok(code),
    }
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Invariants { max_degree, character, json } => {
            let character = character.as_deref().map(parse_character).transpose()?;
            let table = invariants_table(max_degree, character);
            emit(&format!("{:#}\n", table), json.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::FitCubic { run, poly_dir } => match run_stages(&run, &[Stage::Quadrics, Stage::Cubic]) {
            Ok((report, artifacts)) => {
                if let Some(dir) = &poly_dir {
                    std::fs::create_dir_all(dir)?;
                    if let Some(cubic) = &artifacts.cubic {
                        formats::write_file(&dir.join("coble_cubic.poly"), &formats::write_polyring(&cubic.form))?;
                    }
                    if let Some(q) = &artifacts.quadrics {
                        formats::write_file(&dir.join("quadrics.poly"), &formats::write_polyring_list(&q.basis))?;
                    }
                }
                finish(&run, &report, &artifacts)
            }
            Err(code) => Ok(code),
        },
        Command::VerifyDuality { run } => run_report(&run, &[Stage::Quadrics, Stage::Cubic, Stage::Dual, Stage::Spans]),
        Command::RunAll { run } => run_report(&run, &Stage::ALL),
        Command::Chow { command } => {
            match command {
                ChowCommand::Eval { ring, expr } => {
                    let ring = load_ring(&ring)?;
                    println!("{}", ring.eval(&expr)?);
                }
                ChowCommand::DegSigma { ring } => {
                    let ring = load_ring(&ring)?;
                    let d = chow::deg_sigma(&ring)?;
                    let terms: Vec<_> = d
                        .breakdown
                        .iter()
                        .map(|t| {
                            json!({
                                "k": t.k,
                                "binomial": t.binomial.to_string(),
                                "integral": t.integral.to_string(),
                                "contribution": t.contribution.to_string(),
                            })
                        })
                        .collect();
                    let out = json!({
                        "total": d.total.to_string(),
                        "breakdown": terms,
                        "higher_terms_vanish": d.higher_terms_vanish,
                    });
                    println!("{out:#}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CaseAnalysis { json } => {
            emit(&format!("{:#}\n", case_analysis_json()), json.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
