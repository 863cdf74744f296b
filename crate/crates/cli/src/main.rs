use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vortexlink::config::Config;
use vortexlink::links::Scene;
use vortexlink::milnor::LinkDiagram;
use vortexlink::pipeline::{self, Failure, OracleInput};
use vortexlink::report::Report;
use vortexlink::Error;

/// Linking invariants of vortex tube links and co-momentum checks on the periodic 3-torus.
#[derive(Parser)]
#[command(name = "vortexlink", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for randomized suites; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report path; stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Record wall-clock timings per stage (reports are then no longer reproducible byte for byte).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Linking matrix by quadrature and crossings, writhe and framing, tube helicity.
    Lk {
        #[arg(long, value_name = "PATH")]
        scene: String,
    },
    /// Co-momentum identities on seeded random fields and ABC fixtures.
    Comomentum {
        /// Add a gradient to the first random field; the run must refuse it.
        #[arg(long)]
        inject_divergence: bool,
    },
    /// Massey hierarchy: period gate, primitives, triple linking against the oracle.
    Massey {
        #[arg(long, value_name = "PATH")]
        scene: String,
        /// Write the primitives and obstruction forms next to the report.
        #[arg(long)]
        export_fields: bool,
    },
    /// Milnor invariant of a scene or a diagram file.
    Oracle {
        #[arg(long, value_name = "PATH", conflicts_with = "diagram", required_unless_present = "diagram")]
        scene: Option<String>,
        /// Diagram JSON (`"schema": "vdiag-1"`).
        #[arg(long, value_name = "PATH")]
        diagram: Option<PathBuf>,
        /// Multi-index such as `123` or `1,2,3`.
        #[arg(long, default_value = "12")]
        index: String,
    },
    /// Tube forms, disc duals and vorticity of a scene as VLF1 and VTK files.
    Export {
        #[arg(long, value_name = "PATH")]
        scene: String,
        /// Directory for the field files.
        #[arg(long, value_name = "DIR")]
        dir: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn input_error(path: &Path, e: Error) -> String {
    format!("{}: {e}", path.display())
}

/// A scene file, or a built-in scene name when no such file exists.
fn load_scene(arg: &str) -> Result<Scene, String> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(s) = Scene::builtin(arg) {
            return Ok(s);
        }
    }
    Scene::from_json(&read(path)?).map_err(|e| input_error(path, e))
}

fn load_config(path: Option<&Path>) -> Result<Config, String> {
    match path {
        None => Ok(Config::default()),
        Some(p) => Config::from_json(&read(p)?).map_err(|e| input_error(p, e)),
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("VORTEXLINK_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring VORTEXLINK_THREADS={v:?}"),
        }
    }
}

fn write_report(report: &Report, out: Option<&Path>) -> Result<(), String> {
    let text = report.to_json();
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, String> {
    let cfg = load_config(cli.common.config.as_deref())?;
    let out = cli.common.out.clone().or_else(|| cfg.output.report.clone());
    let seed = cli.common.seed.unwrap_or(cfg.seed);
    let name = match &cli.command {
        Command::Lk { .. } => "lk",
        Command::Comomentum { .. } => "comomentum",
        Command::Massey { .. } => "massey",
        Command::Oracle { .. } => "oracle",
        Command::Export { .. } => "export",
    };
    let mut report = Report::new(name, cli.common.timings);
    let result: Result<(), Failure> = match &cli.command {
        Command::Lk { scene } => {
            let s = cfg.apply(&load_scene(scene)?);
            pipeline::run_lk(&s, &mut report)
        }
        Command::Comomentum { inject_divergence } => {
            pipeline::run_comomentum(&cfg, seed, *inject_divergence, &mut report)
        }
        Command::Massey { scene, export_fields } => {
            let s = cfg.apply(&load_scene(scene)?);
            let dir = (*export_fields || cfg.output.export_fields).then(|| pipeline::default_fields_dir(out.as_deref()));
            pipeline::run_massey(&s, &cfg, dir.as_deref(), &mut report)
        }
        Command::Oracle { scene, diagram, index } => {
            let idx = pipeline::parse_index(index).map_err(|e| e.to_string())?;
            let input = match (scene, diagram) {
                (Some(s), _) => OracleInput::Scene(cfg.apply(&load_scene(s)?)),
                (None, Some(p)) => OracleInput::Diagram(LinkDiagram::from_json(&read(p)?).map_err(|e| input_error(p, e))?),
                (None, None) => unreachable!("clap requires one input"),
            };
            let r = pipeline::run_oracle(&input, &idx, &mut report);
            if let Some(o) = report.get("oracle") {
                if let Some(v) = o.get("value").and_then(|v| v.as_str()) {
                    eprintln!("mu({}) = {v}", pipeline_index(&idx));
                    for t in o["trail"].as_array().into_iter().flatten() {
                        eprintln!("  mu({}) = {} (vanishes)", t["index"].as_str().unwrap_or(""), t["value"].as_str().unwrap_or(""));
                    }
                }
            }
            r
        }
        Command::Export { scene, dir } => {
            let s = cfg.apply(&load_scene(scene)?);
            pipeline::run_export(&s, dir, &mut report)
        }
    };
    let code = match &result {
        Ok(()) => 0,
        Err(f) => f.error.exit_code(),
    };
    report.set_status(code, result.as_ref().err().map(|f| f.to_string()));
    write_report(&report, out.as_deref())?;
    if let Err(f) = result {
        eprintln!("error: {f}");
    }
    Ok(code)
}

fn pipeline_index(idx: &[usize]) -> String {
    vortexlink::milnor::format_index(idx)
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
