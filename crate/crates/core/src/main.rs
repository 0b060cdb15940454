use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::Value;

use ttseifert::format::{self, DiagramFile, FormatError, ScalarOut};
use ttseifert::homology::{valid_twist_space, verify, BoundaryCellStructure};
use ttseifert::scalar::{BasisElement, ScalarContext, DEFAULT_PRECISION};
use ttseifert::seifert::{self, SeifertConfig};
use ttseifert::svg;
use ttseifert::weights::{invariant_space, WeightVector};

#[derive(Parser, Debug)]
#[command(
    name = "ttseifert",
    version,
    about = "Seifert laminations for weighted train track diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Weight vector: a file, or inline (`1,2,3`, `s_x=1,s_y=sqrt2`, or JSON).
    #[arg(long, global = true)]
    weights: Option<String>,
    /// Twist vector for `verify`, in the same forms as `--weights`.
    #[arg(long, global = true)]
    twists: Option<String>,
    /// Decimal digits used when comparing irrational scalars.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION, value_parser = clap::value_parser!(u32).range(16..))]
    precision: u32,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Output file, or output directory with `--batch`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Treat the input as a directory and process every diagram in it.
    #[arg(long, global = true)]
    batch: bool,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Check a diagram file against the structural invariants.
    Validate { input: PathBuf },
    /// Invariant weight cone of the track.
    Cone { input: PathBuf },
    /// Run the Seifert algorithm for the given weights.
    Seifert { input: PathBuf },
    /// Affine space of twist vectors bounding Seifert laminations.
    Twistspace { input: PathBuf },
    /// Check a twist vector against the homology criterion.
    Verify { input: PathBuf },
    /// Draw the diagram; with `--overlay`, also the circle families.
    Svg {
        input: PathBuf,
        #[arg(long)]
        overlay: bool,
    },
}

impl Command {
    fn input(&self) -> &Path {
        match self {
            Command::Validate { input }
            | Command::Cone { input }
            | Command::Seifert { input }
            | Command::Twistspace { input }
            | Command::Verify { input }
            | Command::Svg { input, .. } => input,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug)]
enum CliError {
    /// Bad input data or a failed computation.
    Domain(String),
    /// I/O failure or bad usage.
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Domain(m) | CliError::Io(m) => m,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// A vector argument with the basis it declares, if any.
fn vector_arg(arg: &str, key: &str) -> Result<(Value, Option<Vec<BasisElement>>), CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let f = format::parse_vector_file(&read(path)?, key).map_err(domain)?;
        Ok((f.value, f.basis))
    } else {
        Ok((format::parse_inline_vector(arg).map_err(domain)?, None))
    }
}

struct Job<'a> {
    cli: &'a Cli,
    input: PathBuf,
    /// Weights for this input; in batch mode a sidecar may supply them.
    weights: Option<String>,
}

impl Job<'_> {
    fn diagram(&self) -> Result<DiagramFile, CliError> {
        format::parse_diagram(&read(&self.input)?).map_err(|e| match e {
            FormatError::Diagram(d) => CliError::Domain(d.to_string()),
            e => domain(e),
        })
    }

    fn weights(&self, f: &DiagramFile) -> Result<(WeightVector, ScalarContext), CliError> {
        let arg = self
            .weights
            .as_deref()
            .ok_or_else(|| CliError::Io("this command needs --weights".into()))?;
        let (value, basis) = vector_arg(arg, "weights")?;
        let basis = basis.or_else(|| f.basis.clone());
        let ctx = format::context(basis.as_deref(), self.cli.precision).map_err(domain)?;
        let w = format::weights_from(&value, &f.diagram, &ctx).map_err(domain)?;
        Ok((w, ctx))
    }

    fn run(&self) -> Result<String, CliError> {
        let f = self.diagram()?;
        let d = &f.diagram;
        let text = self.cli.format == OutputFormat::Text;
        match &self.cli.command {
            Command::Validate { .. } => Ok(if text {
                format!(
                    "valid: {} segments, {} switches, {} markers, {} crossings\n",
                    d.segments.len(),
                    d.switches.len(),
                    d.markers.len(),
                    d.crossings.len()
                )
            } else {
                format::to_json(&serde_json::json!({ "valid": true }))
            }),
            Command::Cone { .. } => {
                let doc = format::cone_doc(d, &invariant_space(d));
                Ok(if text {
                    cone_text(&doc)
                } else {
                    format::to_json(&doc)
                })
            }
            Command::Seifert { .. } => {
                let (w, ctx) = self.weights(&f)?;
                let r = seifert::run(d, &w, &ctx, &SeifertConfig::default()).map_err(domain)?;
                let cs = BoundaryCellStructure::build(d);
                let v = verify(d, &cs, &w, &r.framed_link.twists).map_err(domain)?;
                let doc = format::seifert_doc(d, &ctx, &r, &v);
                Ok(if text {
                    seifert_text(&doc)
                } else {
                    format::to_json(&doc)
                })
            }
            Command::Twistspace { .. } => {
                let (w, ctx) = self.weights(&f)?;
                let cs = BoundaryCellStructure::build(d);
                let space = valid_twist_space(d, &cs, &w).map_err(domain)?;
                for s in &space.free_segments {
                    eprintln!(
                        "warning: segment `{}` lies on no cycle; its twist is free",
                        d.segments[*s].id
                    );
                }
                let doc = format::twistspace_doc(d, &ctx, &space);
                Ok(if text {
                    twistspace_text(&doc)
                } else {
                    format::to_json(&doc)
                })
            }
            Command::Verify { .. } => {
                let (w, ctx) = self.weights(&f)?;
                let arg = self
                    .cli
                    .twists
                    .as_deref()
                    .ok_or_else(|| CliError::Io("verify needs --twists".into()))?;
                let (value, _) = vector_arg(arg, "twists")?;
                let t = format::vector_from_json(&value, d, &ctx).map_err(domain)?;
                let cs = BoundaryCellStructure::build(d);
                let v = verify(d, &cs, &w, &t).map_err(domain)?;
                let doc = format::verify_doc(&ctx, &v);
                Ok(if text {
                    format!(
                        "valid: {}\nresidual: {}\n",
                        doc.valid,
                        exacts(&doc.residual)
                    )
                } else {
                    format::to_json(&doc)
                })
            }
            Command::Svg { overlay, .. } => {
                let weighted = if self.weights.is_some() || *overlay {
                    Some(self.weights(&f)?)
                } else {
                    None
                };
                let floats = weighted
                    .as_ref()
                    .map(|(w, ctx)| w.iter().map(|x| ctx.to_f64(x)).collect::<Vec<_>>());
                let lamination = match (&weighted, overlay) {
                    (Some((w, ctx)), true) => Some(
                        seifert::run(d, w, ctx, &SeifertConfig::default())
                            .map_err(domain)?
                            .lamination,
                    ),
                    _ => None,
                };
                Ok(svg::render(d, floats.as_deref(), lamination.as_ref()))
            }
        }
    }
}

fn exacts(v: &[ScalarOut]) -> String {
    let items: Vec<&str> = v.iter().map(|s| s.exact.as_str()).collect();
    format!("({})", items.join(", "))
}

fn rational_row(v: &[String]) -> String {
    format!("({})", v.join(", "))
}

fn cone_text(doc: &format::ConeDoc) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "segments: {}", doc.segments.join(", "));
    let _ = writeln!(s, "dimension: {}", doc.dimension);
    for b in &doc.basis {
        let _ = writeln!(s, "basis: {}", rational_row(b));
    }
    match &doc.sample_positive {
        Some(p) => {
            let _ = writeln!(s, "sample positive: {}", rational_row(p));
        }
        None => s.push_str("empty positive cone\n"),
    }
    s
}

fn seifert_text(doc: &format::SeifertDoc) -> String {
    let mut s = String::new();
    let fl = &doc.framed_link;
    let _ = writeln!(s, "segments: {}", fl.segments.join(", "));
    let _ = writeln!(s, "weights: {}", exacts(&fl.weights));
    let _ = writeln!(s, "twists: {}", exacts(&fl.twists));
    let l = &doc.lamination;
    let _ = writeln!(s, "circle families: {}", l.families.len());
    for (i, f) in l.families.iter().enumerate() {
        let _ = writeln!(
            s,
            "  [{i}] width {} via {}",
            f.width.exact,
            f.itinerary.join(" ")
        );
    }
    let _ = writeln!(s, "pinches: {}", l.pinches.len());
    for p in &l.pinches {
        let _ = writeln!(s, "  {} -> {} joins {:?}", p.merge, p.split, p.joins);
    }
    let _ = writeln!(s, "bands: {}", l.reconstructions.len());
    for r in &l.reconstructions {
        let _ = writeln!(
            s,
            "  {} ({:+}) over {} under {}: twist {}",
            r.crossing, r.sign, r.over, r.under, r.twist.exact
        );
    }
    let _ = writeln!(s, "complex chi: {}", l.complex_chi);
    if let Some(sf) = &doc.surface {
        let _ = writeln!(s, "surface chi: {}", sf.chi.exact);
        let _ = writeln!(s, "boundary components: {}", sf.boundary_components);
        if let Some(g) = &sf.genus {
            let _ = writeln!(s, "genus: {g}");
        }
    }
    let _ = writeln!(s, "verified: {}", doc.verified);
    s
}

fn twistspace_text(doc: &format::TwistSpaceDoc) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "segments: {}", doc.segments.join(", "));
    let _ = writeln!(s, "particular: {}", exacts(&doc.particular));
    let _ = writeln!(s, "dimension: {}", doc.dimension);
    for u in &doc.directions {
        let _ = writeln!(s, "direction: {}", rational_row(u));
    }
    s
}

fn extension(cli: &Cli) -> &'static str {
    match (&cli.command, cli.format) {
        (Command::Svg { .. }, _) => "svg",
        (_, OutputFormat::Json) => "json",
        (_, OutputFormat::Text) => "txt",
    }
}

fn write_out(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn is_sidecar(p: &Path) -> bool {
    let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
    name.ends_with(".weights.json") || name.ends_with(".twists.json")
}

fn run_batch(cli: &Cli) -> Result<u8, CliError> {
    let dir = cli.command.input();
    let mut inputs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && !is_sidecar(p))
        .collect();
    inputs.sort();
    if let Some(out) = &cli.out {
        fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    }
    let results: Vec<(PathBuf, Result<String, CliError>)> = inputs
        .par_iter()
        .map(|p| {
            let sidecar = p.with_extension("weights.json");
            let weights = cli
                .weights
                .clone()
                .or_else(|| sidecar.is_file().then(|| sidecar.display().to_string()));
            let job = Job {
                cli,
                input: p.clone(),
                weights,
            };
            (p.clone(), job.run())
        })
        .collect();
    let mut code = 0;
    for (p, r) in results {
        let name = p.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
        match r {
            Ok(body) => match &cli.out {
                Some(out) => write_out(&out.join(format!("{name}.{}", extension(cli))), &body)?,
                None => print!("== {} ==\n{body}", p.display()),
            },
            Err(e) => {
                eprintln!("{}: {}", p.display(), e.message());
                code = code.max(e.code());
            }
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = if cli.batch {
        run_batch(&cli)
    } else {
        let job = Job {
            cli: &cli,
            input: cli.command.input().to_path_buf(),
            weights: cli.weights.clone(),
        };
        job.run().and_then(|body| match &cli.out {
            Some(out) => write_out(out, &body).map(|_| 0),
            None => {
                print!("{body}");
                Ok(0)
            }
        })
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
