//! `isobenefit` command-line tool.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use isobenefit::io::{self, RasterFormat};
use isobenefit::report::{self, UniformityReport};
use isobenefit::{
    evaluate_field, extract_isolines, validate_scene, GridSpec, Kernel, KernelFamily, Levels, Raster,
    Scene,
};

mod text;

#[derive(Parser)]
#[command(name = "isobenefit", version, about = "Benefit fields and isobenefit lines from urban amenities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the benefit field on a grid.
    Field(FieldArgs),
    /// Extract isobenefit lines as GeoJSON.
    Isolines(IsolinesArgs),
    /// Uniformity Coefficient and summary statistics.
    Uniformity(UniformityArgs),
    /// Reilly and surface-minimum breaking points for an amenity pair.
    Breakpoint(BreakpointArgs),
    /// Huff visit probabilities from an origin.
    Huff(HuffArgs),
    /// Preference Gap Gain raster of a person against the majority.
    Pgg(PggArgs),
    /// Decay curves of a single amenity for several E values.
    Curve(CurveArgs),
    /// Indicators of a scene across several E values.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Asc,
    Geojson,
}

#[derive(Args)]
struct SceneArgs {
    /// Scene file (JSON, or CSV with header id,x,y,A).
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, default_value = "rational", value_parser = parse_family)]
    kernel: KernelFamily,
    /// Moving efficiency E.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    efficiency: f64,
    /// Profile to resolve before evaluating.
    #[arg(long)]
    profile: Option<String>,
}

#[derive(Args)]
struct GridArg {
    /// x0,y0,cell,ncols,nrows (x0,y0 is the lower-left cell centre).
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: GridSpec,
}

#[derive(Args)]
struct FieldArgs {
    #[command(flatten)]
    scene: SceneArgs,
    #[command(flatten)]
    grid: GridArg,
    /// Output raster; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write the amenity-only and disamenity-only rasters next to --out.
    #[arg(long, requires = "out")]
    components: bool,
}

#[derive(Args)]
struct RasterSource {
    #[arg(long, conflicts_with = "raster")]
    scene: Option<PathBuf>,
    /// Read the raster from a file (.csv or .asc) instead of a scene.
    #[arg(long)]
    raster: Option<PathBuf>,
    #[arg(long, default_value = "rational", value_parser = parse_family)]
    kernel: KernelFamily,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    efficiency: f64,
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Option<GridSpec>,
}

#[derive(Args)]
struct IsolinesArgs {
    #[command(flatten)]
    source: RasterSource,
    /// Explicit levels, comma separated.
    #[arg(long, value_parser = parse_float_list, allow_hyphen_values = true, conflicts_with = "nlevels", required_unless_present = "nlevels")]
    levels: Option<FloatList>,
    /// Number of levels evenly spaced between the raster min and max.
    #[arg(long)]
    nlevels: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct UniformityArgs {
    #[command(flatten)]
    source: RasterSource,
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BreakpointArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// Amenity ids: id1,id2.
    #[arg(long, value_parser = parse_pair)]
    pair: (String, String),
    /// Interior samples before golden-section refinement.
    #[arg(long, default_value_t = 1001)]
    resolution: usize,
    /// Include the rest of the scene's amenities in the benefit sum.
    #[arg(long)]
    context: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HuffArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// x,y
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    origin: (f64, f64),
    /// Distance exponent; 1 gives the plain A/d ratio.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    exponent: f64,
    /// Drop amenities with A <= 0 from the choice set instead of failing.
    #[arg(long)]
    positive_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PggArgs {
    #[command(flatten)]
    scene: SceneArgs,
    #[command(flatten)]
    grid: GridArg,
    #[arg(long)]
    person: String,
    /// Majority profile; defaults to the scene's designated majority, then the baseline.
    #[arg(long)]
    majority: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// JSON summary path.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    attractiveness: f64,
    #[arg(long, value_parser = parse_float_list)]
    efficiencies: FloatList,
    #[arg(long, default_value = "rational", value_parser = parse_family)]
    kernel: KernelFamily,
    #[arg(long, default_value_t = 10.0)]
    d_max: f64,
    #[arg(long, default_value_t = 101)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, default_value = "rational", value_parser = parse_family)]
    kernel: KernelFamily,
    #[arg(long, value_parser = parse_float_list)]
    efficiencies: FloatList,
    #[arg(long)]
    profile: Option<String>,
    #[command(flatten)]
    grid: GridArg,
    /// JSON table path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<KernelFamily, String> {
    s.parse()
}

/// Comma-separated numbers.
#[derive(Clone, Debug)]
struct FloatList(Vec<f64>);

fn parse_float_list(s: &str) -> Result<FloatList, String> {
    parse_list(s).map(FloatList)
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| {
            let x: f64 = v.trim().parse().map_err(|_| format!("{v:?} is not a number"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("{v:?} is not finite"))
            }
        })
        .collect()
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    match parse_list(s)?.as_slice() {
        &[x, y] => Ok((x, y)),
        _ => Err("expected x,y".into()),
    }
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    match s.split(',').map(str::trim).collect::<Vec<_>>().as_slice() {
        [a, b] if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err("expected id1,id2".into()),
    }
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err("expected x0,y0,cell,ncols,nrows".into());
    }
    let num = |i: usize| -> Result<f64, String> {
        parts[i].parse().map_err(|_| format!("{:?} is not a number", parts[i]))
    };
    let count = |i: usize| -> Result<usize, String> {
        parts[i]
            .parse()
            .map_err(|_| format!("{:?} is not a positive integer", parts[i]))
    };
    GridSpec::new(num(0)?, num(1)?, num(2)?, count(3)?, count(4)?).map_err(|e| e.to_string())
}

fn load_scene(path: &Path) -> Result<Scene> {
    let scene = io::load_scene(path).with_context(|| format!("--scene {}", path.display()))?;
    validate_scene(scene).map_err(|r| anyhow::anyhow!("--scene {}: invalid scene: {r}", path.display()))
}

fn kernel(family: KernelFamily, e: f64) -> Result<Kernel> {
    Kernel::new(family, e).context("--efficiency")
}

fn check_profile(scene: &Scene, flag: &str, name: Option<&str>) -> Result<()> {
    if let Some(name) = name {
        if name != isobenefit::BASELINE && !scene.profiles.contains_key(name) {
            bail!("{flag}: unknown profile {name:?}");
        }
    }
    Ok(())
}

fn raster_format(format: Option<Format>, out: Option<&Path>) -> Result<RasterFormat> {
    match format {
        Some(Format::Csv) => Ok(RasterFormat::Csv),
        Some(Format::Asc) => Ok(RasterFormat::Asc),
        Some(Format::Geojson) => bail!("--format: rasters are written as csv or asc"),
        None => Ok(match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("asc") => RasterFormat::Asc,
            _ => RasterFormat::Csv,
        }),
    }
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => io::write_atomic(p, contents.as_bytes()).with_context(|| format!("--out {}", p.display())),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn write_json<T: serde::Serialize>(path: &Path, flag: &str, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    io::write_atomic(path, text.as_bytes()).with_context(|| format!("{flag} {}", path.display()))
}

/// `<stem>.<part>.<ext>` next to `out`.
fn component_path(out: &Path, part: &str, format: RasterFormat) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("field");
    out.with_file_name(format!("{stem}.{part}.{}", format.extension()))
}

impl RasterSource {
    fn load(&self) -> Result<(Raster, Option<isobenefit::FieldRasters>)> {
        match (&self.scene, &self.raster) {
            (Some(path), None) => {
                let scene = load_scene(path)?;
                check_profile(&scene, "--profile", self.profile.as_deref())?;
                let grid = self.grid.context("--grid is required with --scene")?;
                let k = kernel(self.kernel, self.efficiency)?;
                let field = evaluate_field(&scene, self.profile.as_deref(), k, &grid)?;
                Ok((field.total.clone(), Some(field)))
            }
            (None, Some(path)) => {
                let raster = io::load_raster(path).with_context(|| format!("--raster {}", path.display()))?;
                Ok((raster, None))
            }
            _ => bail!("exactly one of --scene or --raster is required"),
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Field(a) => {
            let format = raster_format(a.format, a.out.as_deref())?;
            let scene = load_scene(&a.scene.scene)?;
            check_profile(&scene, "--profile", a.scene.profile.as_deref())?;
            let k = kernel(a.scene.kernel, a.scene.efficiency)?;
            let field = evaluate_field(&scene, a.scene.profile.as_deref(), k, &a.grid.grid)?;
            if a.components {
                let out = a.out.as_deref().expect("clap enforces --out");
                for (part, r) in [("positive", &field.positive), ("negative", &field.negative)] {
                    emit(Some(&component_path(out, part, format)), &io::write_raster(r, format))?;
                }
            }
            emit(a.out.as_deref(), &io::write_raster(&field.total, format))
        }
        Command::Isolines(a) => {
            if matches!(a.format, Some(Format::Csv | Format::Asc)) {
                bail!("--format: isolines are written as geojson");
            }
            let levels = match (a.levels, a.nlevels) {
                (Some(l), _) => Levels::Explicit(l.0),
                (None, Some(n)) => Levels::Count(n),
                (None, None) => unreachable!("clap requires one"),
            };
            let (raster, _) = a.source.load()?;
            let set = extract_isolines(&raster, &levels).context("--levels/--nlevels")?;
            for w in &set.warnings {
                eprintln!("warning: {w}");
            }
            emit(a.out.as_deref(), &io::contours_to_geojson(&set))
        }
        Command::Uniformity(a) => {
            let (raster, field) = a.source.load()?;
            let rep: UniformityReport = match &field {
                Some(f) => report::uniformity_report(f)?,
                None => report::raster_uniformity_report(&raster)?,
            };
            print!("{}", text::uniformity(&rep));
            if let Some(p) = &a.out {
                write_json(p, "--out", &rep)?;
            }
            Ok(())
        }
        Command::Breakpoint(a) => {
            let scene = load_scene(&a.scene.scene)?;
            check_profile(&scene, "--profile", a.scene.profile.as_deref())?;
            let k = kernel(a.scene.kernel, a.scene.efficiency)?;
            if a.resolution < 3 {
                bail!("--resolution: must be at least 3");
            }
            let rep = report::breakpoint_report(
                &scene,
                a.scene.profile.as_deref(),
                k,
                (&a.pair.0, &a.pair.1),
                a.context,
                a.resolution,
            )
            .context("--pair")?;
            print!("{}", text::breakpoint(&rep));
            if let Some(p) = &a.out {
                write_json(p, "--out", &rep)?;
            }
            Ok(())
        }
        Command::Huff(a) => {
            let scene = load_scene(&a.scene.scene)?;
            check_profile(&scene, "--profile", a.scene.profile.as_deref())?;
            let k = kernel(a.scene.kernel, a.scene.efficiency)?;
            let rep = report::huff_report(&scene, a.scene.profile.as_deref(), k, a.origin, a.exponent, a.positive_only)
                .context("--origin")?;
            print!("{}", text::huff(&rep));
            if let Some(p) = &a.out {
                write_json(p, "--out", &rep)?;
            }
            Ok(())
        }
        Command::Pgg(a) => {
            let format = raster_format(a.format, a.out.as_deref())?;
            let scene = load_scene(&a.scene.scene)?;
            check_profile(&scene, "--person", Some(&a.person))?;
            check_profile(&scene, "--majority", a.majority.as_deref())?;
            if a.scene.profile.is_some() {
                bail!("--profile: use --person and --majority with pgg");
            }
            let k = kernel(a.scene.kernel, a.scene.efficiency)?;
            let (raster, rep) = report::pgg_report(&scene, &a.person, a.majority.as_deref(), k, &a.grid.grid)?;
            if let Some(p) = &a.report {
                write_json(p, "--report", &rep)?;
            }
            match &a.out {
                Some(p) => {
                    io::write_atomic(p, io::write_raster(&raster, format).as_bytes())
                        .with_context(|| format!("--out {}", p.display()))?;
                    print!("{}", text::pgg(&rep));
                    Ok(())
                }
                None => emit(None, &io::write_raster(&raster, format)),
            }
        }
        Command::Curve(a) => {
            let curves = report::decay_curves(a.attractiveness, &a.efficiencies.0, a.kernel, a.d_max, a.samples)
                .context("--attractiveness/--efficiencies/--d-max/--samples")?;
            emit(a.out.as_deref(), &report::curves_to_csv(&curves))
        }
        Command::Sweep(a) => {
            let scene = load_scene(&a.scene)?;
            check_profile(&scene, "--profile", a.profile.as_deref())?;
            for &e in &a.efficiencies.0 {
                kernel(a.kernel, e).context("--efficiencies")?;
            }
            let rows = report::sweep(&scene, a.profile.as_deref(), a.kernel, &a.efficiencies.0, &a.grid.grid)?;
            print!("{}", text::sweep(&rows));
            if let Some(p) = &a.out {
                write_json(p, "--out", &rows)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
