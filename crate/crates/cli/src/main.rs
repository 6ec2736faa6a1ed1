use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use hullpare::baselines::{canonical_directions, kdop_fit, tightness, tightness_of_mesh, Candidate};
use hullpare::hull::{convex_hull, face_planes_seeded, halfspace_intersection, IntersectionOutcome};
use hullpare::io::{
    load_geometry, read_plane_list, write_document, write_outputs, GeometryFormat, PlaneEntry, PlaneListDocument,
    PlaneListMetadata, RunConfigFile, WriteOptions, PLANE_LIST_SCHEMA,
};
use hullpare::lp::{feasible_point, LpOutcome};
use hullpare::simplify::{simplify_planes, simplify_points, ApproxMode, CostMode, SimplifiedHull, SimplifyConfig};
use hullpare::{IoError, MetricsError, SimplifyError};

const EXIT_USAGE: u8 = 2;
const EXIT_DISJOINT: u8 = 3;
const EXIT_FAILED: u8 = 4;

/// Conservative convex hull simplification.
#[derive(Parser, Debug)]
#[command(name = "hullpare", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simplify the convex hull of a mesh or point cloud.
    Simplify(SimplifyArgs),
    /// Compare a plane list against the hull of an input.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        against: PathBuf,
    },
    /// Test whether two plane lists intersect. Exit 0 if they do, 3 if not.
    Overlap {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Time hull construction and simplification over a directory.
    Bench {
        #[arg(long)]
        inputs: PathBuf,
        #[arg(long)]
        faces: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = CostArg::Volume)]
        cost: CostArg,
    },
    /// Fit a k-DOP with canonical directions.
    Kdop {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 18)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        triangulate_output: bool,
    },
    /// Run the jobs listed in a TOML run file.
    Batch {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SimplifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    faces: usize,
    #[arg(long, value_enum, default_value_t = CostArg::Volume)]
    cost: CostArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Outer)]
    mode: ModeArg,
    /// Face plane index that must survive; repeatable.
    #[arg(long = "keep-face")]
    keep_face: Vec<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Recompute each popped cost from full halfspace intersections.
    #[arg(long)]
    oracle_check: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    triangulate_output: bool,
    /// Store the wall time in the plane list (makes output nondeterministic).
    #[arg(long)]
    record_timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CostArg {
    Volume,
    Area,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Outer,
    Inner,
}

impl From<CostArg> for CostMode {
    fn from(c: CostArg) -> Self {
        match c {
            CostArg::Volume => CostMode::Volume,
            CostArg::Area => CostMode::Area,
        }
    }
}

impl From<ModeArg> for ApproxMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Outer => ApproxMode::Outer,
            ModeArg::Inner => ApproxMode::Inner,
        }
    }
}

/// A failure reported as one JSON line on stderr.
#[derive(Debug)]
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    extra: serde_json::Value,
}

impl Failure {
    fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code,
            kind,
            message: message.into(),
            extra: serde_json::Value::Null,
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, "usage", message)
    }

    fn report(&self) -> ExitCode {
        let mut line = json!({ "error": self.kind, "message": self.message, "exit_code": self.code });
        if let serde_json::Value::Object(extra) = &self.extra {
            for (k, v) in extra {
                line[k] = v.clone();
            }
        }
        eprintln!("{line}");
        ExitCode::from(self.code)
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Io { .. } | IoError::UnsupportedFormat(_) => Failure::new(EXIT_USAGE, "io", e.to_string()),
            IoError::Parse { .. } | IoError::Schema { .. } => Failure::new(EXIT_FAILED, "parse", e.to_string()),
            IoError::TooFewPoints { .. } => Failure::new(EXIT_FAILED, "too_few_points", e.to_string()),
        }
    }
}

impl From<SimplifyError> for Failure {
    fn from(e: SimplifyError) -> Self {
        let code = match e {
            SimplifyError::InvalidConfig(_) => EXIT_USAGE,
            _ => EXIT_FAILED,
        };
        Failure::new(code, e.kind(), e.to_string())
    }
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        let kind = match e {
            MetricsError::NonContainment { .. } => "non_containment",
            _ => "metrics",
        };
        Failure::new(EXIT_FAILED, kind, e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simplify(args) => cmd_simplify(&args),
        Command::Stats { input, against } => cmd_stats(&input, &against),
        Command::Overlap { a, b } => cmd_overlap(&a, &b),
        Command::Bench { inputs, faces, out, cost } => cmd_bench(&inputs, faces, cost.into(), &out),
        Command::Kdop {
            input,
            k,
            out,
            triangulate_output,
        } => cmd_kdop(&input, k, &out, triangulate_output),
        Command::Batch { config } => cmd_batch(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

#[derive(Serialize)]
struct RunSummary {
    input: String,
    planes: String,
    mesh: String,
    faces: usize,
    target: usize,
    volume_ratio: f64,
    area_ratio: f64,
    early_stop: bool,
    warnings: Vec<String>,
}

/// Simplifies one input and writes its outputs. A run that stops early still
/// writes the partial result before failing.
fn run_job(
    input: &Path,
    config: &SimplifyConfig,
    out: &Path,
    triangulate: bool,
    record_timing: bool,
) -> Result<RunSummary, Failure> {
    let points = load_geometry(input)?.points;
    let start = Instant::now();
    let outcome = simplify_points(&points, config);
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let (result, failure): (SimplifiedHull, Option<Failure>) = match outcome {
        Ok(r) => (r, None),
        Err(SimplifyError::TargetUnreachable { reached, partial }) => {
            let mut f = Failure::new(
                EXIT_FAILED,
                "target_unreachable",
                format!("every remaining removal has infinite cost; stopped at {reached} faces"),
            );
            f.extra = json!({ "reached": reached, "target": config.target_faces });
            (*partial, Some(f))
        }
        Err(e) => return Err(e.into()),
    };
    let opts = WriteOptions {
        input: Some(input.display().to_string()),
        triangulate,
        timing_ms: record_timing.then_some(ms),
    };
    let paths = write_outputs(&result, out, &opts)?;
    if let Some(mut f) = failure {
        f.extra["planes"] = json!(paths.planes.display().to_string());
        f.extra["mesh"] = json!(paths.mesh.display().to_string());
        return Err(f);
    }
    Ok(RunSummary {
        input: input.display().to_string(),
        planes: paths.planes.display().to_string(),
        mesh: paths.mesh.display().to_string(),
        faces: result.face_count(),
        target: result.target_faces,
        volume_ratio: result.volume_ratio,
        area_ratio: result.area_ratio,
        early_stop: result.early_stop,
        warnings: result.warnings,
    })
}

fn cmd_simplify(args: &SimplifyArgs) -> Result<(), Failure> {
    let mut config = SimplifyConfig::new(args.faces)
        .with_cost(args.cost.into())
        .with_approx(args.mode.into())
        .with_constrained(args.keep_face.clone())
        .with_exact_cost_check(args.oracle_check);
    if let Some(seed) = args.seed {
        config = config.with_seed(seed);
    }
    let summary = run_job(&args.input, &config, &args.out, args.triangulate_output, args.record_timing)?;
    print_json(&summary);
    Ok(())
}

fn cmd_stats(input: &Path, against: &Path) -> Result<(), Failure> {
    let points = load_geometry(input)?.points;
    let hull = convex_hull(&points).map_err(|e| Failure::new(EXIT_FAILED, "degenerate_input", e.to_string()))?;
    let doc = read_plane_list(against)?;
    let planes = doc.halfspaces().map_err(|e| Failure::new(EXIT_FAILED, "parse", e.to_string()))?;
    let report = match doc.metadata.approx_mode {
        ApproxMode::Outer => tightness(Candidate::Halfspaces(&planes), &hull)?,
        ApproxMode::Inner => match halfspace_intersection(&planes) {
            IntersectionOutcome::Bounded(mesh) => tightness_of_mesh(&mesh, ApproxMode::Inner, &hull)?,
            _ => return Err(MetricsError::NotBounded.into()),
        },
    };
    print_json(&report);
    Ok(())
}

fn cmd_overlap(a: &Path, b: &Path) -> Result<(), Failure> {
    let mut planes = Vec::new();
    for p in [a, b] {
        let doc = read_plane_list(p)?;
        planes.extend(doc.halfspaces().map_err(|e| Failure::new(EXIT_FAILED, "parse", e.to_string()))?);
    }
    match feasible_point(&planes) {
        LpOutcome::Feasible(x) => {
            print_json(&json!({ "overlap": true, "witness": x.to_array() }));
            Ok(())
        }
        LpOutcome::Unbounded => {
            print_json(&json!({ "overlap": true, "witness": null }));
            Ok(())
        }
        LpOutcome::Infeasible => {
            print_json(&json!({ "overlap": false }));
            Err(Failure::new(EXIT_DISJOINT, "disjoint", "the two plane lists do not intersect"))
        }
    }
}

/// Thread pool sized by `HULLPARE_THREADS`, or rayon's default when unset.
fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("HULLPARE_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::usage(format!("HULLPARE_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Failure::new(EXIT_FAILED, "threads", e.to_string()))
}

#[derive(Debug, Serialize)]
struct BenchRow {
    file: String,
    n_points: Option<usize>,
    hull_faces: Option<usize>,
    hull_ms: Option<f64>,
    simplify_ms: Option<f64>,
    volume_ratio: Option<f64>,
    status: String,
}

fn bench_one(path: &Path, faces: usize, cost: CostMode) -> BenchRow {
    let mut row = BenchRow {
        file: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        n_points: None,
        hull_faces: None,
        hull_ms: None,
        simplify_ms: None,
        volume_ratio: None,
        status: "ok".into(),
    };
    let points = match load_geometry(path) {
        Ok(p) => p.points,
        Err(e) => {
            row.status = format!("error: {e}");
            return row;
        }
    };
    row.n_points = Some(points.len());
    let t0 = Instant::now();
    let hull = match convex_hull(&points) {
        Ok(h) => h,
        Err(e) => {
            row.status = format!("error: {e}");
            return row;
        }
    };
    row.hull_ms = Some(t0.elapsed().as_secs_f64() * 1e3);
    row.hull_faces = Some(hull.triangles.len());
    let config = SimplifyConfig::new(faces).with_cost(cost);
    let t1 = Instant::now();
    let set = face_planes_seeded(&hull, true, config.rng_seed);
    let out = simplify_planes(&set, &config);
    row.simplify_ms = Some(t1.elapsed().as_secs_f64() * 1e3);
    match out {
        Ok(r) => row.volume_ratio = Some(r.volume / hull.volume()),
        Err(SimplifyError::TargetUnreachable { reached, partial }) => {
            row.volume_ratio = Some(partial.volume / hull.volume());
            row.status = format!("early_stop at {reached}");
        }
        Err(e) => row.status = format!("error: {e}"),
    }
    row
}

fn cmd_bench(inputs: &Path, faces: usize, cost: CostMode, out: &Path) -> Result<(), Failure> {
    if faces < 4 {
        return Err(Failure::usage("--faces must be at least 4"));
    }
    let entries = fs::read_dir(inputs).map_err(|e| Failure::usage(format!("{}: {e}", inputs.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && GeometryFormat::from_path(p).is_some())
        .collect();
    files.sort();
    let pool = thread_pool()?;
    let rows: Vec<BenchRow> = pool.install(|| files.par_iter().map(|f| bench_one(f, faces, cost)).collect());
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::new(EXIT_FAILED, "io", format!("{}: {e}", dir.display())))?;
    }
    let mut w = csv::Writer::from_path(out).map_err(|e| Failure::new(EXIT_FAILED, "io", e.to_string()))?;
    for row in &rows {
        w.serialize(row).map_err(|e| Failure::new(EXIT_FAILED, "io", e.to_string()))?;
    }
    w.flush().map_err(|e| Failure::new(EXIT_FAILED, "io", e.to_string()))?;
    let failed = rows.iter().filter(|r| r.status.starts_with("error")).count();
    print_json(&json!({ "rows": rows.len(), "errors": failed, "csv": out.display().to_string() }));
    Ok(())
}

fn cmd_kdop(input: &Path, k: usize, out: &Path, triangulate: bool) -> Result<(), Failure> {
    let dirs = canonical_directions(k).ok_or_else(|| Failure::usage(format!("--k must be 6, 14, 18 or 26, got {k}")))?;
    let points = load_geometry(input)?.points;
    let hull = convex_hull(&points).map_err(|e| Failure::new(EXIT_FAILED, "degenerate_input", e.to_string()))?;
    let planes = kdop_fit(&points, &dirs);
    let mesh = match halfspace_intersection(&planes) {
        IntersectionOutcome::Bounded(m) => m,
        _ => return Err(MetricsError::NotBounded.into()),
    };
    let report = tightness_of_mesh(&mesh, ApproxMode::Outer, &hull)?;
    let center = mesh.vertices.iter().fold([0.0; 3], |mut a, v| {
        for (s, c) in a.iter_mut().zip(v.to_array()) {
            *s += c / mesh.vertices.len() as f64;
        }
        a
    });
    let doc = PlaneListDocument {
        schema: PLANE_LIST_SCHEMA.to_string(),
        center,
        planes: planes
            .iter()
            .enumerate()
            .map(|(i, h)| PlaneEntry {
                n: h.n.to_array(),
                b: h.b,
                source_face: Some(i),
            })
            .collect(),
        metadata: PlaneListMetadata {
            input: Some(input.display().to_string()),
            target: k,
            cost_mode: CostMode::Volume,
            approx_mode: ApproxMode::Outer,
            volume_ratio: report.volume_ratio,
            area_ratio: report.area_ratio,
            early_stop: false,
            timing_ms: None,
        },
    };
    let paths = write_document(&doc, &mesh, out, triangulate)?;
    print_json(&json!({
        "planes": paths.planes.display().to_string(),
        "mesh": paths.mesh.display().to_string(),
        "k": k,
        "volume_ratio": report.volume_ratio,
        "area_ratio": report.area_ratio,
    }));
    Ok(())
}

fn cmd_batch(config: &Path) -> Result<(), Failure> {
    let run = RunConfigFile::load(config)?;
    let root = config.parent().unwrap_or(Path::new("."));
    let jobs = run.resolve(root, &config.display().to_string())?;
    let pool = thread_pool()?;
    let results: Vec<Result<RunSummary, Failure>> = pool.install(|| {
        jobs.par_iter()
            .map(|j| run_job(&j.input, &j.config, &j.out, j.triangulate_output, false))
            .collect()
    });
    let mut worst = 0u8;
    let mut lines = Vec::new();
    for (job, r) in jobs.iter().zip(results) {
        match r {
            Ok(s) => lines.push(json!({ "input": job.input.display().to_string(), "status": "ok", "summary": s })),
            Err(f) => {
                worst = worst.max(f.code);
                lines.push(json!({
                    "input": job.input.display().to_string(),
                    "status": f.kind,
                    "message": f.message,
                }));
            }
        }
    }
    print_json(&lines);
    if worst != 0 {
        return Err(Failure::new(worst, "batch", "one or more jobs failed"));
    }
    Ok(())
}
