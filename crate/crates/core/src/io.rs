//! Reading point sets, writing results, and the batch run file.
//!
//! Inputs are ASCII OBJ, OFF or PLY; only vertex positions are read. The
//! plane list is JSON, the primal mesh is a polygon OBJ, and batch runs are
//! described in TOML.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::IoError;
use crate::geometry::{Halfspace, Point3};
use crate::polymesh::PolyhedronMesh;
use crate::simplify::{ApproxMode, CostMode, SimplifiedHull, SimplifyConfig};

/// Schema tag written into every plane list.
pub const PLANE_LIST_SCHEMA: &str = "hullpare.planes/1";

/// Points read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    /// Distinct points in first-seen order.
    pub points: Vec<Point3>,
    /// Exact duplicates dropped while reading.
    pub duplicates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryFormat {
    Obj,
    Off,
    Ply,
}

impl GeometryFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "obj" => Some(GeometryFormat::Obj),
            "off" => Some(GeometryFormat::Off),
            "ply" => Some(GeometryFormat::Ply),
            _ => None,
        }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> IoError {
    IoError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Reads the vertices of an OBJ, OFF or PLY file, dropping exact duplicates.
pub fn load_geometry(path: impl AsRef<Path>) -> Result<PointSet, IoError> {
    let path = path.as_ref();
    let format = GeometryFormat::from_path(path).ok_or_else(|| IoError::UnsupportedFormat(path.display().to_string()))?;
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_geometry(&text, format, &path.display().to_string())
}

/// Parses geometry text; `label` names the source in errors.
pub fn parse_geometry(text: &str, format: GeometryFormat, label: &str) -> Result<PointSet, IoError> {
    let raw = match format {
        GeometryFormat::Obj => parse_obj(text, label)?,
        GeometryFormat::Off => parse_off(text, label)?,
        GeometryFormat::Ply => parse_ply(text, label)?,
    };
    if raw.is_empty() {
        return Err(parse_error(label, text.lines().count().max(1), "no vertices found"));
    }
    let mut seen = HashSet::new();
    let mut points = Vec::with_capacity(raw.len());
    for p in &raw {
        // -0.0 and 0.0 are the same point
        let key = p.to_array().map(|c| (c + 0.0).to_bits());
        if seen.insert(key) {
            points.push(*p);
        }
    }
    let duplicates = raw.len() - points.len();
    if duplicates > 0 {
        log::info!("{label}: dropped {duplicates} duplicate vertices");
    }
    if points.len() < 4 {
        return Err(IoError::TooFewPoints {
            path: label.to_string(),
            count: points.len(),
        });
    }
    Ok(PointSet { points, duplicates })
}

fn parse_error(label: &str, line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        path: label.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_coords<'a>(mut it: impl Iterator<Item = &'a str>, label: &str, line: usize) -> Result<Point3, IoError> {
    let mut c = [0.0; 3];
    for (k, slot) in c.iter_mut().enumerate() {
        let tok = it
            .next()
            .ok_or_else(|| parse_error(label, line, format!("expected 3 coordinates, got {k}")))?;
        *slot = tok
            .parse::<f64>()
            .map_err(|_| parse_error(label, line, format!("bad coordinate {tok:?}")))?;
    }
    Point3::try_new(c[0], c[1], c[2]).map_err(|_| parse_error(label, line, "non-finite coordinate"))
}

fn parse_obj(text: &str, label: &str) -> Result<Vec<Point3>, IoError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        if it.next() == Some("v") {
            out.push(parse_coords(it, label, i + 1)?);
        }
    }
    Ok(out)
}

/// Non-empty, comment-stripped lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_off(text: &str, label: &str) -> Result<Vec<Point3>, IoError> {
    let mut lines = content_lines(text);
    let (n0, first) = lines.next().ok_or_else(|| parse_error(label, 1, "empty file"))?;
    let rest = first
        .strip_prefix("OFF")
        .ok_or_else(|| parse_error(label, n0, "missing OFF header"))?
        .trim();
    let (n1, counts) = if rest.is_empty() {
        lines.next().ok_or_else(|| parse_error(label, n0, "missing vertex count"))?
    } else {
        (n0, rest)
    };
    let nv: usize = counts
        .split_whitespace()
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_error(label, n1, "bad vertex count"))?;
    let mut out = Vec::with_capacity(nv);
    let mut last = n1;
    for _ in 0..nv {
        let (n, l) = lines
            .next()
            .ok_or_else(|| parse_error(label, last + 1, format!("expected {nv} vertices, got {}", out.len())))?;
        out.push(parse_coords(l.split_whitespace(), label, n)?);
        last = n;
    }
    Ok(out)
}

fn parse_ply(text: &str, label: &str) -> Result<Vec<Point3>, IoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        Some((n, _)) => return Err(parse_error(label, n, "missing ply header")),
        None => return Err(parse_error(label, 1, "empty file")),
    }
    // (name, count, properties)
    let mut elements: Vec<(String, usize, Vec<String>)> = Vec::new();
    let mut header_end = None;
    for (n, l) in lines.by_ref() {
        let tok: Vec<&str> = l.split_whitespace().collect();
        match tok.as_slice() {
            ["format", "ascii", _] => {}
            ["format", other, ..] => return Err(parse_error(label, n, format!("unsupported PLY format {other}"))),
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| parse_error(label, n, format!("bad element count {count:?}")))?;
                elements.push((name.to_string(), count, Vec::new()));
            }
            ["property", .., name] => match elements.last_mut() {
                Some(e) => e.2.push(name.to_string()),
                None => return Err(parse_error(label, n, "property before any element")),
            },
            ["end_header"] => {
                header_end = Some(n);
                break;
            }
            _ => return Err(parse_error(label, n, format!("unexpected header line {l:?}"))),
        }
    }
    let mut last = header_end.ok_or_else(|| parse_error(label, text.lines().count(), "missing end_header"))?;
    let mut out = Vec::new();
    for (name, count, props) in &elements {
        let xyz = if name == "vertex" {
            let idx = |c: &str| props.iter().position(|p| p == c);
            match (idx("x"), idx("y"), idx("z")) {
                (Some(x), Some(y), Some(z)) => Some([x, y, z]),
                _ => return Err(parse_error(label, last, "vertex element lacks x, y, z")),
            }
        } else {
            None
        };
        for _ in 0..*count {
            let (n, l) = lines
                .next()
                .ok_or_else(|| parse_error(label, last + 1, format!("truncated {name} data")))?;
            last = n;
            if let Some(xyz) = xyz {
                let tok: Vec<&str> = l.split_whitespace().collect();
                let pick = xyz.iter().map(|&k| tok.get(k).copied().unwrap_or(""));
                out.push(parse_coords(pick, label, n)?);
            }
        }
    }
    Ok(out)
}

/// One plane of a plane list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneEntry {
    pub n: [f64; 3],
    pub b: f64,
    /// Index in the input face plane set; absent for inner results.
    pub source_face: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneListMetadata {
    pub input: Option<String>,
    pub target: usize,
    pub cost_mode: CostMode,
    pub approx_mode: ApproxMode,
    pub volume_ratio: f64,
    pub area_ratio: f64,
    /// Set when the target could not be reached.
    pub early_stop: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

/// Halfspace representation of a result, as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneListDocument {
    pub schema: String,
    pub center: [f64; 3],
    pub planes: Vec<PlaneEntry>,
    pub metadata: PlaneListMetadata,
}

impl PlaneListDocument {
    pub fn from_result(result: &SimplifiedHull, input: Option<String>, timing_ms: Option<f64>) -> Self {
        let planes = result
            .halfspaces
            .iter()
            .enumerate()
            .map(|(i, h)| PlaneEntry {
                n: h.n.to_array(),
                b: h.b,
                source_face: result.sources.get(i).copied(),
            })
            .collect();
        PlaneListDocument {
            schema: PLANE_LIST_SCHEMA.to_string(),
            center: result.center.to_array(),
            planes,
            metadata: PlaneListMetadata {
                input,
                target: result.target_faces,
                cost_mode: result.cost_mode,
                approx_mode: result.approx_mode,
                volume_ratio: result.volume_ratio,
                area_ratio: result.area_ratio,
                early_stop: result.early_stop,
                timing_ms,
            },
        }
    }

    pub fn halfspaces(&self) -> Result<Vec<Halfspace>, crate::error::GeometryError> {
        self.planes
            .iter()
            .map(|p| Halfspace::new(Point3::from_array(p.n), p.b))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plane lists always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, label: &str) -> Result<Self, IoError> {
        let doc: PlaneListDocument = serde_json::from_str(text).map_err(|e| IoError::Parse {
            path: label.to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        if doc.schema != PLANE_LIST_SCHEMA {
            return Err(IoError::Schema {
                path: label.to_string(),
                message: format!("unknown schema {:?} (expected {PLANE_LIST_SCHEMA:?})", doc.schema),
            });
        }
        if let Err(e) = doc.halfspaces() {
            return Err(IoError::Schema {
                path: label.to_string(),
                message: e.to_string(),
            });
        }
        Ok(doc)
    }
}

pub fn read_plane_list(path: impl AsRef<Path>) -> Result<PlaneListDocument, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    PlaneListDocument::from_json(&text, &path.display().to_string())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WriteOptions {
    /// Recorded in the plane list metadata.
    pub input: Option<String>,
    /// Fan polygons into triangles in the OBJ.
    pub triangulate: bool,
    pub timing_ms: Option<f64>,
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub planes: PathBuf,
    pub mesh: PathBuf,
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Polygon OBJ text for a primal mesh.
pub fn mesh_obj(mesh: &PolyhedronMesh, triangulate: bool) -> String {
    let tri;
    let mesh = if triangulate {
        tri = mesh.triangulated();
        &tri
    } else {
        mesh
    };
    let mut s = String::new();
    let _ = writeln!(s, "# {} vertices, {} faces", mesh.vertices.len(), mesh.faces.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
    }
    for f in &mesh.faces {
        s.push('f');
        for &i in f {
            let _ = write!(s, " {}", i + 1);
        }
        s.push('\n');
    }
    s
}

/// Writes `<base>.planes.json` and `<base>.obj`.
pub fn write_outputs(result: &SimplifiedHull, base: impl AsRef<Path>, opts: &WriteOptions) -> Result<OutputPaths, IoError> {
    let doc = PlaneListDocument::from_result(result, opts.input.clone(), opts.timing_ms);
    write_document(&doc, &result.mesh, base, opts.triangulate)
}

/// Writes a plane list and its mesh next to each other.
pub fn write_document(
    doc: &PlaneListDocument,
    mesh: &PolyhedronMesh,
    base: impl AsRef<Path>,
    triangulate: bool,
) -> Result<OutputPaths, IoError> {
    let base = base.as_ref();
    if let Some(dir) = base.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let paths = OutputPaths {
        planes: with_suffix(base, ".planes.json"),
        mesh: with_suffix(base, ".obj"),
    };
    fs::write(&paths.planes, doc.to_json()).map_err(|e| io_err(&paths.planes, e))?;
    fs::write(&paths.mesh, mesh_obj(mesh, triangulate)).map_err(|e| io_err(&paths.mesh, e))?;
    Ok(paths)
}

/// Settings shared by all jobs of a run file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSettings {
    pub faces: Option<usize>,
    pub cost: Option<CostMode>,
    pub mode: Option<ApproxMode>,
    pub keep_faces: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub oracle_check: Option<bool>,
    pub triangulate_output: Option<bool>,
}

impl JobSettings {
    const EMPTY: JobSettings = JobSettings {
        faces: None,
        cost: None,
        mode: None,
        keep_faces: None,
        seed: None,
        oracle_check: None,
        triangulate_output: None,
    };
}

impl Default for JobSettings {
    fn default() -> Self {
        Self::EMPTY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobEntry {
    pub input: PathBuf,
    pub out: PathBuf,
    #[serde(flatten)]
    pub settings: JobSettings,
}

/// Batch run description.
///
/// ```toml
/// [defaults]
/// faces = 18
/// cost = "volume"
///
/// [[job]]
/// input = "models/a.obj"
/// out = "out/a"
/// mode = "inner"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    #[serde(default)]
    pub defaults: JobSettings,
    #[serde(default, rename = "job")]
    pub jobs: Vec<JobEntry>,
}

/// A job with every setting resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedJob {
    pub input: PathBuf,
    pub out: PathBuf,
    pub config: SimplifyConfig,
    pub triangulate_output: bool,
}

impl RunConfigFile {
    pub fn from_toml(text: &str, label: &str) -> Result<Self, IoError> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count().max(1))
                .unwrap_or(0);
            IoError::Parse {
                path: label.to_string(),
                line,
                message: e.message().to_string(),
            }
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IoError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    /// Applies defaults; relative paths are taken from `root`.
    pub fn resolve(&self, root: &Path, label: &str) -> Result<Vec<ResolvedJob>, IoError> {
        self.jobs
            .iter()
            .enumerate()
            .map(|(i, job)| {
                let s = &job.settings;
                let d = &self.defaults;
                let faces = s.faces.or(d.faces).ok_or_else(|| IoError::Schema {
                    path: label.to_string(),
                    message: format!("job {i} has no face count and there is no default"),
                })?;
                let mut config = SimplifyConfig::new(faces)
                    .with_cost(s.cost.or(d.cost).unwrap_or_default())
                    .with_approx(s.mode.or(d.mode).unwrap_or_default())
                    .with_constrained(s.keep_faces.clone().or_else(|| d.keep_faces.clone()).unwrap_or_default())
                    .with_exact_cost_check(s.oracle_check.or(d.oracle_check).unwrap_or(false));
                if let Some(seed) = s.seed.or(d.seed) {
                    config = config.with_seed(seed);
                }
                Ok(ResolvedJob {
                    input: root.join(&job.input),
                    out: root.join(&job.out),
                    config,
                    triangulate_output: s.triangulate_output.or(d.triangulate_output).unwrap_or(false),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::SimplifyError;
    use crate::simplify::simplify_points;
    use proptest::prelude::*;

    const CUBE_OBJ: &str = "# cube\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nv 0 0 1\nv 1 0 1\nv 0 1 1\nv 1 1 1\nf 1 2 3\n";

    fn frustum_points() -> Vec<Point3> {
        let mut p = Vec::new();
        for (s, z) in [(1.0, 0.0), (0.5, 1.0)] {
            for (x, y) in [(s, s), (-s, s), (-s, -s), (s, -s)] {
                p.push(Point3::new(x, y, z));
            }
        }
        p
    }

    #[test]
    fn obj_cube() {
        let s = parse_geometry(CUBE_OBJ, GeometryFormat::Obj, "cube.obj").unwrap();
        assert_eq!(s.points.len(), 8);
        assert_eq!(s.duplicates, 0);
    }

    #[test]
    fn off_with_duplicates() {
        let text = "OFF\n# comment\n10 0 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n1 0 0\n-0 0 0\n1 1 1\n1 1 1\n0 1 0\n2 2 2\n";
        let s = parse_geometry(text, GeometryFormat::Off, "x.off").unwrap();
        assert_eq!(s.points.len(), 6);
        assert_eq!(s.duplicates, 4);
        let inline = "OFF 4 1 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n";
        assert_eq!(parse_geometry(inline, GeometryFormat::Off, "y.off").unwrap().points.len(), 4);
    }

    #[test]
    fn ply_ascii() {
        let text = "ply\nformat ascii 1.0\ncomment x\nelement vertex 4\nproperty float y\nproperty float x\nproperty float z\nproperty uchar red\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0 1\n0 1 0 1\n1 0 0 1\n0 0 1 1\n3 0 1 2\n";
        let s = parse_geometry(text, GeometryFormat::Ply, "a.ply").unwrap();
        assert_eq!(s.points[2], Point3::new(0.0, 1.0, 0.0));
        let binary = "ply\nformat binary_little_endian 1.0\nend_header\n";
        assert!(matches!(
            parse_geometry(binary, GeometryFormat::Ply, "b.ply"),
            Err(IoError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(parse_geometry("", GeometryFormat::Obj, "e.obj"), Err(IoError::Parse { .. })));
        assert!(matches!(parse_geometry("", GeometryFormat::Off, "e.off"), Err(IoError::Parse { .. })));
        let bad = "v 0 0 0\nv 1 0 0\nv 0 x 0\n";
        match parse_geometry(bad, GeometryFormat::Obj, "bad.obj") {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let short = "OFF\n5 0 0\n0 0 0\n1 0 0\n";
        assert!(matches!(parse_geometry(short, GeometryFormat::Off, "s.off"), Err(IoError::Parse { line: 5, .. })));
        let nan = "v 0 0 NaN\n";
        assert!(matches!(parse_geometry(nan, GeometryFormat::Obj, "n.obj"), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn too_few_points() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 1 0\n";
        assert!(matches!(
            parse_geometry(text, GeometryFormat::Obj, "t.obj"),
            Err(IoError::TooFewPoints { count: 3, .. })
        ));
    }

    #[test]
    fn frustum_outputs() {
        let out = simplify_points(&frustum_points(), &SimplifyConfig::new(5)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("sub/frustum");
        let opts = WriteOptions {
            input: Some("frustum.obj".into()),
            ..WriteOptions::default()
        };
        let paths = write_outputs(&out, &base, &opts).unwrap();
        let obj = fs::read_to_string(&paths.mesh).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 5);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 5);
        let doc = read_plane_list(&paths.planes).unwrap();
        assert_eq!(doc.planes.len(), 5);
        assert!((doc.metadata.volume_ratio - 8.0 / 7.0).abs() < 1e-12);
        let back = doc.halfspaces().unwrap();
        for (a, b) in back.iter().zip(&out.halfspaces) {
            assert_eq!(a.n.to_array().map(f64::to_bits), b.n.to_array().map(f64::to_bits));
            assert_eq!(a.b.to_bits(), b.b.to_bits());
        }
        // byte-identical on a second run
        let again = simplify_points(&frustum_points(), &SimplifyConfig::new(5)).unwrap();
        let base2 = dir.path().join("again");
        let p2 = write_outputs(&again, &base2, &opts).unwrap();
        assert_eq!(fs::read(&paths.planes).unwrap(), fs::read(&p2.planes).unwrap());
        assert_eq!(fs::read(&paths.mesh).unwrap(), fs::read(&p2.mesh).unwrap());

        let tri = mesh_obj(&out.mesh, true);
        assert_eq!(tri.lines().filter(|l| l.starts_with("f ")).count(), 6);
    }

    #[test]
    fn partial_result_is_flagged() {
        let cube: Vec<Point3> = parse_geometry(CUBE_OBJ, GeometryFormat::Obj, "c").unwrap().points;
        let Err(SimplifyError::TargetUnreachable { partial, .. }) = simplify_points(&cube, &SimplifyConfig::new(4)) else {
            panic!("cube should stop early");
        };
        let doc = PlaneListDocument::from_result(&partial, None, None);
        assert!(doc.metadata.early_stop);
        assert_eq!(doc.planes.len(), 6);
        assert!(!doc.to_json().contains("timing_ms"));
    }

    #[test]
    fn schema_is_checked() {
        let out = simplify_points(&frustum_points(), &SimplifyConfig::new(5)).unwrap();
        let json = PlaneListDocument::from_result(&out, None, Some(1.5)).to_json();
        assert!(PlaneListDocument::from_json(&json, "ok").is_ok());
        let wrong = json.replace(PLANE_LIST_SCHEMA, "other/9");
        assert!(matches!(PlaneListDocument::from_json(&wrong, "w"), Err(IoError::Schema { .. })));
        let extra = json.replacen("\"schema\"", "\"bogus\": 1,\n  \"schema\"", 1);
        assert!(matches!(PlaneListDocument::from_json(&extra, "x"), Err(IoError::Parse { .. })));
    }

    #[test]
    fn run_file_resolution() {
        let text = r#"
[defaults]
faces = 18
cost = "area"
seed = 7

[[job]]
input = "a.obj"
out = "out/a"

[[job]]
input = "/abs/b.off"
out = "out/b"
faces = 10
mode = "inner"
triangulate_output = true
"#;
        let rf = RunConfigFile::from_toml(text, "run.toml").unwrap();
        let jobs = rf.resolve(Path::new("/root/x"), "run.toml").unwrap();
        assert_eq!(jobs.len(), 2);
        assert_eq!(jobs[0].input, PathBuf::from("/root/x/a.obj"));
        assert_eq!(jobs[0].config.target_faces, 18);
        assert_eq!(jobs[0].config.cost_mode, CostMode::Area);
        assert_eq!(jobs[0].config.rng_seed, 7);
        assert_eq!(jobs[1].input, PathBuf::from("/abs/b.off"));
        assert_eq!(jobs[1].config.target_faces, 10);
        assert_eq!(jobs[1].config.approx_mode, ApproxMode::Inner);
        assert!(jobs[1].triangulate_output);
    }

    #[test]
    fn run_file_rejects_unknown_keys() {
        for text in [
            "[defaults]\nfacez = 3\n",
            "surprise = 1\n",
            "[[job]]\ninput = \"a\"\nout = \"b\"\ncolour = 1\n",
        ] {
            assert!(matches!(RunConfigFile::from_toml(text, "r"), Err(IoError::Parse { .. })), "{text}");
        }
        let missing = RunConfigFile::from_toml("[[job]]\ninput = \"a\"\nout = \"b\"\n", "r").unwrap();
        assert!(matches!(missing.resolve(Path::new("."), "r"), Err(IoError::Schema { .. })));
    }

    proptest! {
        #[test]
        fn plane_list_round_trips_bitwise(
            planes in prop::collection::vec((prop::array::uniform3(-1e6f64..1e6), -1e9f64..1e9), 1..30),
            c in prop::array::uniform3(-1e3f64..1e3),
        ) {
            let doc = PlaneListDocument {
                schema: PLANE_LIST_SCHEMA.to_string(),
                center: c,
                planes: planes
                    .iter()
                    .enumerate()
                    .map(|(i, (n, b))| PlaneEntry { n: [n[0] + 1e-300, n[1], n[2]], b: *b, source_face: Some(i) })
                    .collect(),
                metadata: PlaneListMetadata {
                    input: Some("x".into()),
                    target: 4,
                    cost_mode: CostMode::Volume,
                    approx_mode: ApproxMode::Outer,
                    volume_ratio: 1.0 / 3.0,
                    area_ratio: std::f64::consts::PI,
                    early_stop: false,
                    timing_ms: Some(0.1),
                },
            };
            let back = PlaneListDocument::from_json(&doc.to_json(), "p").unwrap();
            for (a, b) in doc.planes.iter().zip(&back.planes) {
                prop_assert_eq!(a.n.map(f64::to_bits), b.n.map(f64::to_bits));
                prop_assert_eq!(a.b.to_bits(), b.b.to_bits());
            }
            prop_assert_eq!(doc, back);
        }
    }
}
