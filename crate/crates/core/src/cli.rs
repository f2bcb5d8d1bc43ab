//! The `funk` command line.
//!
//! Exit codes: 0 success, 1 a verification property failed, 2 unreadable or
//! invalid input, 3 a point outside the body, 4 the output could not be written.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path as FsPath, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use crate::body::BodyDocument;
use crate::body::{ConvexBody, RadialResult};
use crate::directions::{default_sphere_dirs, unit_directions};
use crate::error::Error;
use crate::finsler::{path_length, segment_length_closed, Path, QuadratureSpec, TautologicalStructure};
use crate::funk::{backward_sphere, forward_sphere, funk, funk_distance, SphereSample, SphereSide};
use crate::gauge::minkowski_gauge;
use crate::verify::{self, Suite, VerifyConfig};
use crate::Point;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_OUTSIDE: i32 = 3;
pub const EXIT_WRITE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "funk", version, about = "Funk weak metric on convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// F(x, y), F(y, x) and the exit point of the ray from x through y.
    Dist {
        body: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, value_enum, default_value_t = TextFormat::Human)]
        format: TextFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minkowski gauge of a direction at a point.
    Gauge {
        body: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        #[arg(long, value_enum, default_value_t = TextFormat::Human)]
        format: TextFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tautological length of a polyline read from a JSON vertex list.
    Length {
        body: PathBuf,
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value_t = 64)]
        subdivisions: usize,
        #[arg(long, value_enum, default_value_t = TextFormat::Human)]
        format: TextFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled forward or backward sphere.
    Sphere {
        body: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Side::Fwd)]
        side: Side,
        #[arg(long)]
        dirs: Option<usize>,
        #[arg(long, value_enum, default_value_t = SphereFormat::Json)]
        format: SphereFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Membership of query points in the open forward or backward ball.
    Ball {
        body: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Side::Fwd)]
        side: Side,
        /// Query point; repeatable.
        #[arg(long = "query", allow_hyphen_values = true, required = true)]
        queries: Vec<String>,
        #[arg(long, value_enum, default_value_t = TextFormat::Human)]
        format: TextFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance inside the slice `base + span(frame)` compared with the ambient distance.
    Slice {
        body: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        /// Frame vector; repeatable.
        #[arg(long = "frame", allow_hyphen_values = true, required = true)]
        frame: Vec<String>,
        /// Slice coordinates of the first point.
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        /// Slice coordinates of the second point.
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, value_enum, default_value_t = TextFormat::Human)]
        format: TextFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded property suites.
    Verify {
        body: PathBuf,
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = TextFormat::Human)]
        format: TextFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TextFormat {
    Human,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SphereFormat {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Fwd,
    Bwd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Axioms,
    Theorem,
    Spheres,
    Geodesics,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Axioms => Suite::Axioms,
            SuiteArg::Theorem => Suite::Theorem,
            SuiteArg::Spheres => Suite::Spheres,
            SuiteArg::Geodesics => Suite::Geodesics,
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PointOutside | Error::PathExitsBody => EXIT_OUTSIDE,
            _ => EXIT_INPUT,
        };
        Self { code, message: e.to_string() }
    }
}

type CmdResult = std::result::Result<Output, Failure>;

struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: EXIT_OK }
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `--out` or `stdout` and diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let out_path = cli.command.out_path().map(FsPath::to_path_buf);
    match execute(cli.command) {
        Ok(output) => match emit(&output.text, out_path.as_deref(), stdout) {
            Ok(()) => output.code,
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                EXIT_WRITE
            }
        },
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(text: &str, out: Option<&FsPath>, stdout: &mut dyn Write) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

impl Command {
    fn out_path(&self) -> Option<&FsPath> {
        match self {
            Command::Dist { out, .. }
            | Command::Gauge { out, .. }
            | Command::Length { out, .. }
            | Command::Sphere { out, .. }
            | Command::Ball { out, .. }
            | Command::Slice { out, .. }
            | Command::Verify { out, .. } => out.as_deref(),
        }
    }
}

fn execute(command: Command) -> CmdResult {
    match command {
        Command::Dist { body, from, to, format, .. } => cmd_dist(&load_body(&body)?, &from, &to, format),
        Command::Gauge { body, at, dir, format, .. } => cmd_gauge(&load_body(&body)?, &at, &dir, format),
        Command::Length { body, path, subdivisions, format, .. } => {
            cmd_length(&load_body(&body)?, &path, subdivisions, format)
        }
        Command::Sphere { body, center, delta, side, dirs, format, .. } => {
            cmd_sphere(&load_body(&body)?, &center, delta, side, dirs, format)
        }
        Command::Ball { body, center, delta, side, queries, format, .. } => {
            cmd_ball(&load_body(&body)?, &center, delta, side, &queries, format)
        }
        Command::Slice { body, base, frame, from, to, format, .. } => {
            cmd_slice(&load_body(&body)?, &base, &frame, &from, &to, format)
        }
        Command::Verify { body, suite, seed, samples, format, .. } => {
            let command = format!("verify --suite {} --seed {seed} --samples {samples}", Suite::from(suite));
            cmd_verify(&load_body(&body)?, VerifyConfig { suite: suite.into(), seed, samples }, &command, format)
        }
    }
}

fn load_body(path: &FsPath) -> std::result::Result<ConvexBody, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    Ok(BodyDocument::from_json(&text)?.build()?)
}

fn parse_point(text: &str, dimension: usize) -> std::result::Result<Point, Failure> {
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(|e| Failure::input(format!("cannot parse '{text}' as coordinates: {e}")))?;
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Failure::input(format!("non-finite coordinate in '{text}'")));
    }
    if coords.len() != dimension {
        return Err(Error::DimensionMismatch { expected: dimension, found: coords.len() }.into());
    }
    Ok(Point::from_vec(coords))
}

/// Twelve significant digits; exact zero prints as `0`.
pub fn format_human(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let magnitude = v.abs().log10().floor() as i32;
    if (-5..12).contains(&magnitude) {
        let decimals = (11 - magnitude).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // Rounding can carry into a new leading digit, e.g. 9.9999999999996.
        let digits = s.chars().filter(char::is_ascii_digit).collect::<String>();
        if digits.trim_start_matches('0').len() > 12 && decimals > 0 {
            let decimals = decimals - 1;
            return format!("{v:.decimals$}");
        }
        s
    } else {
        format!("{v:.11e}")
    }
}

fn format_coords(p: &Point) -> String {
    p.iter().map(|c| format_human(*c)).collect::<Vec<_>>().join(" ")
}

fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

fn cmd_dist(body: &ConvexBody, from: &str, to: &str, format: TextFormat) -> CmdResult {
    let n = body.dimension();
    let (x, y) = (parse_point(from, n)?, parse_point(to, n)?);
    let forward = funk_distance(body, &x, &y)?;
    let backward = funk_distance(body, &y, &x)?;
    let text = match format {
        TextFormat::Human => {
            let exit = forward.exit_point.as_ref().map(format_coords).unwrap_or_else(|| "none".into());
            format!(
                "F(x,y) = {}\nF(y,x) = {}\nexit point = {exit}\n",
                format_human(forward.value),
                format_human(backward.value)
            )
        }
        TextFormat::Json => to_json(&json!({
            "from": x.as_slice(),
            "to": y.as_slice(),
            "forward": forward.value,
            "backward": backward.value,
            "exit_point": forward.exit_point.as_ref().map(|p| p.as_slice().to_vec()),
        })),
    };
    Ok(Output::ok(text))
}

fn cmd_gauge(body: &ConvexBody, at: &str, dir: &str, format: TextFormat) -> CmdResult {
    let n = body.dimension();
    let (x, xi) = (parse_point(at, n)?, parse_point(dir, n)?);
    let value = minkowski_gauge(body, &x, &xi)?;
    let radial = match body.ray_boundary(&x, &xi) {
        Ok(RadialResult::Hit(t)) => Some(t),
        _ => None,
    };
    let text = match format {
        TextFormat::Human => format!("gauge = {}\n", format_human(value)),
        TextFormat::Json => to_json(&json!({ "at": x.as_slice(), "dir": xi.as_slice(), "gauge": value, "radial": radial })),
    };
    Ok(Output::ok(text))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PathFile {
    Vertices(Vec<Vec<f64>>),
    Object { vertices: Vec<Vec<f64>> },
}

fn load_path(path: &FsPath, dimension: usize) -> std::result::Result<Vec<Point>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let parsed: PathFile =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("invalid path file {}: {e}", path.display())))?;
    let vertices = match parsed {
        PathFile::Vertices(v) | PathFile::Object { vertices: v } => v,
    };
    vertices
        .into_iter()
        .map(|v| {
            if v.len() != dimension {
                Err(Error::DimensionMismatch { expected: dimension, found: v.len() }.into())
            } else {
                Ok(Point::from_vec(v))
            }
        })
        .collect()
}

fn cmd_length(body: &ConvexBody, path: &FsPath, subdivisions: usize, format: TextFormat) -> CmdResult {
    let vertices = load_path(path, body.dimension())?;
    for v in &vertices {
        if !body.contains(v)? {
            return Err(Error::PointOutside.into());
        }
    }
    let structure = TautologicalStructure::new(body.clone());
    let q = QuadratureSpec { subdivisions, ..QuadratureSpec::default() };
    let polyline = Path::polyline(vertices.clone())?;
    let length = path_length(&structure, &polyline, &q)?;
    let mut closed = 0.0;
    for pair in vertices.windows(2) {
        closed += segment_length_closed(&structure, &pair[0], &pair[1])?;
    }
    let end_to_end = funk(body, polyline.start(), polyline.end())?;
    let text = match format {
        TextFormat::Human => format!(
            "length = {}\nclosed-form segments = {}\nF(start,end) = {}\n",
            format_human(length),
            format_human(closed),
            format_human(end_to_end)
        ),
        TextFormat::Json => to_json(&json!({
            "length": length,
            "closed_form_segments": closed,
            "end_to_end": end_to_end,
            "vertices": vertices.len(),
        })),
    };
    Ok(Output::ok(text))
}

fn sample_sphere(body: &ConvexBody, x: &Point, delta: f64, side: Side, dirs: usize) -> crate::Result<SphereSample> {
    match side {
        Side::Fwd => forward_sphere(body, x, delta, dirs),
        Side::Bwd => backward_sphere(body, x, delta, dirs),
    }
}

fn cmd_sphere(
    body: &ConvexBody,
    center: &str,
    delta: f64,
    side: Side,
    dirs: Option<usize>,
    format: SphereFormat,
) -> CmdResult {
    let x = parse_point(center, body.dimension())?;
    let dirs = dirs.unwrap_or_else(|| default_sphere_dirs(body.dimension()));
    let sample = sample_sphere(body, &x, delta, side, dirs)?;
    let text = match format {
        SphereFormat::Json => {
            let mut s = serde_json::to_string_pretty(&sample).expect("sphere samples serialize");
            s.push('\n');
            s
        }
        SphereFormat::Csv => sphere_csv(&sample),
        SphereFormat::Svg => sphere_svg(body, &sample)?,
    };
    Ok(Output::ok(text))
}

/// One point per row, shortest round-trip decimals.
pub fn sphere_csv(sample: &SphereSample) -> String {
    let mut out = String::new();
    for p in &sample.points {
        let row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

const SVG_SIZE: f64 = 512.0;
const SVG_BOUNDARY_DIRS: usize = 720;

fn sphere_svg(body: &ConvexBody, sample: &SphereSample) -> std::result::Result<String, Failure> {
    if body.dimension() != 2 {
        return Err(Failure::input("SVG output needs a two-dimensional body"));
    }
    let w = body.witness();
    let boundary: Vec<[f64; 2]> = unit_directions(2, SVG_BOUNDARY_DIRS)
        .into_iter()
        .filter_map(|u| body.exit_unchecked(&w, &u).hit().map(|t| [w[0] + t * u[0], w[1] + t * u[1]]))
        .collect();
    let sphere: Vec<[f64; 2]> = sample.points.iter().map(|p| [p[0], p[1]]).collect();
    let center = [sample.center[0], sample.center[1]];

    let all = boundary.iter().chain(&sphere).chain(std::iter::once(&center));
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in all {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let pad = 0.05 * span;
    let (x0, y1) = (lo[0] - pad, hi[1] + pad);
    let scale = SVG_SIZE / (span + 2.0 * pad);
    let map = |p: &[f64; 2]| ((p[0] - x0) * scale, (y1 - p[1]) * scale);
    let width = (hi[0] - lo[0] + 2.0 * pad) * scale;
    let height = (hi[1] - lo[1] + 2.0 * pad) * scale;

    let polyline = |pts: &[[f64; 2]]| {
        let mut s = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (a, b) = map(p);
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{a:.4},{b:.4}");
        }
        s
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.4}" height="{height:.4}" viewBox="0 0 {width:.4} {height:.4}">"#
    );
    let closed = body.is_bounded_with(SVG_BOUNDARY_DIRS);
    let tag = if closed { "polygon" } else { "polyline" };
    let _ = writeln!(
        svg,
        r#"  <{tag} class="boundary" points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        polyline(&boundary)
    );
    let sphere_tag = if sample.truncated { "polyline" } else { "polygon" };
    let _ = writeln!(
        svg,
        r#"  <{sphere_tag} class="sphere" points="{}" fill="none" stroke="firebrick" stroke-width="1"/>"#,
        polyline(&sphere)
    );
    let (cx, cy) = map(&center);
    let _ = writeln!(svg, r#"  <circle class="center" cx="{cx:.4}" cy="{cy:.4}" r="2" fill="black"/>"#);
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn cmd_ball(body: &ConvexBody, center: &str, delta: f64, side: Side, queries: &[String], format: TextFormat) -> CmdResult {
    let n = body.dimension();
    let x = parse_point(center, n)?;
    if !body.contains(&x)? {
        return Err(Error::PointOutside.into());
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Failure::input(format!("radius must be a finite nonnegative number, got {delta}")));
    }
    let mut rows = Vec::with_capacity(queries.len());
    for q in queries {
        let p = parse_point(q, n)?;
        let d = match side {
            Side::Fwd => funk(body, &x, &p)?,
            Side::Bwd => funk(body, &p, &x)?,
        };
        rows.push((p, d, d < delta));
    }
    let text = match format {
        TextFormat::Human => {
            let mut s = String::new();
            for (p, d, inside) in &rows {
                let _ = writeln!(s, "{}  F = {}  {}", format_coords(p), format_human(*d), if *inside { "inside" } else { "outside" });
            }
            s
        }
        TextFormat::Json => to_json(&json!({
            "center": x.as_slice(),
            "delta": delta,
            "side": match side { Side::Fwd => SphereSide::Forward, Side::Bwd => SphereSide::Backward },
            "queries": rows.iter().map(|(p, d, inside)| json!({ "point": p.as_slice(), "distance": d, "inside": inside })).collect::<Vec<_>>(),
        })),
    };
    Ok(Output::ok(text))
}

fn cmd_slice(body: &ConvexBody, base: &str, frame: &[String], from: &str, to: &str, format: TextFormat) -> CmdResult {
    let n = body.dimension();
    let base = parse_point(base, n)?;
    let frame: Vec<Point> = frame.iter().map(|v| parse_point(v, n)).collect::<std::result::Result<_, _>>()?;
    let slice: ConvexBody = body.affine_slice(&base, &frame)?.into();
    let k = frame.len();
    let (u, v) = (parse_point(from, k)?, parse_point(to, k)?);
    let lift = |c: &Point| frame.iter().zip(c.iter()).fold(base.clone(), |acc, (f, s)| acc + f * *s);
    let (x, y) = (lift(&u), lift(&v));
    let inner = funk(&slice, &u, &v)?;
    let ambient = funk(body, &x, &y)?;
    let text = match format {
        TextFormat::Human => format!(
            "slice F = {}\nambient F = {}\nambient points = {} ; {}\n",
            format_human(inner),
            format_human(ambient),
            format_coords(&x),
            format_coords(&y)
        ),
        TextFormat::Json => to_json(&json!({
            "slice_distance": inner,
            "ambient_distance": ambient,
            "from": x.as_slice(),
            "to": y.as_slice(),
        })),
    };
    Ok(Output::ok(text))
}

fn cmd_verify(body: &ConvexBody, config: VerifyConfig, command: &str, format: TextFormat) -> CmdResult {
    let report = verify::run(body, &config, command)?;
    let code = if report.passed { EXIT_OK } else { EXIT_VERIFY_FAILED };
    let text = match format {
        TextFormat::Human => format!("{report}\n"),
        TextFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
            s.push('\n');
            s
        }
    };
    Ok(Output { text, code })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn human_numbers_have_twelve_significant_digits() {
        assert_eq!(format_human(std::f64::consts::LN_2), "0.693147180560");
        assert_eq!(format_human(1.5f64.ln()), "0.405465108108");
        assert_eq!(format_human(2.0), "2.00000000000");
        assert_eq!(format_human(0.0), "0");
        assert_eq!(format_human(-0.0), "0");
        assert_eq!(format_human(123.456), "123.456000000");
        assert_eq!(format_human(9.9999999999996), "10.0000000000");
        assert_eq!(format_human(1.0e-7), "1.00000000000e-7");
        assert_eq!(format_human(f64::INFINITY), "inf");
    }

    #[test]
    fn points_parse_with_signs_and_dimension_checks() {
        assert_eq!(parse_point("-0.5, 1e-3", 2).unwrap(), Point::from_vec(vec![-0.5, 1e-3]));
        assert_eq!(parse_point("1,2,3", 2).unwrap_err().code, EXIT_INPUT);
        assert_eq!(parse_point("a,b", 2).unwrap_err().code, EXIT_INPUT);
        assert_eq!(parse_point("nan,0", 2).unwrap_err().code, EXIT_INPUT);
    }
}
