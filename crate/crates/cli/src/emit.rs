//! Output files: atomic writes, CSV tables, SVG scatter plots and the run
//! manifest.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use robpareto::geometry::Tolerances;
use robpareto::model::ObjectiveImage;
use robpareto::scalarize::Scalarizer;

use crate::error::CliError;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| io_err(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_err(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

/// In-memory CSV table.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new<S: AsRef<[u8]>>(header: &[S]) -> Result<Self, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Table { writer })
    }

    pub fn row<S: AsRef<[u8]>>(&mut self, fields: &[S]) -> Result<(), CliError> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn into_string(self) -> Result<String, CliError> {
        let bytes = self.writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn objective_header(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("f{i}")).collect()
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub source: String,
    pub scalarizers: Vec<String>,
    pub step: Option<f64>,
    pub eq_tol: Option<f64>,
    pub strict_tol: Option<f64>,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub threads: Option<usize>,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
    pub version: &'static str,
}

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;

/// Scatter plot of a two-objective image with the level curve
/// `u(y) = level` of a positively homogeneous scalarizer.
pub fn scatter_svg(img: &ObjectiveImage, u: &Scalarizer, level: f64, title: &str) -> Result<String, CliError> {
    let extent = img
        .points()
        .iter()
        .flat_map(|p| p.values().iter().copied())
        .chain([level])
        .fold(0.0, f64::max);
    let extent = if extent > 0.0 { extent * 1.15 } else { 1.0 };
    let span = SIZE - 2.0 * MARGIN;
    let sx = |v: f64| MARGIN + v / extent * span;
    let sy = |v: f64| SIZE - MARGIN - v / extent * span;

    let mut curve = Vec::new();
    for k in 0..=200 {
        let t = k as f64 / 200.0 * std::f64::consts::FRAC_PI_2;
        let d = [t.cos(), t.sin()];
        let r = level / u.apply(&d)?;
        curve.push(format!("{:.3},{:.3}", sx(r * d[0]), sy(r * d[1])));
    }

    let mut s = String::new();
    let w = |s: &mut String, line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    w(&mut s, format!(r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#));
    w(&mut s, format!(r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#));
    w(&mut s, format!(r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#, SIZE / 2.0, escape(title)));
    w(
        &mut s,
        format!(
            r#"<path d="M {} {} H {} M {} {} V {}" stroke="black" fill="none"/>"#,
            sx(0.0),
            sy(0.0),
            sx(extent),
            sx(0.0),
            sy(0.0),
            sy(extent)
        ),
    );
    w(&mut s, format!(r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">f1</text>"#, sx(extent), sy(0.0) + 16.0));
    w(&mut s, format!(r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">f2</text>"#, sx(0.0) + 4.0, sy(extent) - 4.0));
    let mut ticks = String::new();
    for k in 0..=4 {
        let v = extent * k as f64 / 4.0;
        let _ = write!(
            ticks,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="10" text-anchor="middle">{v:.3}</text>"#,
            sx(v),
            sy(0.0) + 30.0
        );
        let _ = write!(
            ticks,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="10" text-anchor="end">{v:.3}</text>"#,
            sx(0.0) - 6.0,
            sy(v) + 3.0
        );
    }
    w(&mut s, ticks);
    w(&mut s, format!(r#"<polyline points="{}" stroke="steelblue" fill="none" stroke-dasharray="4 3"/>"#, curve.join(" ")));
    for (id, p) in img.iter() {
        w(
            &mut s,
            format!(
                r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="crimson"><title>{}</title></circle>"#,
                sx(p[0]),
                sy(p[1]),
                escape(id)
            ),
        );
    }
    w(&mut s, "</svg>".to_string());
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Prints to stdout; a closed pipe ends output quietly.
pub fn out(text: &str) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}
