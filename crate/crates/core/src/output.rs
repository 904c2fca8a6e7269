//! CSV and JSON artifacts: snapshots, diagnostics, convergence reports,
//! system dumps and the run manifest.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assembly::BieSystem;
use crate::error::{Error, Result};
use crate::evolution::{Diagnostics, Snapshot};
use crate::experiments::ConvergenceReport;
use crate::Point;

pub const SNAPSHOT_HEADER: &str = "t,index,x,y,v_n,kappa";
pub const REPORT_HEADER: &str = "axis,error";
pub const DIAGNOSTICS_HEADER: &str = "t,area,perimeter,center_x,center_y,d_min,d_max";

/// One data row of a snapshot file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow {
    pub t: f64,
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub v_n: f64,
    pub kappa: f64,
}

fn io(path: &Path, e: std::io::Error) -> Error {
    Error::io(path, e)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| io(path, e))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| io(path, e))
}

/// 17 significant digits: reads back to the identical `f64`.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes every snapshot into one file. Returns the number of data rows.
pub fn write_snapshots(path: &Path, snapshots: &[Snapshot]) -> Result<usize> {
    let mut w = create(path)?;
    let mut rows = 0;
    let line = |w: &mut BufWriter<File>, s: String| writeln!(w, "{s}").map_err(|e| io(path, e));
    line(&mut w, SNAPSHOT_HEADER.to_string())?;
    for snap in snapshots {
        for (i, p) in snap.points.iter().enumerate() {
            line(
                &mut w,
                format!(
                    "{},{i},{},{},{},{}",
                    num(snap.time),
                    num(p.x),
                    num(p.y),
                    num(snap.velocity[i]),
                    num(snap.curvature[i])
                ),
            )?;
            rows += 1;
        }
    }
    finish(path, w)?;
    Ok(rows)
}

pub fn write_snapshot(path: &Path, snapshot: &Snapshot) -> Result<usize> {
    write_snapshots(path, std::slice::from_ref(snapshot))
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let f = File::open(path).map_err(|e| io(path, e))?;
    BufReader::new(f)
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(|e| io(path, e)))
        .collect()
}

fn parse_err(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

fn fields<const K: usize>(path: &Path, line: usize, text: &str) -> Result<[f64; K]> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != K {
        return Err(parse_err(
            path,
            line,
            format!("expected {K} fields, found {}", parts.len()),
        ));
    }
    let mut out = [0.0; K];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p
            .parse()
            .map_err(|_| parse_err(path, line, format!("not a number: {p:?}")))?;
    }
    Ok(out)
}

pub fn read_snapshots(path: &Path) -> Result<Vec<SnapshotRow>> {
    let lines = read_lines(path)?;
    match lines.first() {
        Some((_, h)) if h.trim() == SNAPSHOT_HEADER => {}
        _ => return Err(parse_err(path, 1, format!("missing header {SNAPSHOT_HEADER:?}"))),
    }
    lines[1..]
        .iter()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            let [t, index, x, y, v_n, kappa] = fields::<6>(path, *n, l)?;
            Ok(SnapshotRow {
                t,
                index: index as usize,
                x,
                y,
                v_n,
                kappa,
            })
        })
        .collect()
}

pub fn write_diagnostics(path: &Path, history: &[Diagnostics]) -> Result<usize> {
    let mut w = create(path)?;
    writeln!(w, "{DIAGNOSTICS_HEADER}").map_err(|e| io(path, e))?;
    for d in history {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            num(d.time),
            num(d.area),
            num(d.perimeter),
            num(d.center[0]),
            num(d.center[1]),
            num(d.d_min),
            num(d.d_max)
        )
        .map_err(|e| io(path, e))?;
    }
    finish(path, w)?;
    Ok(history.len())
}

/// `axis,error` rows followed by a `# slope=<value>` footer.
pub fn write_report(path: &Path, report: &ConvergenceReport) -> Result<usize> {
    let mut w = create(path)?;
    writeln!(w, "{REPORT_HEADER}").map_err(|e| io(path, e))?;
    for (a, e) in report.axis.iter().zip(&report.errors) {
        writeln!(w, "{},{}", num(*a), num(*e)).map_err(|e| io(path, e))?;
    }
    writeln!(w, "# slope={}", num(report.slope)).map_err(|e| io(path, e))?;
    finish(path, w)?;
    Ok(report.axis.len())
}

/// Data rows and footer slope of a report file.
pub fn read_report(path: &Path) -> Result<(Vec<(f64, f64)>, f64)> {
    let lines = read_lines(path)?;
    match lines.first() {
        Some((_, h)) if h.trim() == REPORT_HEADER => {}
        _ => return Err(parse_err(path, 1, format!("missing header {REPORT_HEADER:?}"))),
    }
    let mut rows = Vec::new();
    let mut slope = None;
    for (n, l) in &lines[1..] {
        let l = l.trim();
        if let Some(v) = l.strip_prefix("# slope=") {
            slope = Some(v.parse().map_err(|_| parse_err(path, *n, "bad slope footer"))?);
        } else if !l.is_empty() && !l.starts_with('#') {
            let [a, e] = fields::<2>(path, *n, l)?;
            rows.push((a, e));
        }
    }
    let slope = slope.ok_or_else(|| parse_err(path, lines.len(), "missing slope footer"))?;
    Ok((rows, slope))
}

/// `A` as `row,col,value` triples and `b` as `index,value`. Returns the row
/// counts of the two files.
pub fn dump_system(dir: &Path, system: &BieSystem) -> Result<(PathBuf, usize, PathBuf, usize)> {
    let a_path = dir.join("A.csv");
    let b_path = dir.join("b.csv");
    let n = system.len();
    let mut w = create(&a_path)?;
    writeln!(w, "row,col,value").map_err(|e| io(&a_path, e))?;
    for i in 0..n {
        for (j, v) in system.matrix.row(i).iter().enumerate() {
            writeln!(w, "{i},{j},{}", num(*v)).map_err(|e| io(&a_path, e))?;
        }
    }
    finish(&a_path, w)?;
    let mut w = create(&b_path)?;
    writeln!(w, "index,value").map_err(|e| io(&b_path, e))?;
    for (i, v) in system.rhs.iter().enumerate() {
        writeln!(w, "{i},{}", num(*v)).map_err(|e| io(&b_path, e))?;
    }
    finish(&b_path, w)?;
    Ok((a_path, n * n, b_path, n))
}

/// `x,y` per line; blank lines, `#` comments and a non-numeric header are
/// skipped.
pub fn parse_control_points(text: &str, origin: &str) -> Result<Vec<Point>> {
    let path = Path::new(origin);
    let mut pts = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if pts.is_empty() && l.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            continue;
        }
        let [x, y] = fields::<2>(path, i + 1, l)?;
        pts.push(Point::new(x, y));
    }
    Ok(pts)
}

pub fn read_control_points(path: &Path) -> Result<Vec<Point>> {
    let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
    parse_control_points(&text, &path.display().to_string())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub rows: usize,
}

/// Record of one CLI invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub stages: Vec<StageTiming>,
    pub files: Vec<FileEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            stages: Vec::new(),
            files: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn stage(&mut self, stage: &str, seconds: f64) {
        self.stages.push(StageTiming {
            stage: stage.to_string(),
            seconds,
        });
    }

    pub fn file(&mut self, path: &Path, rows: usize) {
        self.files.push(FileEntry {
            path: path.display().to_string(),
            rows,
        });
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, self).map_err(|e| io(path, std::io::Error::other(e)))?;
        writeln!(w).map_err(|e| io(path, e))?;
        finish(path, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn control_points_parsing() {
        let pts = parse_control_points("# c\nx,y\n1,2\n\n3.5, -4\n", "mem").unwrap();
        assert_eq!(pts, vec![Point::new(1.0, 2.0), Point::new(3.5, -4.0)]);
        assert!(matches!(
            parse_control_points("1,2\n3\n", "mem"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
