//! CSV rows, the `.meta` sidecar and SVG plots.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::CliError;

pub const HEADER: [&str; 11] =
    ["family", "n", "L", "gamma", "delta", "target", "estimate", "stderr", "samples", "seed", "method"];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub family: String,
    pub n: usize,
    pub l: usize,
    pub gamma: f64,
    pub delta: f64,
    pub target: String,
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    pub method: String,
}

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResultRow {
    pub fn record(&self) -> [String; 11] {
        [
            self.family.clone(),
            self.n.to_string(),
            self.l.to_string(),
            fmt_f64(self.gamma),
            fmt_f64(self.delta),
            self.target.clone(),
            fmt_f64(self.estimate),
            fmt_f64(self.stderr),
            self.samples.to_string(),
            self.seed.to_string(),
            self.method.clone(),
        ]
    }

    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        (&self.family, self.n, self.l, &self.target)
            .cmp(&(&other.family, other.n, other.l, &other.target))
            .then(self.delta.total_cmp(&other.delta))
            .then(self.gamma.total_cmp(&other.gamma))
            .then(self.method.cmp(&other.method))
    }
}

pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| a.sort_key_cmp(b));
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(HEADER).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record(r.record()).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let header = r.headers().map_err(|e| io_err(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(CliError::Validation(format!("{}: unexpected header", path.display())));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        let bad = |field: &str| CliError::Validation(format!("{} row {}: bad {field}", path.display(), i + 1));
        let int = |k: usize, name: &str| rec[k].parse::<usize>().map_err(|_| bad(name));
        let float = |k: usize, name: &str| rec[k].parse::<f64>().map_err(|_| bad(name));
        rows.push(ResultRow {
            family: rec[0].to_string(),
            n: int(1, "n")?,
            l: int(2, "L")?,
            gamma: float(3, "gamma")?,
            delta: float(4, "delta")?,
            target: rec[5].to_string(),
            estimate: float(6, "estimate")?,
            stderr: float(7, "stderr")?,
            samples: int(8, "samples")?,
            seed: rec[9].parse().map_err(|_| bad("seed"))?,
            method: rec[10].to_string(),
        });
    }
    Ok(rows)
}

/// `<out>.meta`, next to the CSV.
pub fn sidecar_path(out: &Path, ext: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

pub fn write_meta(path: &Path, entries: &BTreeMap<String, String>, notes: &[String]) -> Result<(), CliError> {
    let mut text = String::new();
    for (k, v) in entries {
        text.push_str(&format!("{k}={v}\n"));
    }
    for note in notes {
        text.push_str(&format!("note={note}\n"));
    }
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Named series of `(x, y)` points for a log-y line plot.
#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub series: BTreeMap<String, Vec<(f64, f64)>>,
}

impl Plot {
    pub fn push(&mut self, series: impl Into<String>, x: f64, y: f64) {
        self.series.entry(series.into()).or_default().push((x, y));
    }
}

pub fn write_svg(path: &Path, plot: &Plot) -> Result<(), CliError> {
    let positive: Vec<(f64, f64)> =
        plot.series.values().flatten().copied().filter(|p| p.1 > 0.0 && p.1.is_finite()).collect();
    if positive.is_empty() {
        return Ok(());
    }
    let (mut x0, mut x1) = positive.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.0), a.1.max(p.0)));
    let (y0, y1) = positive.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.1), a.1.max(p.1)));
    if x0 == x1 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    let (y0, y1) = if y0 == y1 { (y0 / 2.0, y1 * 2.0) } else { (y0, y1) };
    let draw = || -> Result<(), Box<dyn std::error::Error>> {
        let root = SVGBackend::new(path, (900, 600)).into_drawing_area();
        root.fill(&WHITE)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(&plot.title, ("sans-serif", 20))
            .margin(10)
            .x_label_area_size(40)
            .y_label_area_size(70)
            .build_cartesian_2d(x0..x1, (y0..y1).log_scale())?;
        chart.configure_mesh().x_desc(plot.x_label.as_str()).y_desc("estimate").draw()?;
        for (i, (name, pts)) in plot.series.iter().enumerate() {
            let color = Palette99::pick(i).to_rgba();
            let pts: Vec<(f64, f64)> = pts.iter().copied().filter(|p| p.1 > 0.0 && p.1.is_finite()).collect();
            chart
                .draw_series(LineSeries::new(pts, color.stroke_width(2)))?
                .label(name.as_str())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
        }
        chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw()?;
        root.present()?;
        Ok(())
    };
    draw().map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(family: &str, n: usize, l: usize, target: &str) -> ResultRow {
        ResultRow {
            family: family.into(),
            n,
            l,
            gamma: 0.0,
            delta: 0.0,
            target: target.into(),
            estimate: 0.1,
            stderr: 0.0,
            samples: 1,
            seed: 0,
            method: "mc".into(),
        }
    }

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn rows_sort_by_key() {
        let mut rows = vec![row("b", 1, 1, "x"), row("a", 10, 1, "x"), row("a", 2, 4, "x"), row("a", 2, 4, "cost")];
        sort_rows(&mut rows);
        let keys: Vec<(String, usize, usize, String)> =
            rows.iter().map(|r| (r.family.clone(), r.n, r.l, r.target.clone())).collect();
        assert_eq!(keys[0], ("a".into(), 2, 4, "cost".into()));
        assert_eq!(keys[2], ("a".into(), 10, 1, "x".into()));
        assert_eq!(keys[3].0, "b");
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let rows = vec![row("a", 2, 4, "cost")];
        write_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("family,n,L,gamma,delta,target,estimate,stderr,samples,seed,method\n"));
        assert_eq!(read_csv(&path).unwrap(), rows);
    }
}
