//! CSV tables and single-panel log-log SVG plots.

use super::fit::RateFit;
use super::inequality::InequalityReport;
use super::studies::ExperimentRecord;
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const TRUNCATION_HEADER: &str = "Y,error_sq,energy_sq,trace_sq,wall_time_s";
pub const FIT_HEADER: &str = "slope,intercept,residual,mu_expected,pass";
pub const INEQUALITY_HEADER: &str = "name,trials,max_ratio,bound,violated";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Svg,
    Both,
}

impl ReportFormat {
    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    pub fn svg(self) -> bool {
        matches!(self, Self::Svg | Self::Both)
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "svg" => Ok(Self::Svg),
            "both" => Ok(Self::Both),
            other => Err(Error::Config(format!("unknown format {other:?} (csv, svg, both)"))),
        }
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn records_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(TRUNCATION_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{},{:e},{:e},{:e},{:.6}", r.y, r.error_sq, r.norms.energy_sq, r.norms.trace_sq, r.wall_time);
    }
    out
}

pub fn fit_csv(fit: &RateFit, pass: bool) -> String {
    let mu = fit.mu_expected.map(|m| m.mu.to_string()).unwrap_or_default();
    format!(
        "{FIT_HEADER}\n{},{},{:e},{mu},{}\n",
        fit.slope,
        fit.intercept,
        fit.residual,
        if pass { "PASS" } else { "FAIL" }
    )
}

pub fn inequality_csv(reports: &[InequalityReport]) -> String {
    let mut out = String::from(INEQUALITY_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "{},{},{:e},{:e},{}", r.name, r.trials, r.max_ratio, r.bound, r.violated);
    }
    out
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const M: f64 = 60.0;

/// Log-log plot of `points` with an optional guide `c x^{-mu}` through the first point.
pub fn loglog_svg(title: &str, points: &[(f64, f64)], mu: Option<f64>) -> String {
    let pts: Vec<(f64, f64)> = points.iter().copied().filter(|(x, y)| *x > 0.0 && *y > 0.0).collect();
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n\
         <rect x=\"{M}\" y=\"{M}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        W / 2.0,
        escape(title),
        W - 2.0 * M,
        H - 2.0 * M
    );
    if pts.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let lx: Vec<f64> = pts.iter().map(|p| p.0.log10()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.log10()).collect();
    let mut guide: Vec<f64> = Vec::new();
    if let (Some(mu), true) = (mu, pts.len() >= 2) {
        guide = lx.iter().map(|x| ly[0] - mu * (x - lx[0])).collect();
    }
    let (x0, x1) = bounds(&lx);
    let (y0, y1) = bounds(&ly.iter().chain(&guide).copied().collect::<Vec<_>>());
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">log10 Y ({x0:.2} .. {x1:.2})</text>",
        W / 2.0,
        H - 20.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\">log10 value ({y0:.2} .. {y1:.2})</text>",
        H / 2.0,
        H / 2.0
    );
    if pts.len() >= 2 {
        let line: Vec<String> = lx.iter().zip(&ly).map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        let _ = writeln!(svg, "<polyline class=\"data\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"{}\"/>", line.join(" "));
    }
    for (x, y) in lx.iter().zip(&ly) {
        let _ = writeln!(svg, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#1f77b4\"/>", sx(*x), sy(*y));
    }
    if !guide.is_empty() {
        let n = lx.len() - 1;
        let _ = writeln!(
            svg,
            "<line class=\"guide\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>",
            sx(lx[0]),
            sy(guide[0]),
            sx(lx[n]),
            sy(guide[n])
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `truncation.csv` and `fit.csv` and/or `truncation.svg` into `dir`.
pub fn write_report(
    dir: &Path,
    records: &[ExperimentRecord],
    fit: Option<(&RateFit, bool)>,
    reports: &[InequalityReport],
    format: ReportFormat,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &body)?;
        written.push(path);
        Ok(())
    };
    if format.csv() {
        put("truncation.csv", records_csv(records))?;
        if let Some((fit, pass)) = fit {
            put("fit.csv", fit_csv(fit, pass))?;
        }
        if !reports.is_empty() {
            put("inequalities.csv", inequality_csv(reports))?;
        }
    }
    if format.svg() {
        let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.y, r.error_sq)).collect();
        let mu = fit.and_then(|(f, _)| f.mu_expected).map(|m| m.mu);
        put("truncation.svg", loglog_svg("squared truncation error", &pts, mu))?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::FieldNorms;

    fn rec(y: f64) -> ExperimentRecord {
        let e = y.powf(-1.5);
        ExperimentRecord { y, error_sq: e, norms: FieldNorms::new(e, 0.0, 1.0), wall_time: 0.0 }
    }

    #[test]
    fn empty_records_give_header_only() {
        assert_eq!(records_csv(&[]), format!("{TRUNCATION_HEADER}\n"));
    }

    #[test]
    fn svg_structure() {
        let one = loglog_svg("t", &[(1.0, 1.0)], Some(1.0));
        assert_eq!(one.matches("<polyline").count(), 0);
        assert_eq!(one.matches("class=\"guide\"").count(), 0);
        let recs: Vec<_> = (0..7).map(|k| rec(2f64.powi(k))).collect();
        assert_eq!(records_csv(&recs).lines().count(), 8);
        let pts: Vec<_> = recs.iter().map(|r| (r.y, r.error_sq)).collect();
        let svg = loglog_svg("t", &pts, Some(1.5));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("class=\"guide\"").count(), 1);
    }
}
