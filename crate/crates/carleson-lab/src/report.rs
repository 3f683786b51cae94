//! Experiment reports: deterministic CSV emission and a minimal static SVG
//! renderer for decay plots.
//!
//! CSV layout: comment lines carrying the run configuration (seed included),
//! then the fixed header `experiment,param1,param2,param3,value,fit_slope,
//! fit_residual,pass`. Floats are serialized with 17 significant digits so a
//! parse round-trips bit-identically; rows are sorted by experiment and
//! parameters before emission so thread scheduling cannot reorder output.

use std::fmt::Write as _;
use std::path::Path;

/// One measured row. Parameters are `name=value` strings, at most three.
#[derive(Debug, Clone)]
pub struct Row {
    pub experiment: String,
    pub params: Vec<String>,
    pub value: f64,
    pub fit_slope: Option<f64>,
    pub fit_residual: Option<f64>,
    pub pass: Option<bool>,
}

impl Row {
    pub fn new(experiment: &str, params: &[String], value: f64) -> Self {
        assert!(params.len() <= 3, "schema carries at most three parameter columns");
        Self {
            experiment: experiment.to_string(),
            params: params.to_vec(),
            value,
            fit_slope: None,
            fit_residual: None,
            pass: None,
        }
    }

    pub fn with_fit(mut self, slope: f64, residual: f64) -> Self {
        self.fit_slope = Some(slope);
        self.fit_residual = Some(residual);
        self
    }

    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = Some(pass);
        self
    }
}

/// Serialize a float with 17 significant digits (exact f64 round-trip).
pub fn format_float(x: f64) -> String {
    format!("{:.16e}", x)
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    /// Key-value pairs echoed into the CSV header comments; the seed and the
    /// grid parameters land here so every row is traceable.
    pub config: Vec<(String, String)>,
    pub rows: Vec<Row>,
}

impl ExperimentReport {
    pub fn new(config: Vec<(String, String)>) -> Self {
        Self { config, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: ExperimentReport) {
        self.rows.extend(other.rows);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass.unwrap_or(true))
    }

    pub fn failing_rows(&self) -> Vec<&Row> {
        self.rows.iter().filter(|r| r.pass == Some(false)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| {
            (&a.experiment, &a.params)
                .cmp(&(&b.experiment, &b.params))
        });
        let mut out = String::new();
        for (k, v) in &self.config {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str("experiment,param1,param2,param3,value,fit_slope,fit_residual,pass\n");
        for r in &rows {
            let mut params = r.params.clone();
            params.resize(3, String::new());
            let slope = r.fit_slope.map(format_float).unwrap_or_default();
            let residual = r.fit_residual.map(format_float).unwrap_or_default();
            let pass = r
                .pass
                .map(|p| if p { "true".to_string() } else { "false".to_string() })
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.experiment,
                params[0],
                params[1],
                params[2],
                format_float(r.value),
                slope,
                residual,
                pass
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }

    /// Static log-log scatter with the fitted line for one experiment's rows,
    /// reading the x-coordinate from the named parameter. Returns None (with
    /// no file written) when fewer than two rows carry usable coordinates.
    pub fn to_svg(&self, experiment: &str, x_param: &str) -> Option<String> {
        let mut points: Vec<(f64, f64)> = Vec::new();
        let mut fit: Option<(f64, f64)> = None;
        for r in self.rows.iter().filter(|r| r.experiment == experiment) {
            let x = r.params.iter().find_map(|p| {
                p.strip_prefix(&format!("{x_param}="))
                    .and_then(|v| v.parse::<f64>().ok())
            });
            if let Some(x) = x {
                if x > 0.0 && r.value > 0.0 {
                    points.push((x.log2(), r.value.log2()));
                    if let (Some(s), Some(res)) = (r.fit_slope, r.fit_residual) {
                        let _ = res;
                        // intercept from the point itself
                        fit = Some((s, r.value.log2() - s * x.log2()));
                    }
                }
            }
        }
        if points.len() < 2 {
            return None;
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (w, h, margin) = (640.0, 420.0, 50.0);
        let xmin = points.first().unwrap().0;
        let xmax = points.last().unwrap().0;
        let ymin = points.iter().map(|p| p.1).fold(f64::MAX, f64::min);
        let ymax = points.iter().map(|p| p.1).fold(f64::MIN, f64::max);
        let xspan = (xmax - xmin).max(1e-9);
        let yspan = (ymax - ymin).max(1e-9);
        let px = |x: f64| margin + (x - xmin) / xspan * (w - 2.0 * margin);
        let py = |y: f64| h - margin - (y - ymin) / yspan * (h - 2.0 * margin);
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
        );
        let _ = writeln!(svg, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{} (log2 {} vs log2 value)</text>",
            margin, experiment, x_param
        );
        // axes
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            margin, h - margin, w - margin, h - margin
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            margin, margin, margin, h - margin
        );
        if let Some((slope, intercept)) = fit {
            let y0 = slope * xmin + intercept;
            let y1 = slope * xmax + intercept;
            let _ = writeln!(
                svg,
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#b22\" stroke-width=\"1.5\"/>",
                px(xmin),
                py(y0),
                px(xmax),
                py(y1)
            );
        }
        for (x, y) in &points {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"#246\"/>",
                px(*x),
                py(*y)
            );
        }
        let _ = writeln!(svg, "</svg>");
        Some(svg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let rep = ExperimentReport::new(vec![("seed".into(), "7".into())]);
        let csv = rep.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("# seed=7"));
        assert!(lines[1].starts_with("experiment,param1"));
    }

    #[test]
    fn float_round_trip_is_bit_identical() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 2.0f64.powi(-40), -1.5e300, 0.1 + 0.2] {
            let s = format_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn rows_are_sorted_deterministically() {
        let mut rep = ExperimentReport::new(vec![]);
        rep.push(Row::new("b", &["r=2".into()], 1.0));
        rep.push(Row::new("a", &["r=9".into()], 2.0));
        rep.push(Row::new("a", &["r=1".into()], 3.0));
        let csv1 = rep.to_csv();
        rep.rows.reverse();
        let csv2 = rep.to_csv();
        assert_eq!(csv1, csv2);
        let body: Vec<&str> = csv1.lines().skip(1).collect();
        assert!(body[0].starts_with("a,r=1"));
        assert!(body[2].starts_with("b,r=2"));
    }

    #[test]
    fn svg_needs_two_points() {
        let mut rep = ExperimentReport::new(vec![]);
        rep.push(Row::new("decay", &["r=16".into()], 0.5));
        assert!(rep.to_svg("decay", "r").is_none());
        rep.push(Row::new("decay", &["r=32".into()], 0.25));
        let svg = rep.to_svg("decay", "r").unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("circle"));
        // deterministic bytes
        assert_eq!(svg, rep.to_svg("decay", "r").unwrap());
    }
}
