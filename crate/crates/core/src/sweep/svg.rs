//! Minimal SVG line plot: negativity solid, CCNR dashed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{SweepError, SweepRecord};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            title: "Negativity and CCNR".to_string(),
            x_label: "t/T".to_string(),
            y_label: "N, CCNR".to_string(),
        }
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    pix_lo: f64,
    pix_hi: f64,
}

impl Axis {
    fn map(&self, v: f64) -> f64 {
        self.pix_lo + (v - self.lo) / (self.hi - self.lo) * (self.pix_hi - self.pix_lo)
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn data_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (lo, hi)
}

/// Builds the SVG document for a record series.
pub fn svg_document(records: &[SweepRecord], opts: &SvgOptions) -> Result<String, SweepError> {
    if records.is_empty() {
        return Err(SweepError::EmptySweep);
    }
    let (mut x_lo, mut x_hi) = data_range(records.iter().map(|r| r.x));
    if x_hi - x_lo <= 0.0 {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    let (y_min, y_max) = data_range(records.iter().flat_map(|r| [r.negativity, r.ccnr]));
    // the zero line is always visible
    let mut y_lo = y_min.min(0.0);
    let mut y_hi = y_max.max(0.0);
    if y_hi - y_lo < 1e-12 {
        y_hi = y_lo + 1.0;
    } else {
        let pad = 0.05 * (y_hi - y_lo);
        if y_lo < 0.0 {
            y_lo -= pad;
        }
        y_hi += pad;
    }

    let xa = Axis {
        lo: x_lo,
        hi: x_hi,
        pix_lo: MARGIN_LEFT,
        pix_hi: WIDTH - MARGIN_RIGHT,
    };
    let ya = Axis {
        lo: y_lo,
        hi: y_hi,
        pix_lo: HEIGHT - MARGIN_BOTTOM,
        pix_hi: MARGIN_TOP,
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        MARGIN_TOP / 2.0 + 6.0,
        escape(&opts.title)
    );

    // frame and zero line
    let (left, right) = (xa.pix_lo, xa.pix_hi);
    let (bottom, top) = (ya.pix_lo, ya.pix_hi);
    let _ = writeln!(
        s,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    let zero = ya.map(0.0);
    let _ = writeln!(
        s,
        r##"<line x1="{left:.2}" y1="{zero:.2}" x2="{right:.2}" y2="{zero:.2}" stroke="#999999" stroke-width="0.5"/>"##
    );

    let x_step = nice_step(x_hi - x_lo);
    for v in ticks(x_lo, x_hi) {
        let px = xa.map(v);
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, bottom + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 20.0,
            tick_label(v, x_step)
        );
    }
    let y_step = nice_step(y_hi - y_lo);
    for v in ticks(y_lo, y_hi) {
        let py = ya.map(v);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="black"/>"#, left - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 8.0,
            py + 4.0,
            tick_label(v, y_step)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        HEIGHT - 15.0,
        escape(&opts.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(&opts.y_label)
    );

    let points = |f: fn(&SweepRecord) -> f64| -> String {
        records
            .iter()
            .map(|r| format!("{:.2},{:.2}", xa.map(r.x), ya.map(f(r))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(
        s,
        r##"<polyline class="negativity" fill="none" stroke="#d62728" stroke-width="1.5" points="{}"/>"##,
        points(|r| r.negativity)
    );
    let _ = writeln!(
        s,
        r##"<polyline class="ccnr" fill="none" stroke="#1f77b4" stroke-width="1.5" stroke-dasharray="6,4" points="{}"/>"##,
        points(|r| r.ccnr)
    );

    // legend
    let lx = right - 150.0;
    let ly = top + 20.0;
    let _ = writeln!(
        s,
        r##"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="#d62728" stroke-width="1.5"/>"##,
        lx + 30.0
    );
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">Negativity (N)</text>"#, lx + 38.0, ly + 4.0);
    let _ = writeln!(
        s,
        r##"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#1f77b4" stroke-width="1.5" stroke-dasharray="6,4"/>"##,
        ly + 18.0,
        lx + 30.0,
        ly + 18.0
    );
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">CCNR</text>"#, lx + 38.0, ly + 22.0);
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render_svg(records: &[SweepRecord], path: &Path, opts: &SvgOptions) -> Result<(), SweepError> {
    let doc = svg_document(records, opts)?;
    fs::write(path, doc).map_err(|source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Classification;

    fn series(n: usize, f: impl Fn(f64) -> (f64, f64)) -> Vec<SweepRecord> {
        (0..n)
            .map(|k| {
                let x = k as f64 / (n - 1) as f64;
                let (neg, ccnr) = f(x);
                SweepRecord {
                    x,
                    s: 0.0,
                    m_re: 1.0,
                    m_im: 0.0,
                    negativity: neg,
                    ccnr,
                    realignment: None,
                    classification: Classification::Undetected,
                }
            })
            .collect()
    }

    fn polyline_points(doc: &str) -> Vec<Vec<(f64, f64)>> {
        doc.lines()
            .filter(|l| l.starts_with("<polyline"))
            .map(|l| {
                let start = l.find("points=\"").unwrap() + 8;
                let end = start + l[start..].find('"').unwrap();
                l[start..end]
                    .split(' ')
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn two_polylines_with_one_vertex_per_record() {
        let recs = series(512, |x| ((x * 7.0).sin() * 0.1, 0.2 - x * 0.3));
        let doc = svg_document(&recs, &SvgOptions::default()).unwrap();
        assert_eq!(doc.matches("<polyline").count(), 2);
        let lines = polyline_points(&doc);
        assert!(lines.iter().all(|l| l.len() == 512));
        assert!(doc.contains("stroke-dasharray"));
        assert!(doc.contains("<text"));
    }

    #[test]
    fn constant_zero_is_flat_on_axis() {
        let recs = series(16, |_| (0.0, 0.0));
        let doc = svg_document(&recs, &SvgOptions::default()).unwrap();
        let zero_y = HEIGHT - MARGIN_BOTTOM;
        for line in polyline_points(&doc) {
            assert!(line.iter().all(|&(_, y)| (y - zero_y).abs() < 1e-9));
        }
    }

    #[test]
    fn title_is_escaped() {
        let opts = SvgOptions {
            title: "N & CCNR <D=0.6>".into(),
            ..Default::default()
        };
        let doc = svg_document(&series(3, |x| (x, x)), &opts).unwrap();
        assert!(doc.contains("N &amp; CCNR &lt;D=0.6&gt;"));
    }

    #[test]
    fn tick_helpers() {
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(tick_label(0.6000000000000001, 0.2), "0.6");
        assert_eq!(tick_label(-0.0, 0.05), "0.00");
    }

    #[test]
    fn empty_series_rejected() {
        assert!(matches!(svg_document(&[], &SvgOptions::default()), Err(SweepError::EmptySweep)));
    }
}
