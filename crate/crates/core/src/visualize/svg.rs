//! Hand-written SVG. Coordinates are printed with two decimals so identical
//! inputs give byte-identical files.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::VisualizeError;
use crate::{BEND_CHANNELS, PITCH_CHANNEL, ROLL_CHANNEL, SENSOR_COUNT};

/// Fixed geometry and typography of the time-series plots.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub width: f64,
    pub height: f64,
    pub margin_left: f64,
    pub margin_right: f64,
    pub font_family: &'static str,
    pub font_size: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            width: 640.0,
            height: 480.0,
            margin_left: 64.0,
            margin_right: 72.0,
            font_family: "DejaVu Sans, Arial, sans-serif",
            font_size: 12.0,
        }
    }
}

struct Series {
    col: usize,
    label: &'static str,
    color: &'static str,
    dash: Option<&'static str>,
}

const FINGERS: [Series; 5] = [
    Series {
        col: 0,
        label: "T",
        color: "#1f77b4",
        dash: None,
    },
    Series {
        col: 1,
        label: "I",
        color: "#ff7f0e",
        dash: None,
    },
    Series {
        col: 2,
        label: "M",
        color: "#2ca02c",
        dash: None,
    },
    Series {
        col: 3,
        label: "R",
        color: "#d62728",
        dash: None,
    },
    Series {
        col: 4,
        label: "L",
        color: "#9467bd",
        dash: None,
    },
];

const PALM: [Series; 5] = [
    Series {
        col: ROLL_CHANNEL,
        label: "roll",
        color: "#000000",
        dash: Some("6,3"),
    },
    Series {
        col: PITCH_CHANNEL,
        label: "pitch",
        color: "#000000",
        dash: Some("1.5,3"),
    },
    Series {
        col: 5,
        label: "X",
        color: "#8c564b",
        dash: None,
    },
    Series {
        col: 6,
        label: "Y",
        color: "#e377c2",
        dash: None,
    },
    Series {
        col: 7,
        label: "Z",
        color: "#17becf",
        dash: None,
    },
];

/// Formats a coordinate; never prints a negative zero.
pub(crate) fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

pub(crate) fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub(crate) fn header(out: &mut String, width: f64, height: f64, style: &PlotStyle) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="{f}" font-size="{fs}">"#,
        w = num(width),
        h = num(height),
        f = style.font_family,
        fs = num(style.font_size),
    )
    .unwrap();
    writeln!(
        out,
        r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##,
        num(width),
        num(height)
    )
    .unwrap();
}

fn check_shape(values: &DMatrix<f64>) -> Result<(), VisualizeError> {
    if values.ncols() != SENSOR_COUNT {
        return Err(VisualizeError::BadShape(format!(
            "expected {SENSOR_COUNT} channels, got {}",
            values.ncols()
        )));
    }
    if values.nrows() == 0 {
        return Err(VisualizeError::BadShape("no samples".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(VisualizeError::BadShape("non-finite value".into()));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn panel(out: &mut String, values: &DMatrix<f64>, series: &[Series], x0: f64, y0: f64, w: f64, h: f64, heading: &str) {
    let n = values.nrows();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for v in values.column(s.col).iter() {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    if hi - lo < 1e-12 {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let px = |t: usize| {
        if n == 1 {
            x0 + w / 2.0
        } else {
            x0 + w * t as f64 / (n - 1) as f64
        }
    };
    let py = |v: f64| y0 + h - (v - lo) / (hi - lo) * h;

    writeln!(
        out,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444444" stroke-width="1"/>"##,
        num(x0),
        num(y0),
        num(w),
        num(h)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}">{}</text>"#,
        num(x0),
        num(y0 - 6.0),
        escape(heading)
    )
    .unwrap();
    if lo < 0.0 && hi > 0.0 {
        writeln!(
            out,
            r##"<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="#bbbbbb" stroke-width="0.5"/>"##,
            x1 = num(x0),
            x2 = num(x0 + w),
            y = num(py(0.0))
        )
        .unwrap();
    }
    for v in [lo, hi] {
        writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            num(x0 - 4.0),
            num(py(v) + 4.0),
            num(v)
        )
        .unwrap();
    }
    for (t, anchor) in [(0, "start"), (n - 1, "end")] {
        writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="{anchor}">{}</text>"#,
            num(px(t)),
            num(y0 + h + 14.0),
            t + 1
        )
        .unwrap();
    }
    for s in series {
        let points: Vec<String> = (0..n)
            .map(|t| format!("{},{}", num(px(t)), num(py(values[(t, s.col)]))))
            .collect();
        let dash = s
            .dash
            .map(|d| format!(r#" stroke-dasharray="{d}""#))
            .unwrap_or_default();
        writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            points.join(" "),
            s.color
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{}">{}</text>"#,
            num(px(n - 1) + 6.0),
            num(py(values[(n - 1, s.col)]) + 4.0),
            s.color,
            s.label
        )
        .unwrap();
    }
}

/// Plot body (everything inside the root element), drawn at `(dx, 0)`.
fn plot_body(out: &mut String, values: &DMatrix<f64>, title: &str, style: &PlotStyle, dx: f64) {
    let w = style.width - style.margin_left - style.margin_right;
    let x0 = dx + style.margin_left;
    let panel_h = (style.height - 110.0) / 2.0;
    writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="{}">{}</text>"#,
        num(dx + style.width / 2.0),
        num(style.font_size + 2.0),
        escape(title)
    )
    .unwrap();
    debug_assert_eq!(BEND_CHANNELS.len(), FINGERS.len());
    panel(out, values, &FINGERS, x0, 50.0, w, panel_h, "finger bend");
    panel(
        out,
        values,
        &PALM,
        x0,
        80.0 + panel_h,
        w,
        panel_h,
        "palm orientation and position",
    );
}

/// Two stacked panels: finger bends (T, I, M, R, L) on top; roll (dashed),
/// pitch (dotted) and X, Y, Z position below.
pub fn render_timeseries(values: &DMatrix<f64>, title: &str, style: &PlotStyle) -> Result<String, VisualizeError> {
    check_shape(values)?;
    let mut out = String::new();
    header(&mut out, style.width, style.height, style);
    plot_body(&mut out, values, title, style, 0.0);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Original and reconstruction side by side, each in the two-panel layout.
pub fn render_comparison(
    original: &DMatrix<f64>,
    reconstruction: &DMatrix<f64>,
    left_title: &str,
    right_title: &str,
    style: &PlotStyle,
) -> Result<String, VisualizeError> {
    check_shape(original)?;
    check_shape(reconstruction)?;
    let mut out = String::new();
    header(&mut out, 2.0 * style.width, style.height, style);
    plot_body(&mut out, original, left_title, style, 0.0);
    plot_body(&mut out, reconstruction, right_title, style, style.width);
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_is_flat_and_deterministic() {
        let z = DMatrix::zeros(20, SENSOR_COUNT);
        let a = render_timeseries(&z, "zeros", &PlotStyle::default()).unwrap();
        let b = render_timeseries(&z, "zeros", &PlotStyle::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<polyline").count(), 10);
        for line in a.lines().filter(|l| l.starts_with("<polyline")) {
            let pts = line.split('"').nth(1).unwrap();
            let ys: std::collections::HashSet<&str> = pts.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
            assert_eq!(ys.len(), 1, "line is not flat: {line}");
        }
        assert!(!a.contains("-0.00"));
    }

    #[test]
    fn labels_and_dashes() {
        let v = DMatrix::from_fn(5, SENSOR_COUNT, |t, s| (t + s) as f64);
        let svg = render_timeseries(&v, "a < b & c", &PlotStyle::default()).unwrap();
        for label in ["T", "I", "M", "R", "L", "roll", "pitch", "X", "Y", "Z"] {
            assert!(svg.contains(&format!(">{label}</text>")), "missing {label}");
        }
        assert!(svg.contains(r#"stroke-dasharray="6,3""#));
        assert!(svg.contains(r#"stroke-dasharray="1.5,3""#));
        assert!(svg.contains("a &lt; b &amp; c"));
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn nine_columns_is_bad_shape() {
        let v = DMatrix::zeros(4, 9);
        assert!(matches!(
            render_timeseries(&v, "", &PlotStyle::default()),
            Err(VisualizeError::BadShape(_))
        ));
    }

    #[test]
    fn comparison_is_double_width() {
        let v = DMatrix::from_fn(4, SENSOR_COUNT, |t, s| (t * s) as f64);
        let svg = render_comparison(&v, &v, "a", "b", &PlotStyle::default()).unwrap();
        assert!(svg.contains(r#"width="1280.00""#));
        assert_eq!(svg.matches("<polyline").count(), 20);
    }

    #[test]
    fn num_has_no_negative_zero() {
        assert_eq!(num(-0.0), "0.00");
        assert_eq!(num(-0.001), "0.00");
        assert_eq!(num(-1.234), "-1.23");
    }
}
