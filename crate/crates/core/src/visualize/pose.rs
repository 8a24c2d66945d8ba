//! Schematic hand glyphs for selected frames of a remapped eigengesture.
//!
//! The glyph is a flat front view: a palm rectangle rotated by roll, five
//! three-segment fingers whose total curl follows the bend channels, and a
//! small side-view inset for pitch. Angles are taken relative to the neutral
//! pose, so the neutral pose draws straight fingers at their splay angles on
//! a level palm. Position channels are not drawn.

use std::fmt::Write as _;

use super::svg::{escape, header, num, PlotStyle};
use super::{RemappedEigengesture, VisualizeError};
use crate::{BEND_CHANNELS, PITCH_CHANNEL, ROLL_CHANNEL, SENSOR_COUNT};

/// Finger directions at the neutral pose, degrees clockwise from straight up
/// (thumb, index, middle, ring, little).
pub const NEUTRAL_SPLAY_DEG: [f64; 5] = [-55.0, -12.0, 0.0, 10.0, 22.0];
/// Total curl per studentised unit of bend away from neutral.
pub const CURL_DEG_PER_UNIT: f64 = 30.0;
/// Largest total curl drawn.
pub const MAX_CURL_DEG: f64 = 240.0;
/// Negative bends draw as hyperextension, up to this many degrees.
pub const MAX_HYPEREXTENSION_DEG: f64 = 30.0;
pub const ROLL_DEG_PER_UNIT: f64 = 25.0;
pub const PITCH_DEG_PER_UNIT: f64 = 25.0;
pub const MAX_TILT_DEG: f64 = 90.0;

const CELL_W: f64 = 150.0;
const CELL_H: f64 = 190.0;
const TOP: f64 = 34.0;
const PALM_W: f64 = 54.0;
const PALM_H: f64 = 60.0;
/// Finger bases relative to the palm centre.
const FINGER_BASE: [(f64, f64); 5] = [(-27.0, 2.0), (-19.5, -30.0), (-6.5, -30.0), (6.5, -30.0), (19.5, -30.0)];
const PHALANX: [[f64; 3]; 5] = [
    [16.0, 13.0, 10.0],
    [20.0, 14.0, 10.0],
    [22.0, 15.0, 11.0],
    [20.0, 14.0, 10.0],
    [15.0, 11.0, 8.0],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandAngles {
    /// Total curl per finger in degrees; negative is hyperextension.
    pub curl_deg: [f64; 5],
    pub roll_deg: f64,
    pub pitch_deg: f64,
}

/// Maps a pose vector to glyph angles, relative to `neutral`.
pub fn pose_angles(pose: &[f64], neutral: &[f64]) -> HandAngles {
    let mut curl_deg = [0.0; 5];
    for (f, s) in BEND_CHANNELS.enumerate() {
        curl_deg[f] = (CURL_DEG_PER_UNIT * (pose[s] - neutral[s])).clamp(-MAX_HYPEREXTENSION_DEG, MAX_CURL_DEG);
    }
    let tilt = |s: usize, gain: f64| (gain * (pose[s] - neutral[s])).clamp(-MAX_TILT_DEG, MAX_TILT_DEG);
    HandAngles {
        curl_deg,
        roll_deg: tilt(ROLL_CHANNEL, ROLL_DEG_PER_UNIT),
        pitch_deg: tilt(PITCH_CHANNEL, PITCH_DEG_PER_UNIT),
    }
}

/// SVG group drawing one hand in a cell whose top-left corner is `(x, y)`.
pub fn hand_glyph(angles: &HandAngles, x: f64, y: f64, label: &str) -> String {
    let mut out = String::new();
    let (cx, cy) = (x + CELL_W / 2.0, y + 110.0);
    out.push_str("<g>\n");
    writeln!(
        out,
        r##"<g transform="rotate({} {} {})">"##,
        num(angles.roll_deg),
        num(cx),
        num(cy)
    )
    .unwrap();
    writeln!(
        out,
        r##"<rect x="{}" y="{}" width="{}" height="{}" rx="8" fill="#f3d9c4" stroke="#5a3e2b" stroke-width="1.5"/>"##,
        num(cx - PALM_W / 2.0),
        num(cy - PALM_H / 2.0),
        num(PALM_W),
        num(PALM_H)
    )
    .unwrap();
    for f in 0..5 {
        let (bx, by) = FINGER_BASE[f];
        let (mut px, mut py) = (cx + bx, cy + by);
        let mut points = vec![format!("{},{}", num(px), num(py))];
        for (j, len) in PHALANX[f].iter().enumerate() {
            let theta = (NEUTRAL_SPLAY_DEG[f] + angles.curl_deg[f] * (j + 1) as f64 / 3.0).to_radians();
            px += len * theta.sin();
            py -= len * theta.cos();
            points.push(format!("{},{}", num(px), num(py)));
        }
        writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#5a3e2b" stroke-width="6" stroke-linecap="round" stroke-linejoin="round"/>"##,
            points.join(" ")
        )
        .unwrap();
    }
    out.push_str("</g>\n");

    // Pitch inset: the palm seen from the side.
    let (ix, iy) = (x + CELL_W - 22.0, y + 22.0);
    let p = angles.pitch_deg.to_radians();
    writeln!(
        out,
        r##"<circle cx="{}" cy="{}" r="14" fill="none" stroke="#999999" stroke-width="0.75"/>"##,
        num(ix),
        num(iy)
    )
    .unwrap();
    writeln!(
        out,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#5a3e2b" stroke-width="3" stroke-linecap="round"/>"##,
        num(ix - 11.0 * p.cos()),
        num(iy + 11.0 * p.sin()),
        num(ix + 11.0 * p.cos()),
        num(iy - 11.0 * p.sin())
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        num(cx),
        num(y + CELL_H - 6.0),
        escape(label)
    )
    .unwrap();
    out.push_str("</g>\n");
    out
}

/// One row of glyphs, one per selected 1-based frame.
pub fn render_pose_frames(remapped: &RemappedEigengesture, frames: &[usize]) -> Result<String, VisualizeError> {
    let (samples, sensors) = remapped.values.shape();
    if sensors != SENSOR_COUNT || remapped.neutral_pose.len() != SENSOR_COUNT {
        return Err(VisualizeError::BadShape(format!(
            "expected {SENSOR_COUNT} channels, got {sensors}"
        )));
    }
    if let Some(&frame) = frames.iter().find(|&&f| f == 0 || f > samples) {
        return Err(VisualizeError::FrameOutOfRange { frame, samples });
    }
    let style = PlotStyle::default();
    let width = CELL_W * frames.len().max(1) as f64;
    let mut out = String::new();
    header(&mut out, width, CELL_H + TOP, &style);
    writeln!(
        out,
        r#"<text x="8" y="20">eigengesture {} (sigma {})</text>"#,
        remapped.source.index,
        num(remapped.source.singular_value)
    )
    .unwrap();
    for (i, &frame) in frames.iter().enumerate() {
        let pose: Vec<f64> = remapped.values.row(frame - 1).iter().copied().collect();
        let angles = pose_angles(&pose, &remapped.neutral_pose);
        out.push_str(&hand_glyph(&angles, CELL_W * i as f64, TOP, &format!("t = {frame}")));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::Eigengesture;
    use nalgebra::DMatrix;

    fn remapped(values: DMatrix<f64>, neutral: Vec<f64>) -> RemappedEigengesture {
        RemappedEigengesture {
            source: Eigengesture {
                index: 1,
                shape: values.clone(),
                singular_value: 2.0,
                energy_fraction: 0.5,
            },
            scale: vec![1.0; SENSOR_COUNT],
            offset: vec![0.0; SENSOR_COUNT],
            values,
            neutral_pose: neutral,
            flat_channels: vec![],
        }
    }

    #[test]
    fn neutral_is_straight_and_level() {
        let neutral = vec![0.3; SENSOR_COUNT];
        let a = pose_angles(&neutral, &neutral);
        assert_eq!(a.curl_deg, [0.0; 5]);
        assert_eq!((a.roll_deg, a.pitch_deg), (0.0, 0.0));
        let glyph = hand_glyph(&a, 0.0, 0.0, "n");
        assert!(glyph.contains(r#"rotate(0.00 "#));
        // Middle finger points straight up: constant x along its polyline.
        let middle = glyph.lines().filter(|l| l.starts_with("<polyline")).nth(2).unwrap();
        let xs: std::collections::HashSet<&str> = middle
            .split('"')
            .nth(1)
            .unwrap()
            .split(' ')
            .map(|p| p.split(',').next().unwrap())
            .collect();
        assert_eq!(xs.len(), 1);
    }

    #[test]
    fn clamps() {
        let neutral = vec![0.0; SENSOR_COUNT];
        let mut pose = vec![0.0; SENSOR_COUNT];
        pose[0] = 100.0;
        pose[1] = -100.0;
        pose[ROLL_CHANNEL] = 100.0;
        let a = pose_angles(&pose, &neutral);
        assert_eq!(a.curl_deg[0], MAX_CURL_DEG);
        assert_eq!(a.curl_deg[1], -MAX_HYPEREXTENSION_DEG);
        assert_eq!(a.roll_deg, MAX_TILT_DEG);
    }

    #[test]
    fn first_frame_matches_neutral_glyph() {
        let neutral: Vec<f64> = (0..SENSOR_COUNT).map(|s| s as f64 * 0.1).collect();
        let mut values = DMatrix::from_fn(6, SENSOR_COUNT, |t, s| (t * s) as f64 * 0.2);
        values.set_row(0, &nalgebra::RowDVector::from_vec(neutral.clone()));
        let svg = render_pose_frames(&remapped(values, neutral.clone()), &[1]).unwrap();
        let glyph = hand_glyph(&pose_angles(&neutral, &neutral), 0.0, TOP, "t = 1");
        assert!(svg.contains(&glyph));
    }

    #[test]
    fn frame_range() {
        let r = remapped(DMatrix::zeros(4, SENSOR_COUNT), vec![0.0; SENSOR_COUNT]);
        assert!(matches!(
            render_pose_frames(&r, &[0]),
            Err(VisualizeError::FrameOutOfRange { frame: 0, samples: 4 })
        ));
        assert!(matches!(
            render_pose_frames(&r, &[2, 5]),
            Err(VisualizeError::FrameOutOfRange { frame: 5, .. })
        ));
        let svg = render_pose_frames(&r, &[1, 2, 3, 4]).unwrap();
        assert_eq!(svg.matches("t = ").count(), 4);
    }
}
