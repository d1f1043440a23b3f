//! Static SVG renderings: phase-diagram heat grids and trajectory frames.

use std::fmt::Write as _;

use crate::classify::Macrostate;
use crate::dynamics::Trajectory;
use crate::state::Microstate;
use crate::sweep::{Axis, ParamName, PhaseDiagram, TrialLabel};

/// Fill color per label, in legend order.
pub const LEGEND: [(char, &str, &str); 7] = [
    ('M', "mill", "#2e8b57"),
    ('P', "pulsing mill", "#9acd32"),
    ('E', "ellipse", "#4682b4"),
    ('U', "unorganized", "#b0b0b0"),
    ('C', "circliness oscillation", "#e69f00"),
    ('S', "separated", "#c0392b"),
    ('X', "failed run", "#000000"),
];

pub fn label_color(l: TrialLabel) -> &'static str {
    let c = l.map_or('X', Macrostate::letter);
    LEGEND.iter().find(|e| e.0 == c).map(|e| e.2).expect("legend covers every label")
}

fn axis_tick(axis: &Axis, i: usize) -> String {
    let v = axis.values[i];
    match axis.param {
        ParamName::Phi => format!("{:.1}°", v.to_degrees()),
        ParamName::N => format!("{v}"),
        _ => format!("{v:.3}"),
    }
}

fn axis_title(axis: &Axis) -> &'static str {
    match axis.param {
        ParamName::Gamma => "gamma",
        ParamName::V => "v",
        ParamName::Omega => "omega",
        ParamName::Phi => "phi (deg)",
        ParamName::N => "N",
    }
}

/// Heat grid with one square per cell, `y` growing upward, and a fixed
/// legend listing every label.
pub fn phase_svg(d: &PhaseDiagram) -> String {
    const CELL: usize = 24;
    const LEFT: usize = 70;
    const TOP: usize = 20;
    const LEGEND_W: usize = 190;
    let (nx, ny) = (d.spec.nx(), d.spec.ny());
    let (gw, gh) = (nx * CELL, ny * CELL);
    let width = LEFT + gw + 20 + LEGEND_W;
    let height = (TOP + gh + 60).max(TOP + LEGEND.len() * 20 + 20);
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    for c in &d.cells {
        let x = LEFT + c.ix * CELL;
        let y = TOP + (ny - 1 - c.iy) * CELL;
        writeln!(
            s,
            r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="white"><title>{}</title></rect>"#,
            label_color(c.label),
            c.label.map_or('X', Macrostate::letter)
        )
        .unwrap();
    }
    let ax = &d.spec.axis_x;
    let step_x = nx.div_ceil(12).max(1);
    for i in (0..nx).step_by(step_x) {
        let x = LEFT + i * CELL + CELL / 2;
        writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#, TOP + gh + 14, axis_tick(ax, i)).unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + gw / 2,
        TOP + gh + 34,
        axis_title(ax)
    )
    .unwrap();
    if let Some(ay) = &d.spec.axis_y {
        let step_y = ny.div_ceil(12).max(1);
        for i in (0..ny).step_by(step_y) {
            let y = TOP + (ny - 1 - i) * CELL + CELL / 2 + 4;
            writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#, LEFT - 4, axis_tick(ay, i)).unwrap();
        }
        writeln!(
            s,
            r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">{}</text>"#,
            TOP + gh / 2,
            TOP + gh / 2,
            axis_title(ay)
        )
        .unwrap();
    }
    let lx = LEFT + gw + 20;
    for (k, (letter, name, color)) in LEGEND.iter().enumerate() {
        let y = TOP + k * 20;
        writeln!(s, r#"<rect x="{lx}" y="{y}" width="14" height="14" fill="{color}"/>"#).unwrap();
        writeln!(s, r#"<text x="{}" y="{}">{letter}  {name}</text>"#, lx + 20, y + 11).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// Bounding box of every agent over the whole run, padded by `pad`.
fn extent(traj: &Trajectory, pad: f64) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for s in &traj.samples {
        for a in &s.agents {
            b = (b.0.min(a.x), b.1.min(a.y), b.2.max(a.x), b.3.max(a.y));
        }
    }
    (b.0 - pad, b.1 - pad, b.2 + pad, b.3 + pad)
}

fn frame_body(s: &mut String, state: &Microstate, size: f64, color: &str) {
    for a in &state.agents {
        let (sn, cs) = a.theta.sin_cos();
        let tip = (a.x + size * cs, a.y + size * sn);
        let l = (a.x - 0.5 * size * cs - 0.4 * size * sn, a.y - 0.5 * size * sn + 0.4 * size * cs);
        let r = (a.x - 0.5 * size * cs + 0.4 * size * sn, a.y - 0.5 * size * sn - 0.4 * size * cs);
        writeln!(
            s,
            r#"<polygon points="{},{} {},{} {},{}" fill="{color}"/>"#,
            tip.0, tip.1, l.0, l.1, r.0, r.1
        )
        .unwrap();
    }
}

/// One SVG per sample index in `frames`, all sharing the same viewport so
/// they can be flipped through as an animation.
pub fn replay_frames(traj: &Trajectory, frames: &[usize]) -> Vec<String> {
    let size = 0.15 * traj.params.gamma();
    let (x0, y0, x1, y1) = extent(traj, 2.0 * size);
    let (w, h) = (x1 - x0, y1 - y0);
    frames
        .iter()
        .map(|&k| {
            let state = &traj.samples[k];
            let mut s = String::new();
            writeln!(
                s,
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="480" height="{}" viewBox="{x0} {} {w} {h}">"#,
                (480.0 * h / w).round(),
                -y1
            )
            .unwrap();
            writeln!(s, r#"<rect x="{x0}" y="{}" width="{w}" height="{h}" fill="white"/>"#, -y1).unwrap();
            s.push_str("<g transform=\"scale(1,-1)\">\n");
            frame_body(&mut s, state, size, "#1f4e79");
            s.push_str("</g>\n");
            writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="{}" font-family="sans-serif">t = {:.2}</text>"#,
                x0 + 0.02 * w,
                -y1 + 0.06 * h,
                0.04 * h,
                state.t
            )
            .unwrap();
            s.push_str("</svg>\n");
            s
        })
        .collect()
}

/// Evenly spaced sample indices, always including the first and last.
pub fn frame_indices(samples: usize, count: usize) -> Vec<usize> {
    if samples == 0 || count == 0 {
        return Vec::new();
    }
    if count == 1 || samples == 1 {
        return vec![samples - 1];
    }
    let mut v: Vec<usize> = (0..count)
        .map(|i| ((i as f64 * (samples - 1) as f64) / (count - 1) as f64).round() as usize)
        .collect();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_index_spacing() {
        assert_eq!(frame_indices(11, 3), vec![0, 5, 10]);
        assert_eq!(frame_indices(3, 10), vec![0, 1, 2]);
        assert_eq!(frame_indices(5, 1), vec![4]);
        assert!(frame_indices(0, 4).is_empty());
    }

    #[test]
    fn every_label_has_a_color() {
        for m in Macrostate::ALL {
            assert_ne!(label_color(Some(m)), label_color(None));
        }
    }
}
