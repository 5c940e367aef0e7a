//! Deterministic SVG snapshots. Coordinates are printed with six decimals and
//! elements are emitted in a fixed order: cells, window, segments, axis.

use std::fmt::Write;

use ttess_core::geometry::{Cell, Window};
use ttess_core::tessellation::TTessellation;
use ttess_core::{EventTable, Vec2};

const SIZE: f64 = 512.0;
const MARGIN: f64 = 24.0;

struct Frame {
    min: Vec2,
    max_y: f64,
    scale: f64,
}

impl Frame {
    fn new(window: &Window) -> Self {
        let v = window.polygon().vertices();
        let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&Vec2) -> f64| {
            v.iter().map(pick).fold(init, f)
        };
        let (min_x, max_x) = (fold(f64::min, f64::INFINITY, |p| p.x), fold(f64::max, f64::NEG_INFINITY, |p| p.x));
        let (min_y, max_y) = (fold(f64::min, f64::INFINITY, |p| p.y), fold(f64::max, f64::NEG_INFINITY, |p| p.y));
        let span = (max_x - min_x).max(max_y - min_y);
        Frame { min: Vec2::new(min_x, min_y), max_y, scale: (SIZE - 2.0 * MARGIN) / span }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        (MARGIN + (p.x - self.min.x) * self.scale, MARGIN + (self.max_y - p.y) * self.scale)
    }

    fn points(&self, ps: &[Vec2]) -> String {
        ps.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.6},{y:.6}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Grey level for the cell of rank `rank` among `n` (largest is darkest).
fn tint(rank: usize, n: usize) -> String {
    let level = 240 - (150 * rank / n.saturating_sub(1).max(1)) as u8;
    format!("#{level:02x}{level:02x}{level:02x}")
}

pub fn render(
    window: &Window,
    table: &EventTable,
    tess: Option<&TTessellation>,
    cells: Option<&[Cell]>,
) -> String {
    let frame = Frame::new(window);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    out.push_str(
        "<defs><marker id=\"arrow\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" refY=\"3\" orient=\"auto\">\
         <path d=\"M0,0 L6,3 L0,6 z\" fill=\"#b03030\"/></marker></defs>\n",
    );

    if let Some(cells) = cells {
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by(|&a, &b| cells[a].area.total_cmp(&cells[b].area).then(a.cmp(&b)));
        let mut rank = vec![0; cells.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let mut sorted: Vec<usize> = (0..cells.len()).collect();
        sorted.sort_by(|&a, &b| {
            let key = |c: &Cell| c.polygon.first().map_or((0.0, 0.0), |p| (p.x, p.y));
            let (ka, kb) = (key(&cells[a]), key(&cells[b]));
            ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(a.cmp(&b))
        });
        for i in sorted {
            let _ = writeln!(
                out,
                "<polygon class=\"cell\" points=\"{}\" fill=\"{}\" data-area=\"{:.6}\"/>",
                frame.points(&cells[i].polygon),
                tint(rank[i], cells.len()),
                cells[i].area
            );
        }
    }

    let _ = writeln!(
        out,
        "<polygon class=\"window\" points=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/>",
        frame.points(window.polygon().vertices())
    );

    if let Some(t) = tess {
        for l in 0..t.line_count() {
            let (Some(b), Some(d)) = (t.births()[l].event(), t.deaths()[l].event()) else { continue };
            let (x1, y1) = frame.map(table.event(b).point);
            let (x2, y2) = frame.map(table.event(d).point);
            let _ = writeln!(
                out,
                "<line class=\"segment\" data-line=\"{l}\" x1=\"{x1:.6}\" y1=\"{y1:.6}\" x2=\"{x2:.6}\" y2=\"{y2:.6}\" stroke=\"#1f3f8f\" stroke-width=\"2\"/>"
            );
        }
    }

    let v = window.polygon().vertices();
    let centre = v.iter().fold(Vec2::new(0.0, 0.0), |acc, &p| acc + p) * (1.0 / v.len() as f64);
    let reach = 0.2 * window.polygon().diameter();
    let d = window.axis().direction();
    let (x1, y1) = frame.map(centre - d * reach);
    let (x2, y2) = frame.map(centre + d * reach);
    let _ = writeln!(
        out,
        "<line class=\"axis\" x1=\"{x1:.6}\" y1=\"{y1:.6}\" x2=\"{x2:.6}\" y2=\"{y2:.6}\" stroke=\"#b03030\" stroke-dasharray=\"4 3\" marker-end=\"url(#arrow)\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.6}\" y=\"{:.6}\" font-size=\"12\" fill=\"#b03030\">time</text>",
        x2 + 4.0,
        y2
    );
    out.push_str("</svg>\n");
    out
}
