//! Cells of a T-tessellation as convex polygons.
//!
//! The window is first cut into the faces of the full line arrangement. Two
//! faces on opposite sides of a single line touch along one arrangement edge;
//! they belong to the same cell unless that edge is covered by the line's
//! segment. Cells of a T-tessellation are convex, so each merged group is the
//! convex hull of its faces.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::window::polygon_area;
use super::{build_event_table, Line, Vec2, Window};
use crate::tessellation::{validate, Class, TTessellation};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    /// Counter-clockwise vertices.
    pub polygon: Vec<Vec2>,
    pub area: f64,
}

struct Face {
    vertices: Vec<Vec2>,
    sides: Vec<bool>,
}

fn clip(vertices: &[Vec2], line: &Line, keep_positive: bool) -> Vec<Vec2> {
    let sign = if keep_positive { 1.0 } else { -1.0 };
    let n = vertices.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let da = sign * line.signed_distance(a);
        let db = sign * line.signed_distance(b);
        if da >= 0.0 {
            out.push(a);
        }
        if (da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0) {
            out.push(a.lerp(b, da / (da - db)));
        }
    }
    out
}

fn arrangement_faces(lines: &[Line], window: &Window) -> Vec<Face> {
    let min_area = window.tolerance() * window.tolerance();
    let mut faces = vec![Face { vertices: window.polygon().vertices().to_vec(), sides: Vec::new() }];
    for line in lines {
        let mut next = Vec::with_capacity(faces.len() * 2);
        for face in faces {
            for positive in [true, false] {
                let part = clip(&face.vertices, line, positive);
                if part.len() >= 3 && polygon_area(&part) > min_area {
                    let mut sides = face.sides.clone();
                    sides.push(positive);
                    next.push(Face { vertices: part, sides });
                }
            }
        }
        faces = next;
    }
    faces
}

/// Parameter range of the face's edge lying on `line`, if any.
fn edge_on(face: &Face, line: &Line, tol: f64) -> Option<(f64, f64)> {
    let (o, d) = (line.anchor(), line.direction());
    let params: Vec<f64> = face
        .vertices
        .iter()
        .filter(|v| libm::fabs(line.signed_distance(**v)) <= tol)
        .map(|v| (*v - o).dot(d))
        .collect();
    if params.len() < 2 {
        return None;
    }
    let lo = params.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = params.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((lo, hi))
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn half_hull<'a>(points: impl Iterator<Item = &'a Vec2>) -> Vec<Vec2> {
    let mut hull: Vec<Vec2> = Vec::new();
    for &p in points {
        while let [.., a, b] = hull[..] {
            if (b - a).cross(p - b) <= 1e-14 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

fn convex_hull(mut points: Vec<Vec2>) -> Vec<Vec2> {
    points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    points.dedup_by(|a, b| (*a - *b).norm() < 1e-13);
    if points.len() < 3 {
        return points;
    }
    let mut hull = half_hull(points.iter());
    hull.extend(half_hull(points.iter().rev()));
    hull
}

/// Splits the window into the cells of `tess`.
pub fn extract_cells(tess: &TTessellation, lines: &[Line], window: &Window) -> Result<Vec<Cell>> {
    let table = build_event_table(lines, window)?;
    let report = validate(tess.proto(), &table)?;
    if report.class != Class::TTess {
        return Err(Error::InvalidTessellation(format!("{:?}", report.violations)));
    }
    let tol = 16.0 * window.tolerance();
    let faces = arrangement_faces(lines, window);

    // Segment extent on each line, as direction parameters.
    let extents: Vec<(f64, f64)> = lines
        .iter()
        .enumerate()
        .map(|(l, line)| {
            let (o, d) = (line.anchor(), line.direction());
            let at = |m: crate::tessellation::Mark| {
                let e = m.event().expect("validated segment");
                (table.event(e).point - o).dot(d)
            };
            let (a, b) = (at(tess.births()[l]), at(tess.deaths()[l]));
            (a.min(b), a.max(b))
        })
        .collect();

    let mut parent: Vec<usize> = (0..faces.len()).collect();
    for i in 0..faces.len() {
        for j in i + 1..faces.len() {
            let mut differing = (0..lines.len()).filter(|&l| faces[i].sides[l] != faces[j].sides[l]);
            let (Some(l), None) = (differing.next(), differing.next()) else { continue };
            let (Some((a0, a1)), Some((b0, b1))) =
                (edge_on(&faces[i], &lines[l], tol), edge_on(&faces[j], &lines[l], tol))
            else {
                continue;
            };
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if hi - lo <= tol {
                continue;
            }
            let mid = 0.5 * (lo + hi);
            let (s0, s1) = extents[l];
            if !(s0 < mid && mid < s1) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }

    let mut groups: Vec<(usize, Vec<Vec2>, f64)> = Vec::new();
    for (i, face) in faces.iter().enumerate() {
        let root = find(&mut parent, i);
        let area = polygon_area(&face.vertices);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1.extend_from_slice(&face.vertices);
                g.2 += area;
            }
            None => groups.push((root, face.vertices.clone(), area)),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(_, points, area)| Cell { polygon: convex_hull(points), area })
        .collect())
}
