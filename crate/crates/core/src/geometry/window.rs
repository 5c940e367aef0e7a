use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_event_table, check_dense_ids, Line, Vec2, DEGENERACY_TOLERANCE, EDGE};
use crate::{Error, Result};

/// Random axis directions tried before giving up.
pub const AXIS_ATTEMPTS: usize = 64;

/// Strictly convex polygon with counter-clockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 || vertices.iter().any(|v| !(v.x.is_finite() && v.y.is_finite())) {
            return Err(Error::NonConvexWindow);
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if (b - a).cross(c - b) <= 0.0 {
                return Err(Error::NonConvexWindow);
            }
        }
        // Strictly positive turns can still wind around twice.
        let turning: f64 = (0..n)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let c = vertices[(i + 2) % n];
                let (u, v) = (b - a, c - b);
                libm::atan2(u.cross(v), u.dot(v))
            })
            .sum();
        if libm::fabs(turning - 2.0 * PI) > 1e-6 {
            return Err(Error::NonConvexWindow);
        }
        Ok(ConvexPolygon { vertices })
    }

    pub fn unit_square() -> Self {
        ConvexPolygon {
            vertices: alloc::vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
            ],
        }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((*b - *a).norm());
            }
        }
        d
    }

    /// Largest vertex distance from the origin; every line that meets the
    /// polygon has `|p|` at most this.
    pub fn origin_radius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn tolerance(&self) -> f64 {
        DEGENERACY_TOLERANCE * self.diameter()
    }

    /// Smallest signed distance to an edge; positive strictly inside.
    pub fn inset(&self, q: Vec2) -> f64 {
        self.edges()
            .map(|(a, b)| {
                let e = b - a;
                e.cross(q - a) / e.norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Parameter interval of `line` inside the polygon along
    /// `anchor + t * direction`, if the chord has positive length.
    pub fn chord_params(&self, line: &Line) -> Option<(f64, f64)> {
        let origin = line.anchor();
        let dir = line.direction();
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (a, b) in self.edges() {
            let e = b - a;
            let base = e.cross(origin - a);
            let slope = e.cross(dir);
            if libm::fabs(slope) < 1e-15 {
                if base <= 0.0 {
                    return None;
                }
                continue;
            }
            let t = -base / slope;
            if slope > 0.0 {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
        }
        (hi - lo > self.tolerance()).then_some((lo, hi))
    }

    pub fn chord(&self, line: &Line) -> Option<(Vec2, Vec2)> {
        let (lo, hi) = self.chord_params(line)?;
        let (o, d) = (line.anchor(), line.direction());
        Some((o + d * lo, o + d * hi))
    }
}

pub(crate) fn polygon_area(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    let twice: f64 = (0..n)
        .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
        .sum();
    0.5 * twice
}

/// Direction plus the affine rescaling that maps the window's projection onto
/// `[EDGE, 1 - EDGE]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeAxis {
    direction: Vec2,
    min: f64,
    max: f64,
}

impl TimeAxis {
    pub fn direction(&self) -> Vec2 {
        self.direction
    }

    pub fn projection(&self, q: Vec2) -> f64 {
        self.direction.dot(q)
    }

    pub fn time(&self, q: Vec2) -> f64 {
        EDGE + (1.0 - 2.0 * EDGE) * (self.projection(q) - self.min) / (self.max - self.min)
    }

    /// Inverse of [`TimeAxis::time`] on the projection coordinate.
    pub fn projection_of_time(&self, t: f64) -> f64 {
        self.min + (t - EDGE) / (1.0 - 2.0 * EDGE) * (self.max - self.min)
    }
}

/// A convex polygon together with its time axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    polygon: ConvexPolygon,
    axis: TimeAxis,
}

impl Window {
    pub fn new(polygon: ConvexPolygon, axis: Vec2) -> Result<Self> {
        let norm = axis.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidArgument(format!("time axis {axis:?} is not a direction")));
        }
        let direction = axis * (1.0 / norm);
        let (min, max) = polygon
            .vertices()
            .iter()
            .map(|v| direction.dot(*v))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        Ok(Window { polygon, axis: TimeAxis { direction, min, max } })
    }

    pub fn polygon(&self) -> &ConvexPolygon {
        &self.polygon
    }

    pub fn axis(&self) -> &TimeAxis {
        &self.axis
    }

    pub fn time(&self, q: Vec2) -> f64 {
        self.axis.time(q)
    }

    /// Degeneracy tolerance in raw projection units.
    pub fn tolerance(&self) -> f64 {
        self.polygon.tolerance()
    }
}

pub(crate) fn check_lines_hit(lines: &[Line], polygon: &ConvexPolygon) -> Result<()> {
    check_dense_ids(lines)?;
    for l in lines {
        if polygon.chord_params(l).is_none() {
            return Err(Error::LineMissesWindow { line: l.id });
        }
    }
    Ok(())
}

/// Axis-independent degeneracies: coincident lines never become admissible.
fn check_coincident(lines: &[Line], polygon: &ConvexPolygon) -> Result<()> {
    let tol = polygon.tolerance();
    for (i, l) in lines.iter().enumerate() {
        let Some((a, b)) = polygon.chord(l) else { continue };
        for m in &lines[i + 1..] {
            if libm::fabs(m.signed_distance(a)) <= tol && libm::fabs(m.signed_distance(b)) <= tol
            {
                return Err(Error::DegenerateConfiguration(format!(
                    "lines {} and {} coincide",
                    l.id, m.id
                )));
            }
        }
    }
    Ok(())
}

/// Picks a time axis for which every event time is distinct.
///
/// Candidate directions come from a seeded ChaCha stream; the first one that
/// yields a valid event table is kept.
pub fn choose_time_axis(lines: &[Line], polygon: &ConvexPolygon, seed: u64) -> Result<Window> {
    check_lines_hit(lines, polygon)?;
    check_coincident(lines, polygon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..AXIS_ATTEMPTS {
        let angle = rng.random_range(0.0..2.0 * PI);
        let window = Window::new(polygon.clone(), Vec2::from_angle(angle))?;
        match build_event_table(lines, &window) {
            Ok(_) => return Ok(window),
            Err(e) => last = Some(e),
        }
    }
    Err(match last {
        Some(Error::DegenerateConfiguration(why)) => Error::DegenerateConfiguration(format!(
            "no admissible axis in {AXIS_ATTEMPTS} attempts: {why}"
        )),
        Some(other) => other,
        None => Error::DegenerateConfiguration("no admissible axis".into()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_event_table;

    fn horizontal(id: usize, y: f64) -> Line {
        Line::from_equation(id, 0.0, 1.0, y)
    }

    #[test]
    fn rejects_clockwise_and_reflex() {
        let cw = alloc::vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 0.0)
        ];
        assert_eq!(ConvexPolygon::new(cw), Err(Error::NonConvexWindow));
        let collinear = alloc::vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.5, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0)
        ];
        assert_eq!(ConvexPolygon::new(collinear), Err(Error::NonConvexWindow));
        assert!(ConvexPolygon::new(ConvexPolygon::unit_square().vertices().to_vec()).is_ok());
    }

    #[test]
    fn square_measures() {
        let sq = ConvexPolygon::unit_square();
        assert!((sq.area() - 1.0).abs() < 1e-15);
        assert!((sq.diameter() - 2f64.sqrt()).abs() < 1e-15);
        let (a, b) = sq.chord(&horizontal(0, 0.25)).unwrap();
        assert!((a.y - 0.25).abs() < 1e-12 && (b.y - 0.25).abs() < 1e-12);
        assert!(((b - a).norm() - 1.0).abs() < 1e-12);
        assert!(sq.chord(&horizontal(1, 1.5)).is_none());
    }

    #[test]
    fn window_times_inside_band() {
        let w = Window::new(ConvexPolygon::unit_square(), Vec2::new(1.0, 0.3)).unwrap();
        for v in w.polygon().vertices() {
            let t = w.time(*v);
            assert!(t >= EDGE - 1e-15 && t <= 1.0 - EDGE + 1e-15);
        }
    }

    #[test]
    fn generic_pair_admissible_on_first_draw() {
        let lines = [
            Line::through(0, Vec2::new(0.0, 0.2), Vec2::new(1.0, 0.7)),
            Line::through(1, Vec2::new(0.3, 0.0), Vec2::new(0.6, 1.0)),
        ];
        let sq = ConvexPolygon::unit_square();
        let w = choose_time_axis(&lines, &sq, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let first = Vec2::from_angle(rng.random_range(0.0..2.0 * PI));
        assert!((w.axis().direction() - first).norm() < 1e-15);
        assert_eq!(build_event_table(&lines, &w).unwrap().len(), 5);
    }

    #[test]
    fn grid_needs_rotated_axis() {
        let lines = [
            horizontal(0, 0.5),
            Line::from_equation(1, 1.0, 0.0, 1.0 / 3.0),
            Line::from_equation(2, 1.0, 0.0, 2.0 / 3.0),
        ];
        let sq = ConvexPolygon::unit_square();
        let x_axis = Window::new(sq.clone(), Vec2::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            build_event_table(&lines, &x_axis),
            Err(Error::DegenerateConfiguration(_))
        ));
        let w = choose_time_axis(&lines, &sq, 0).unwrap();
        assert!(build_event_table(&lines, &w).is_ok());
    }

    #[test]
    fn coincident_lines_rejected() {
        let lines = [horizontal(0, 0.5), horizontal(1, 0.5)];
        let err = choose_time_axis(&lines, &ConvexPolygon::unit_square(), 0).unwrap_err();
        assert!(matches!(err, Error::DegenerateConfiguration(_)));
    }

    #[test]
    fn concurrent_triple_rejected() {
        let c = Vec2::new(0.5, 0.5);
        let lines = [
            Line::through(0, c, Vec2::new(0.0, 0.1)),
            Line::through(1, c, Vec2::new(0.2, 0.0)),
            Line::through(2, c, Vec2::new(1.0, 0.1)),
        ];
        let err = choose_time_axis(&lines, &ConvexPolygon::unit_square(), 3).unwrap_err();
        assert!(matches!(err, Error::DegenerateConfiguration(_)));
    }

    #[test]
    fn missing_line_reported() {
        let lines = [horizontal(0, 2.0)];
        let err = choose_time_axis(&lines, &ConvexPolygon::unit_square(), 0).unwrap_err();
        assert_eq!(err, Error::LineMissesWindow { line: 0 });
    }
}
