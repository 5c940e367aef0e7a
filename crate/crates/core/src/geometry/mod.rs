//! Lines crossing a convex window, the time axis and the events it orders.
//!
//! A line is stored in normal form `D(p, alpha)`: the points `x` with
//! `x . (cos alpha, sin alpha) = p`. Event times are projections onto the
//! time axis, rescaled so that the window sits inside `(EDGE, 1 - EDGE)`;
//! the marks `0` and `1` stay free for the border's own birth and death.

mod cells;
mod events;
mod sample;
mod window;

pub use cells::{extract_cells, Cell};
pub use events::{build_event_table, Event, EventKey, EventKind, EventTable};
pub use sample::{
    line_stream_rng, sample_poisson_lines, sample_poisson_lines_with, sample_uniform_line,
    sample_uniform_lines,
};
pub use window::{choose_time_axis, ConvexPolygon, TimeAxis, Window, AXIS_ATTEMPTS};

use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

/// Relative degeneracy tolerance, scaled by the window diameter.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Margin kept between the window and the ends of the time band.
pub const EDGE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(angle: f64) -> Self {
        Vec2::new(libm::cos(angle), libm::sin(angle))
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn lerp(self, other: Vec2, t: f64) -> Vec2 {
        self + (other - self) * t
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A line `D(p, alpha)`, orthogonal at `p (cos alpha, sin alpha)` to the ray
/// from the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub id: usize,
    pub alpha: f64,
    pub p: f64,
}

impl Line {
    pub fn new(id: usize, alpha: f64, p: f64) -> Self {
        Line { id, alpha, p }
    }

    /// Normal form of `a x + b y = c`, folded so that alpha lies in `[0, pi)`.
    pub fn from_equation(id: usize, a: f64, b: f64, c: f64) -> Self {
        let scale = libm::hypot(a, b);
        let mut alpha = libm::atan2(b, a);
        let mut p = c / scale;
        if alpha < 0.0 {
            alpha += PI;
            p = -p;
        }
        if alpha >= PI {
            alpha = 0.0;
            p = -p;
        }
        Line { id, alpha, p }
    }

    /// Line through two distinct points.
    pub fn through(id: usize, a: Vec2, b: Vec2) -> Self {
        let n = (b - a).perp();
        Line::from_equation(id, n.x, n.y, n.dot(a))
    }

    pub fn normal(&self) -> Vec2 {
        Vec2::from_angle(self.alpha)
    }

    pub fn direction(&self) -> Vec2 {
        self.normal().perp()
    }

    /// Foot of the perpendicular from the origin.
    pub fn anchor(&self) -> Vec2 {
        self.normal() * self.p
    }

    pub fn signed_distance(&self, q: Vec2) -> f64 {
        self.normal().dot(q) - self.p
    }

    /// Intersection point, `None` when (numerically) parallel.
    pub fn intersection(&self, other: &Line) -> Option<Vec2> {
        let (n1, n2) = (self.normal(), other.normal());
        let det = n1.cross(n2);
        if libm::fabs(det) < 1e-12 {
            return None;
        }
        let x = (self.p * n2.y - other.p * n1.y) / det;
        let y = (n1.x * other.p - n2.x * self.p) / det;
        Some(Vec2::new(x, y))
    }
}

/// Dense 0-based ids, as required by every table in the crate.
pub(crate) fn check_dense_ids(lines: &[Line]) -> crate::Result<()> {
    for (i, l) in lines.iter().enumerate() {
        if l.id != i {
            return Err(crate::Error::InvalidArgument(alloc::format!(
                "line ids must be dense and sorted: position {i} holds id {}",
                l.id
            )));
        }
        if !(l.alpha.is_finite() && l.p.is_finite()) {
            return Err(crate::Error::InvalidArgument(alloc::format!(
                "line {i} has non-finite parameters"
            )));
        }
    }
    Ok(())
}
