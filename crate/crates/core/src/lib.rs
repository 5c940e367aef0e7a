//! T-tessellations built on a fixed set of lines crossing a convex window.
//!
//! The crate provides the event sweep that orders every candidate segment
//! endpoint, an exhaustive enumerator of the T-tessellations on a line set,
//! two labelling schemes together with the algorithms that rebuild a
//! tessellation from them, and Monte-Carlo estimates and series bounds for
//! the partition function of Gibbs models on T-tessellations.
//!
//! Only `alloc` is required; file formats, rendering and the command line
//! live in the `ttess` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod enumerate;
pub mod error;
pub mod geometry;
pub mod gibbs;
pub mod reconstruct;
pub mod tessellation;

pub use error::{Error, Result};
pub use geometry::{ConvexPolygon, EventTable, Line, Vec2, Window};
pub use tessellation::{Mark, Node, Prototessellation, Pretessellation, TTessellation};
