use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::{ConvexPolygon, Line};
use crate::{Error, Result};

/// Independent generator for `(seed, stream)`; results never depend on the
/// order in which streams are consumed.
pub fn line_stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One line uniform on the set of lines meeting `polygon`, by rejection from
/// `[0, pi) x [-R, R]`.
pub fn sample_uniform_line<R: Rng + ?Sized>(id: usize, polygon: &ConvexPolygon, rng: &mut R) -> Line {
    let radius = polygon.origin_radius();
    loop {
        let alpha = rng.random_range(0.0..PI);
        let p = rng.random_range(-radius..=radius);
        let line = Line::new(id, alpha, p);
        if polygon.chord_params(&line).is_some() {
            return line;
        }
    }
}

pub fn sample_uniform_lines<R: Rng + ?Sized>(
    count: usize,
    polygon: &ConvexPolygon,
    rng: &mut R,
) -> Vec<Line> {
    (0..count).map(|id| sample_uniform_line(id, polygon, rng)).collect()
}

/// Poisson line process of mean count `tau` restricted to `polygon`.
pub fn sample_poisson_lines_with<R: Rng + ?Sized>(
    tau: f64,
    polygon: &ConvexPolygon,
    rng: &mut R,
) -> Result<Vec<Line>> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidArgument(format!("intensity must be positive, got {tau}")));
    }
    let count = Poisson::new(tau)
        .map_err(|e| Error::InvalidArgument(format!("{e}")))?
        .sample(rng) as usize;
    Ok(sample_uniform_lines(count, polygon, rng))
}

pub fn sample_poisson_lines(tau: f64, polygon: &ConvexPolygon, seed: u64) -> Result<Vec<Line>> {
    sample_poisson_lines_with(tau, polygon, &mut line_stream_rng(seed, 0))
}
