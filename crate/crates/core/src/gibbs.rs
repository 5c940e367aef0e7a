//! Energies, Monte-Carlo estimation of the partition function and the series
//! bounding it.
//!
//! Energies follow the convention `H(T) >= -C #L(T)`, where `C` is the model's
//! stability constant.

use alloc::format;
use alloc::vec::Vec;

use crate::enumerate::for_each_tessellation;
use crate::geometry::{
    build_event_table, choose_time_axis, extract_cells, line_stream_rng,
    sample_poisson_lines_with, ConvexPolygon, EventTable, Line, Window,
};
use crate::tessellation::TTessellation;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum EnergyModel {
    /// `theta * k`.
    NLines(f64),
    /// `theta` times the summed segment lengths.
    TotalLength(f64),
    /// `theta` times the summed squared deviations of cell areas from their mean.
    AreaVariance(f64),
    Composite(Vec<EnergyModel>),
}

/// Slack allowed when checking the stability bound.
const STABILITY_SLACK: f64 = 1e-9;

impl EnergyModel {
    pub fn zero() -> Self {
        EnergyModel::Composite(Vec::new())
    }

    /// True when `H` vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            EnergyModel::NLines(t) | EnergyModel::TotalLength(t) | EnergyModel::AreaVariance(t) => {
                *t == 0.0
            }
            EnergyModel::Composite(parts) => parts.iter().all(EnergyModel::is_zero),
        }
    }

    fn needs_cells(&self) -> bool {
        match self {
            EnergyModel::AreaVariance(t) => *t != 0.0,
            EnergyModel::Composite(parts) => parts.iter().any(EnergyModel::needs_cells),
            _ => false,
        }
    }

    /// Smallest `C >= 0` with `H(T) >= -C #L(T)` for every T in `polygon`.
    ///
    /// Segments are no longer than the diameter, and the squared deviations of
    /// the cell areas sum to at most the squared window area.
    pub fn stability_constant(&self, polygon: &ConvexPolygon) -> f64 {
        let neg = |t: f64| if t < 0.0 { -t } else { 0.0 };
        match self {
            EnergyModel::NLines(t) => neg(*t),
            EnergyModel::TotalLength(t) => neg(*t) * polygon.diameter(),
            EnergyModel::AreaVariance(t) => neg(*t) * polygon.area() * polygon.area(),
            EnergyModel::Composite(parts) => {
                parts.iter().map(|m| m.stability_constant(polygon)).sum()
            }
        }
    }

    fn raw(&self, t: &TTessellation, table: &EventTable, cell_areas: &[f64]) -> f64 {
        match self {
            EnergyModel::NLines(theta) => theta * t.line_count() as f64,
            EnergyModel::TotalLength(theta) => {
                let total: f64 = (0..t.line_count())
                    .map(|l| {
                        let at = |m: crate::tessellation::Mark| {
                            table.event(m.event().expect("validated segment")).point
                        };
                        (at(t.deaths()[l]) - at(t.births()[l])).norm()
                    })
                    .sum();
                theta * total
            }
            EnergyModel::AreaVariance(theta) => {
                if cell_areas.is_empty() {
                    return 0.0;
                }
                let mean = cell_areas.iter().sum::<f64>() / cell_areas.len() as f64;
                theta * cell_areas.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>()
            }
            EnergyModel::Composite(parts) => {
                parts.iter().map(|m| m.raw(t, table, cell_areas)).sum()
            }
        }
    }
}

fn energy_on(
    model: &EnergyModel,
    t: &TTessellation,
    lines: &[Line],
    window: &Window,
    table: &EventTable,
) -> Result<f64> {
    let areas: Vec<f64> = if model.needs_cells() {
        extract_cells(t, lines, window)?.into_iter().map(|c| c.area).collect()
    } else {
        Vec::new()
    };
    let h = model.raw(t, table, &areas);
    let bound = -model.stability_constant(window.polygon()) * t.line_count() as f64;
    if !(h >= bound - STABILITY_SLACK) {
        return Err(Error::StabilityViolated { energy: h, bound });
    }
    Ok(h)
}

/// `H(t)`, checked against the model's stability bound.
pub fn energy(model: &EnergyModel, t: &TTessellation, lines: &[Line], window: &Window) -> Result<f64> {
    let table = build_event_table(lines, window)?;
    let report = crate::tessellation::validate(t.proto(), &table)?;
    if report.class != crate::tessellation::Class::TTess {
        return Err(Error::InvalidTessellation(format!("{:?}", report.violations)));
    }
    energy_on(model, t, lines, window, &table)
}

/// `sum over T of exp(-H(T))` for a fixed line set.
pub fn tessellation_mass(
    model: &EnergyModel,
    lines: &[Line],
    window: &Window,
    budget: u64,
) -> Result<f64> {
    let table = build_event_table(lines, window)?;
    if model.is_zero() {
        let mut count = 0u64;
        for_each_tessellation(&table, budget, |_| count += 1)?;
        return Ok(count as f64);
    }
    let mut mass = 0.0;
    let mut failure = None;
    for_each_tessellation(&table, budget, |t| {
        if failure.is_some() {
            return;
        }
        match energy_on(model, &t, lines, window, &table) {
            Ok(h) => mass += libm::exp(-h),
            Err(e) => failure = Some(e),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(mass),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub lines: usize,
    /// `None` when the sample had more than `k_cap` lines.
    pub mass: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionEstimate {
    pub z_hat: f64,
    pub std_error: f64,
    pub samples: usize,
    /// Samples above `k_cap`; they enter the mean as zero.
    pub skipped_oversize: usize,
    pub tau: f64,
    pub k_cap: usize,
    pub seed: u64,
    pub truncated: bool,
    /// `P(k > k_cap)` for the Poisson line count.
    pub tail_probability: f64,
}

/// Draws sample `index` of an estimation run and evaluates its mass.
pub fn partition_sample(
    model: &EnergyModel,
    tau: f64,
    polygon: &ConvexPolygon,
    k_cap: usize,
    seed: u64,
    index: u64,
    budget: u64,
) -> Result<Sample> {
    let lines = sample_poisson_lines_with(tau, polygon, &mut line_stream_rng(seed, index))?;
    if lines.len() > k_cap {
        return Ok(Sample { lines: lines.len(), mass: None });
    }
    let window = choose_time_axis(&lines, polygon, seed.wrapping_add(index))?;
    let mass = tessellation_mass(model, &lines, &window, budget)?;
    Ok(Sample { lines: lines.len(), mass: Some(mass) })
}

pub fn summarize(samples: &[Sample], tau: f64, k_cap: usize, seed: u64) -> PartitionEstimate {
    let n = samples.len();
    let values: Vec<f64> = samples.iter().map(|s| s.mass.unwrap_or(0.0)).collect();
    let mean = if n == 0 { 0.0 } else { values.iter().sum::<f64>() / n as f64 };
    let std_error = if n < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        libm::sqrt(var / n as f64)
    };
    let skipped = samples.iter().filter(|s| s.mass.is_none()).count();
    PartitionEstimate {
        z_hat: mean,
        std_error,
        samples: n,
        skipped_oversize: skipped,
        tau,
        k_cap,
        seed,
        truncated: skipped > 0,
        tail_probability: poisson_tail(tau, k_cap),
    }
}

/// Monte-Carlo estimate of `Z = E[sum over T of exp(-H(T))]` under the
/// Poisson line process of mean count `tau`. Sample `i` uses stream `i` of
/// `seed`.
pub fn estimate_partition(
    model: &EnergyModel,
    tau: f64,
    polygon: &ConvexPolygon,
    n_samples: usize,
    k_cap: usize,
    seed: u64,
    budget: u64,
) -> Result<PartitionEstimate> {
    let samples = (0..n_samples as u64)
        .map(|i| partition_sample(model, tau, polygon, k_cap, seed, i, budget))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&samples, tau, k_cap, seed))
}

fn ln_poisson(tau: f64, k: usize) -> f64 {
    -tau + k as f64 * libm::log(tau) - libm::lgamma(k as f64 + 1.0)
}

/// `P(N > k)` for `N ~ Poisson(tau)`.
pub fn poisson_tail(tau: f64, k: usize) -> f64 {
    let head: f64 = (0..=k).map(|j| libm::exp(ln_poisson(tau, j))).sum();
    (1.0 - head).max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    /// `(4k)^k`.
    FourK,
    /// `constant^k (k / (ln k)^(1 - epsilon))^(k - k / ln k)`.
    TheoremOne { epsilon: f64, constant: f64 },
}

impl Bound {
    /// `ln bound(k)`. `(4k)^k` is taken literally, so `bound(0) = 1` and
    /// `bound(1) = 4`; the other form is undefined below 2 and set to 1 there.
    pub fn ln_count(&self, k: usize) -> f64 {
        let kf = k as f64;
        match *self {
            _ if k == 0 => 0.0,
            Bound::FourK => kf * libm::log(4.0 * kf),
            Bound::TheoremOne { .. } if k == 1 => 0.0,
            Bound::TheoremOne { epsilon, constant } => {
                let lk = libm::log(kf);
                kf * libm::log(constant)
                    + (kf - kf / lk) * (lk - (1.0 - epsilon) * libm::log(lk))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesBound {
    /// `ln` of term `k`, for `k = 0..=k_max`.
    pub log_terms: Vec<f64>,
    pub terms: Vec<f64>,
    pub log_partial_sum: f64,
    pub partial_sum: f64,
    /// Last term smaller than the one before it.
    pub decreasing_at_end: bool,
}

impl SeriesBound {
    /// Terms strictly decrease from index `from` to the end.
    pub fn decreasing_from(&self, from: usize) -> bool {
        self.log_terms.get(from..).is_some_and(|t| t.windows(2).all(|w| w[1] < w[0]))
    }
}

/// Partial sum of `exp(C k) bound(k) exp(-tau) tau^k / k!` up to `k_max`,
/// accumulated in log space.
pub fn z_series_upper(c: f64, tau: f64, k_max: usize, bound: Bound) -> Result<SeriesBound> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidArgument(format!("intensity must be positive, got {tau}")));
    }
    if !c.is_finite() {
        return Err(Error::InvalidArgument(format!("stability constant must be finite, got {c}")));
    }
    if let Bound::TheoremOne { epsilon, constant } = bound {
        if !(epsilon > 0.0 && epsilon < 1.0) || !(constant > 0.0 && constant.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < epsilon < 1 and constant > 0, got {epsilon} and {constant}"
            )));
        }
    }
    let log_terms: Vec<f64> =
        (0..=k_max).map(|k| c * k as f64 + bound.ln_count(k) + ln_poisson(tau, k)).collect();
    let top = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_partial_sum = top + libm::log(log_terms.iter().map(|t| libm::exp(t - top)).sum::<f64>());
    let decreasing_at_end = k_max >= 1 && log_terms[k_max] < log_terms[k_max - 1];
    Ok(SeriesBound {
        terms: log_terms.iter().map(|t| libm::exp(*t)).collect(),
        log_terms,
        log_partial_sum,
        partial_sum: libm::exp(log_partial_sum),
        decreasing_at_end,
    })
}
