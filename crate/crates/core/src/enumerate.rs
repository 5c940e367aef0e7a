//! Exhaustive enumeration of the T-tessellations on a fixed line set.
//!
//! The sweep walks the events in time order and branches wherever the
//! segments alive at an event leave a choice:
//!
//! | event               | lines            | branches                      |
//! |---------------------|------------------|-------------------------------|
//! | border entry of `l` | `l` unborn       | born here, or not             |
//! | crossing `(l, m)`   | both alive       | `l` dies, or `m` dies         |
//! | crossing `(l, m)`   | alive and unborn | unborn one born here, or not  |
//! | border exit of `l`  | `l` alive        | `l` dies                      |
//! | border exit of `l`  | `l` unborn       | dead end                      |
//!
//! Every other combination leaves the state unchanged.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{
    build_event_table, choose_time_axis, line_stream_rng, sample_uniform_lines, ConvexPolygon,
    EventKind, EventTable, Line, Window,
};
use crate::tessellation::{Mark, Prototessellation, TTessellation};
use crate::{Error, Result};

/// Default cap on sweep nodes.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Unborn,
    Alive { birth: usize },
    Dead { birth: usize, death: usize },
}

/// One node of the branching sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepState {
    pub status: Vec<Status>,
    pub cursor: usize,
}

impl SweepState {
    pub fn start(line_count: usize) -> Self {
        SweepState { status: vec![Status::Unborn; line_count], cursor: 0 }
    }

    fn with(&self, changes: &[(usize, Status)]) -> Self {
        let mut next = SweepState { status: self.status.clone(), cursor: self.cursor + 1 };
        for &(l, s) in changes {
            next.status[l] = s;
        }
        next
    }

    fn finish(&self) -> TTessellation {
        let (births, deaths) = self
            .status
            .iter()
            .map(|s| match *s {
                Status::Dead { birth, death } => (Mark::Event(birth), Mark::Event(death)),
                _ => unreachable!("every line dies at its border exit at the latest"),
            })
            .unzip();
        TTessellation::assume(Prototessellation::new(births, deaths).expect("same length"))
    }
}

enum Step {
    Continue(SweepState),
    Branch(SweepState, SweepState),
    Prune,
}

fn step(state: SweepState, table: &EventTable) -> Step {
    let e = state.cursor;
    match table.event(e).kind {
        EventKind::BorderEntry(l) => match state.status[l] {
            Status::Unborn => {
                Step::Branch(state.with(&[(l, Status::Alive { birth: e })]), state.with(&[]))
            }
            _ => Step::Continue(state.with(&[])),
        },
        EventKind::BorderExit(l) => match state.status[l] {
            Status::Alive { birth } => {
                Step::Continue(state.with(&[(l, Status::Dead { birth, death: e })]))
            }
            Status::Unborn => Step::Prune,
            Status::Dead { .. } => Step::Continue(state.with(&[])),
        },
        EventKind::LineLine(l, m) => match (state.status[l], state.status[m]) {
            (Status::Alive { birth: bl }, Status::Alive { birth: bm }) => Step::Branch(
                state.with(&[(l, Status::Dead { birth: bl, death: e })]),
                state.with(&[(m, Status::Dead { birth: bm, death: e })]),
            ),
            (Status::Alive { .. }, Status::Unborn) => {
                Step::Branch(state.with(&[(m, Status::Alive { birth: e })]), state.with(&[]))
            }
            (Status::Unborn, Status::Alive { .. }) => {
                Step::Branch(state.with(&[(l, Status::Alive { birth: e })]), state.with(&[]))
            }
            _ => Step::Continue(state.with(&[])),
        },
    }
}

/// Visits every T-tessellation on the table's lines; returns the number of
/// sweep nodes used.
pub fn for_each_tessellation<F>(table: &EventTable, budget: u64, mut visit: F) -> Result<u64>
where
    F: FnMut(TTessellation),
{
    let mut nodes: u64 = 1;
    let mut stack = vec![SweepState::start(table.line_count())];
    while let Some(mut state) = stack.pop() {
        loop {
            if state.cursor == table.len() {
                visit(state.finish());
                break;
            }
            match step(state, table) {
                Step::Continue(next) => state = next,
                Step::Prune => break,
                Step::Branch(first, second) => {
                    nodes += 2;
                    if nodes > budget {
                        return Err(Error::BudgetExceeded { nodes });
                    }
                    // LIFO: the first branch is explored first.
                    stack.push(second);
                    state = first;
                }
            }
        }
    }
    Ok(nodes)
}

/// All T-tessellations on the table's lines, sorted by marks.
pub fn enumerate_all(table: &EventTable, budget: u64) -> Result<Vec<TTessellation>> {
    let mut all = Vec::new();
    for_each_tessellation(table, budget, |t| all.push(t))?;
    all.sort();
    Ok(all)
}

pub fn count_tessellations(table: &EventTable, budget: u64) -> Result<u64> {
    let mut count = 0u64;
    for_each_tessellation(table, budget, |_| count += 1)?;
    Ok(count)
}

/// `a` horizontals `y = i / (a + 1)` and `k - a` verticals `x = j / (k - a + 1)`
/// in the unit square, with an admissible axis chosen from `seed`.
pub fn grid_lines(k: usize, a: usize, seed: u64) -> Result<(Vec<Line>, Window)> {
    if a == 0 || a > k {
        return Err(Error::InvalidArgument(alloc::format!("grid needs 1 <= a <= k, got k={k} a={a}")));
    }
    let mut lines = Vec::with_capacity(k);
    for i in 1..=a {
        lines.push(Line::from_equation(lines.len(), 0.0, 1.0, i as f64 / (a + 1) as f64));
    }
    for j in 1..=k - a {
        lines.push(Line::from_equation(lines.len(), 1.0, 0.0, j as f64 / (k - a + 1) as f64));
    }
    let window = choose_time_axis(&lines, &ConvexPolygon::unit_square(), seed)?;
    Ok((lines, window))
}

/// Lower bound `(k - a + 1)^a` on the number of tessellations of the grid.
pub fn grid_lower_bound(k: usize, a: usize) -> u64 {
    ((k - a + 1) as u64).pow(a as u32)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalN {
    pub max_count: u64,
    pub argmax: Vec<Line>,
    pub counts: Vec<u64>,
}

/// A trial that could not be counted, with the line set that caused it.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialFailure {
    pub trial: usize,
    pub lines: Vec<Line>,
    pub error: Error,
}

/// Line set of trial `trial` in [`empirical_n`], with its chosen window.
pub fn trial_lines(
    k: usize,
    polygon: &ConvexPolygon,
    seed: u64,
    trial: usize,
) -> core::result::Result<(Vec<Line>, Window), TrialFailure> {
    let lines = sample_uniform_lines(k, polygon, &mut line_stream_rng(seed, trial as u64));
    match choose_time_axis(&lines, polygon, seed.wrapping_add(trial as u64)) {
        Ok(window) => Ok((lines, window)),
        Err(error) => Err(TrialFailure { trial, lines, error }),
    }
}

/// Largest tessellation count over `trials` uniformly drawn sets of `k` lines.
pub fn empirical_n(
    k: usize,
    trials: usize,
    seed: u64,
    polygon: &ConvexPolygon,
    budget: u64,
) -> core::result::Result<EmpiricalN, TrialFailure> {
    let mut result = EmpiricalN { max_count: 0, argmax: Vec::new(), counts: Vec::with_capacity(trials) };
    for trial in 0..trials {
        let (lines, window) = trial_lines(k, polygon, seed, trial)?;
        let count = build_event_table(&lines, &window)
            .and_then(|table| count_tessellations(&table, budget));
        match count {
            Ok(count) => {
                if count > result.max_count || result.counts.is_empty() {
                    result.max_count = count;
                    result.argmax = lines;
                }
                result.counts.push(count);
            }
            Err(error) => return Err(TrialFailure { trial, lines, error }),
        }
    }
    Ok(result)
}
