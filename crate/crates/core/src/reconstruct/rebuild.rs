//! Rebuild from the orphan labelling: an initial timewise sweep, then
//! alternating backward parent-seeking and forward cutting passes until no
//! segment is cut.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::orphans::Scheme2;
use crate::geometry::EventTable;
use crate::tessellation::{Mark, Node, NodeMap, Pretessellation, Prototessellation};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarkKind {
    Birth,
    Death,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MarkChange {
    pub line: usize,
    pub kind: MarkKind,
    pub from: Mark,
    pub to: Mark,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Init,
    ParentSeek { round: usize },
    Cutting { round: usize },
}

/// Marks and pending set after one stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub stage: Stage,
    pub marks: Prototessellation,
    pub pending: BTreeSet<usize>,
    pub changes: Vec<MarkChange>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RebuildOptions {
    /// Re-orphan from the `O(l)`-th apparent child instead of the `O(l)+1`-th.
    pub non_strict_reorphan: bool,
    /// Overrides the default cap of `#events * k` rounds.
    pub max_rounds: Option<usize>,
    pub record_trace: bool,
}

impl Default for RebuildOptions {
    fn default() -> Self {
        RebuildOptions { non_strict_reorphan: false, max_rounds: None, record_trace: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rebuild {
    pub result: Pretessellation,
    pub rounds: usize,
    /// Times the border would have been cut; impossible for genuine inputs.
    pub border_overflows: usize,
    pub trace: Vec<Snapshot>,
}

fn set_mark(p: &mut Prototessellation, log: &mut Vec<MarkChange>, line: usize, kind: MarkKind, to: Mark) {
    let from = match kind {
        MarkKind::Birth => p.births()[line],
        MarkKind::Death => p.deaths()[line],
    };
    if from == to {
        return;
    }
    match kind {
        MarkKind::Birth => p.set_birth(line, to),
        MarkKind::Death => p.set_death(line, to),
    }
    log.push(MarkChange { line, kind, from, to });
}

/// Initial sweep: orphans are placed at their first known child, and every
/// meeting of two live segments is resolved with the virtual murder counters.
///
/// A segment is only considered live at events strictly after its birth, so
/// a segment is never stopped at the event that starts it.
pub fn initialize(table: &EventTable, scheme: &Scheme2) -> Prototessellation {
    let k = table.line_count();
    let births = scheme.births.iter().map(|b| b.unwrap_or(Mark::One)).collect();
    let mut p = Prototessellation::new(births, vec![Mark::One; k]).expect("same length");
    let mut counters = scheme.virtual_murders.clone();
    for e in 0..table.len() {
        let at = Mark::Event(e);
        let (a, b) = table.nodes(e);
        if p.birth(a) == at && p.birth(b) > at {
            p.set_birth(b.line().expect("border is born at zero"), at);
        } else if p.birth(b) == at && p.birth(a) > at {
            p.set_birth(a.line().expect("border is born at zero"), at);
        } else if p.birth(a) < at && p.birth(b) < at && at <= p.death(a) && at <= p.death(b) {
            let mut kill = |node: Node| {
                if let Node::Line(l) = node {
                    p.set_death(l, at);
                }
            };
            // The border comes first and is never out of kills.
            if counters[a].is_zero() {
                kill(a);
                if counters[b].is_zero() {
                    kill(b);
                } else {
                    let _ = counters[b].decrement();
                }
            } else {
                let _ = counters[a].decrement();
                kill(b);
            }
        }
    }
    p
}

/// Backward pass: every pending line is extended back to the latest earlier
/// event strictly inside another segment, then leaves the pending set.
pub fn parent_seek(
    table: &EventTable,
    p: &mut Prototessellation,
    pending: &mut BTreeSet<usize>,
) -> Vec<MarkChange> {
    let mut log = Vec::new();
    for e in (0..table.len()).rev() {
        let at = Mark::Event(e);
        let (a, b) = table.nodes(e);
        for (this, other) in [(a, b), (b, a)] {
            let Node::Line(l) = this else { continue };
            if pending.contains(&l) && p.birth(this) > at && p.covers_strictly(other, e) {
                set_mark(p, &mut log, l, MarkKind::Birth, at);
                pending.remove(&l);
            }
        }
    }
    log
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutOutcome {
    pub cuts: bool,
    pub pending: BTreeSet<usize>,
    pub changes: Vec<MarkChange>,
    pub border_overflows: usize,
}

/// Forward pass counting the orphan children each segment currently hosts.
///
/// A host whose count reaches `O(l) + 1` is cut at that child's birth, and
/// every child past the allowed count is sent back to the pending set.
pub fn cutting(
    table: &EventTable,
    p: &mut Prototessellation,
    orphans: &BTreeSet<usize>,
    other_children: &NodeMap<usize>,
    non_strict: bool,
) -> CutOutcome {
    let mut out = CutOutcome {
        cuts: false,
        pending: BTreeSet::new(),
        changes: Vec::new(),
        border_overflows: 0,
    };
    let mut seen = NodeMap::new(p.line_count(), 0usize, 0usize);
    for e in 0..table.len() {
        let at = Mark::Event(e);
        let (a, b) = table.nodes(e);
        let is_orphan_birth =
            |n: Node| matches!(n, Node::Line(l) if orphans.contains(&l) && p.birth(n) == at);
        let (child, host) = if is_orphan_birth(a) {
            (a, b)
        } else if is_orphan_birth(b) {
            (b, a)
        } else {
            continue;
        };
        let child = child.line().expect("orphans are lines");
        seen[host] += 1;
        let allowed = other_children[host];
        if seen[host] == allowed + 1 {
            match host {
                Node::Line(h) => {
                    set_mark(p, &mut out.changes, h, MarkKind::Death, at);
                    out.cuts = true;
                }
                Node::Border => out.border_overflows += 1,
            }
        }
        let excess = if non_strict { seen[host] >= allowed } else { seen[host] > allowed };
        if excess {
            out.pending.insert(child);
        }
    }
    out
}

/// Rebuilds a pretessellation from the orphan labelling.
pub fn algorithm2(table: &EventTable, scheme: &Scheme2) -> Result<Pretessellation> {
    Ok(algorithm2_with(table, scheme, RebuildOptions::default())?.result)
}

pub fn algorithm2_with(
    table: &EventTable,
    scheme: &Scheme2,
    options: RebuildOptions,
) -> Result<Rebuild> {
    scheme.check(table)?;
    let k = table.line_count();
    let cap = options.max_rounds.unwrap_or((table.len() * k).max(1));
    let mut trace = Vec::new();
    let mut p = initialize(table, scheme);
    let mut pending = scheme.orphans.clone();
    if options.record_trace {
        trace.push(Snapshot {
            stage: Stage::Init,
            marks: p.clone(),
            pending: pending.clone(),
            changes: Vec::new(),
        });
    }
    let mut border_overflows = 0;
    let mut round = 0;
    loop {
        if round >= cap {
            return Err(Error::NonTermination { rounds: round });
        }
        round += 1;
        let changes = parent_seek(table, &mut p, &mut pending);
        if options.record_trace {
            trace.push(Snapshot {
                stage: Stage::ParentSeek { round },
                marks: p.clone(),
                pending: pending.clone(),
                changes,
            });
        }
        let cut = cutting(
            table,
            &mut p,
            &scheme.orphans,
            &scheme.other_children,
            options.non_strict_reorphan,
        );
        border_overflows += cut.border_overflows;
        pending = cut.pending;
        if options.record_trace {
            trace.push(Snapshot {
                stage: Stage::Cutting { round },
                marks: p.clone(),
                pending: pending.clone(),
                changes: cut.changes,
            });
        }
        if !cut.cuts {
            break;
        }
    }
    let result = Pretessellation::try_from_proto(p, table)?;
    Ok(Rebuild { result, rounds: round, border_overflows, trace })
}
