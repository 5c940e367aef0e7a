//! Orphan selection by birth-tree parity, refinement until the rebuild is
//! exact, and the counting bookkeeping for the certified labelling.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::orphans::{scheme2_for, select_initial_orphans, Scheme2};
use super::rebuild::algorithm2;
use crate::geometry::EventTable;
use crate::tessellation::{birth_tree, Mark, Node, Prototessellation, TTessellation};
use crate::{Error, Result};

/// Lines whose rebuilt segment differs from the true one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReconstructionDiff {
    pub d: BTreeSet<usize>,
    pub d_b: BTreeSet<usize>,
    pub d_d: BTreeSet<usize>,
}

impl ReconstructionDiff {
    pub fn between(t: &TTessellation, rebuilt: &Prototessellation) -> Self {
        let (d_b, d_d) = t.differences(rebuilt);
        let d = d_b.union(&d_d).copied().collect();
        ReconstructionDiff { d, d_b, d_d }
    }

    pub fn is_exact(&self) -> bool {
        self.d.is_empty()
    }
}

/// Drops the orphan whose omission repairs the least wrongly born line:
/// the true killer of the line that line was wrongly born on.
///
/// Returns the removed orphan and the reduced set.
pub fn refine_orphans(
    t: &TTessellation,
    table: &EventTable,
    orphans: &BTreeSet<usize>,
    rebuilt: &Prototessellation,
) -> Result<(usize, BTreeSet<usize>)> {
    let diff = ReconstructionDiff::between(t, rebuilt);
    let Some(&l1) = diff.d_b.first() else {
        return Err(Error::InvalidReduction("every birth is already correct".into()));
    };
    let Mark::Event(e) = rebuilt.births()[l1] else {
        return Err(Error::InvalidReduction(format!("line {l1} is never born in the rebuild")));
    };
    let l2 = match table.other(e, l1) {
        Some(Node::Line(l2)) => l2,
        _ => return Err(Error::InvalidReduction(format!("line {l1} is rebuilt on the border"))),
    };
    let Mark::Event(d) = t.deaths()[l2] else {
        return Err(Error::InvalidReduction(format!("line {l2} has no death")));
    };
    let l3 = match table.other(d, l2) {
        Some(Node::Line(l3)) => l3,
        _ => {
            return Err(Error::InvalidReduction(format!("line {l2} is killed by the border")))
        }
    };
    if !orphans.contains(&l3) {
        return Err(Error::InvalidReduction(format!("killer {l3} of line {l2} is not an orphan")));
    }
    let mut reduced = orphans.clone();
    reduced.remove(&l3);
    Ok((l3, reduced))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub removed: usize,
    pub d_b_before: BTreeSet<usize>,
    pub d_b_after: BTreeSet<usize>,
    /// The regular reduction failed and the least wrongly born orphan was
    /// dropped instead.
    pub fallback: Option<Error>,
}

/// Logarithms of the factors bounding the number of labellings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabellingCount {
    /// Leaf flags: `k ln 2`.
    pub ln_leaf_flags: f64,
    /// Explicit parents: `(k - u) ln(k + 1 - z)`.
    pub ln_parents: f64,
    /// Virtual murders and other children: `2 ln C(2k, k)`.
    pub ln_splits: f64,
    /// `k - u <= (3k + z) / 4`.
    pub parent_exponent_ok: bool,
}

impl LabellingCount {
    pub fn new(k: usize, orphans: usize, leaves: usize) -> Self {
        let kf = k as f64;
        let ln_choose = libm::lgamma(2.0 * kf + 1.0) - 2.0 * libm::lgamma(kf + 1.0);
        let base = (k + 1).saturating_sub(leaves).max(1) as f64;
        LabellingCount {
            ln_leaf_flags: kf * core::f64::consts::LN_2,
            ln_parents: (k - orphans.min(k)) as f64 * libm::log(base),
            ln_splits: 2.0 * ln_choose,
            parent_exponent_ok: 4 * (k - orphans.min(k)) <= 3 * k + leaves,
        }
    }

    pub fn ln_total(&self) -> f64 {
        self.ln_leaf_flags + self.ln_parents + self.ln_splits
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedScheme2 {
    pub scheme: Scheme2,
    pub initial_orphans: BTreeSet<usize>,
    pub refinements: Vec<Refinement>,
    /// Some refinement used the fallback.
    pub flagged: bool,
    pub leaves: usize,
    pub count: LabellingCount,
}

impl CertifiedScheme2 {
    /// Orphan count reaches `ceil((k - z) / 4)`.
    pub fn meets_orphan_bound(&self) -> bool {
        let k = self.scheme.leaf.len();
        4 * self.scheme.orphans.len() >= k.saturating_sub(self.leaves)
    }
}

/// Picks orphans by parity, then refines until the rebuild reproduces `t`.
pub fn extract_scheme2(t: &TTessellation, table: &EventTable) -> Result<CertifiedScheme2> {
    let k = t.line_count();
    let leaves = birth_tree(t, table).leaves().len();
    let initial_orphans = select_initial_orphans(t, table);
    let mut orphans = initial_orphans.clone();
    let mut refinements: Vec<Refinement> = Vec::new();
    loop {
        let scheme = scheme2_for(t, table, &orphans)?;
        let rebuilt = algorithm2(table, &scheme)?;
        let diff = ReconstructionDiff::between(t, &rebuilt);
        if let Some(last) = refinements.last_mut() {
            last.d_b_after = diff.d_b.clone();
        }
        if diff.d_b.is_empty() {
            if !diff.is_exact() {
                return Err(Error::RoundTripMismatch { lines: diff.d.into_iter().collect() });
            }
            let flagged = refinements.iter().any(|r| r.fallback.is_some());
            let count = LabellingCount::new(k, orphans.len(), leaves);
            return Ok(CertifiedScheme2 { scheme, initial_orphans, refinements, flagged, leaves, count });
        }
        if refinements.len() > k {
            return Err(Error::RoundTripMismatch { lines: diff.d.into_iter().collect() });
        }
        let (removed, reduced, fallback) = match refine_orphans(t, table, &orphans, &rebuilt) {
            Ok((removed, reduced)) => (removed, reduced, None),
            Err(err @ Error::InvalidReduction(_)) => {
                let Some(&removed) = diff.d_b.intersection(&orphans).next() else {
                    return Err(err);
                };
                let mut reduced = orphans.clone();
                reduced.remove(&removed);
                (removed, reduced, Some(err))
            }
            Err(err) => return Err(err),
        };
        refinements.push(Refinement {
            removed,
            d_b_before: diff.d_b,
            d_b_after: BTreeSet::new(),
            fallback,
        });
        orphans = reduced;
    }
}
