use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::EventTable;
use crate::tessellation::{
    murders, Counter, Mark, NodeMap, Prototessellation, TTessellation,
};
use crate::{Error, Result};

/// Full tree of births plus the number of murders of every line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheme1 {
    pub births: Vec<Mark>,
    /// Border entry is [`Counter::Infinite`].
    pub murders: NodeMap<Counter>,
}

pub fn extract_scheme1(t: &TTessellation, table: &EventTable) -> Scheme1 {
    Scheme1 { births: t.births().to_vec(), murders: murders(t, table).as_counters() }
}

/// Rebuilds the tessellation in one timewise sweep: whenever two live
/// segments meet, the one with no murders left dies and the other is
/// credited with the kill.
pub fn algorithm1(table: &EventTable, scheme: &Scheme1) -> Result<TTessellation> {
    let k = table.line_count();
    if scheme.births.len() != k || scheme.murders.line_count() != k {
        return Err(Error::InvalidArgument("scheme size does not match the line set".into()));
    }
    let mut p = Prototessellation::new(scheme.births.clone(), vec![Mark::One; k])?;
    let mut remaining = scheme.murders.clone();
    for e in 0..table.len() {
        let (a, b) = table.nodes(e);
        if !(p.covers_strictly(a, e) && p.covers_strictly(b, e)) {
            continue;
        }
        // Exactly one side must be out of murders.
        let (victim, killer) = match (remaining[a].is_zero(), remaining[b].is_zero()) {
            (true, false) => (a, b),
            (false, true) => (b, a),
            _ => return Err(Error::InconsistentScheme { event: e }),
        };
        let victim = victim.line().ok_or(Error::InconsistentScheme { event: e })?;
        p.set_death(victim, Mark::Event(e));
        remaining[killer].decrement().ok_or(Error::InconsistentScheme { event: e })?;
    }
    if remaining.lines().iter().any(|c| !c.is_zero()) {
        return Err(Error::InconsistentScheme { event: table.len() });
    }
    TTessellation::try_from_proto(p, table)
}
