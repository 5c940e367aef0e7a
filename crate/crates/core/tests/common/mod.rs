#![allow(dead_code)]

use ttess_core::enumerate::{enumerate_all, trial_lines, DEFAULT_BUDGET};
use ttess_core::geometry::build_event_table;
use ttess_core::tessellation::{validate, Class, Mark, Prototessellation, TTessellation};
use ttess_core::{ConvexPolygon, EventTable, Line, Window};

pub struct Case {
    pub seed: u64,
    pub lines: Vec<Line>,
    pub window: Window,
    pub table: EventTable,
}

/// `count` random sets of `k` lines in the unit square; trials whose lines
/// admit no time axis are skipped.
pub fn corpus(k: usize, count: usize, seed: u64) -> Vec<Case> {
    let square = ConvexPolygon::unit_square();
    let mut out = Vec::with_capacity(count);
    let mut trial = 0;
    while out.len() < count {
        if let Ok((lines, window)) = trial_lines(k, &square, seed, trial) {
            if let Ok(table) = build_event_table(&lines, &window) {
                out.push(Case { seed: trial as u64, lines, window, table });
            }
        }
        trial += 1;
    }
    out
}

pub fn all(table: &EventTable) -> Vec<TTessellation> {
    enumerate_all(table, DEFAULT_BUDGET).unwrap()
}

/// Every assignment of an ordered event pair to each line, kept when the
/// validator accepts it as a T-tessellation.
pub fn brute_force(table: &EventTable) -> Vec<Prototessellation> {
    let k = table.line_count();
    let choices: Vec<Vec<(usize, usize)>> = (0..k)
        .map(|l| {
            let on = table.per_line(l);
            let mut pairs = Vec::new();
            for (i, &a) in on.iter().enumerate() {
                for &b in &on[i + 1..] {
                    pairs.push((a.min(b), a.max(b)));
                }
            }
            pairs
        })
        .collect();
    let mut found = Vec::new();
    let mut pick = vec![0usize; k];
    loop {
        let births = (0..k).map(|l| Mark::Event(choices[l][pick[l]].0)).collect();
        let deaths = (0..k).map(|l| Mark::Event(choices[l][pick[l]].1)).collect();
        let proto = Prototessellation::new(births, deaths).unwrap();
        if validate(&proto, table).unwrap().class == Class::TTess {
            found.push(proto);
        }
        let mut i = 0;
        loop {
            if i == k {
                found.sort();
                return found;
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// One random set of `k` lines, if it admits a time axis.
pub fn case(k: usize, seed: u64) -> Option<Case> {
    let square = ConvexPolygon::unit_square();
    let (lines, window) = trial_lines(k, &square, seed, 0).ok()?;
    let table = build_event_table(&lines, &window).ok()?;
    Some(Case { seed, lines, window, table })
}

/// Checks the working marks of one traced rebuild against the true `t`:
/// never early, pending lines strictly late, every change a strict decrease,
/// and the initial marks equal to the direct construction.
pub fn check_trace(
    t: &TTessellation,
    table: &EventTable,
    orphans: &std::collections::BTreeSet<usize>,
    rebuild: &ttess_core::reconstruct::Rebuild,
) -> Result<(), String> {
    use ttess_core::reconstruct::{compute_p_u0, Stage};
    let first = rebuild.trace.first().ok_or("empty trace")?;
    if first.stage != Stage::Init {
        return Err("trace does not start at initialization".into());
    }
    if first.marks != compute_p_u0(t, table, orphans) {
        return Err(format!("initialization {:?} differs from direct construction", first.marks));
    }
    for snap in &rebuild.trace {
        for l in 0..t.line_count() {
            if snap.marks.births()[l] < t.births()[l] || snap.marks.deaths()[l] < t.deaths()[l] {
                return Err(format!("line {l} early at {:?}", snap.stage));
            }
        }
        for &l in &snap.pending {
            if snap.marks.births()[l] <= t.births()[l] {
                return Err(format!("pending line {l} not strictly late at {:?}", snap.stage));
            }
        }
        for c in &snap.changes {
            if c.to >= c.from {
                return Err(format!("{c:?} is not a decrease at {:?}", snap.stage));
            }
        }
    }
    Ok(())
}
