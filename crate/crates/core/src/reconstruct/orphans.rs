use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::EventTable;
use crate::tessellation::{
    birth_tree, other_children, Counter, Mark, Node, NodeMap, Prototessellation,
    TTessellation,
};
use crate::{Error, Result};

/// Labelling for the orphan-based rebuild.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheme2 {
    pub leaf: Vec<bool>,
    pub orphans: BTreeSet<usize>,
    /// `None` exactly for orphans.
    pub births: Vec<Option<Mark>>,
    /// Border entry is [`Counter::Infinite`].
    pub virtual_murders: NodeMap<Counter>,
    pub other_children: NodeMap<usize>,
}

impl Scheme2 {
    /// Checks everything that can be checked without the source tessellation.
    pub fn check(&self, table: &EventTable) -> Result<()> {
        let k = table.line_count();
        let fail = |what: alloc::string::String| Err(Error::SchemeViolation(what));
        if self.leaf.len() != k
            || self.births.len() != k
            || self.virtual_murders.line_count() != k
            || self.other_children.line_count() != k
        {
            return fail(format!("labels do not cover the {k} lines"));
        }
        if let Some(&l) = self.orphans.iter().find(|&&l| l >= k) {
            return fail(format!("orphan {l} is not a line"));
        }
        for l in 0..k {
            match (self.orphans.contains(&l), self.births[l]) {
                (true, Some(_)) => return fail(format!("orphan {l} has an explicit birth")),
                (false, None) => return fail(format!("line {l} has neither birth nor orphan flag")),
                (false, Some(Mark::Event(e))) if !table.is_on(e, l) => {
                    return Err(Error::MalformedMarks { line: l })
                }
                (false, Some(Mark::Zero | Mark::One)) => {
                    return fail(format!("line {l} has a sentinel birth"))
                }
                _ => {}
            }
        }
        if let Some(&l) = self.orphans.iter().find(|&&l| self.leaf[l]) {
            return fail(format!("orphan {l} is flagged as a leaf"));
        }
        let mut has_explicit_child = vec![false; k];
        for (l, birth) in self.births.iter().enumerate() {
            let Some(Mark::Event(e)) = birth else { continue };
            if let Some(Node::Line(parent)) = table.other(*e, l) {
                if self.leaf[parent] {
                    return fail(format!("leaf {parent} is the parent of {l}"));
                }
                has_explicit_child[parent] = true;
            }
        }
        if let Some(&l) = self.orphans.iter().find(|&&l| !has_explicit_child[l]) {
            return fail(format!("orphan {l} has no child with a known birth"));
        }
        if *self.virtual_murders.border() != Counter::Infinite {
            return fail("border virtual murders must be unbounded".into());
        }
        let mut total_v = 0;
        for c in self.virtual_murders.lines() {
            match c {
                Counter::Finite(n) => total_v += n,
                Counter::Infinite => return fail("only the border has unbounded virtual murders".into()),
            }
        }
        if total_v > k {
            return fail(format!("{total_v} virtual murders for {k} lines"));
        }
        let total_o: usize = self.other_children.iter().map(|(_, n)| *n).sum();
        if total_o != self.orphans.len() {
            return fail(format!("{total_o} other children for {} orphans", self.orphans.len()));
        }
        Ok(())
    }
}

/// Orphan conditions relative to the source tessellation: no orphan is a
/// leaf, its parent is not an orphan, and its first child is not an orphan.
pub fn check_requirements(
    t: &TTessellation,
    table: &EventTable,
    orphans: &BTreeSet<usize>,
) -> Result<()> {
    let tree = birth_tree(t, table);
    for &l in orphans {
        if l >= t.line_count() {
            return Err(Error::SchemeViolation(format!("orphan {l} is not a line")));
        }
        if let Node::Line(parent) = tree.parent(l) {
            if orphans.contains(&parent) {
                return Err(Error::SchemeViolation(format!("orphan {l} has orphan parent {parent}")));
            }
        }
        match tree.first_child(Node::Line(l)) {
            None => return Err(Error::SchemeViolation(format!("orphan {l} is a leaf"))),
            Some(c) if orphans.contains(&c) => {
                return Err(Error::SchemeViolation(format!("orphan {l} has orphan first child {c}")))
            }
            _ => {}
        }
    }
    Ok(())
}

/// The marks the rebuild reaches after its initial sweep, computed from the
/// true tessellation.
///
/// Segments of the result never cross, but an orphan shares its birth event
/// with its first child until the parent-seeking pass moves it back, so the
/// result is returned as a plain prototessellation.
///
/// Known lines keep their birth; an orphan starts where its earliest child is
/// born. Deaths come from one timewise sweep: a live line dies at the first
/// event it shares with another live segment at or after its true death.
pub fn compute_p_u0(
    t: &TTessellation,
    table: &EventTable,
    orphans: &BTreeSet<usize>,
) -> Prototessellation {
    let k = t.line_count();
    let births: Vec<Mark> = (0..k)
        .map(|l| {
            if !orphans.contains(&l) {
                return t.births()[l];
            }
            table
                .per_line(l)
                .iter()
                .copied()
                .find(|&e| {
                    matches!(table.other(e, l), Some(Node::Line(m)) if t.births()[m] == Mark::Event(e))
                })
                .map_or(Mark::One, Mark::Event)
        })
        .collect();
    let mut p = Prototessellation::new(births, vec![Mark::One; k]).expect("same length");
    for e in 0..table.len() {
        let (a, b) = table.nodes(e);
        if !(p.covers(a, e) && p.covers(b, e)) {
            continue;
        }
        let dying: Vec<usize> = [a, b]
            .into_iter()
            .filter_map(Node::line)
            .filter(|&l| t.deaths()[l] <= Mark::Event(e))
            .collect();
        for l in dying {
            p.set_death(l, Mark::Event(e));
        }
    }
    p
}

/// Kills each line makes in `p`, simultaneous deaths excluded.
pub fn virtual_murders(p: &Prototessellation, table: &EventTable) -> NodeMap<Counter> {
    let k = p.line_count();
    let mut counts = vec![0usize; k];
    for m in 0..k {
        let Mark::Event(e) = p.deaths()[m] else { continue };
        if let Some(Node::Line(l)) = table.other(e, m) {
            if Mark::Event(e) < p.deaths()[l] {
                counts[l] += 1;
            }
        }
    }
    NodeMap::from_parts(Counter::Infinite, counts.into_iter().map(Counter::Finite).collect())
}

/// Interior lines of the birth tree in the larger generation-parity class
/// (even on ties).
pub fn select_initial_orphans(t: &TTessellation, table: &EventTable) -> BTreeSet<usize> {
    let tree = birth_tree(t, table);
    let (even, odd): (Vec<usize>, Vec<usize>) =
        tree.interior().into_iter().partition(|&l| tree.generation(Node::Line(l)) % 2 == 0);
    if odd.len() > even.len() {
        odd.into_iter().collect()
    } else {
        even.into_iter().collect()
    }
}

/// Builds the full labelling for `orphans` from the source tessellation.
pub fn scheme2_for(
    t: &TTessellation,
    table: &EventTable,
    orphans: &BTreeSet<usize>,
) -> Result<Scheme2> {
    check_requirements(t, table, orphans)?;
    let tree = birth_tree(t, table);
    let k = t.line_count();
    let p = compute_p_u0(t, table, orphans);
    Ok(Scheme2 {
        leaf: (0..k).map(|l| tree.is_leaf(l)).collect(),
        orphans: orphans.clone(),
        births: (0..k)
            .map(|l| (!orphans.contains(&l)).then(|| t.births()[l]))
            .collect(),
        virtual_murders: virtual_murders(&p, table),
        other_children: other_children(t.proto(), table, orphans),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_event_table, ConvexPolygon, Line, Vec2, Window};
    use crate::tessellation::murders;

    fn square(axis: Vec2) -> Window {
        Window::new(ConvexPolygon::unit_square(), axis).unwrap()
    }

    /// Chain border -> 0 -> 1 -> 2 with time axis along x:
    /// line 0 is y = 0.5 (full), line 1 is born on it and runs up-right,
    /// line 2 is born on line 1 and runs down-right to the border.
    fn chain() -> (EventTable, TTessellation) {
        let lines = [
            Line::through(0, Vec2::new(0.0, 0.5), Vec2::new(1.0, 0.52)),
            Line::through(1, Vec2::new(0.2, 0.0), Vec2::new(0.5, 1.0)),
            Line::through(2, Vec2::new(0.3, 1.0), Vec2::new(0.9, 0.0)),
        ];
        let table = build_event_table(&lines, &square(Vec2::new(1.0, 0.01))).unwrap();
        let x01 = table.crossing(0, 1).unwrap();
        let x12 = table.crossing(1, 2).unwrap();
        let x02 = table.crossing(0, 2).unwrap();
        // Line 1 lives from its crossing with 0 to the top border; line 2
        // from its crossing with 1 down to line 0.
        assert!(x01 < x12 && x12 < x02);
        let proto = Prototessellation::new(
            vec![Mark::Event(table.entry(0)), Mark::Event(x01), Mark::Event(x12)],
            vec![Mark::Event(table.exit(0)), Mark::Event(table.exit(1)), Mark::Event(x02)],
        )
        .unwrap();
        let t = TTessellation::try_from_proto(proto, &table).unwrap();
        (table, t)
    }

    #[test]
    fn chain_tree_and_selection() {
        let (table, t) = chain();
        let tree = birth_tree(&t, &table);
        assert_eq!(tree.parent(2), Node::Line(1));
        assert_eq!(tree.parent(1), Node::Line(0));
        assert_eq!(tree.interior(), vec![0, 1]);
        let u = select_initial_orphans(&t, &table);
        assert_eq!(u.len(), 1);
        check_requirements(&t, &table, &u).unwrap();
    }

    #[test]
    fn empty_orphans_reproduce_t() {
        let (table, t) = chain();
        let p = compute_p_u0(&t, &table, &BTreeSet::new());
        assert_eq!(&p, t.proto());
        let v = virtual_murders(&p, &table);
        let m = murders(&t, &table);
        for l in 0..3 {
            assert_eq!(v[Node::Line(l)], m.get(Node::Line(l)));
        }
    }

    #[test]
    fn orphan_starts_at_first_child() {
        let (table, t) = chain();
        let orphans: BTreeSet<usize> = [1].into_iter().collect();
        let p = compute_p_u0(&t, &table, &orphans);
        assert_eq!(p.births()[1], Mark::Event(table.crossing(1, 2).unwrap()));
        assert_eq!(p.births()[0], t.births()[0]);
        // Nothing is alive past a true death without a partner, so the deaths
        // match the tessellation here.
        assert_eq!(p.deaths(), t.deaths());
    }

    #[test]
    fn childless_orphan_never_born() {
        let (table, t) = chain();
        let orphans: BTreeSet<usize> = [2].into_iter().collect();
        let p = compute_p_u0(&t, &table, &orphans);
        assert_eq!(p.births()[2], Mark::One);
        assert!(check_requirements(&t, &table, &orphans).is_err());
    }

    #[test]
    fn scheme_checks() {
        let (table, t) = chain();
        let orphans: BTreeSet<usize> = [1].into_iter().collect();
        let s = scheme2_for(&t, &table, &orphans).unwrap();
        s.check(&table).unwrap();
        let mut bad = s.clone();
        bad.leaf[1] = true;
        assert!(matches!(bad.check(&table), Err(Error::SchemeViolation(_))));
        let mut bad = s.clone();
        bad.other_children[Node::Border] += 1;
        assert!(matches!(bad.check(&table), Err(Error::SchemeViolation(_))));
        let mut bad = s;
        bad.births[1] = Some(Mark::Event(table.entry(1)));
        assert!(matches!(bad.check(&table), Err(Error::SchemeViolation(_))));
    }
}
