//! Birth/death marks per line, the three validity axioms, and the trees and
//! counters derived from a T-tessellation.
//!
//! A prototessellation is any assignment of a birth mark and a death mark to
//! every line. It is a pretessellation when no two segments cross, share a
//! birth, share a death, or have one born where the other dies. It is a
//! T-tessellation when in addition every segment is born and dies strictly
//! inside another segment (or on the border).

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, Index, IndexMut};

use crate::geometry::EventTable;
use crate::{Error, Result};

/// A birth or death time: an event rank, or one of the sentinels bracketing
/// every event. Derived ordering is `Zero < Event(0) < Event(1) < .. < One`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mark {
    Zero,
    Event(usize),
    One,
}

impl Mark {
    pub fn event(self) -> Option<usize> {
        match self {
            Mark::Event(e) => Some(e),
            _ => None,
        }
    }
}

/// A line or the window border.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Border,
    Line(usize),
}

impl Node {
    /// Border is `-1` in files and reports.
    pub fn id(self) -> i64 {
        match self {
            Node::Border => -1,
            Node::Line(l) => l as i64,
        }
    }

    pub fn line(self) -> Option<usize> {
        match self {
            Node::Line(l) => Some(l),
            Node::Border => None,
        }
    }

    fn slot(self) -> usize {
        match self {
            Node::Border => 0,
            Node::Line(l) => l + 1,
        }
    }
}

/// Murder-style counter where the border is unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Counter {
    Finite(usize),
    Infinite,
}

impl Counter {
    pub fn is_zero(self) -> bool {
        self == Counter::Finite(0)
    }

    /// Decrements a finite counter; `None` on underflow.
    pub fn decrement(&mut self) -> Option<()> {
        match self {
            Counter::Infinite => Some(()),
            Counter::Finite(0) => None,
            Counter::Finite(n) => {
                *n -= 1;
                Some(())
            }
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Counter::Finite(n) => Some(n),
            Counter::Infinite => None,
        }
    }
}

/// Dense map over the border and the lines `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodeMap<T> {
    values: Vec<T>,
}

impl<T: Clone> NodeMap<T> {
    pub fn new(line_count: usize, border: T, line: T) -> Self {
        let mut values = vec![line; line_count + 1];
        values[0] = border;
        NodeMap { values }
    }
}

impl<T> NodeMap<T> {
    pub fn from_parts(border: T, lines: Vec<T>) -> Self {
        let mut values = Vec::with_capacity(lines.len() + 1);
        values.push(border);
        values.extend(lines);
        NodeMap { values }
    }

    pub fn line_count(&self) -> usize {
        self.values.len() - 1
    }

    pub fn border(&self) -> &T {
        &self.values[0]
    }

    pub fn lines(&self) -> &[T] {
        &self.values[1..]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Node, &T)> {
        self.values.iter().enumerate().map(|(i, v)| {
            let node = if i == 0 { Node::Border } else { Node::Line(i - 1) };
            (node, v)
        })
    }
}

impl<T> Index<Node> for NodeMap<T> {
    type Output = T;
    fn index(&self, node: Node) -> &T {
        &self.values[node.slot()]
    }
}

impl<T> IndexMut<Node> for NodeMap<T> {
    fn index_mut(&mut self, node: Node) -> &mut T {
        &mut self.values[node.slot()]
    }
}

/// Birth and death marks for each line; the border is implicitly born at
/// `Zero` and dies at `One`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prototessellation {
    births: Vec<Mark>,
    deaths: Vec<Mark>,
}

impl Prototessellation {
    pub fn new(births: Vec<Mark>, deaths: Vec<Mark>) -> Result<Self> {
        if births.len() != deaths.len() {
            return Err(Error::InvalidArgument(format!(
                "{} births for {} deaths",
                births.len(),
                deaths.len()
            )));
        }
        Ok(Prototessellation { births, deaths })
    }

    /// Every line alive from its border entry to its border exit.
    pub fn full(table: &EventTable) -> Self {
        let k = table.line_count();
        Prototessellation {
            births: (0..k).map(|l| Mark::Event(table.entry(l))).collect(),
            deaths: (0..k).map(|l| Mark::Event(table.exit(l))).collect(),
        }
    }

    pub fn line_count(&self) -> usize {
        self.births.len()
    }

    pub fn births(&self) -> &[Mark] {
        &self.births
    }

    pub fn deaths(&self) -> &[Mark] {
        &self.deaths
    }

    pub fn birth(&self, node: Node) -> Mark {
        match node {
            Node::Border => Mark::Zero,
            Node::Line(l) => self.births[l],
        }
    }

    pub fn death(&self, node: Node) -> Mark {
        match node {
            Node::Border => Mark::One,
            Node::Line(l) => self.deaths[l],
        }
    }

    pub fn set_birth(&mut self, line: usize, mark: Mark) {
        self.births[line] = mark;
    }

    pub fn set_death(&mut self, line: usize, mark: Mark) {
        self.deaths[line] = mark;
    }

    /// `birth < e < death`.
    pub fn covers_strictly(&self, node: Node, event: usize) -> bool {
        let e = Mark::Event(event);
        self.birth(node) < e && e < self.death(node)
    }

    /// `birth <= e <= death`.
    pub fn covers(&self, node: Node, event: usize) -> bool {
        let e = Mark::Event(event);
        self.birth(node) <= e && e <= self.death(node)
    }

    /// Lines whose marks differ from `other`'s, split by birth and death.
    pub fn differences(&self, other: &Prototessellation) -> (BTreeSet<usize>, BTreeSet<usize>) {
        let births = (0..self.line_count()).filter(|&l| self.births[l] != other.births[l]).collect();
        let deaths = (0..self.line_count()).filter(|&l| self.deaths[l] != other.deaths[l]).collect();
        (births, deaths)
    }
}

/// A prototessellation whose segments do not cross.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pretessellation(Prototessellation);

/// A validated T-tessellation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TTessellation(Prototessellation);

impl Deref for Pretessellation {
    type Target = Prototessellation;
    fn deref(&self) -> &Prototessellation {
        &self.0
    }
}

impl Deref for TTessellation {
    type Target = Prototessellation;
    fn deref(&self) -> &Prototessellation {
        &self.0
    }
}

impl Pretessellation {
    pub fn try_from_proto(proto: Prototessellation, table: &EventTable) -> Result<Self> {
        let report = validate(&proto, table)?;
        if report.class >= Class::Pre {
            Ok(Pretessellation(proto))
        } else {
            Err(Error::InvalidTessellation(format!("not a pretessellation: {:?}", report.violations)))
        }
    }

    pub fn into_proto(self) -> Prototessellation {
        self.0
    }
}

impl TTessellation {
    pub fn try_from_proto(proto: Prototessellation, table: &EventTable) -> Result<Self> {
        let report = validate(&proto, table)?;
        if report.class == Class::TTess {
            Ok(TTessellation(proto))
        } else {
            Err(Error::InvalidTessellation(format!("{:?}", report.violations)))
        }
    }

    pub(crate) fn assume(proto: Prototessellation) -> Self {
        TTessellation(proto)
    }

    /// The tessellation with every line running border to border; valid
    /// only when no crossing lies inside the window.
    pub fn full(table: &EventTable) -> Result<Self> {
        TTessellation::try_from_proto(Prototessellation::full(table), table)
    }

    pub fn proto(&self) -> &Prototessellation {
        &self.0
    }

    pub fn into_proto(self) -> Prototessellation {
        self.0
    }

    /// Number of segments (one per line).
    pub fn segment_count(&self) -> usize {
        self.line_count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    Proto,
    Pre,
    TTess,
}

/// One violated axiom, with the lines and event involved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clause {
    /// A mark is a sentinel, so the line carries no segment.
    NoSegment { line: usize },
    /// Birth is not strictly earlier than death.
    SegmentOrder { line: usize },
    /// Both segments strictly cover their crossing.
    Crossing { a: usize, b: usize, event: usize },
    SharedBirth { a: usize, b: usize, event: usize },
    BirthOnDeath { born: usize, dying: usize, event: usize },
    SharedDeath { a: usize, b: usize, event: usize },
    BornOffSegment { line: usize, parent: usize, event: usize },
    DiesOffSegment { line: usize, killer: usize, event: usize },
}

impl Clause {
    pub fn name(&self) -> &'static str {
        match self {
            Clause::NoSegment { .. } => "NoSegment",
            Clause::SegmentOrder { .. } => "SegmentOrder",
            Clause::Crossing { .. } => "Crossing",
            Clause::SharedBirth { .. } => "SharedBirth",
            Clause::BirthOnDeath { .. } => "BirthOnDeath",
            Clause::SharedDeath { .. } => "SharedDeath",
            Clause::BornOffSegment { .. } => "BornOffSegment",
            Clause::DiesOffSegment { .. } => "DiesOffSegment",
        }
    }

    fn blocks(&self) -> Class {
        match self {
            Clause::SegmentOrder { .. }
            | Clause::Crossing { .. }
            | Clause::SharedBirth { .. }
            | Clause::BirthOnDeath { .. }
            | Clause::SharedDeath { .. } => Class::Pre,
            Clause::NoSegment { .. }
            | Clause::BornOffSegment { .. }
            | Clause::DiesOffSegment { .. } => Class::TTess,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub class: Class,
    pub violations: Vec<Clause>,
}

fn check_marks(proto: &Prototessellation, table: &EventTable) -> Result<()> {
    if proto.line_count() != table.line_count() {
        return Err(Error::InvalidArgument(format!(
            "{} marks for {} lines",
            proto.line_count(),
            table.line_count()
        )));
    }
    for l in 0..proto.line_count() {
        for mark in [proto.births[l], proto.deaths[l]] {
            if let Mark::Event(e) = mark {
                if !table.is_on(e, l) {
                    return Err(Error::MalformedMarks { line: l });
                }
            }
        }
    }
    Ok(())
}

/// Classifies `proto` and lists every violated clause.
pub fn validate(proto: &Prototessellation, table: &EventTable) -> Result<Report> {
    check_marks(proto, table)?;
    let k = proto.line_count();
    let mut violations = Vec::new();

    for l in 0..k {
        let (b, d) = (proto.births[l], proto.deaths[l]);
        if b.event().is_none() || d.event().is_none() {
            violations.push(Clause::NoSegment { line: l });
        }
        if b >= d {
            violations.push(Clause::SegmentOrder { line: l });
        }
    }

    for a in 0..k {
        for b in a + 1..k {
            let Some(e) = table.crossing(a, b) else { continue };
            let (na, nb) = (Node::Line(a), Node::Line(b));
            if proto.covers_strictly(na, e) && proto.covers_strictly(nb, e) {
                violations.push(Clause::Crossing { a, b, event: e });
            }
            let at = Mark::Event(e);
            if proto.births[a] == at && proto.births[b] == at {
                violations.push(Clause::SharedBirth { a, b, event: e });
            }
            if proto.births[a] == at && proto.deaths[b] == at {
                violations.push(Clause::BirthOnDeath { born: a, dying: b, event: e });
            }
            if proto.births[b] == at && proto.deaths[a] == at {
                violations.push(Clause::BirthOnDeath { born: b, dying: a, event: e });
            }
            if proto.deaths[a] == at && proto.deaths[b] == at {
                violations.push(Clause::SharedDeath { a, b, event: e });
            }
        }
    }

    for l in 0..k {
        if let Mark::Event(e) = proto.births[l] {
            if let Some(Node::Line(m)) = table.other(e, l) {
                if !proto.covers_strictly(Node::Line(m), e) {
                    violations.push(Clause::BornOffSegment { line: l, parent: m, event: e });
                }
            }
        }
        if let Mark::Event(e) = proto.deaths[l] {
            if let Some(Node::Line(m)) = table.other(e, l) {
                if !proto.covers_strictly(Node::Line(m), e) {
                    violations.push(Clause::DiesOffSegment { line: l, killer: m, event: e });
                }
            }
        }
    }

    let class = violations
        .iter()
        .map(Clause::blocks)
        .min()
        .map_or(Class::TTess, |blocked| match blocked {
            Class::Pre => Class::Proto,
            _ => Class::Pre,
        });
    violations.sort();
    Ok(Report { class, violations })
}

/// Parent/child structure rooted at the border.
///
/// Built from births this is the tree of births; built from deaths the same
/// type holds the tree of deaths (parent = killer, children = victims).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirthTree {
    parent: Vec<Node>,
    children: NodeMap<Vec<usize>>,
    generation: NodeMap<usize>,
}

impl BirthTree {
    fn from_marks(marks: &[Mark], table: &EventTable) -> Result<Self> {
        let k = marks.len();
        let mut parent = Vec::with_capacity(k);
        let mut keyed: Vec<(usize, usize)> = Vec::with_capacity(k);
        for (l, mark) in marks.iter().enumerate() {
            let e = mark.event().ok_or_else(|| {
                Error::InvalidTessellation(format!("line {l} has no segment"))
            })?;
            parent.push(table.other(e, l).ok_or(Error::MalformedMarks { line: l })?);
            keyed.push((e, l));
        }
        keyed.sort_unstable();
        let mut children = NodeMap::new(k, Vec::new(), Vec::new());
        for &(_, l) in &keyed {
            children[parent[l]].push(l);
        }
        let mut generation = NodeMap::new(k, 0, usize::MAX);
        let mut stack = vec![Node::Border];
        let mut seen = 0;
        while let Some(node) = stack.pop() {
            let g = generation[node];
            for &c in &children[node] {
                generation[Node::Line(c)] = g + 1;
                stack.push(Node::Line(c));
                seen += 1;
            }
        }
        if seen != k {
            return Err(Error::InvalidTessellation("parent relation is not a tree".into()));
        }
        Ok(BirthTree { parent, children, generation })
    }

    pub fn line_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, line: usize) -> Node {
        self.parent[line]
    }

    /// Children in increasing order of the event that links them.
    pub fn children(&self, node: Node) -> &[usize] {
        &self.children[node]
    }

    pub fn generation(&self, node: Node) -> usize {
        self.generation[node]
    }

    pub fn is_leaf(&self, line: usize) -> bool {
        self.children[Node::Line(line)].is_empty()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.line_count()).filter(|&l| self.is_leaf(l)).collect()
    }

    /// Non-leaf lines; the root is not included.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.line_count()).filter(|&l| !self.is_leaf(l)).collect()
    }

    pub fn first_child(&self, node: Node) -> Option<usize> {
        self.children[node].first().copied()
    }
}

pub fn birth_tree(t: &TTessellation, table: &EventTable) -> BirthTree {
    BirthTree::from_marks(t.births(), table).expect("validated tessellation has a birth tree")
}

pub fn death_tree(t: &TTessellation, table: &EventTable) -> BirthTree {
    BirthTree::from_marks(t.deaths(), table).expect("validated tessellation has a death tree")
}

/// Rebuilds marks from the tree of births and the tree of deaths.
pub fn marks_from_trees(
    births: &BirthTree,
    deaths: &BirthTree,
    table: &EventTable,
) -> Result<Prototessellation> {
    let k = births.line_count();
    let mark = |l: usize, node: Node, entry: bool| {
        table
            .meeting(l, node, entry)
            .map(Mark::Event)
            .ok_or(Error::InvalidTessellation(format!("line {l} does not meet {node:?}")))
    };
    let b = (0..k).map(|l| mark(l, births.parent(l), true)).collect::<Result<Vec<_>>>()?;
    let d = (0..k).map(|l| mark(l, deaths.parent(l), false)).collect::<Result<Vec<_>>>()?;
    Prototessellation::new(b, d)
}

/// Number of segments killed by each line, plus those killed by the border.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Murders {
    pub lines: Vec<usize>,
    pub border_kills: usize,
}

impl Murders {
    /// The border reports as [`Counter::Infinite`].
    pub fn get(&self, node: Node) -> Counter {
        match node {
            Node::Border => Counter::Infinite,
            Node::Line(l) => Counter::Finite(self.lines[l]),
        }
    }

    pub fn as_counters(&self) -> NodeMap<Counter> {
        NodeMap::from_parts(
            Counter::Infinite,
            self.lines.iter().map(|&n| Counter::Finite(n)).collect(),
        )
    }

    pub fn total(&self) -> usize {
        self.lines.iter().sum::<usize>()
    }
}

pub fn murders(t: &TTessellation, table: &EventTable) -> Murders {
    let mut m = Murders { lines: vec![0; t.line_count()], border_kills: 0 };
    for (l, d) in t.deaths().iter().enumerate() {
        match d.event().and_then(|e| table.other(e, l)) {
            Some(Node::Line(killer)) => m.lines[killer] += 1,
            Some(Node::Border) => m.border_kills += 1,
            None => {}
        }
    }
    m
}

/// `O(l)`: orphans born on each line (or on the border).
pub fn other_children(
    t: &Prototessellation,
    table: &EventTable,
    orphans: &BTreeSet<usize>,
) -> NodeMap<usize> {
    let mut counts = NodeMap::new(t.line_count(), 0, 0);
    for &m in orphans {
        if let Some(parent) = t.births()[m].event().and_then(|e| table.other(e, m)) {
            counts[parent] += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_event_table, ConvexPolygon, Line, Vec2, Window};

    fn crossing_pair() -> EventTable {
        let lines = [
            Line::through(0, Vec2::new(0.0, 0.2), Vec2::new(1.0, 0.8)),
            Line::through(1, Vec2::new(0.0, 0.9), Vec2::new(1.0, 0.1)),
        ];
        let w = Window::new(ConvexPolygon::unit_square(), Vec2::new(1.0, 0.05)).unwrap();
        build_event_table(&lines, &w).unwrap()
    }

    /// Line 0 full, line 1 from its entry to the crossing.
    fn l_full_m_dies(table: &EventTable) -> TTessellation {
        let x = table.crossing(0, 1).unwrap();
        let proto = Prototessellation::new(
            vec![Mark::Event(table.entry(0)), Mark::Event(table.entry(1))],
            vec![Mark::Event(table.exit(0)), Mark::Event(x)],
        )
        .unwrap();
        TTessellation::try_from_proto(proto, table).unwrap()
    }

    /// Line 0 full, line 1 born on it and running to the border.
    fn l_full_m_born(table: &EventTable) -> TTessellation {
        let x = table.crossing(0, 1).unwrap();
        let proto = Prototessellation::new(
            vec![Mark::Event(table.entry(0)), Mark::Event(x)],
            vec![Mark::Event(table.exit(0)), Mark::Event(table.exit(1))],
        )
        .unwrap();
        TTessellation::try_from_proto(proto, table).unwrap()
    }

    #[test]
    fn mark_order() {
        assert!(Mark::Zero < Mark::Event(0));
        assert!(Mark::Event(3) < Mark::Event(4));
        assert!(Mark::Event(usize::MAX) < Mark::One);
    }

    #[test]
    fn full_crossing_lines_are_only_proto() {
        let table = crossing_pair();
        let report = validate(&Prototessellation::full(&table), &table).unwrap();
        assert_eq!(report.class, Class::Proto);
        assert!(matches!(report.violations[0], Clause::Crossing { a: 0, b: 1, .. }));
    }

    #[test]
    fn hand_cases_validate() {
        let table = crossing_pair();
        l_full_m_dies(&table);
        l_full_m_born(&table);
    }

    #[test]
    fn off_segment_birth_is_pre_only() {
        let table = crossing_pair();
        let x = table.crossing(0, 1).unwrap();
        // Line 1 born on line 0 after line 0 has died there.
        let proto = Prototessellation::new(
            vec![Mark::Event(table.entry(0)), Mark::Event(x)],
            vec![Mark::Event(x), Mark::Event(table.exit(1))],
        )
        .unwrap();
        let report = validate(&proto, &table).unwrap();
        assert_eq!(report.class, Class::Proto);
        assert!(report.violations.iter().any(|c| matches!(c, Clause::BirthOnDeath { .. })));
    }

    #[test]
    fn off_line_mark_is_malformed() {
        let table = crossing_pair();
        let proto = Prototessellation::new(
            vec![Mark::Event(table.entry(1)), Mark::Event(table.entry(1))],
            vec![Mark::Event(table.exit(0)), Mark::Event(table.exit(1))],
        )
        .unwrap();
        assert_eq!(validate(&proto, &table), Err(Error::MalformedMarks { line: 0 }));
    }

    #[test]
    fn zero_length_segment_rejected() {
        let table = crossing_pair();
        let x = table.crossing(0, 1).unwrap();
        let proto = Prototessellation::new(
            vec![Mark::Event(table.entry(0)), Mark::Event(x)],
            vec![Mark::Event(table.exit(0)), Mark::Event(x)],
        )
        .unwrap();
        let report = validate(&proto, &table).unwrap();
        assert!(report.violations.contains(&Clause::SegmentOrder { line: 1 }));
        assert_eq!(report.class, Class::Proto);
    }

    #[test]
    fn trees_of_hand_case() {
        let table = crossing_pair();
        let t = l_full_m_born(&table);
        let tree = birth_tree(&t, &table);
        assert_eq!(tree.parent(1), Node::Line(0));
        assert_eq!(tree.parent(0), Node::Border);
        assert_eq!(tree.generation(Node::Line(1)), 2);
        assert_eq!(tree.leaves(), vec![1]);
        let deaths = death_tree(&t, &table);
        assert_eq!(deaths.parent(0), Node::Border);
        assert_eq!(deaths.parent(1), Node::Border);
        assert_eq!(marks_from_trees(&tree, &deaths, &table).unwrap(), *t.proto());
    }

    #[test]
    fn murder_counts() {
        let table = crossing_pair();
        let t = l_full_m_dies(&table);
        let m = murders(&t, &table);
        assert_eq!(m.lines, vec![1, 0]);
        assert_eq!(m.border_kills, 1);
        assert_eq!(m.get(Node::Border), Counter::Infinite);
        assert_eq!(m.total() + m.border_kills, 2);
    }

    #[test]
    fn other_children_counts() {
        let table = crossing_pair();
        let t = l_full_m_born(&table);
        let none = other_children(&t, &table, &BTreeSet::new());
        assert!(none.iter().all(|(_, &n)| n == 0));
        let orphans: BTreeSet<usize> = [1].into_iter().collect();
        let o = other_children(&t, &table, &orphans);
        assert_eq!(o[Node::Line(0)], 1);
        assert_eq!(*o.border(), 0);
        let o0: BTreeSet<usize> = [0].into_iter().collect();
        assert_eq!(*other_children(&t, &table, &o0).border(), 1);
    }
}
