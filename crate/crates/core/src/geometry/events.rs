use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::window::check_lines_hit;
use super::{Line, Vec2, Window};
use crate::tessellation::Node;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    /// Crossing of two lines inside the window, ids in increasing order.
    LineLine(usize, usize),
    BorderEntry(usize),
    BorderExit(usize),
}

impl EventKind {
    pub fn involves(&self, line: usize) -> bool {
        match *self {
            EventKind::LineLine(a, b) => a == line || b == line,
            EventKind::BorderEntry(l) | EventKind::BorderExit(l) => l == line,
        }
    }
}

/// Lookup key for [`EventTable::lookup`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKey {
    Crossing(usize, usize),
    Entry(usize),
    Exit(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub index: usize,
    pub time: f64,
    pub kind: EventKind,
    pub point: Vec2,
}

/// Every candidate segment endpoint, totally ordered by time.
///
/// All algorithms compare events by `index` only.
#[derive(Clone, Debug, PartialEq)]
pub struct EventTable {
    events: Vec<Event>,
    per_line: Vec<Vec<usize>>,
    crossings: Vec<Option<usize>>,
    entry: Vec<usize>,
    exit: Vec<usize>,
}

impl EventTable {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn line_count(&self) -> usize {
        self.entry.len()
    }

    /// Events in increasing time; iterate in reverse for the backwards sweep.
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event(&self, index: usize) -> &Event {
        &self.events[index]
    }

    /// Time-ordered event indices on `line`.
    pub fn per_line(&self, line: usize) -> &[usize] {
        &self.per_line[line]
    }

    pub fn crossing(&self, a: usize, b: usize) -> Option<usize> {
        let k = self.line_count();
        if a == b || a >= k || b >= k {
            return None;
        }
        self.crossings[a * k + b]
    }

    pub fn entry(&self, line: usize) -> usize {
        self.entry[line]
    }

    pub fn exit(&self, line: usize) -> usize {
        self.exit[line]
    }

    pub fn lookup(&self, key: EventKey) -> Option<usize> {
        match key {
            EventKey::Crossing(a, b) => self.crossing(a, b),
            EventKey::Entry(l) => self.entry.get(l).copied(),
            EventKey::Exit(l) => self.exit.get(l).copied(),
        }
    }

    /// The two participants of an event. Border events put the border first.
    pub fn nodes(&self, index: usize) -> (Node, Node) {
        match self.events[index].kind {
            EventKind::LineLine(a, b) => (Node::Line(a), Node::Line(b)),
            EventKind::BorderEntry(l) | EventKind::BorderExit(l) => (Node::Border, Node::Line(l)),
        }
    }

    /// The participant of event `index` other than `line`, if `line` is on it.
    pub fn other(&self, index: usize, line: usize) -> Option<Node> {
        match self.events[index].kind {
            EventKind::LineLine(a, b) if a == line => Some(Node::Line(b)),
            EventKind::LineLine(a, b) if b == line => Some(Node::Line(a)),
            EventKind::BorderEntry(l) | EventKind::BorderExit(l) if l == line => Some(Node::Border),
            _ => None,
        }
    }

    pub fn is_on(&self, index: usize, line: usize) -> bool {
        index < self.events.len() && self.events[index].kind.involves(line)
    }

    /// The event where `line` meets `node`: a crossing, or the border entry
    /// when `node` is the border and `entry` is set (exit otherwise).
    pub fn meeting(&self, line: usize, node: Node, entry: bool) -> Option<usize> {
        match node {
            Node::Line(m) => self.crossing(line, m),
            Node::Border if entry => self.entry.get(line).copied(),
            Node::Border => self.exit.get(line).copied(),
        }
    }

    /// Number of interior crossings.
    pub fn crossing_count(&self) -> usize {
        self.events.len() - 2 * self.line_count()
    }
}

/// Computes the events of `lines` in `window` and orders them by time.
pub fn build_event_table(lines: &[Line], window: &Window) -> Result<EventTable> {
    let polygon = window.polygon();
    check_lines_hit(lines, polygon)?;
    let tol = window.tolerance();
    let axis = window.axis();
    let k = lines.len();

    let mut raw: Vec<(f64, EventKind, Vec2)> = Vec::with_capacity(2 * k + k * k / 2);
    for l in lines {
        let (a, b) = polygon.chord(l).ok_or(Error::LineMissesWindow { line: l.id })?;
        let (ta, tb) = (axis.projection(a), axis.projection(b));
        if libm::fabs(ta - tb) <= tol {
            return Err(Error::DegenerateConfiguration(format!(
                "line {} is perpendicular to the time axis",
                l.id
            )));
        }
        let (first, last) = if ta < tb { (a, b) } else { (b, a) };
        raw.push((axis.projection(first), EventKind::BorderEntry(l.id), first));
        raw.push((axis.projection(last), EventKind::BorderExit(l.id), last));
    }
    for (i, l) in lines.iter().enumerate() {
        for m in &lines[i + 1..] {
            let Some(q) = l.intersection(m) else { continue };
            let inset = polygon.inset(q);
            if inset > tol {
                raw.push((axis.projection(q), EventKind::LineLine(l.id, m.id), q));
            } else if inset >= -tol {
                return Err(Error::DegenerateConfiguration(format!(
                    "lines {} and {} cross on the border",
                    l.id, m.id
                )));
            }
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for pair in raw.windows(2) {
        if pair[1].0 - pair[0].0 <= tol {
            return Err(Error::DegenerateConfiguration(format!(
                "events {:?} and {:?} share a time",
                pair[0].1, pair[1].1
            )));
        }
    }

    let mut per_line = vec![Vec::new(); k];
    let mut crossings = vec![None; k * k];
    let mut entry = vec![usize::MAX; k];
    let mut exit = vec![usize::MAX; k];
    let events: Vec<Event> = raw
        .into_iter()
        .enumerate()
        .map(|(index, (_, kind, point))| {
            match kind {
                EventKind::LineLine(a, b) => {
                    per_line[a].push(index);
                    per_line[b].push(index);
                    crossings[a * k + b] = Some(index);
                    crossings[b * k + a] = Some(index);
                }
                EventKind::BorderEntry(l) => {
                    per_line[l].push(index);
                    entry[l] = index;
                }
                EventKind::BorderExit(l) => {
                    per_line[l].push(index);
                    exit[l] = index;
                }
            }
            Event { index, time: window.time(point), kind, point }
        })
        .collect();
    Ok(EventTable { events, per_line, crossings, entry, exit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexPolygon;

    fn window() -> Window {
        Window::new(ConvexPolygon::unit_square(), Vec2::new(0.9, 0.3)).unwrap()
    }

    #[test]
    fn single_line_has_entry_and_exit() {
        let lines = [Line::through(0, Vec2::new(0.0, 0.3), Vec2::new(1.0, 0.6))];
        let table = build_event_table(&lines, &window()).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.event(0).kind, EventKind::BorderEntry(0));
        assert_eq!(table.event(1).kind, EventKind::BorderExit(0));
        assert!(table.event(0).time < table.event(1).time);
    }

    #[test]
    fn crossing_pair_has_five_events() {
        let lines = [
            Line::through(0, Vec2::new(0.0, 0.2), Vec2::new(1.0, 0.8)),
            Line::through(1, Vec2::new(0.0, 0.9), Vec2::new(1.0, 0.1)),
        ];
        let table = build_event_table(&lines, &window()).unwrap();
        assert_eq!(table.len(), 5);
        assert_eq!(table.crossing_count(), 1);
        let x = table.crossing(0, 1).unwrap();
        assert_eq!(table.crossing(1, 0), Some(x));
        assert_eq!(table.lookup(EventKey::Crossing(0, 1)), Some(x));
        for l in 0..2 {
            let on = table.per_line(l);
            assert_eq!(on.len(), 3);
            assert_eq!(on[0], table.entry(l));
            assert_eq!(on[1], x);
            assert_eq!(on[2], table.exit(l));
        }
        assert_eq!(table.other(x, 0), Some(Node::Line(1)));
        assert_eq!(table.nodes(table.entry(1)), (Node::Border, Node::Line(1)));
    }

    #[test]
    fn exterior_crossing_is_not_an_event() {
        let lines = [
            Line::through(0, Vec2::new(0.0, 0.1), Vec2::new(1.0, 0.2)),
            Line::through(1, Vec2::new(0.0, 0.5), Vec2::new(1.0, 0.3)),
        ];
        let table = build_event_table(&lines, &window()).unwrap();
        assert_eq!(table.len(), 4);
        assert_eq!(table.crossing(0, 1), None);
    }

    #[test]
    fn times_strictly_increase() {
        let lines = [
            Line::through(0, Vec2::new(0.0, 0.2), Vec2::new(1.0, 0.8)),
            Line::through(1, Vec2::new(0.0, 0.9), Vec2::new(1.0, 0.1)),
            Line::through(2, Vec2::new(0.4, 0.0), Vec2::new(0.5, 1.0)),
        ];
        let table = build_event_table(&lines, &window()).unwrap();
        assert_eq!(table.len(), 3 + 6);
        for pair in table.events().windows(2) {
            assert!(pair[0].time < pair[1].time);
            assert!(pair[0].time > 0.0 && pair[1].time < 1.0);
        }
    }
}
