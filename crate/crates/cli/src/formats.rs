//! File formats: line sets, tessellations and enumeration streams.
//!
//! Marks are stored by what they touch (border entry, border exit, or the
//! crossing with another line) so files stay readable; they are resolved to
//! event indices against the line set's time axis.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use ttess_core::geometry::{build_event_table, choose_time_axis, EventKey, EventKind, Window};
use ttess_core::tessellation::{Mark, Prototessellation};
use ttess_core::{ConvexPolygon, EventTable, Line, Vec2};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineRecord {
    pub id: usize,
    pub alpha: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSetFile {
    /// Counter-clockwise window vertices.
    pub window: Vec<[f64; 2]>,
    pub lines: Vec<LineRecord>,
    /// Time axis direction; chosen from `seed` when absent.
    #[serde(default)]
    pub axis: Option<[f64; 2]>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// A line set with its window and event table resolved.
pub struct Resolved {
    pub file: LineSetFile,
    pub lines: Vec<Line>,
    pub window: Window,
    pub table: EventTable,
}

impl LineSetFile {
    pub fn new(polygon: &ConvexPolygon, lines: &[Line], axis: Option<Vec2>, seed: Option<u64>) -> Self {
        LineSetFile {
            window: polygon.vertices().iter().map(|v| [v.x, v.y]).collect(),
            lines: lines.iter().map(|l| LineRecord { id: l.id, alpha: l.alpha, p: l.p }).collect(),
            axis: axis.map(|a| [a.x, a.y]),
            seed,
        }
    }

    pub fn polygon(&self) -> CliResult<ConvexPolygon> {
        Ok(ConvexPolygon::new(self.window.iter().map(|&[x, y]| Vec2::new(x, y)).collect())?)
    }

    pub fn resolve(self) -> CliResult<Resolved> {
        let polygon = self.polygon()?;
        let lines: Vec<Line> = self.lines.iter().map(|r| Line::new(r.id, r.alpha, r.p)).collect();
        let window = match self.axis {
            Some([x, y]) => Window::new(polygon, Vec2::new(x, y))?,
            None => choose_time_axis(&lines, &polygon, self.seed.unwrap_or(0))?,
        };
        let table = build_event_table(&lines, &window)?;
        let d = window.axis().direction();
        let file = LineSetFile { axis: Some(self.axis.unwrap_or([d.x, d.y])), ..self };
        Ok(Resolved { file, lines, window, table })
    }
}

impl Resolved {
    /// Hash of the window, lines and resolved axis.
    pub fn lines_sha256(&self) -> String {
        let canonical = LineSetFile { seed: None, ..self.file.clone() };
        hex::encode(Sha256::digest(serde_json::to_vec(&canonical).expect("plain data")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkRecord {
    BorderEntry,
    BorderExit,
    Crossing(usize),
    /// Sentinel before every event.
    Zero,
    /// Sentinel after every event.
    One,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TessFile {
    pub births: BTreeMap<String, MarkRecord>,
    pub deaths: BTreeMap<String, MarkRecord>,
    pub lines_sha256: String,
}

fn mark_record(table: &EventTable, line: usize, mark: Mark) -> MarkRecord {
    match mark {
        Mark::Zero => MarkRecord::Zero,
        Mark::One => MarkRecord::One,
        Mark::Event(e) => match table.event(e).kind {
            EventKind::BorderEntry(_) => MarkRecord::BorderEntry,
            EventKind::BorderExit(_) => MarkRecord::BorderExit,
            EventKind::LineLine(a, b) => MarkRecord::Crossing(if a == line { b } else { a }),
        },
    }
}

fn mark_of(table: &EventTable, line: usize, record: MarkRecord) -> CliResult<Mark> {
    let key = match record {
        MarkRecord::Zero => return Ok(Mark::Zero),
        MarkRecord::One => return Ok(Mark::One),
        MarkRecord::BorderEntry => EventKey::Entry(line),
        MarkRecord::BorderExit => EventKey::Exit(line),
        MarkRecord::Crossing(m) => EventKey::Crossing(line, m),
    };
    table
        .lookup(key)
        .map(Mark::Event)
        .ok_or_else(|| CliError::Format(format!("line {line}: no event {record:?} inside the window")))
}

impl TessFile {
    pub fn from_marks(proto: &Prototessellation, resolved: &Resolved) -> Self {
        let side = |marks: &[Mark]| {
            marks
                .iter()
                .enumerate()
                .map(|(l, &m)| (l.to_string(), mark_record(&resolved.table, l, m)))
                .collect()
        };
        TessFile {
            births: side(proto.births()),
            deaths: side(proto.deaths()),
            lines_sha256: resolved.lines_sha256(),
        }
    }

    pub fn to_marks(&self, resolved: &Resolved) -> CliResult<Prototessellation> {
        if self.lines_sha256 != resolved.lines_sha256() {
            return Err(CliError::Format("tessellation was built on a different line set".into()));
        }
        let k = resolved.lines.len();
        let side = |map: &BTreeMap<String, MarkRecord>, what: &str| -> CliResult<Vec<Mark>> {
            if map.len() != k {
                return Err(CliError::Format(format!("{} {what} for {k} lines", map.len())));
            }
            (0..k)
                .map(|l| {
                    let record = map
                        .get(&l.to_string())
                        .ok_or_else(|| CliError::Format(format!("line {l} has no {what}")))?;
                    mark_of(&resolved.table, l, *record)
                })
                .collect()
        };
        Ok(Prototessellation::new(side(&self.births, "births")?, side(&self.deaths, "deaths")?)?)
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_line_set(path: &Path) -> CliResult<Resolved> {
    let file: LineSetFile = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::json(path.display().to_string(), e))?;
    file.resolve()
}

/// Reads `path` or `path:index`. A file holding one JSON object is
/// tessellation 0; otherwise the file is a JSON-lines stream.
pub fn read_tessellation(selector: &str) -> CliResult<TessFile> {
    let (path, index) = match selector.rsplit_once(':') {
        Some((p, i)) if !p.is_empty() && i.parse::<usize>().is_ok() => (p, i.parse().unwrap()),
        _ => (selector, 0usize),
    };
    let text = read_text(Path::new(path))?;
    if let Ok(single) = serde_json::from_str::<TessFile>(&text) {
        if index == 0 {
            return Ok(single);
        }
    }
    let record = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .nth(index)
        .ok_or_else(|| CliError::Format(format!("{path} has no tessellation {index}")))?;
    serde_json::from_str(record).map_err(|e| CliError::json(selector.to_string(), e))
}

pub fn parse_window(text: &str) -> CliResult<ConvexPolygon> {
    if text == "unit" {
        return Ok(ConvexPolygon::unit_square());
    }
    let vertices = text
        .split(';')
        .map(|pair| {
            let (x, y) = pair
                .split_once(',')
                .ok_or_else(|| CliError::Format(format!("window vertex '{pair}' is not x,y")))?;
            let num = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| CliError::Format(format!("bad number '{s}'")))
            };
            Ok(Vec2::new(num(x)?, num(y)?))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(ConvexPolygon::new(vertices)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ttess_core::enumerate::enumerate_all;

    fn resolved() -> Resolved {
        let lines = [
            Line::through(0, Vec2::new(0.0, 0.2), Vec2::new(1.0, 0.8)),
            Line::through(1, Vec2::new(0.0, 0.9), Vec2::new(1.0, 0.1)),
        ];
        LineSetFile::new(&ConvexPolygon::unit_square(), &lines, None, Some(3)).resolve().unwrap()
    }

    #[test]
    fn marks_round_trip() {
        let r = resolved();
        let all = enumerate_all(&r.table, 1000).unwrap();
        assert_eq!(all.len(), 4);
        let mut crossings = 0;
        for t in &all {
            let file = TessFile::from_marks(t.proto(), &r);
            assert_eq!(&file.to_marks(&r).unwrap(), t.proto());
            let text = serde_json::to_string(&file).unwrap();
            assert!(text.contains("\"border_entry\""));
            crossings += text.matches("\"crossing\"").count();
        }
        assert!(crossings > 0);
    }

    #[test]
    fn hash_ignores_seed_but_not_axis() {
        let a = resolved();
        let mut file = a.file.clone();
        file.seed = Some(99);
        assert_eq!(file.resolve().unwrap().lines_sha256(), a.lines_sha256());
        let mut file = a.file.clone();
        file.axis = Some([1.0, 0.123]);
        assert_ne!(file.resolve().unwrap().lines_sha256(), a.lines_sha256());
    }

    #[test]
    fn window_parsing() {
        assert_eq!(parse_window("unit").unwrap(), ConvexPolygon::unit_square());
        let tri = parse_window("0,0;2,0;0,2").unwrap();
        assert!((tri.area() - 2.0).abs() < 1e-12);
        assert!(parse_window("0,0;0,2;2,0").is_err());
        assert!(parse_window("0,0;x").is_err());
    }
}
