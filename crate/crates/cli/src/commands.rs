use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use ttess_core::enumerate::{
    count_tessellations, enumerate_all, for_each_tessellation, grid_lines, grid_lower_bound,
    trial_lines,
};
use ttess_core::geometry::{
    build_event_table, extract_cells, line_stream_rng, sample_poisson_lines, sample_uniform_lines,
};
use ttess_core::gibbs::{estimate_partition, z_series_upper, Bound, EnergyModel};
use ttess_core::reconstruct::{
    algorithm1, algorithm2_with, extract_scheme1, extract_scheme2, RebuildOptions,
};
use ttess_core::tessellation::{birth_tree, validate, Clause, TTessellation};
use ttess_core::{ConvexPolygon, Error};

use crate::error::{CliError, CliResult};
use crate::formats::{
    parse_window, read_line_set, read_tessellation, LineSetFile, Resolved, TessFile,
};
use crate::manifest::{sidecar, Hashing, RunManifest};
use crate::{
    svg, BoundsArgs, Command, CountArgs, EnumerateArgs, EstimateArgs, GridArgs, RenderArgs,
    RoundtripArgs, SampleArgs, ValidateArgs,
};

struct Sink {
    path: Option<PathBuf>,
    writer: Hashing<Box<dyn Write>>,
}

impl Sink {
    fn open(path: &Option<PathBuf>) -> CliResult<Self> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Sink { path: path.clone(), writer: Hashing::new(inner) })
    }

    fn name(&self) -> String {
        self.path.as_ref().map_or("-".into(), |p| p.display().to_string())
    }

    fn io(&self, e: io::Error) -> CliError {
        CliError::io(self.path.clone().unwrap_or_else(|| "-".into()), e)
    }

    fn json<T: Serialize>(&mut self, value: &T) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::json("output", e))?;
        writeln!(self.writer, "{text}").map_err(|e| self.io(e))
    }

    fn text(&mut self, text: &str) -> CliResult<()> {
        self.writer.write_all(text.as_bytes()).map_err(|e| self.io(e))
    }

    fn close(self, manifest: &mut RunManifest) -> CliResult<()> {
        let name = self.name();
        let path = self.path.clone().unwrap_or_else(|| "-".into());
        let hash = self.writer.finish().map_err(|e| CliError::io(path, e))?;
        manifest.outputs.insert(name, hash);
        Ok(())
    }
}

fn args_value<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("plain arguments")
}

pub fn run(command: Command, manifest_path: Option<PathBuf>) -> CliResult<()> {
    let started = Instant::now();
    let name = match &command {
        Command::Sample(_) => "sample",
        Command::Enumerate(_) => "enumerate",
        Command::Count(_) => "count",
        Command::Grid(_) => "grid",
        Command::Roundtrip(_) => "roundtrip",
        Command::EstimateZ(_) => "estimate-z",
        Command::Bounds(_) => "bounds",
        Command::Render(_) => "render",
        Command::Validate(_) => "validate",
    };
    let mut manifest = RunManifest::new(name, args_value(&command));
    let out = match command {
        Command::Sample(a) => sample(&a, &mut manifest)?,
        Command::Enumerate(a) => enumerate(&a, &mut manifest)?,
        Command::Count(a) => count(&a, &mut manifest)?,
        Command::Grid(a) => grid(&a, &mut manifest)?,
        Command::Roundtrip(a) => roundtrip(&a, &mut manifest)?,
        Command::EstimateZ(a) => estimate(&a, &mut manifest)?,
        Command::Bounds(a) => bounds(&a, &mut manifest)?,
        Command::Render(a) => render(&a, &mut manifest)?,
        Command::Validate(a) => validate_cmd(&a, &mut manifest)?,
    };
    manifest.duration_ms = started.elapsed().as_secs_f64() * 1e3;
    if let Some(target) = manifest_path.or_else(|| out.as_deref().map(sidecar)) {
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::json("manifest", e))?;
        std::fs::write(&target, text + "\n").map_err(|e| CliError::io(&target, e))?;
    }
    Ok(())
}

fn load(path: &Path, manifest: &mut RunManifest) -> CliResult<Resolved> {
    manifest.input(path)?;
    let resolved = read_line_set(path)?;
    if let Some(seed) = resolved.file.seed {
        manifest.seeds.push(seed);
    }
    Ok(resolved)
}

fn sample(a: &SampleArgs, m: &mut RunManifest) -> CliResult<Option<PathBuf>> {
    m.seeds.push(a.seed);
    let polygon = parse_window(&a.window)?;
    let lines = match (a.tau, a.k) {
        (Some(tau), _) => sample_poisson_lines(tau, &polygon, a.seed)?,
        (None, Some(k)) => sample_uniform_lines(k, &polygon, &mut line_stream_rng(a.seed, 0)),
        (None, None) => unreachable!("clap requires one of --tau and --k"),
    };
    let resolved = LineSetFile::new(&polygon, &lines, None, Some(a.seed)).resolve()?;
    let mut sink = Sink::open(&a.out)?;
    sink.json(&resolved.file)?;
    sink.close(m)?;
    Ok(a.out.clone())
}

fn enumerate(a: &EnumerateArgs, m: &mut RunManifest) -> CliResult<Option<PathBuf>> {
    let resolved = load(&a.lines, m)?;
    let mut sink = Sink::open(&a.out)?;
    let mut failure = None;
    for_each_tessellation(&resolved.table, a.budget, |t| {
        if failure.is_some() {
            return;
        }
        let record = TessFile::from_marks(t.proto(), &resolved);
        let line = serde_json::to_string(&record).expect("plain data");
        if let Err(e) = writeln!(sink.writer, "{line}") {
            failure = Some(e);
        }
    })?;
    if let Some(e) = failure {
        return Err(sink.io(e));
    }
    sink.close(m)?;
    Ok(a.out.clone())
}

fn count(a: &CountArgs, m: &mut RunManifest) -> CliResult<Option<PathBuf>> {
    m.seeds.push(a.seed);
    let polygon = parse_window(&a.window)?;
    let mut sink = Sink::open(&a.out)?;
    {
        let mut csv = csv::Writer::from_writer(&mut sink.writer);
        csv.write_record(["trial", "k", "count", "seed"])?;
        for trial in 0..a.trials {
            let (lines, window) = trial_lines(a.k, &polygon, a.seed, trial).map_err(|f| f.error)?;
            let n = count_tessellations(&build_event_table(&lines, &window)?, a.budget)?;
            csv.serialize((trial, a.k, n, a.seed))?;
        }
        csv.flush().map_err(|e| CliError::io("-", e))?;
    }
    sink.close(m)?;
    Ok(a.out.clone())
}

fn grid(a: &GridArgs, m: &mut RunManifest) -> CliResult<Option<PathBuf>> {
    m.seeds.push(a.seed);
    let (lines, window) = grid_lines(a.k, a.a, a.seed)?;
    let mut sink = Sink::open(&a.out)?;
    if a.enumerate {
        let n = count_tessellations(&build_event_table(&lines, &window)?, a.budget)?;
        let bound = grid_lower_bound(a.k, a.a);
        sink.text(&format!("count {n}\ncount ≥ {bound}: {}\n", n >= bound))?;
    } else {
        let d = window.axis().direction();
        let file = LineSetFile::new(window.polygon(), &lines, Some(d), Some(a.seed));
        sink.json(&file)?;
    }
    sink.close(m)?;
    Ok(a.out.clone())
}

#[derive(Serialize)]
struct RoundtripRow {
    tess_index: usize,
    scheme: u8,
    ok: bool,
    orphan_count: usize,
    leaves: usize,
    rounds: usize,
    refinements: usize,
    flagged: bool,
}

fn roundtrip_one(t: &TTessellation, resolved: &Resolved, scheme: u8, index: usize) -> CliResult<RoundtripRow> {
    let table = &resolved.table;
    let leaves = birth_tree(t, table).leaves().len();
    let row = |ok, orphan_count, rounds, refinements, flagged| RoundtripRow {
        tess_index: index,
        scheme,
        ok,
        orphan_count,
        leaves,
        rounds,
        refinements,
        flagged,
    };
    if scheme == 1 {
        let ok = algorithm1(table, &extract_scheme1(t, table)).is_ok_and(|r| &r == t);
        return Ok(row(ok, 0, 1, 0, false));
    }
    match extract_scheme2(t, table) {
        Ok(cert) => {
            let run = algorithm2_with(table, &cert.scheme, RebuildOptions::default())?;
            let ok = run.result.births() == t.births() && run.result.deaths() == t.deaths();
            Ok(row(ok, cert.scheme.orphans.len(), run.rounds, cert.refinements.len(), cert.flagged))
        }
        Err(Error::RoundTripMismatch { .. } | Error::InvalidReduction(_)) => {
            Ok(row(false, 0, 0, 0, true))
        }
        Err(e) => Err(e.into()),
    }
}

fn roundtrip(a: &RoundtripArgs, m: &mut RunManifest) -> CliResult<Option<PathBuf>> {
    let resolved = load(&a.lines, m)?;
    let all = enumerate_all(&resolved.table, a.budget)?;
    let mut sink = Sink::open(&a.out)?;
    let mut failed = Vec::new();
    {
        let mut csv = csv::Writer::from_writer(&mut sink.writer);
        for (i, t) in all.iter().enumerate() {
            let row = roundtrip_one(t, &resolved, a.scheme, i)?;
            if !row.ok {
                failed.push(i);
            }
            csv.serialize(row)?;
        }
        csv.flush().map_err(|e| CliError::io("-", e))?;
    }
    sink.close(m)?;
    if !failed.is_empty() {
        return Err(Error::RoundTripMismatch { lines: failed }.into());
    }
    Ok(a.out.clone())
}

pub fn parse_energy(text: &str) -> CliResult<EnergyModel> {
    if text == "zero" {
        return Ok(EnergyModel::zero());
    }
    let parts = text
        .split(',')
        .map(|part| {
            let (kind, theta) = part
                .split_once(':')
                .ok_or_else(|| CliError::Format(format!("energy term '{part}' is not name:theta")))?;
            let theta: f64 = theta
                .trim()
                .parse()
                .map_err(|_| CliError::Format(format!("bad energy weight '{theta}'")))?;
            match kind.trim() {
                "nlines" => Ok(EnergyModel::NLines(theta)),
                "length" => Ok(EnergyModel::TotalLength(theta)),
                "area" => Ok(EnergyModel::AreaVariance(theta)),
                other => Err(CliError::Format(format!("unknown energy '{other}'"))),
            }
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(EnergyModel::Composite(parts))
}

#[derive(Serialize)]
struct EstimateRecord {
    z_hat: f64,
    std_error: f64,
    samples: usize,
    skipped_oversize: usize,
    tau: f64,
    k_cap: usize,
    seed: u64,
    truncated: bool,
    tail_probability: f64,
    energy: String,
    stability_constant: f64,
}

fn estimate(a: &EstimateArgs, m: &mut RunManifest) -> CliResult<Option<PathBuf>> {
    m.seeds.push(a.seed);
    let polygon: ConvexPolygon = parse_window(&a.window)?;
    let model = parse_energy(&a.energy)?;
    let e = estimate_partition(&model, a.tau, &polygon, a.samples, a.k_cap, a.seed, a.budget)?;
    let record = EstimateRecord {
        z_hat: e.z_hat,
        std_error: e.std_error,
        samples: e.samples,
        skipped_oversize: e.skipped_oversize,
        tau: e.tau,
        k_cap: e.k_cap,
        seed: e.seed,
        truncated: e.truncated,
        tail_probability: e.tail_probability,
        energy: a.energy.clone(),
        stability_constant: model.stability_constant(&polygon) + 0.0,
    };
    let mut sink = Sink::open(&a.out)?;
    sink.json(&record)?;
    sink.close(m)?;
    Ok(a.out.clone())
}

pub fn parse_bound(text: &str) -> CliResult<Bound> {
    if text == "fourk" {
        return Ok(Bound::FourK);
    }
    let bad = || CliError::Format(format!("bound '{text}' is not fourk or thm1:EPSILON,CONSTANT"));
    let rest = text.strip_prefix("thm1:").ok_or_else(bad)?;
    let (eps, constant) = rest.split_once(',').ok_or_else(bad)?;
    Ok(Bound::TheoremOne {
        epsilon: eps.trim().parse().map_err(|_| bad())?,
        constant: constant.trim().parse().map_err(|_| bad())?,
    })
}

fn bounds(a: &BoundsArgs, m: &mut RunManifest) -> CliResult<Option<PathBuf>> {
    let s = z_series_upper(a.c, a.tau, a.k_max, parse_bound(&a.bound)?)?;
    let mut sink = Sink::open(&a.out)?;
    {
        let mut csv = csv::Writer::from_writer(&mut sink.writer);
        csv.write_record(["k", "log_term", "term", "partial_sum", "decreasing"])?;
        let mut partial = 0.0;
        for (k, (&lt, &t)) in s.log_terms.iter().zip(&s.terms).enumerate() {
            partial += t;
            let decreasing = k > 0 && lt < s.log_terms[k - 1];
            csv.serialize((k, lt, t, partial, decreasing))?;
        }
        csv.flush().map_err(|e| CliError::io("-", e))?;
    }
    sink.close(m)?;
    Ok(a.out.clone())
}

fn load_tess(selector: &str, resolved: &Resolved, m: &mut RunManifest) -> CliResult<ttess_core::Prototessellation> {
    let path = selector.rsplit_once(':').filter(|(_, i)| i.parse::<usize>().is_ok()).map_or(selector, |(p, _)| p);
    m.input(Path::new(path))?;
    read_tessellation(selector)?.to_marks(resolved)
}

fn render(a: &RenderArgs, m: &mut RunManifest) -> CliResult<Option<PathBuf>> {
    let resolved = load(&a.lines, m)?;
    let tess = match &a.tess {
        Some(selector) => {
            let proto = load_tess(selector, &resolved, m)?;
            Some(TTessellation::try_from_proto(proto, &resolved.table)?)
        }
        None => None,
    };
    let cells = match (&tess, a.no_cells) {
        (Some(t), false) => Some(extract_cells(t, &resolved.lines, &resolved.window)?),
        _ => None,
    };
    let doc = svg::render(&resolved.window, &resolved.table, tess.as_ref(), cells.as_deref());
    let mut sink = Sink::open(&a.out)?;
    sink.text(&doc)?;
    sink.close(m)?;
    Ok(a.out.clone())
}

#[derive(Serialize)]
struct Violation {
    clause: &'static str,
    lines: Vec<usize>,
    event: Option<usize>,
}

impl From<&Clause> for Violation {
    fn from(c: &Clause) -> Self {
        let (lines, event) = match *c {
            Clause::NoSegment { line } | Clause::SegmentOrder { line } => (vec![line], None),
            Clause::Crossing { a, b, event }
            | Clause::SharedBirth { a, b, event }
            | Clause::SharedDeath { a, b, event } => (vec![a, b], Some(event)),
            Clause::BirthOnDeath { born, dying, event } => (vec![born, dying], Some(event)),
            Clause::BornOffSegment { line, parent, event } => (vec![line, parent], Some(event)),
            Clause::DiesOffSegment { line, killer, event } => (vec![line, killer], Some(event)),
        };
        Violation { clause: c.name(), lines, event }
    }
}

#[derive(Serialize)]
struct ValidationRecord {
    class: String,
    violations: Vec<Violation>,
}

fn validate_cmd(a: &ValidateArgs, m: &mut RunManifest) -> CliResult<Option<PathBuf>> {
    let resolved = load(&a.lines, m)?;
    let proto = load_tess(&a.tess, &resolved, m)?;
    let report = validate(&proto, &resolved.table)?;
    let record = ValidationRecord {
        class: format!("{:?}", report.class),
        violations: report.violations.iter().map(Violation::from).collect(),
    };
    let mut sink = Sink::open(&a.out)?;
    sink.json(&record)?;
    sink.close(m)?;
    Ok(a.out.clone())
}
