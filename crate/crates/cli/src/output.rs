//! Artifact files and their renderings.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use nlbound::{Clique, OptResult, OrthoGraph, Scenario};
use serde::Serialize;

use crate::Format;

pub struct Artifacts {
    dir: PathBuf,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Artifacts {
        Artifacts {
            dir: dir.to_path_buf(),
        }
    }

    pub fn write(&self, stem: &str, format: Format, body: &str) -> io::Result<PathBuf> {
        self.write_with(stem, format, |f| f.write_all(body.as_bytes()))
    }

    pub fn write_with<F>(&self, stem: &str, format: Format, fill: F) -> io::Result<PathBuf>
    where
        F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(format!("{stem}.{}", format.extension()));
        let mut f = BufWriter::new(File::create(&path)?);
        fill(&mut f)?;
        f.flush()?;
        Ok(path)
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct GraphJson<'a> {
    scenario: Scenario,
    copies: u8,
    vertices: Vec<String>,
    edges: &'a [(usize, usize)],
}

fn edges(g: &OrthoGraph) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            if g.adjacent(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn graph_json(scenario: Scenario, copies: u8, g: &OrthoGraph) -> String {
    json(&GraphJson {
        scenario,
        copies,
        vertices: g.vertices().iter().map(|e| e.label()).collect(),
        edges: &edges(g),
    })
}

/// Vertices with their labels, then the edge list.
pub fn graph_text(g: &OrthoGraph) -> String {
    let mut s = format!("{} vertices, {} edges\n", g.len(), g.edge_count());
    for (i, e) in g.vertices().iter().enumerate() {
        s.push_str(&format!("{i} {e}\n"));
    }
    for (i, j) in edges(g) {
        s.push_str(&format!("{i} -- {j}\n"));
    }
    s
}

pub fn cliques(
    f: &mut impl Write,
    format: Format,
    scenario: Scenario,
    copies: u8,
    g: &OrthoGraph,
    cliques: &[Clique],
    sizes: &BTreeMap<usize, usize>,
) -> io::Result<()> {
    match format {
        Format::Json => {
            writeln!(f, "{{")?;
            writeln!(f, "  \"scenario\": \"{scenario}\",")?;
            writeln!(f, "  \"copies\": {copies},")?;
            writeln!(f, "  \"vertices\": {},", g.len())?;
            writeln!(f, "  \"count\": {},", cliques.len())?;
            writeln!(f, "  \"sizes\": {},", serde_json::to_string(sizes)?)?;
            write!(f, "  \"cliques\": [")?;
            for (k, c) in cliques.iter().enumerate() {
                let sep = if k == 0 { "" } else { "," };
                write!(f, "{sep}\n    {}", serde_json::to_string(&c.labels(g))?)?;
            }
            writeln!(f, "\n  ]\n}}")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(f);
            w.write_record(["index", "size", "events"])?;
            for (k, c) in cliques.iter().enumerate() {
                let labels = c.labels(g).join(" ");
                w.write_record([k.to_string(), c.members.len().to_string(), labels])?;
            }
            w.flush()
        }
        Format::Text | Format::Dot => {
            for c in cliques {
                let evs: Vec<String> = c.events(g).iter().map(|e| e.to_string()).collect();
                writeln!(f, "{{{}}}", evs.join(","))?;
            }
            Ok(())
        }
    }
}

pub fn result_csv(f: &mut impl Write, r: &OptResult) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(f);
    w.write_record([
        "preset",
        "value",
        "feasibility",
        "seed",
        "starts",
        "m0",
        "m1",
        "n0",
        "n1",
        "c1",
        "c2",
        "c3",
        "c4",
    ])?;
    let mut row = vec![
        r.preset.clone(),
        r.value.to_string(),
        r.feasibility.to_string(),
        r.seed.to_string(),
        r.starts_used.to_string(),
    ];
    row.extend(r.point.to_array().iter().map(|v| v.to_string()));
    w.write_record(row)?;
    w.flush()
}

pub fn result_text(r: &OptResult) -> String {
    let h = r.point.hardy_parameters();
    let mut s = format!(
        "{r}\n{}\nq1 = {:.9}, q4 = {:.9}, zeros = ({:.3e}, {:.3e})\n",
        r.point, h.q1, h.q4, h.zeros.0, h.zeros.1
    );
    if let Some(q) = &r.quantum_point {
        let amps: Vec<String> = q
            .state
            .amplitudes
            .iter()
            .map(|a| format!("{a:.9}"))
            .collect();
        s.push_str(&format!("state [{}]\n", amps.join(", ")));
        for (name, m) in ["A0", "A1", "B0", "B1"].iter().zip(&q.measurements) {
            s.push_str(&format!(
                "{name}: theta = {:.9}, phi = {:.9}\n",
                m.theta, m.phi
            ));
        }
    }
    s
}
