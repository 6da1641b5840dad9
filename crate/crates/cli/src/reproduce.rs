//! The summary table: every bound against its published value.

use std::io::{self, Write};

use nlbound::optimize::{self, OptResult};
use nlbound::quantum::{max_quantum, StateFamily};
use nlbound::Scenario;
use serde::Serialize;

use crate::{Failure, SolveArgs};

pub const COLUMNS: [&str; 9] = [
    "scenario",
    "principle",
    "bound",
    "published",
    "target",
    "delta",
    "tolerance",
    "status",
    "note",
];

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub scenario: String,
    pub principle: String,
    pub bound: Option<f64>,
    /// Published value, as printed.
    pub published: String,
    pub target: f64,
    pub delta: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: Status,
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Reference,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Reference => "reference",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub rows: Vec<Row>,
    pub results: Vec<OptResult>,
}

struct Spec {
    scenario: &'static str,
    principle: &'static str,
    published: &'static str,
    target: f64,
    tol: f64,
}

fn row(spec: &Spec, r: &OptResult, note: String) -> Row {
    let delta = r.value - spec.target;
    Row {
        scenario: spec.scenario.into(),
        principle: spec.principle.into(),
        bound: Some(r.value),
        published: spec.published.into(),
        target: spec.target,
        delta: Some(delta),
        tolerance: Some(spec.tol),
        status: if delta.abs() <= spec.tol {
            Status::Pass
        } else {
            Status::Fail
        },
        note,
    }
}

fn ic_row(scenario: &str) -> Row {
    Row {
        scenario: scenario.into(),
        principle: "IC".into(),
        bound: None,
        published: "0.207".into(),
        target: 0.207,
        delta: None,
        tolerance: None,
        status: Status::Reference,
        note: "reference only, not computed".into(),
    }
}

pub fn run(args: &SolveArgs) -> Result<Table, Failure> {
    let config = args.config();
    let set = args.constraint_set.suffix();
    let solve = |name: &str| -> Result<OptResult, Failure> {
        Ok(optimize::maximize(&optimize::preset(name)?, &config)?)
    };
    let spec = |scenario, principle, published, target, tol| Spec {
        scenario,
        principle,
        published,
        target,
        tol,
    };
    let mut rows = Vec::new();
    let mut results = Vec::new();

    let hardy_ns = solve("hardy_ns")?;
    let hardy_ml = solve("hardy_ml")?;
    let hardy_lo = solve(&format!("hardy_lo2_{set}"))?;
    let hardy_q = max_quantum(Scenario::Hardy, StateFamily::Entangled, &config)?;
    let cabello_ns = solve("cabello_ns")?;
    let cabello_ml = solve("cabello_ml")?;
    let cabello_lo = solve(&format!("cabello_lo2_{set}"))?;
    let cabello_q = max_quantum(Scenario::Cabello, StateFamily::Entangled, &config)?;
    let chsh = solve("chsh_ml")?;

    let lo_note = format!("{set} clique set");
    rows.push(row(
        &spec("hardy", "NS", "0.50", 0.5, 1e-3),
        &hardy_ns,
        String::new(),
    ));
    rows.push(row(
        &spec("hardy", "ML", "0.2062", 0.2062, 2e-3),
        &hardy_ml,
        String::new(),
    ));
    rows.push(row(
        &spec("hardy", "LO2", "0.177", 0.177, 2e-3),
        &hardy_lo,
        lo_note.clone(),
    ));
    rows.push(ic_row("hardy"));
    rows.push(row(
        &spec("hardy", "quantum", "0.09", 0.090, 1e-3),
        &hardy_q,
        "target from two-qubit grid oracle".into(),
    ));
    rows.push(row(
        &spec("cabello", "NS", "0.50", 0.5, 1e-3),
        &cabello_ns,
        String::new(),
    ));
    rows.push(row(
        &spec("cabello", "ML", "0.2062", 0.2062, 2e-3),
        &cabello_ml,
        relation(cabello_ml.value, hardy_ml.value),
    ));
    rows.push(row(
        &spec("cabello", "LO2", "0.207", 0.207, 2e-3),
        &cabello_lo,
        lo_note,
    ));
    rows.push(ic_row("cabello"));
    rows.push(row(
        &spec("cabello", "quantum", "0.11", 0.108, 2e-3),
        &cabello_q,
        "target from two-qubit grid oracle".into(),
    ));
    rows.push(row(
        &spec("chsh", "ML", "2.828", 2.0 * 2f64.sqrt(), 5e-3),
        &chsh,
        "Cirel'son bound".into(),
    ));
    results.extend([
        hardy_ns, hardy_ml, hardy_lo, hardy_q, cabello_ns, cabello_ml, cabello_lo, cabello_q, chsh,
    ]);
    Ok(Table { rows, results })
}

/// How the Cabello ML optimum relates to the Hardy one.
fn relation(cabello: f64, hardy: f64) -> String {
    let d = cabello - hardy;
    if d.abs() <= 1e-6 {
        "equal to hardy ML".into()
    } else if d < 0.0 {
        format!("below hardy ML by {:.2e}", -d)
    } else {
        format!("above hardy ML by {d:.2e}")
    }
}

fn cells(r: &Row) -> [String; 9] {
    let opt = |v: Option<f64>, f: &dyn Fn(f64) -> String| v.map(f).unwrap_or_default();
    [
        r.scenario.clone(),
        r.principle.clone(),
        opt(r.bound, &|v| format!("{v:.6}")),
        r.published.clone(),
        format!("{:.6}", r.target),
        opt(r.delta, &|v| format!("{v:+.2e}")),
        opt(r.tolerance, &|v| format!("{v:.0e}")),
        r.status.as_str().into(),
        r.note.clone(),
    ]
}

impl Table {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }

    pub fn write_csv(&self, f: &mut impl Write) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(f);
        w.write_record(COLUMNS)?;
        for r in &self.rows {
            w.write_record(cells(r))?;
        }
        w.flush()
    }

    pub fn render(&self) -> String {
        let rows: Vec<[String; 9]> = self.rows.iter().map(cells).collect();
        let mut widths = COLUMNS.map(str::len);
        for r in &rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: &[String]| -> String {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            format!("{}\n", parts.join("  ").trim_end())
        };
        let header: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
        let mut s = line(&header);
        for r in &rows {
            s.push_str(&line(r));
        }
        s.push_str(if self.all_passed() {
            "all rows pass\n"
        } else {
            "some rows FAIL\n"
        });
        s
    }
}
