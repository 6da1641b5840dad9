//! Local Orthogonality inequalities.
//!
//! Every clique `{e_k}` of an orthogonality graph gives `Σ_k P(e_k) ≤ 1`.
//! Probabilities of two-copy events factor over the copies, so each
//! inequality becomes an integer polynomial in the box parameters, stored
//! as `Σ_k P(e_k) − 1 ≤ 0`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::appendix::{self, AppendixEntry};
use crate::error::PolyError;
use crate::graph::{
    classify_indices, fold_maximal_cliques, Clique, CliqueStatus, Event, OrthoGraph,
};
use crate::nsbox::NSBox;
use crate::poly::{parse_inequality, Bindings, Polynomial, Var};
use crate::scenario::Scenario;

/// Table entry `P(ab|xy)` as a polynomial.
pub fn entry_poly(a: u8, b: u8, x: u8, y: u8) -> Polynomial {
    let (x, y) = (x as usize, y as usize);
    let c = Polynomial::var(Var::joint(x, y));
    let m = Polynomial::var(Var::alice(x));
    let n = Polynomial::var(Var::bob(y));
    match (a, b) {
        (0, 0) => c,
        (0, 1) => &m - &c,
        (1, 0) => &n - &c,
        _ => &(&(&Polynomial::constant(1) + &c) - &m) - &n,
    }
}

/// `Π_copies P(a_i b_i | x_i y_i)`.
pub fn event_probability_poly(e: &Event) -> Result<Polynomial, PolyError> {
    let k = e.num_copies();
    if !(1..=2).contains(&k) {
        return Err(PolyError::UnsupportedCopies(k));
    }
    Ok(e.copies().iter().fold(Polynomial::constant(1), |acc, r| {
        &acc * &entry_poly(r.a, r.b, r.x, r.y)
    }))
}

/// Numeric `P(e)` for `e` evaluated on copies of `b`.
pub fn event_probability(e: &Event, b: &NSBox) -> f64 {
    e.copies()
        .iter()
        .map(|r| b.prob(r.a as usize, r.b as usize, r.x as usize, r.y as usize))
        .product()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LOInequality {
    pub clique: Clique,
    pub events: Vec<Event>,
    /// `Σ P(e) − 1` over all eight parameters.
    pub polynomial: Polynomial,
    /// Zero constraints applied to obtain `reduced`, if any.
    pub substitutions: Option<Bindings>,
    /// `polynomial` after `substitutions`.
    pub reduced: Polynomial,
}

impl LOInequality {
    pub fn substituted(&self, bindings: &Bindings) -> Result<LOInequality, PolyError> {
        Ok(LOInequality {
            reduced: self.polynomial.substitute(bindings)?,
            substitutions: Some(bindings.clone()),
            ..self.clone()
        })
    }

    /// `1 − Σ P(e)`; nonnegative when satisfied.
    pub fn evaluate(&self, b: &NSBox) -> f64 {
        -self.polynomial.eval_box(b)
    }

    /// `{(e1),(e2),...}` followed by the reduced form `p ≤ 0`.
    pub fn render(&self) -> String {
        let evs: Vec<String> = self.events.iter().map(|e| e.to_string()).collect();
        format!("{{{}}}\n  {} <= 0", evs.join(","), self.reduced)
    }
}

pub fn clique_to_inequality(g: &OrthoGraph, clique: &Clique) -> Result<LOInequality, PolyError> {
    let events: Vec<Event> = clique.events(g).into_iter().cloned().collect();
    let mut sum = Polynomial::constant(-1);
    for e in &events {
        sum = &sum + &event_probability_poly(e)?;
    }
    Ok(LOInequality {
        clique: clique.clone(),
        events,
        reduced: sum.clone(),
        polynomial: sum,
        substitutions: None,
    })
}

/// Affine form `k₀ + Σ kᵢ varᵢ` over the eight parameters (index 0 is the
/// constant).
type Affine = [i64; 9];

/// Exact quadratic `Σ_{i≤j} k_ij tᵢ tⱼ` with `t₀ = 1`, `tᵢ = var_{i−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm([i64; 45]);

fn pair_index(i: usize, j: usize) -> usize {
    // row-major upper triangle of a 9×9 matrix
    i * 9 - i * (i + 1) / 2 + j
}

impl QuadForm {
    fn zero() -> QuadForm {
        QuadForm([0; 45])
    }

    fn add_product(&mut self, u: &Affine, v: &Affine) {
        for (i, &ui) in u.iter().enumerate().filter(|(_, &c)| c != 0) {
            for (j, &vj) in v.iter().enumerate().filter(|(_, &c)| c != 0) {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                self.0[pair_index(a, b)] += ui * vj;
            }
        }
    }

    fn add_affine(&mut self, u: &Affine) {
        for (i, &k) in u.iter().enumerate() {
            self.0[pair_index(0, i)] += k;
        }
    }

    fn as_constant(&self) -> Option<i64> {
        self.0[1..].iter().all(|&k| k == 0).then_some(self.0[0])
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let t = |i: usize| {
            if i == 0 {
                Polynomial::constant(1)
            } else {
                Polynomial::var(Var::ALL[i - 1])
            }
        };
        let mut p = Polynomial::zero();
        for i in 0..9 {
            for j in i..9 {
                let k = self.0[pair_index(i, j)];
                if k != 0 {
                    p = &p + &(&t(i) * &t(j)).scale(k);
                }
            }
        }
        p
    }
}

fn affine_of(p: &Polynomial) -> Affine {
    assert!(p.total_degree() <= 1, "binding is not affine: {p}");
    let mut out = [0i64; 9];
    for (m, c) in p.terms() {
        match m.iter().position(|&e| e > 0) {
            None => out[0] += c,
            Some(v) => out[v + 1] += c,
        }
    }
    out
}

/// Affine forms of the 16 single-copy entries after the (affine) bindings,
/// indexed by `4·(2x + y) + 2a + b`.
fn entry_affines(bindings: &Bindings) -> [Affine; 16] {
    let resolved = Bindings(bindings.resolve().expect("acyclic bindings"));
    let mut out = [[0i64; 9]; 16];
    for (k, slot) in out.iter_mut().enumerate() {
        let (xy, ab) = (k / 4, k % 4);
        let poly = entry_poly(
            (ab >> 1) as u8,
            (ab & 1) as u8,
            (xy >> 1) as u8,
            (xy & 1) as u8,
        );
        *slot = affine_of(&poly.substitute(&resolved).expect("resolved bindings"));
    }
    out
}

fn record_slot(r: &crate::graph::Record) -> usize {
    4 * (2 * r.x as usize + r.y as usize) + 2 * r.a as usize + r.b as usize
}

fn vertex_slots(g: &OrthoGraph) -> Vec<[usize; 2]> {
    g.vertices()
        .iter()
        .map(|e| {
            let c = e.copies();
            assert_eq!(c.len(), 2, "two-copy graph expected");
            [record_slot(&c[0]), record_slot(&c[1])]
        })
        .collect()
}

/// `Σ P(e) − 1` over the clique as an exact quadratic form.
fn clique_form(affines: &[Affine; 16], slots: &[[usize; 2]], members: &[usize]) -> QuadForm {
    let mut q = QuadForm::zero();
    let mut minus_one = [0i64; 9];
    minus_one[0] = -1;
    q.add_affine(&minus_one);
    for &v in members {
        let [s1, s2] = slots[v];
        q.add_product(&affines[s1], &affines[s2]);
    }
    q
}

/// A deduplicated constraint: the reduced polynomial plus how many cliques
/// induced it and the lexicographically first of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedConstraint {
    pub polynomial: Polynomial,
    pub multiplicity: usize,
    pub representative: Vec<Event>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub scenario: Scenario,
    pub bindings: Bindings,
    pub clique_count: usize,
    /// Distinct non-trivial reduced polynomials, sorted canonically.
    pub constraints: Vec<ReducedConstraint>,
    /// Cliques whose reduced polynomial is a nonpositive constant.
    pub trivial: usize,
}

impl ConstraintSet {
    pub fn polynomials(&self) -> Vec<Polynomial> {
        self.constraints
            .iter()
            .map(|c| c.polynomial.clone())
            .collect()
    }
}

#[derive(Default)]
struct Accumulator {
    count: usize,
    trivial: usize,
    forms: HashMap<QuadForm, (usize, Vec<usize>)>,
}

impl Accumulator {
    fn merge(mut self, other: Accumulator) -> Accumulator {
        self.count += other.count;
        self.trivial += other.trivial;
        for (form, (mult, rep)) in other.forms {
            let slot = self.forms.entry(form).or_insert((0, rep.clone()));
            slot.0 += mult;
            if rep < slot.1 {
                slot.1 = rep;
            }
        }
        self
    }
}

/// Every maximal clique of the scenario's two-copy graph, reduced by the
/// scenario's zero substitutions and deduplicated.
pub fn full_constraint_set(scenario: Scenario) -> ConstraintSet {
    let g = scenario.two_copy_graph();
    constraint_set_for_graph(scenario, &g, &scenario.bindings())
}

/// Enumerate the maximal cliques of a two-copy graph and collect their
/// inequalities under `bindings` (affine eliminations only).
pub fn constraint_set_for_graph(
    scenario: Scenario,
    g: &OrthoGraph,
    bindings: &Bindings,
) -> ConstraintSet {
    let affines = entry_affines(bindings);
    let slots = vertex_slots(g);
    let acc = fold_maximal_cliques(
        g,
        Accumulator::default,
        |mut acc, members| {
            acc.count += 1;
            let q = clique_form(&affines, &slots, members);
            if q.as_constant().is_some_and(|c| c <= 0) {
                acc.trivial += 1;
                return acc;
            }
            match acc.forms.get_mut(&q) {
                Some(slot) => {
                    slot.0 += 1;
                    if members < slot.1.as_slice() {
                        slot.1 = members.to_vec();
                    }
                }
                None => {
                    acc.forms.insert(q, (1, members.to_vec()));
                }
            }
            acc
        },
        Accumulator::merge,
    );
    let mut constraints: Vec<ReducedConstraint> = acc
        .forms
        .into_iter()
        .map(|(form, (multiplicity, rep))| ReducedConstraint {
            polynomial: form.to_polynomial(),
            multiplicity,
            representative: rep.iter().map(|&i| g.vertices()[i].clone()).collect(),
        })
        .collect();
    constraints.sort_by(|a, b| a.polynomial.cmp(&b.polynomial));
    ConstraintSet {
        scenario,
        bindings: bindings.clone(),
        clique_count: acc.count,
        constraints,
        trivial: acc.trivial,
    }
}

/// Reduce explicit cliques through the generic polynomial route.
pub fn reduce_cliques(g: &OrthoGraph, cliques: &[Clique], bindings: &Bindings) -> Vec<Polynomial> {
    cliques
        .par_iter()
        .map(|c| {
            clique_to_inequality(g, c)
                .and_then(|i| i.polynomial.substitute(bindings))
                .expect("two-copy events")
        })
        .collect()
}

/// Reduced appendix inequalities as `lhs − rhs ≤ 0`.
pub fn appendix_constraints(scenario: Scenario) -> Vec<Polynomial> {
    appendix::entries(scenario)
        .iter()
        .map(|e| parse_inequality(&e.inequality).expect("appendix transcription parses"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixItem {
    pub clique_tag: String,
    pub inequality_tag: String,
    pub clique_status: CliqueStatus,
    pub polynomial_match: bool,
    /// `k` with generated `= k ·` transcribed, when they match.
    pub scale: Option<i64>,
    pub generated: Option<Polynomial>,
    pub transcribed: Option<Polynomial>,
    /// `generated − transcribed` when they do not match.
    pub residual: Option<Polynomial>,
    pub error: Option<String>,
}

impl AppendixItem {
    pub fn passed(&self) -> bool {
        self.clique_status == CliqueStatus::MaximalClique && self.polynomial_match
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub scenario: Scenario,
    /// Description of the substitution used.
    pub header: String,
    pub items: Vec<AppendixItem>,
}

impl AppendixReport {
    pub fn cliques_maximal(&self) -> usize {
        self.items
            .iter()
            .filter(|i| i.clique_status == CliqueStatus::MaximalClique)
            .count()
    }

    pub fn polynomials_matched(&self) -> usize {
        self.items.iter().filter(|i| i.polynomial_match).count()
    }

    /// Clique checks plus polynomial checks that passed.
    pub fn checks_passed(&self) -> usize {
        self.cliques_maximal() + self.polynomials_matched()
    }

    pub fn total_checks(&self) -> usize {
        2 * self.items.len()
    }

    pub fn all_passed(&self) -> bool {
        self.items.iter().all(AppendixItem::passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} appendix check\n{}\n", self.scenario, self.header);
        for item in &self.items {
            let status = match item.clique_status {
                CliqueStatus::MaximalClique => "maximal clique",
                CliqueStatus::Clique => "clique, not maximal",
                CliqueStatus::Absent => "not a clique",
            };
            out.push_str(&format!(
                "  ({}) {:<20} ({}) {}\n",
                item.clique_tag,
                status,
                item.inequality_tag,
                if item.polynomial_match {
                    "match"
                } else {
                    "MISMATCH"
                }
            ));
            if let Some(r) = &item.residual {
                out.push_str(&format!("      residual: {r}\n"));
            }
            if let Some(e) = &item.error {
                out.push_str(&format!("      error: {e}\n"));
            }
        }
        out.push_str(&format!(
            "{}/{} checks passed\n",
            self.checks_passed(),
            self.total_checks()
        ));
        out
    }
}

pub fn verify_appendix(scenario: Scenario) -> AppendixReport {
    verify_entries(scenario, &appendix::entries(scenario))
}

/// Check each entry's clique against the two-copy graph and its
/// inequality against the polynomial the clique generates.
pub fn verify_entries(scenario: Scenario, entries: &[AppendixEntry]) -> AppendixReport {
    let g = scenario.two_copy_graph();
    let bindings = scenario.bindings();
    let items = entries
        .iter()
        .map(|entry| verify_one(&g, &bindings, entry))
        .collect();
    AppendixReport {
        scenario,
        header: format!(
            "substitution: {bindings}; remaining variables: {}",
            remaining_vars(&bindings)
        ),
        items,
    }
}

fn remaining_vars(b: &Bindings) -> String {
    Var::ALL
        .iter()
        .filter(|v| !b.is_bound(**v))
        .map(|v| v.name())
        .collect::<Vec<_>>()
        .join(", ")
}

fn verify_one(g: &OrthoGraph, bindings: &Bindings, entry: &AppendixEntry) -> AppendixItem {
    let mut item = AppendixItem {
        clique_tag: entry.clique_tag.clone(),
        inequality_tag: entry.inequality_tag.clone(),
        clique_status: CliqueStatus::Absent,
        polynomial_match: false,
        scale: None,
        generated: None,
        transcribed: None,
        residual: None,
        error: None,
    };
    let mut idx = Vec::new();
    for label in &entry.events {
        let found = label.parse::<Event>().ok().and_then(|e| g.index_of(&e));
        match found {
            Some(i) => idx.push(i),
            None => {
                item.error = Some(format!("event {label} is not a vertex"));
                return item;
            }
        }
    }
    item.clique_status = classify_indices(g, &idx);
    idx.sort_unstable();
    idx.dedup();
    let clique = Clique {
        members: idx,
        maximal: item.clique_status == CliqueStatus::MaximalClique,
    };
    let generated =
        match clique_to_inequality(g, &clique).and_then(|i| i.polynomial.substitute(bindings)) {
            Ok(p) => p,
            Err(e) => {
                item.error = Some(e.to_string());
                return item;
            }
        };
    let transcribed = match parse_inequality(&entry.inequality) {
        Ok(p) => p,
        Err(e) => {
            item.error = Some(e.to_string());
            return item;
        }
    };
    item.scale = generated.positive_multiple_of(&transcribed);
    item.polynomial_match = item.scale.is_some();
    if !item.polynomial_match {
        item.residual = Some(&generated - &transcribed);
    }
    item.generated = Some(generated);
    item.transcribed = Some(transcribed);
    item
}
