//! Orthogonality (exclusivity) graphs of measurement events.
//!
//! An event over `k` copies of the bipartite scenario assigns an outcome and a
//! setting to each of the `2k` party positions (copy 1 Alice, copy 1 Bob,
//! copy 2 Alice, ...). Two events are orthogonal when some position has equal
//! settings and different outcomes.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::EventError;

/// Outcomes and settings of one copy: `(ab|xy)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Record {
    pub a: u8,
    pub b: u8,
    pub x: u8,
    pub y: u8,
}

impl Record {
    pub fn new(a: u8, b: u8, x: u8, y: u8) -> Record {
        assert!(
            a < 2 && b < 2 && x < 2 && y < 2,
            "record entries must be bits"
        );
        Record { a, b, x, y }
    }

    fn exclusive(&self, other: &Record) -> bool {
        (self.x == other.x && self.a != other.a) || (self.y == other.y && self.b != other.b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    copies: Vec<Record>,
}

impl Event {
    pub fn new(copies: Vec<Record>) -> Result<Event, EventError> {
        if copies.is_empty() {
            return Err(EventError::Empty);
        }
        Ok(Event { copies })
    }

    pub fn single(a: u8, b: u8, x: u8, y: u8) -> Event {
        Event {
            copies: vec![Record::new(a, b, x, y)],
        }
    }

    pub fn copies(&self) -> &[Record] {
        &self.copies
    }

    pub fn num_copies(&self) -> usize {
        self.copies.len()
    }

    /// Concatenate the copies of `self` and `other`.
    pub fn concat(&self, other: &Event) -> Event {
        let mut copies = self.copies.clone();
        copies.extend_from_slice(&other.copies);
        Event { copies }
    }

    /// The 16 single-copy events in canonical order.
    pub fn all_single() -> Vec<Event> {
        let mut v: Vec<Event> = (0..16)
            .map(|i| Event::single((i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1))
            .collect();
        v.sort();
        v
    }

    pub fn outcome_string(&self) -> String {
        self.copies
            .iter()
            .map(|r| format!("{}{}", r.a, r.b))
            .collect()
    }

    pub fn setting_string(&self) -> String {
        self.copies
            .iter()
            .map(|r| format!("{}{}", r.x, r.y))
            .collect()
    }

    /// `"a1b1a2b2|x1y1x2y2"`.
    pub fn label(&self) -> String {
        format!("{}|{}", self.outcome_string(), self.setting_string())
    }

    fn sort_key(&self) -> impl Iterator<Item = u8> + '_ {
        self.copies
            .iter()
            .flat_map(|r| [r.x, r.y])
            .chain(self.copies.iter().flat_map(|r| [r.a, r.b]))
    }
}

impl Ord for Event {
    /// Canonical order: settings string first, then outcomes string.
    fn cmp(&self, other: &Self) -> Ordering {
        self.copies
            .len()
            .cmp(&other.copies.len())
            .then_with(|| self.sort_key().cmp(other.sort_key()))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.label())
    }
}

impl FromStr for Event {
    type Err = EventError;

    /// Accepts `"0000|1010"` or `"(0000|1010)"`.
    fn from_str(s: &str) -> Result<Event, EventError> {
        let err = || EventError::Parse(s.to_string());
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (outs, sets) = t.split_once('|').ok_or_else(err)?;
        let bits = |part: &str| -> Result<Vec<u8>, EventError> {
            part.trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(err()),
                })
                .collect()
        };
        let o = bits(outs)?;
        let st = bits(sets)?;
        if o.len() != st.len() || o.is_empty() || o.len() % 2 != 0 {
            return Err(err());
        }
        let copies = o
            .chunks(2)
            .zip(st.chunks(2))
            .map(|(ab, xy)| Record::new(ab[0], ab[1], xy[0], xy[1]))
            .collect();
        Event::new(copies)
    }
}

impl Serialize for Event {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for Event {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// True iff some party position has equal settings and different outcomes.
pub fn orthogonal(e1: &Event, e2: &Event) -> Result<bool, EventError> {
    if e1.num_copies() != e2.num_copies() {
        return Err(EventError::CopyMismatch(e1.num_copies(), e2.num_copies()));
    }
    Ok(e1
        .copies
        .iter()
        .zip(&e2.copies)
        .any(|(r1, r2)| r1.exclusive(r2)))
}

/// Fixed-width bitset over vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> VertexSet {
        VertexSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> VertexSet {
        let mut s = VertexSet::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }
}

/// Undirected graph on events with orthogonality edges.
#[derive(Clone, Debug)]
pub struct OrthoGraph {
    vertices: Vec<Event>,
    adjacency: Vec<VertexSet>,
    index: HashMap<Event, usize>,
}

impl OrthoGraph {
    /// Build from an arbitrary event list; vertices are sorted canonically,
    /// deduplicated, and joined by [`orthogonal`].
    pub fn from_events(mut events: Vec<Event>) -> Result<OrthoGraph, EventError> {
        events.sort();
        events.dedup();
        let n = events.len();
        let mut adjacency = vec![VertexSet::empty(n); n];
        for i in 0..n {
            for j in i + 1..n {
                if orthogonal(&events[i], &events[j])? {
                    adjacency[i].insert(j);
                    adjacency[j].insert(i);
                }
            }
        }
        Ok(OrthoGraph::assemble(events, adjacency))
    }

    fn assemble(vertices: Vec<Event>, adjacency: Vec<VertexSet>) -> OrthoGraph {
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        OrthoGraph {
            vertices,
            adjacency,
            index,
        }
    }

    /// Graph with an explicit adjacency predicate, for tests and oracles.
    pub fn from_adjacency(
        vertices: Vec<Event>,
        adjacent: impl Fn(usize, usize) -> bool,
    ) -> OrthoGraph {
        let n = vertices.len();
        let mut adjacency = vec![VertexSet::empty(n); n];
        for (i, row) in adjacency.iter_mut().enumerate() {
            for j in (0..n).filter(|&j| j != i && adjacent(i, j)) {
                row.insert(j);
            }
        }
        OrthoGraph::assemble(vertices, adjacency)
    }

    pub fn vertices(&self) -> &[Event] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(j)
    }

    pub fn neighbors(&self, i: usize) -> &VertexSet {
        &self.adjacency[i]
    }

    pub fn index_of(&self, e: &Event) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// DOT rendering with vertex labels `a1b1a2b2|x1y1x2y2`.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph {name} {{\n");
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!("  v{i} [label=\"{}\"];\n", v.label()));
        }
        for i in 0..self.len() {
            for j in self.adjacency[i].iter().filter(|&j| j > i) {
                out.push_str(&format!("  v{i} -- v{j};\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// The 16 single-copy events minus `zero_events`.
pub fn build_single_copy_graph(zero_events: &[Event]) -> OrthoGraph {
    let events = Event::all_single()
        .into_iter()
        .filter(|e| !zero_events.contains(e))
        .collect();
    OrthoGraph::from_events(events).expect("single-copy events share a copy count")
}

/// Co-normal (disjunctive) product: `(u1,u2) ~ (v1,v2)` iff `u1 ~ v1` or
/// `u2 ~ v2`. Vertices are the concatenated events in canonical order.
pub fn conormal_product(g1: &OrthoGraph, g2: &OrthoGraph) -> OrthoGraph {
    let mut pairs: Vec<(Event, usize, usize)> = Vec::with_capacity(g1.len() * g2.len());
    for (i, u) in g1.vertices.iter().enumerate() {
        for (j, v) in g2.vertices.iter().enumerate() {
            pairs.push((u.concat(v), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let n = pairs.len();
    let mut adjacency = vec![VertexSet::empty(n); n];
    for p in 0..n {
        for q in p + 1..n {
            let (_, i1, j1) = pairs[p];
            let (_, i2, j2) = pairs[q];
            if g1.adjacent(i1, i2) || g2.adjacent(j1, j2) {
                adjacency[p].insert(q);
                adjacency[q].insert(p);
            }
        }
    }
    let vertices = pairs.into_iter().map(|(e, _, _)| e).collect();
    OrthoGraph::assemble(vertices, adjacency)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Clique {
    /// Sorted vertex indices.
    pub members: Vec<usize>,
    pub maximal: bool,
}

impl Clique {
    pub fn events<'g>(&self, g: &'g OrthoGraph) -> Vec<&'g Event> {
        self.members.iter().map(|&i| &g.vertices[i]).collect()
    }

    pub fn labels(&self, g: &OrthoGraph) -> Vec<String> {
        self.members
            .iter()
            .map(|&i| g.vertices[i].label())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CliqueStatus {
    Absent,
    Clique,
    MaximalClique,
}

/// Classify a set of events as a non-clique, a clique, or a maximal clique.
pub fn contains_clique(g: &OrthoGraph, events: &[Event]) -> Result<CliqueStatus, EventError> {
    let mut idx = Vec::with_capacity(events.len());
    for e in events {
        idx.push(
            g.index_of(e)
                .ok_or_else(|| EventError::UnknownVertex(e.label()))?,
        );
    }
    Ok(classify_indices(g, &idx))
}

pub fn classify_indices(g: &OrthoGraph, members: &[usize]) -> CliqueStatus {
    for (k, &i) in members.iter().enumerate() {
        for &j in &members[k + 1..] {
            if i == j || !g.adjacent(i, j) {
                return CliqueStatus::Absent;
            }
        }
    }
    let mut common = VertexSet::full(g.len());
    for &i in members {
        common = common.intersection(&g.adjacency[i]);
    }
    if common.is_empty() {
        CliqueStatus::MaximalClique
    } else {
        CliqueStatus::Clique
    }
}

/// Vertex order from repeatedly removing a minimum-degree vertex.
fn degeneracy_order(g: &OrthoGraph) -> Vec<usize> {
    let n = g.len();
    let mut degree: Vec<usize> = (0..n).map(|i| g.adjacency[i].len()).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&i| !removed[i])
            .min_by_key(|&i| (degree[i], i))
            .expect("vertex remains");
        removed[v] = true;
        order.push(v);
        for u in g.adjacency[v].iter() {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    order
}

fn bron_kerbosch(
    g: &OrthoGraph,
    r: &mut Vec<usize>,
    p: VertexSet,
    mut x: VertexSet,
    visit: &mut dyn FnMut(&[usize]),
) {
    if p.is_empty() {
        if x.is_empty() {
            visit(r);
        }
        return;
    }
    // Tomita pivot: maximise |P ∩ N(u)| over u ∈ P ∪ X.
    let pivot = p
        .iter()
        .chain(x.iter())
        .max_by_key(|&u| (p.intersection_len(&g.adjacency[u]), std::cmp::Reverse(u)))
        .expect("P is non-empty");
    let mut p = p;
    let branch = p.difference(&g.adjacency[pivot]);
    for v in branch.iter() {
        let nv = &g.adjacency[v];
        r.push(v);
        bron_kerbosch(g, r, p.intersection(nv), x.intersection(nv), visit);
        r.pop();
        p.remove(v);
        x.insert(v);
    }
}

/// Fold over every maximal clique (members in ascending order), one
/// sub-fold per root vertex of the degeneracy order, merged with `reduce`.
/// The visiting order depends on scheduling, so `fold` and `reduce` should
/// be order-insensitive.
pub fn fold_maximal_cliques<T, I, F, R>(g: &OrthoGraph, identity: I, fold: F, reduce: R) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(T, &[usize]) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    let order = degeneracy_order(g);
    let mut position = vec![0; g.len()];
    for (k, &v) in order.iter().enumerate() {
        position[v] = k;
    }
    order
        .par_iter()
        .map(|&v| {
            let mut p = VertexSet::empty(g.len());
            let mut x = VertexSet::empty(g.len());
            for u in g.adjacency[v].iter() {
                if position[u] > position[v] {
                    p.insert(u);
                } else {
                    x.insert(u);
                }
            }
            let mut acc = Some(identity());
            let mut r = vec![v];
            let mut sorted = Vec::new();
            bron_kerbosch(g, &mut r, p, x, &mut |c: &[usize]| {
                sorted.clear();
                sorted.extend_from_slice(c);
                sorted.sort_unstable();
                acc = Some(fold(acc.take().expect("accumulator"), &sorted));
            });
            acc.expect("accumulator")
        })
        .reduce(&identity, &reduce)
}

pub fn count_maximal_cliques(g: &OrthoGraph) -> usize {
    fold_maximal_cliques(g, || 0usize, |n, _| n + 1, |a, b| a + b)
}

/// All maximal cliques, sorted lexicographically by member list.
pub fn maximal_cliques(g: &OrthoGraph) -> Vec<Clique> {
    let mut all: Vec<Vec<usize>> = fold_maximal_cliques(
        g,
        Vec::new,
        |mut acc, c| {
            acc.push(c.to_vec());
            acc
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    all.par_sort_unstable();
    all.into_iter()
        .map(|members| Clique {
            members,
            maximal: true,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str) -> Event {
        s.parse().unwrap()
    }

    #[test]
    fn orthogonality_examples() {
        assert!(orthogonal(&ev("00|00"), &ev("01|00")).unwrap());
        assert!(!orthogonal(&ev("00|00"), &ev("11|11")).unwrap());
        assert!(orthogonal(&ev("0000|1010"), &ev("0101|1010")).unwrap());
        assert!(!orthogonal(&ev("0110|1010"), &ev("0110|1010")).unwrap());
        assert_eq!(
            orthogonal(&ev("00|00"), &ev("0000|0000")),
            Err(EventError::CopyMismatch(1, 2))
        );
    }

    #[test]
    fn label_round_trip_and_errors() {
        let e = ev("(0110|1010)");
        assert_eq!(e.label(), "0110|1010");
        assert_eq!(e.num_copies(), 2);
        assert!("012|00".parse::<Event>().is_err());
        assert!("00|0".parse::<Event>().is_err());
        assert!("0|0".parse::<Event>().is_err());
    }

    #[test]
    fn canonical_order_is_settings_first() {
        let mut v = [ev("00|01"), ev("11|00"), ev("01|00")];
        v.sort();
        let labels: Vec<String> = v.iter().map(Event::label).collect();
        assert_eq!(labels, ["01|00", "11|00", "00|01"]);
    }

    #[test]
    fn complete_graph_has_one_clique() {
        let g = build_single_copy_graph(&[]);
        let context: Vec<Event> = (0..4)
            .map(|ab| Event::single(ab >> 1, ab & 1, 0, 0))
            .collect();
        let idx: Vec<usize> = context.iter().map(|e| g.index_of(e).unwrap()).collect();
        let k4 = OrthoGraph::from_adjacency(context.clone(), |_, _| true);
        let cl = maximal_cliques(&k4);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].members, vec![0, 1, 2, 3]);
        assert_ne!(classify_indices(&g, &idx), CliqueStatus::Absent);
    }

    #[test]
    fn single_vertex_of_k2_is_not_maximal() {
        let g = OrthoGraph::from_adjacency(vec![ev("00|00"), ev("10|00")], |_, _| true);
        assert_eq!(
            contains_clique(&g, &[ev("00|00")]).unwrap(),
            CliqueStatus::Clique
        );
        assert_eq!(
            contains_clique(&g, &[ev("00|00"), ev("10|00")]).unwrap(),
            CliqueStatus::MaximalClique
        );
        assert!(matches!(
            contains_clique(&g, &[ev("11|11")]),
            Err(EventError::UnknownVertex(_))
        ));
    }

    #[test]
    fn edgeless_product_is_edgeless() {
        let a = OrthoGraph::from_adjacency(vec![ev("00|00"), ev("11|11")], |_, _| false);
        let p = conormal_product(&a, &a);
        assert_eq!(p.len(), 4);
        assert_eq!(p.edge_count(), 0);
        assert_eq!(maximal_cliques(&p).len(), 4);
    }

    #[test]
    fn vertex_set_ops() {
        let mut s = VertexSet::empty(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(s.len(), 3);
        s.remove(64);
        assert!(!s.contains(64));
    }
}
