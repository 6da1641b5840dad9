use nlbound::graph::{classify_indices, count_maximal_cliques, fold_maximal_cliques, Record};
use nlbound::{
    appendix, build_single_copy_graph, conormal_product, contains_clique, maximal_cliques,
    orthogonal, CliqueStatus, Event, OrthoGraph, Scenario,
};
use proptest::prelude::*;

const HARDY_TWO_COPY_CLIQUES: usize = 2_210_946;
const CABELLO_TWO_COPY_CLIQUES: usize = 3_297_568;

fn record() -> impl Strategy<Value = Record> {
    (0..2u8, 0..2u8, 0..2u8, 0..2u8).prop_map(|(a, b, x, y)| Record::new(a, b, x, y))
}

fn two_copy_event() -> impl Strategy<Value = Event> {
    (record(), record()).prop_map(|(r1, r2)| Event::new(vec![r1, r2]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn orthogonality_is_symmetric_and_irreflexive(e1 in two_copy_event(), e2 in two_copy_event()) {
        prop_assert_eq!(orthogonal(&e1, &e2).unwrap(), orthogonal(&e2, &e1).unwrap());
        prop_assert!(!orthogonal(&e1, &e1).unwrap());
    }
}

#[test]
fn single_copy_orthogonality() {
    let all = Event::all_single();
    for e1 in &all {
        assert!(!orthogonal(e1, e1).unwrap());
        for e2 in &all {
            assert_eq!(orthogonal(e1, e2).unwrap(), orthogonal(e2, e1).unwrap());
        }
    }
}

#[test]
fn contexts_are_cliques() {
    let g = build_single_copy_graph(&[]);
    for x in 0..2 {
        for y in 0..2 {
            let ctx: Vec<Event> = (0..4)
                .map(|ab| Event::single(ab >> 1, ab & 1, x, y))
                .collect();
            for e1 in &ctx {
                for e2 in &ctx {
                    assert_eq!(orthogonal(e1, e2).unwrap(), e1 != e2);
                }
            }
            assert_eq!(
                contains_clique(&g, &ctx).unwrap(),
                CliqueStatus::MaximalClique
            );
        }
    }
}

#[test]
fn product_adjacency_matches_orthogonality() {
    for s in Scenario::ALL {
        let g = s.single_copy_graph();
        let p = conormal_product(&g, &g);
        assert_eq!(p.len(), g.len() * g.len());
        let v = p.vertices();
        for i in 0..p.len() {
            for j in 0..p.len() {
                assert_eq!(
                    p.adjacent(i, j),
                    orthogonal(&v[i], &v[j]).unwrap(),
                    "{} {}",
                    v[i],
                    v[j]
                );
            }
        }
    }
}

/// Every subset, checked for being a clique and for maximality.
fn brute_force_maximal_cliques(g: &OrthoGraph) -> Vec<Vec<usize>> {
    let n = g.len();
    assert!(n <= 16);
    let is_clique = |mask: u32| {
        (0..n).all(|i| {
            mask & (1 << i) == 0 || (i + 1..n).all(|j| mask & (1 << j) == 0 || g.adjacent(i, j))
        })
    };
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        if !is_clique(mask) {
            continue;
        }
        let extendable = (0..n).any(|v| mask & (1 << v) == 0 && is_clique(mask | (1 << v)));
        if !extendable {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out.sort();
    out
}

#[test]
fn enumeration_matches_brute_force_on_small_graphs() {
    let graphs = [
        Scenario::Hardy.single_copy_graph(),
        Scenario::Cabello.single_copy_graph(),
        build_single_copy_graph(&[]),
    ];
    for g in &graphs {
        let fast: Vec<Vec<usize>> = maximal_cliques(g).into_iter().map(|c| c.members).collect();
        assert_eq!(fast, brute_force_maximal_cliques(g));
    }
}

#[test]
fn enumeration_matches_brute_force_on_random_graphs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let n = rng.gen_range(1..=14);
        let density = rng.gen_range(0.1..0.9);
        let upper: Vec<bool> = (0..n * n).map(|_| rng.gen_bool(density)).collect();
        let adj = |i: usize, j: usize| upper[i.min(j) * n + i.max(j)];
        let events: Vec<Event> = Event::all_single().into_iter().take(n).collect();
        let g = OrthoGraph::from_adjacency(events, adj);
        let fast: Vec<Vec<usize>> = maximal_cliques(&g).into_iter().map(|c| c.members).collect();
        assert_eq!(fast, brute_force_maximal_cliques(&g));
    }
}

#[test]
fn appendix_cliques_are_maximal() {
    for s in Scenario::ALL {
        let g = s.two_copy_graph();
        for entry in appendix::entries(s) {
            let events: Vec<Event> = entry.events.iter().map(|l| l.parse().unwrap()).collect();
            assert_eq!(
                contains_clique(&g, &events).unwrap(),
                CliqueStatus::MaximalClique,
                "{}",
                entry.clique_tag
            );
        }
    }
}

type Bits = [u64; 4];

fn bit(set: &Bits, i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

fn and(a: &Bits, b: &Bits) -> Bits {
    std::array::from_fn(|k| a[k] & b[k])
}

fn count(a: &Bits) -> u32 {
    a.iter().map(|w| w.count_ones()).sum()
}

/// Plain Bron–Kerbosch with a max-degree pivot, over fixed-width bitsets.
fn reference_count(adj: &[Bits], p: Bits, x: Bits) -> usize {
    if count(&p) == 0 {
        return usize::from(count(&x) == 0);
    }
    let n = adj.len();
    let pivot = (0..n)
        .filter(|&u| bit(&p, u) || bit(&x, u))
        .max_by_key(|&u| count(&and(&p, &adj[u])))
        .unwrap();
    let (mut p, mut x) = (p, x);
    let mut total = 0;
    for v in 0..n {
        if !bit(&p, v) || bit(&adj[pivot], v) {
            continue;
        }
        total += reference_count(adj, and(&p, &adj[v]), and(&x, &adj[v]));
        p[v / 64] &= !(1 << (v % 64));
        x[v / 64] |= 1 << (v % 64);
    }
    total
}

fn reference_maximal_clique_count(g: &OrthoGraph) -> usize {
    assert!(g.len() <= 256);
    let adj: Vec<Bits> = (0..g.len())
        .map(|i| {
            let mut b = [0u64; 4];
            for j in 0..g.len() {
                if g.adjacent(i, j) {
                    b[j / 64] |= 1 << (j % 64);
                }
            }
            b
        })
        .collect();
    let mut all = [0u64; 4];
    for i in 0..g.len() {
        all[i / 64] |= 1 << (i % 64);
    }
    reference_count(&adj, all, [0; 4])
}

#[test]
fn two_copy_clique_counts() {
    for (s, expected) in [
        (Scenario::Hardy, HARDY_TWO_COPY_CLIQUES),
        (Scenario::Cabello, CABELLO_TWO_COPY_CLIQUES),
    ] {
        let g = s.two_copy_graph();
        assert_eq!(count_maximal_cliques(&g), expected, "{s}");
        assert_eq!(reference_maximal_clique_count(&g), expected, "{s}");
    }
}

#[test]
fn every_two_copy_clique_is_maximal_and_emitted_once() {
    let g = Scenario::Hardy.two_copy_graph();
    let bad = fold_maximal_cliques(
        &g,
        || 0usize,
        |n, m| n + usize::from(classify_indices(&g, m) != CliqueStatus::MaximalClique),
        |a, b| a + b,
    );
    assert_eq!(bad, 0);
    let all = maximal_cliques(&g);
    assert!(all.windows(2).all(|w| w[0].members < w[1].members));
    assert_eq!(all.len(), HARDY_TWO_COPY_CLIQUES);
}

#[test]
fn edgeless_product_is_edgeless() {
    let single = |e: Event| OrthoGraph::from_adjacency(vec![e], |_, _| false);
    let g = OrthoGraph::from_adjacency(
        vec![Event::single(0, 0, 0, 0), Event::single(1, 1, 1, 1)],
        |_, _| false,
    );
    let p = conormal_product(&g, &g);
    assert_eq!(p.len(), 4);
    assert_eq!(p.edge_count(), 0);
    assert_eq!(
        conormal_product(&single(Event::single(0, 0, 0, 0)), &g).len(),
        2
    );
}
