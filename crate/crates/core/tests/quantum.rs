//! Two-qubit references, checked against an independent real-amplitude grid
//! search.

mod common;

use std::f64::consts::{PI, TAU};

use nlbound::quantum::{born_box, max_quantum, QubitMeasurement, StateFamily, TwoQubitState};
use nlbound::{
    clique_to_inequality, is_local, maximal_cliques, ml_functional, OptConfig, Scenario,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type V4 = [f64; 4];

/// Real qubit eigenvector of outcome `o` for Bloch angle `t` in the x-z plane.
fn ket(t: f64, o: usize) -> [f64; 2] {
    let (s, c) = (t / 2.0).sin_cos();
    if o == 0 {
        [c, s]
    } else {
        [-s, c]
    }
}

fn kron(u: [f64; 2], v: [f64; 2]) -> V4 {
    [u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]]
}

fn dot(a: &V4, b: &V4) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// The vector orthogonal to three vectors in R^4 (generalised cross product).
fn cross4(a: &V4, b: &V4, c: &V4) -> V4 {
    std::array::from_fn(|i| {
        let cols: Vec<usize> = (0..4).filter(|&k| k != i).collect();
        let m = [a, b, c].map(|v| [v[cols[0]], v[cols[1]], v[cols[2]]]);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sign * det3(m)
    })
}

/// `P(ab|xy)` amplitude vector for angles `[A0, A1, B0, B1]`.
fn event(t: &[f64], a: usize, b: usize, x: usize, y: usize) -> V4 {
    kron(ket(t[x], a), ket(t[2 + y], b))
}

/// Hardy success with the three zeros imposed exactly: the state is the
/// null vector of the zero events.
fn hardy_value(t: &[f64]) -> f64 {
    let psi = cross4(
        &event(t, 0, 1, 0, 1),
        &event(t, 0, 0, 1, 1),
        &event(t, 1, 0, 0, 0),
    );
    let n = dot(&psi, &psi);
    if n < 1e-20 {
        return 0.0;
    }
    dot(&event(t, 0, 0, 1, 0), &psi).powi(2) / n
}

/// Orthonormal basis of the complement of `span(w1, w2)` in R^4.
fn complement(w1: &V4, w2: &V4) -> Option<[V4; 2]> {
    let mut basis: Vec<V4> = Vec::new();
    let mut span: Vec<V4> = Vec::new();
    for w in [w1, w2] {
        let mut v = *w;
        for s in &span {
            let d = dot(&v, s);
            v = std::array::from_fn(|i| v[i] - d * s[i]);
        }
        let n = dot(&v, &v).sqrt();
        if n < 1e-9 {
            return None;
        }
        span.push(v.map(|x| x / n));
    }
    for k in 0..4 {
        let mut v = [0.0; 4];
        v[k] = 1.0;
        for s in span.iter().chain(&basis) {
            let d = dot(&v, s);
            v = std::array::from_fn(|i| v[i] - d * s[i]);
        }
        let n = dot(&v, &v).sqrt();
        if n > 1e-6 && basis.len() < 2 {
            basis.push(v.map(|x| x / n));
        }
    }
    Some([basis[0], basis[1]])
}

/// Cabello success `P(00|10) − P(01|01)` with the two zeros imposed; the
/// fifth coordinate picks the state inside the allowed plane.
fn cabello_value(t: &[f64]) -> f64 {
    let Some([e1, e2]) = complement(&event(t, 0, 0, 1, 1), &event(t, 1, 0, 0, 0)) else {
        return 0.0;
    };
    let (s, c) = t[4].sin_cos();
    let psi: V4 = std::array::from_fn(|i| c * e1[i] + s * e2[i]);
    dot(&event(t, 0, 0, 1, 0), &psi).powi(2) - dot(&event(t, 0, 1, 0, 1), &psi).powi(2)
}

/// Dense grid over `[0, 2π)^dim` (the last coordinate over `[0, π)` when
/// `half_last`), then Hooke–Jeeves refinement of the best cell.
fn grid_then_refine(f: impl Fn(&[f64]) -> f64, dim: usize, n: usize, half_last: bool) -> f64 {
    let mut best = (f64::MIN, vec![0.0; dim]);
    let total = n.pow(dim as u32);
    let mut t = vec![0.0; dim];
    for k in 0..total {
        let mut r = k;
        for (i, ti) in t.iter_mut().enumerate() {
            let span = if half_last && i == dim - 1 { PI } else { TAU };
            *ti = (r % n) as f64 * span / n as f64;
            r /= n;
        }
        let v = f(&t);
        if v > best.0 {
            best = (v, t.clone());
        }
    }
    let (mut fx, mut x) = best;
    let mut step = TAU / n as f64;
    while step > 1e-11 {
        let mut improved = false;
        for i in 0..dim {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += dir * step;
                let fy = f(&y);
                if fy > fx {
                    (fx, x) = (fy, y);
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    fx
}

fn config() -> OptConfig {
    OptConfig {
        starts: 64,
        ..OptConfig::default()
    }
}

#[test]
fn hardy_matches_grid_oracle_and_closed_form() {
    let oracle = grid_then_refine(hardy_value, 4, 40, false);
    let closed = (5.0 * 5f64.sqrt() - 11.0) / 2.0;
    assert!((oracle - closed).abs() < 1e-8, "oracle {oracle}");
    let r = max_quantum(Scenario::Hardy, StateFamily::Entangled, &config()).unwrap();
    assert!((r.value - oracle).abs() < 1e-4, "{} vs {oracle}", r.value);
    assert!(r.feasibility <= 1e-8);
    let h = r.point.hardy_parameters();
    assert!(h.q1 <= 1e-8 && h.zeros.0 <= 1e-8 && h.zeros.1 <= 1e-8);
    assert!(!is_local(&r.point, 1e-9).is_local);
}

#[test]
fn cabello_matches_grid_oracle() {
    let oracle = grid_then_refine(cabello_value, 5, 18, true);
    assert!((oracle - 0.108).abs() < 1e-3, "oracle {oracle}");
    let cabello = max_quantum(Scenario::Cabello, StateFamily::Entangled, &config()).unwrap();
    assert!(
        (cabello.value - oracle).abs() < 5e-4,
        "{} vs {oracle}",
        cabello.value
    );
    let hardy = max_quantum(Scenario::Hardy, StateFamily::Entangled, &config()).unwrap();
    assert!(cabello.value >= hardy.value - 1e-6);
    assert!(ml_functional(&cabello.point).satisfied);
}

#[test]
fn product_states_give_nothing() {
    for s in Scenario::ALL {
        let r = max_quantum(s, StateFamily::Product, &config()).unwrap();
        assert!(r.value.abs() <= 1e-8, "{s}: {}", r.value);
    }
}

#[test]
fn born_boxes_are_valid_and_single_copy_lo() {
    let g = nlbound::build_single_copy_graph(&[]);
    let ineqs: Vec<_> = maximal_cliques(&g)
        .iter()
        .map(|c| clique_to_inequality(&g, c).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1_000 {
        let s = TwoQubitState::from_angles(&std::array::from_fn(|_| rng.gen_range(0.0..TAU)));
        let m = std::array::from_fn(|_| {
            QubitMeasurement::new(rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU))
        });
        let b = born_box(&s, &m);
        assert!(b.is_valid(1e-12), "{b}");
        let t = b.to_table_with_tol(1e-12).unwrap();
        for sum in t.row_sums() {
            assert!((sum - 1.0).abs() <= 1e-12);
        }
        for i in &ineqs {
            assert!(i.evaluate(&b) >= -1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn global_phase_does_not_change_the_box(
        p in prop::array::uniform6(0.0..TAU),
        angles in prop::array::uniform8(0.0..TAU),
        phase in 0.0..TAU,
    ) {
        let s = TwoQubitState::from_angles(&p);
        let m = std::array::from_fn(|i| QubitMeasurement::new(angles[2 * i], angles[2 * i + 1]));
        let a = born_box(&s, &m).to_array();
        let b = born_box(&s.with_global_phase(phase), &m).to_array();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }
}
