#![allow(dead_code)]

use nlbound::NSBox;
use proptest::prelude::*;
use rand::Rng;

/// Map `u ∈ [0,1]^8` onto a valid box: marginals directly, each joint term
/// inside its Fréchet interval.
pub fn box_from_unit(u: [f64; 8]) -> NSBox {
    let (m, n) = ([u[0], u[1]], [u[2], u[3]]);
    let mut p = [m[0], m[1], n[0], n[1], 0.0, 0.0, 0.0, 0.0];
    for xy in 0..4 {
        let (mx, ny) = (m[xy >> 1], n[xy & 1]);
        let lo = (mx + ny - 1.0).max(0.0);
        let hi = mx.min(ny);
        p[4 + xy] = lo + u[4 + xy] * (hi - lo);
    }
    NSBox::from_array(p)
}

/// Normalised mixture of the 16 deterministic boxes.
pub fn local_from_weights(w: &[f64; 16]) -> NSBox {
    let total: f64 = w.iter().sum();
    let parts: Vec<(f64, NSBox)> = w
        .iter()
        .enumerate()
        .map(|(i, &wi)| (wi / total, NSBox::deterministic_by_index(i)))
        .collect();
    NSBox::mixture(&parts)
}

pub fn valid_box() -> impl Strategy<Value = NSBox> {
    prop::array::uniform8(0.0..=1.0f64).prop_map(box_from_unit)
}

/// Local boxes, biased towards sparse mixtures so faces are exercised.
pub fn local_box() -> impl Strategy<Value = NSBox> {
    (
        prop::array::uniform16(0.0..1.0f64),
        prop::array::uniform16(any::<bool>()),
    )
        .prop_map(|(w, keep)| {
            let mut w = w;
            for (wi, k) in w.iter_mut().zip(keep) {
                if !k {
                    *wi = 0.0;
                }
            }
            if w.iter().sum::<f64>() == 0.0 {
                w[0] = 1.0;
            }
            local_from_weights(&w)
        })
}

pub fn random_valid_box(rng: &mut impl Rng) -> NSBox {
    box_from_unit(std::array::from_fn(|_| rng.gen()))
}

pub fn random_local_box(rng: &mut impl Rng) -> NSBox {
    let mut w: [f64; 16] = std::array::from_fn(|_| if rng.gen_bool(0.5) { rng.gen() } else { 0.0 });
    if w.iter().sum::<f64>() == 0.0 {
        w[rng.gen_range(0..16)] = 1.0;
    }
    local_from_weights(&w)
}
