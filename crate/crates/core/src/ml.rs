//! Macroscopic Locality for two-setting, two-outcome bipartite boxes.
//!
//! A box satisfies ML iff `|Σ_xy (−1)^{xy} asin D_xy| ≤ π`, where `D_xy` is
//! the normalised covariance of Alice's `x` and Bob's `y` outcomes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::nsbox::NSBox;

/// Variance products below this are treated as a deterministic marginal.
pub const DEGENERATE_VARIANCE: f64 = 1e-12;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MLReport {
    pub d: [[f64; 2]; 2],
    /// `|Σ (−1)^{xy} asin D_xy|` in radians.
    pub functional: f64,
    pub satisfied: bool,
}

/// `(⟨a_x b_y⟩ − ⟨a_x⟩⟨b_y⟩) / √((1 − ⟨a_x⟩²)(1 − ⟨b_y⟩²))`, or 0 when
/// either marginal is deterministic.
pub fn d_xy(b: &NSBox, x: usize, y: usize) -> f64 {
    let a = b.alice_mean(x);
    let bm = b.bob_mean(y);
    let va = 1.0 - a * a;
    let vb = 1.0 - bm * bm;
    if va < DEGENERATE_VARIANCE || vb < DEGENERATE_VARIANCE {
        return 0.0;
    }
    let d = (b.correlator(x, y) - a * bm) / (va * vb).sqrt();
    d.clamp(-1.0, 1.0)
}

/// The signed sum `Σ (−1)^{xy} asin D_xy`.
pub fn signed_sum(b: &NSBox) -> f64 {
    let mut s = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let sign = if x * y == 1 { -1.0 } else { 1.0 };
            s += sign * d_xy(b, x, y).asin();
        }
    }
    s
}

pub fn ml_functional(b: &NSBox) -> MLReport {
    ml_functional_with_tol(b, DEFAULT_TOL)
}

pub fn ml_functional_with_tol(b: &NSBox, tol: f64) -> MLReport {
    let mut d = [[0.0; 2]; 2];
    for (x, row) in d.iter_mut().enumerate() {
        for (y, v) in row.iter_mut().enumerate() {
            *v = d_xy(b, x, y);
        }
    }
    let functional = signed_sum(b).abs();
    MLReport {
        d,
        functional,
        satisfied: functional <= PI + tol,
    }
}

/// `functional − π`; nonpositive iff ML holds.
pub fn ml_excess(b: &NSBox) -> f64 {
    signed_sum(b).abs() - PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsbox::Strategy;

    #[test]
    fn uniform_box() {
        let r = ml_functional(&NSBox::uniform_box());
        assert_eq!(r.d, [[0.0; 2]; 2]);
        assert_eq!(r.functional, 0.0);
        assert!(r.satisfied);
    }

    #[test]
    fn pr_box() {
        let r = ml_functional(&NSBox::pr_box());
        assert_eq!(r.d, [[1.0, 1.0], [1.0, -1.0]]);
        assert!((r.functional - 2.0 * PI).abs() < 1e-12);
        assert!(!r.satisfied);
    }

    #[test]
    fn deterministic_marginal_gives_zero() {
        let b = NSBox::deterministic_box(Strategy([0, 1]), Strategy([1, 0]));
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(d_xy(&b, x, y), 0.0);
            }
        }
        // one deterministic party, one unbiased
        let half = NSBox::product([1.0, 1.0], [0.5, 0.5]);
        assert_eq!(d_xy(&half, 0, 0), 0.0);
    }

    #[test]
    fn isotropic_box_sits_on_the_boundary() {
        // Unbiased marginals and |E_xy| = 1/√2 with the CHSH sign pattern.
        let e = std::f64::consts::FRAC_1_SQRT_2;
        let c = |corr: f64| (1.0 + corr) / 4.0;
        let b = NSBox::from_array([0.5, 0.5, 0.5, 0.5, c(e), c(e), c(e), c(-e)]);
        let r = ml_functional(&b);
        assert!((r.functional - PI).abs() < 1e-12);
        assert!(r.satisfied);
    }
}
