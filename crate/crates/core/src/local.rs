//! Membership in the local polytope.
//!
//! The local polytope of the 2222 scenario is the convex hull of the 16
//! deterministic boxes. Membership is decided by a phase-one simplex on
//! `Σ_λ w_λ D_λ = P, w ≥ 0`. When the box is outside, the certificate
//! carries a Bell functional it violates: one of the eight CHSH variants
//! when possible, otherwise the Farkas vector read off the final tableau.

use serde::{Deserialize, Serialize};

use crate::nsbox::{NSBox, ProbabilityTable, SignPattern, Strategy};

const PIVOT_EPS: f64 = 1e-12;

/// A linear functional `Σ coefficients[xy][ab] · P(ab|xy) ≤ bound` that
/// holds for every local box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellFunctional {
    pub coefficients: [[f64; 4]; 4],
    pub bound: f64,
    /// Human-readable origin, e.g. `"-CHSH[minus on 11]"`.
    pub label: String,
}

impl BellFunctional {
    pub fn evaluate(&self, table: &ProbabilityTable) -> f64 {
        self.coefficients
            .iter()
            .zip(&table.entries)
            .map(|(c, p)| c.iter().zip(p).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }

    /// `sign · CHSH(signs) ≤ 2` written on table entries.
    pub fn chsh(signs: SignPattern, overall: f64) -> BellFunctional {
        let mut coefficients = [[0.0; 4]; 4];
        for (xy, row) in coefficients.iter_mut().enumerate() {
            let s = overall * signs.sign(xy >> 1, xy & 1);
            for (ab, c) in row.iter_mut().enumerate() {
                let parity = if ((ab >> 1) ^ (ab & 1)) == 0 {
                    1.0
                } else {
                    -1.0
                };
                *c = s * parity;
            }
        }
        let prefix = if overall < 0.0 { "-" } else { "" };
        BellFunctional {
            coefficients,
            bound: 2.0,
            label: format!("{prefix}CHSH[minus on {}{}]", signs.minus_x, signs.minus_y),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalityCertificate {
    pub is_local: bool,
    /// Weights over the deterministic boxes, indexed `4·alice + bob`.
    pub weights: Option<[f64; 16]>,
    pub violated_functional: Option<BellFunctional>,
}

impl LocalityCertificate {
    /// `Σ_λ w_λ D_λ`, if weights are present.
    pub fn reconstruct(&self) -> Option<NSBox> {
        let w = self.weights?;
        let parts: Vec<(f64, NSBox)> = w
            .iter()
            .enumerate()
            .map(|(i, &wi)| (wi, NSBox::deterministic_by_index(i)))
            .collect();
        Some(NSBox::mixture(&parts))
    }
}

/// Decide whether `b` is a convex combination of deterministic boxes.
///
/// # Panics
///
/// Panics if `tol` is not positive.
pub fn is_local(b: &NSBox, tol: f64) -> LocalityCertificate {
    assert!(tol > 0.0, "tolerance must be positive");
    let table = b.to_table_unchecked().flatten();
    let det: Vec<[f64; 16]> = (0..16)
        .map(|l| {
            NSBox::deterministic_by_index(l)
                .to_table_unchecked()
                .flatten()
        })
        .collect();

    // 16 table rows plus normalisation.
    let mut rows: Vec<Vec<f64>> = (0..16)
        .map(|r| det.iter().map(|d| d[r]).collect())
        .collect();
    rows.push(vec![1.0; 16]);
    let mut rhs: Vec<f64> = table.to_vec();
    rhs.push(1.0);

    let outcome = phase_one(&rows, &rhs);
    if outcome.infeasibility <= tol {
        let mut weights = [0.0; 16];
        weights.copy_from_slice(&outcome.x);
        let cert = LocalityCertificate {
            is_local: true,
            weights: Some(weights),
            violated_functional: None,
        };
        let rebuilt = cert.reconstruct().expect("weights present");
        let err = rebuilt
            .to_array()
            .iter()
            .zip(b.to_array())
            .map(|(a, c)| (a - c).abs())
            .fold(0.0, f64::max);
        if err <= tol.max(1e-9) {
            return cert;
        }
    }

    let t = b.to_table_unchecked();
    let mut best: Option<(f64, BellFunctional)> = None;
    for signs in SignPattern::ALL {
        for overall in [1.0, -1.0] {
            let f = BellFunctional::chsh(signs, overall);
            let excess = f.evaluate(&t) - f.bound;
            if excess > tol && best.as_ref().is_none_or(|(e, _)| excess > *e) {
                best = Some((excess, f));
            }
        }
    }
    let functional = match best {
        Some((_, f)) => f,
        None => farkas_functional(&outcome.dual),
    };
    LocalityCertificate {
        is_local: false,
        weights: None,
        violated_functional: Some(functional),
    }
}

/// Turn the phase-one dual `y` (with `y·(D_λ, 1) ≤ 0 < y·(P, 1)`) into the
/// functional `Σ y_r P_r ≤ −y_norm`.
fn farkas_functional(dual: &[f64]) -> BellFunctional {
    let mut coefficients = [[0.0; 4]; 4];
    for (r, &y) in dual.iter().take(16).enumerate() {
        coefficients[r / 4][r % 4] = y;
    }
    BellFunctional {
        coefficients,
        bound: -dual[16],
        label: "farkas".to_string(),
    }
}

struct PhaseOne {
    x: Vec<f64>,
    infeasibility: f64,
    dual: Vec<f64>,
}

/// Minimise the sum of artificials for `A x + s = b, x, s ≥ 0` with a dense
/// tableau and Bland's rule.
fn phase_one(a: &[Vec<f64>], b: &[f64]) -> PhaseOne {
    let m = a.len();
    let n = a[0].len();
    let width = n + m + 1;
    let mut flip = vec![1.0; m];
    let mut tab: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        if b[i] < 0.0 {
            flip[i] = -1.0;
        }
        let mut row = vec![0.0; width];
        for j in 0..n {
            row[j] = flip[i] * a[i][j];
        }
        row[n + i] = 1.0;
        row[width - 1] = flip[i] * b[i];
        tab.push(row);
    }
    // Reduced-cost row for min Σ s: cost 1 on artificials, priced out.
    let mut obj = vec![0.0; width];
    obj[n..n + m].fill(1.0);
    for row in tab.iter().take(m) {
        for (o, r) in obj.iter_mut().zip(row) {
            *o -= r;
        }
    }
    tab.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..width - 1).find(|&j| tab[m][j] < -PIVOT_EPS) {
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let coef = tab[i][enter];
            if coef > PIVOT_EPS {
                let ratio = tab[i][width - 1] / coef;
                let better = ratio < best_ratio - 1e-15
                    || (ratio <= best_ratio + 1e-15 && leave.is_some_and(|l| basis[i] < basis[l]));
                if leave.is_none() || better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(row) = leave else {
            // Unbounded cannot happen for a phase-one problem.
            break;
        };
        pivot(&mut tab, row, enter);
        basis[row] = enter;
    }

    let mut x = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab[i][width - 1].max(0.0);
        }
    }
    let infeasibility = -tab[m][width - 1];
    // Reduced cost of artificial r is 1 − y_r (in the flipped rows).
    let dual = (0..m).map(|r| flip[r] * (1.0 - tab[m][n + r])).collect();
    PhaseOne {
        x,
        infeasibility,
        dual,
    }
}

fn pivot(tab: &mut [Vec<f64>], row: usize, col: usize) {
    let p = tab[row][col];
    for v in tab[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = tab[row].clone();
    for (i, r) in tab.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
}

/// Every deterministic strategy pair as `(alice, bob)` in index order.
pub fn strategy_pairs() -> impl Iterator<Item = (Strategy, Strategy)> {
    (0..16).map(|l| (Strategy::from_index(l / 4), Strategy::from_index(l % 4)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_boxes_are_local_with_unit_weight() {
        for (l, (a, b)) in strategy_pairs().enumerate() {
            let cert = is_local(&NSBox::deterministic_box(a, b), 1e-9);
            assert!(cert.is_local);
            let w = cert.weights.unwrap();
            assert!((w[l] - 1.0).abs() < 1e-12, "box {l}: {w:?}");
        }
    }

    #[test]
    fn pr_box_is_nonlocal_with_chsh_witness() {
        let cert = is_local(&NSBox::pr_box(), 1e-9);
        assert!(!cert.is_local);
        let f = cert.violated_functional.unwrap();
        let t = NSBox::pr_box().to_table().unwrap();
        assert!((f.evaluate(&t) - 4.0).abs() < 1e-12);
        assert!(f.label.contains("minus on 11"));
        for l in 0..16 {
            let d = NSBox::deterministic_by_index(l).to_table().unwrap();
            assert!(f.evaluate(&d) <= f.bound + 1e-12);
        }
    }

    #[test]
    fn uniform_box_is_local() {
        let cert = is_local(&NSBox::uniform_box(), 1e-9);
        assert!(cert.is_local);
        let w = cert.weights.unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn farkas_vector_separates() {
        // An invalid (signalling-free but non-positive) point: no CHSH
        // variant exceeds 2, yet it lies outside the local polytope.
        let b = NSBox::from_array([0.5, 0.5, 0.5, 0.5, -0.05, 0.25, 0.25, 0.25]);
        let cert = is_local(&b, 1e-9);
        assert!(!cert.is_local);
        let f = cert.violated_functional.unwrap();
        let t = b.to_table_unchecked();
        assert!(
            f.evaluate(&t) > f.bound + 1e-9,
            "{} vs {}",
            f.evaluate(&t),
            f.bound
        );
        for l in 0..16 {
            let d = NSBox::deterministic_by_index(l).to_table().unwrap();
            assert!(f.evaluate(&d) <= f.bound + 1e-9);
        }
    }
}
