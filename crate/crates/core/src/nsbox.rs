//! Bipartite two-input/two-output no-signaling boxes.
//!
//! A box is stored in the eight-parameter form: Alice's marginals `m0, m1`
//! (probability of outcome 0 for setting 0/1), Bob's marginals `n0, n1`, and
//! the joint probabilities `c1..c4 = P(00|xy)` for `xy = 00, 01, 10, 11`.
//! Every other entry of the probability table follows from these, so the
//! table is no-signaling by construction.
//!
//! Index conventions used throughout the crate: an outcome pair `ab` is
//! encoded as `2a + b` and a setting pair `xy` as `2x + y`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::BoxError;

/// Tolerance used by structural validity checks.
pub const STRUCTURAL_TOL: f64 = 1e-12;

/// Names of the eight parameters, in [`NSBox::to_array`] order.
pub const PARAM_NAMES: [&str; 8] = ["m0", "m1", "n0", "n1", "c1", "c2", "c3", "c4"];

/// A no-signaling box in the eight-parameter form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NSBox {
    pub m0: f64,
    pub m1: f64,
    pub n0: f64,
    pub n1: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

/// Full 4×4 table `P(ab|xy)`, rows indexed by `2x + y`, columns by `2a + b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilityTable {
    pub entries: [[f64; 4]; 4],
}

/// The four probabilities entering the Hardy/Cabello argument.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyParameters {
    /// `P(01|01)`.
    pub q1: f64,
    /// `P(00|10)`.
    pub q4: f64,
    /// `(P(00|11), P(10|00))`, both zero for a Hardy/Cabello box.
    pub zeros: (f64, f64),
}

/// A local deterministic strategy for one party: `outputs[s]` is the outcome
/// for setting `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Strategy(pub [u8; 2]);

impl Strategy {
    /// All four strategies in index order.
    pub const ALL: [Strategy; 4] = [
        Strategy([0, 0]),
        Strategy([0, 1]),
        Strategy([1, 0]),
        Strategy([1, 1]),
    ];

    /// `2·f(0) + f(1)`.
    pub fn index(self) -> usize {
        2 * self.0[0] as usize + self.0[1] as usize
    }

    pub fn from_index(i: usize) -> Strategy {
        assert!(i < 4, "strategy index out of range: {i}");
        Strategy([(i >> 1) as u8, (i & 1) as u8])
    }

    pub fn output(self, setting: usize) -> u8 {
        self.0[setting]
    }
}

/// Selects which setting pair of the CHSH expression carries the minus sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignPattern {
    pub minus_x: usize,
    pub minus_y: usize,
}

impl SignPattern {
    /// The textbook choice `E00 + E01 + E10 − E11`.
    pub const STANDARD: SignPattern = SignPattern {
        minus_x: 1,
        minus_y: 1,
    };

    pub const ALL: [SignPattern; 4] = [
        SignPattern {
            minus_x: 0,
            minus_y: 0,
        },
        SignPattern {
            minus_x: 0,
            minus_y: 1,
        },
        SignPattern {
            minus_x: 1,
            minus_y: 0,
        },
        SignPattern {
            minus_x: 1,
            minus_y: 1,
        },
    ];

    pub fn sign(self, x: usize, y: usize) -> f64 {
        if x == self.minus_x && y == self.minus_y {
            -1.0
        } else {
            1.0
        }
    }
}

impl Default for SignPattern {
    fn default() -> Self {
        SignPattern::STANDARD
    }
}

impl NSBox {
    pub fn from_array(p: [f64; 8]) -> NSBox {
        NSBox {
            m0: p[0],
            m1: p[1],
            n0: p[2],
            n1: p[3],
            c1: p[4],
            c2: p[5],
            c3: p[6],
            c4: p[7],
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.m0, self.m1, self.n0, self.n1, self.c1, self.c2, self.c3, self.c4,
        ]
    }

    /// The PR box: perfect correlation on `xy ∈ {00, 01, 10}`, perfect
    /// anticorrelation on `11`.
    pub fn pr_box() -> NSBox {
        NSBox::from_array([0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.0])
    }

    /// Independent unbiased coins on both sides.
    pub fn uniform_box() -> NSBox {
        NSBox::from_array([0.5, 0.5, 0.5, 0.5, 0.25, 0.25, 0.25, 0.25])
    }

    pub fn deterministic_box(alice: Strategy, bob: Strategy) -> NSBox {
        let zero = |s: Strategy, i: usize| if s.output(i) == 0 { 1.0 } else { 0.0 };
        let m = [zero(alice, 0), zero(alice, 1)];
        let n = [zero(bob, 0), zero(bob, 1)];
        NSBox::from_array([
            m[0],
            m[1],
            n[0],
            n[1],
            m[0] * n[0],
            m[0] * n[1],
            m[1] * n[0],
            m[1] * n[1],
        ])
    }

    /// Deterministic box number `4·alice + bob`.
    pub fn deterministic_by_index(lambda: usize) -> NSBox {
        NSBox::deterministic_box(
            Strategy::from_index(lambda / 4),
            Strategy::from_index(lambda % 4),
        )
    }

    /// Product box with independent marginals.
    pub fn product(m: [f64; 2], n: [f64; 2]) -> NSBox {
        NSBox::from_array([
            m[0],
            m[1],
            n[0],
            n[1],
            m[0] * n[0],
            m[0] * n[1],
            m[1] * n[0],
            m[1] * n[1],
        ])
    }

    /// Convex combination `Σ wᵢ boxᵢ`. Weights are used as given.
    pub fn mixture(parts: &[(f64, NSBox)]) -> NSBox {
        let mut acc = [0.0; 8];
        for (w, b) in parts {
            for (a, v) in acc.iter_mut().zip(b.to_array()) {
                *a += w * v;
            }
        }
        NSBox::from_array(acc)
    }

    pub fn alice_marginal(&self, x: usize) -> f64 {
        [self.m0, self.m1][x]
    }

    pub fn bob_marginal(&self, y: usize) -> f64 {
        [self.n0, self.n1][y]
    }

    /// `P(00|xy)`.
    pub fn joint(&self, x: usize, y: usize) -> f64 {
        [self.c1, self.c2, self.c3, self.c4][2 * x + y]
    }

    /// A single table entry `P(ab|xy)`, without validity checks.
    pub fn prob(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        let c = self.joint(x, y);
        let m = self.alice_marginal(x);
        let n = self.bob_marginal(y);
        match (a, b) {
            (0, 0) => c,
            (0, 1) => m - c,
            (1, 0) => n - c,
            (1, 1) => 1.0 + c - m - n,
            _ => panic!("outcomes must be bits, got ({a}, {b})"),
        }
    }

    /// The table without range checks; used on optimizer iterates.
    pub fn to_table_unchecked(&self) -> ProbabilityTable {
        let mut entries = [[0.0; 4]; 4];
        for (xy, row) in entries.iter_mut().enumerate() {
            for (ab, e) in row.iter_mut().enumerate() {
                *e = self.prob(ab >> 1, ab & 1, xy >> 1, xy & 1);
            }
        }
        ProbabilityTable { entries }
    }

    /// The table, rejecting boxes with an entry outside `[0, 1]`.
    pub fn to_table(&self) -> Result<ProbabilityTable, BoxError> {
        self.to_table_with_tol(STRUCTURAL_TOL)
    }

    pub fn to_table_with_tol(&self, tol: f64) -> Result<ProbabilityTable, BoxError> {
        let table = self.to_table_unchecked();
        for (xy, row) in table.entries.iter().enumerate() {
            for (ab, &value) in row.iter().enumerate() {
                if !value.is_finite() || value < -tol || value > 1.0 + tol {
                    return Err(BoxError::InvalidEntry {
                        xy: format!("{}{}", xy >> 1, xy & 1),
                        ab: format!("{}{}", ab >> 1, ab & 1),
                        value,
                    });
                }
            }
        }
        Ok(table)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.to_table_with_tol(tol).is_ok()
    }

    /// Largest amount by which any entry leaves `[0, 1]`.
    pub fn positivity_violation(&self) -> f64 {
        self.to_table_unchecked()
            .entries
            .iter()
            .flatten()
            .map(|&v| (-v).max(v - 1.0).max(0.0))
            .fold(0.0, f64::max)
    }

    /// `⟨a_x b_y⟩ = 1 + 4 P(00|xy) − 2 (m_x + n_y)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        1.0 + 4.0 * self.joint(x, y) - 2.0 * (self.alice_marginal(x) + self.bob_marginal(y))
    }

    /// `⟨a_x⟩ = 2 m_x − 1`.
    pub fn alice_mean(&self, x: usize) -> f64 {
        2.0 * self.alice_marginal(x) - 1.0
    }

    /// `⟨b_y⟩ = 2 n_y − 1`.
    pub fn bob_mean(&self, y: usize) -> f64 {
        2.0 * self.bob_marginal(y) - 1.0
    }

    pub fn chsh(&self, signs: SignPattern) -> f64 {
        let mut s = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                s += signs.sign(x, y) * self.correlator(x, y);
            }
        }
        s
    }

    pub fn hardy_parameters(&self) -> HardyParameters {
        HardyParameters {
            q1: self.m0 - self.c2,
            q4: self.c3,
            zeros: (self.c4, self.n0 - self.c1),
        }
    }
}

impl fmt::Display for NSBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = PARAM_NAMES
            .iter()
            .zip(self.to_array())
            .map(|(n, v)| format!("{n}={v:.6}"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl ProbabilityTable {
    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.entries[2 * x + y][2 * a + b]
    }

    pub fn row_sums(&self) -> [f64; 4] {
        let mut s = [0.0; 4];
        for (out, row) in s.iter_mut().zip(&self.entries) {
            *out = row.iter().sum();
        }
        s
    }

    /// Alice's probability of outcome 0 for setting `x`, read off the row
    /// where Bob uses setting `y`.
    pub fn alice_marginal_from_row(&self, x: usize, y: usize) -> f64 {
        self.get(0, 0, x, y) + self.get(0, 1, x, y)
    }

    pub fn bob_marginal_from_row(&self, x: usize, y: usize) -> f64 {
        self.get(0, 0, x, y) + self.get(1, 0, x, y)
    }

    /// Flattened as `16·0 + 4·xy + ab`.
    pub fn flatten(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for (xy, row) in self.entries.iter().enumerate() {
            out[4 * xy..4 * xy + 4].copy_from_slice(row);
        }
        out
    }
}

const ROW_KEYS: [&str; 4] = ["00", "01", "10", "11"];

impl Serialize for ProbabilityTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<&str, [f64; 4]> = ROW_KEYS
            .iter()
            .copied()
            .zip(self.entries.iter().copied())
            .collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProbabilityTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<String, [f64; 4]>::deserialize(deserializer)?;
        let mut entries = [[0.0; 4]; 4];
        for (i, key) in ROW_KEYS.iter().enumerate() {
            entries[i] = *map
                .get(*key)
                .ok_or_else(|| serde::de::Error::missing_field(key))?;
        }
        if map.len() != 4 {
            return Err(serde::de::Error::custom(
                "expected exactly the rows 00, 01, 10, 11",
            ));
        }
        Ok(ProbabilityTable { entries })
    }
}
