//! Published clique subsets and their inequalities, transcribed verbatim.
//!
//! Each entry pairs a maximal clique of the two-copy graph with the
//! inequality it induces after the scenario's zero substitutions.

use crate::scenario::Scenario;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppendixEntry {
    pub clique_tag: String,
    pub events: Vec<String>,
    pub inequality_tag: String,
    /// `"lhs <= rhs"` in the parser's syntax.
    pub inequality: String,
}

type RawEntry = (
    &'static str,
    &'static [&'static str],
    &'static str,
    &'static str,
);

const HARDY: &[RawEntry] = &[
    (
        "H1",
        &[
            "0000|1010",
            "0101|1010",
            "0001|1010",
            "0100|1010",
            "0010|0011",
            "1100|1000",
            "1011|1101",
            "1111|0110",
            "1101|1110",
            "0110|1010",
        ],
        "H1-ineq",
        "c_3^2+2c_1n_1 <= c_1^2+n_1^2",
    ),
    (
        "H2",
        &[
            "1010|0101",
            "1111|0001",
            "1100|1001",
            "0110|1111",
            "0011|0100",
            "1001|1000",
            "0000|0010",
        ],
        "H2-ineq",
        "2c_1c_3 <= c_1^2+(c_2-n_1)(-1+m_1+n_1)",
    ),
    (
        "H3",
        &[
            "0101|1111",
            "0111|1111",
            "1110|0011",
            "0011|0100",
            "1011|0111",
            "1111|1111",
            "0000|1001",
            "1101|1110",
            "1100|1110",
            "1000|1110",
        ],
        "H3-ineq",
        "c_2(c_3+m_1)+(c_3-m_1)n_1 <= c_2^2",
    ),
    (
        "H4",
        &[
            "0000|0101",
            "0010|0101",
            "1010|0101",
            "1000|0101",
            "1011|0111",
            "0011|0001",
            "1101|1011",
            "0100|1100",
            "1111|0110",
        ],
        "H4-ineq",
        "c_3(1+m_1)+c_2(m_1+n_1) <= c_2+m_1^2+c_3n_1",
    ),
    (
        "H5",
        &[
            "0001|0111",
            "1100|0010",
            "0000|1001",
            "1101|1110",
            "0111|1100",
            "0110|1010",
            "1111|1011",
            "1110|1011",
            "1010|1011",
            "1011|1011",
        ],
        "H5-ineq",
        "c_1(-c_3+m_1)+c_3(c_3 + n_1) <= m_1 n_1",
    ),
    (
        "H6",
        &[
            "0001|0011",
            "0111|0001",
            "1011|1011",
            "0011|1011",
            "1111|0000",
            "0110|0001",
            "0101|1000",
            "1100|0110",
            "1000|1101",
            "0010|1011",
        ],
        "H6-ineq",
        "c_3 + c_1 c_3+c_2(-1+c_1-c_3+m_1+n_1) <= c_1(m_1+n_1)",
    ),
    (
        "H7",
        &[
            "0011|0001",
            "1010|1111",
            "1111|0110",
            "1011|0111",
            "0100|1100",
            "1100|1010",
            "1101|1010",
            "0101|1010",
        ],
        "H7-ineq",
        "c_3+c_3^2+c_2(m_1+n_1) <= c_2+c_3(m_1+n_1)",
    ),
    (
        "H8",
        &[
            "0000|1010",
            "0111|1100",
            "1100|0001",
            "0011|0111",
            "1011|0111",
            "1111|1111",
            "0010|0111",
            "1110|1101",
            "1001|1111",
            "1101|1111",
        ],
        "H8-ineq",
        "c_3^2+2c_2n_1 <= c_2^2+n_1^2",
    ),
    (
        "H9",
        &[
            "0011|0001",
            "0010|1011",
            "1100|0110",
            "1001|1000",
            "1000|1100",
            "0110|1010",
            "1111|1010",
            "0111|1010",
            "0101|1010",
            "1101|1010",
        ],
        "H9-ineq",
        "c_3(1+c_3)+c_1(c_2+m_1) <= c_1+c_3(c_2+m_1)",
    ),
    (
        "H10",
        &[
            "0000|0001",
            "0011|0100",
            "0101|1111",
            "1100|1000",
            "1111|0010",
            "1001|0110",
            "0110|1010",
        ],
        "H10-ineq",
        "c_3^2+m_1(-1+m_1+n_1) <= (c_1-c_2)^2+c_3(-1+m_1+n_1)",
    ),
];

const CABELLO: &[RawEntry] = &[
    (
        "C1",
        &[
            "1010|0101",
            "0010|0101",
            "0110|0101",
            "1111|0110",
            "1101|0011",
            "0000|1000",
            "0011|0001",
            "0111|0001",
            "1000|1101",
            "0101|0001",
        ],
        "C1-ineq",
        "(1+c_1)c_3+c_2(1+c_2+c_3)+n_1(c_1+m_1+n_1) <= c_1+n_1+c_3(m_0+n_1)+c_2(m_0+m_1+n_1)",
    ),
    (
        "C2",
        &[
            "1010|0101",
            "0010|0101",
            "0110|0101",
            "1111|0110",
            "0101|1111",
            "1100|1000",
            "1001|0100",
            "1011|0101",
            "0011|0101",
            "0000|0001",
        ],
        "C2-ineq",
        "c_2^2+c_3+c_2(1+c_1+c_3)+c_1(c_3+m_0)+(m_0+m_1)(m_1+n_1) <= \
         c_1^2+m_0+2c_2m_0+c_3m_0+m_1+c_1m_1+c_2m_1+(c_2+c_3)n_1",
    ),
    (
        "C3",
        &[
            "0000|1010",
            "0111|1110",
            "0110|1110",
            "0101|0110",
            "1101|0011",
            "1000|1101",
            "1111|1110",
            "1110|1110",
            "1011|0111",
            "0011|0100",
        ],
        "C3-ineq",
        "(c_2+c_3)(c_3-m_0)+2c_2n_1 <= n_1^2",
    ),
    (
        "C4",
        &[
            "1010|0101",
            "0010|0101",
            "0111|1110",
            "1100|0000",
            "1110|1101",
            "0001|1011",
            "0000|0101",
            "1111|1001",
            "1011|1011",
            "1001|1011",
        ],
        "C4-ineq",
        "c_2(c_2+c_3)+(2c_3+m_0)m_1 <= m_0+c_3m_0+m_1^2+c_1(-1+c_2+m_1)",
    ),
    (
        "C5",
        &[
            "1010|0101",
            "0010|0101",
            "0110|0101",
            "1111|0110",
            "0001|1011",
            "1100|0000",
            "0000|0001",
            "0100|0001",
            "1011|1101",
            "0101|0001",
        ],
        "C5-ineq",
        "c_2^2+c_3+c_2(1+c_3)+m_0^2+c_1n_1+m_1(c_3+m_0+n_1) <= \
         (1+c_1+c_2+c_3)m_0+m_1+c_3n_1+c_2(m_1+n_1)",
    ),
    (
        "C6",
        &[
            "0000|1010",
            "0011|0010",
            "0010|0010",
            "1001|1111",
            "1100|1001",
            "0110|0001",
            "0101|1000",
            "0100|1000",
            "1111|0100",
        ],
        "C6-ineq",
        "c_3^2+c_2(2+c_3-2m_0-m_1)+m_0(m_0+m_1)+(2m_0+m_1)n_1 <= \
         (2+c_3)m_0+n_1+c_1(-1+m_1+n_1)",
    ),
    (
        "C7",
        &[
            "0000|1010",
            "0011|0100",
            "0110|1111",
            "1111|0001",
            "0101|1001",
            "1110|1101",
            "1101|1001",
            "1100|1001",
            "1001|1001",
            "1000|1001",
        ],
        "C7-ineq",
        "c_3^2+c_2(1+c_3-2m_0+n_1)+m_0(m_0+n_1) <= m_0+c_3 m_0+n_1^2",
    ),
    (
        "C8",
        &[
            "1010|0101",
            "0011|0110",
            "0001|0011",
            "1100|1000",
            "1111|0001",
            "1001|0100",
            "0100|1101",
            "0110|1101",
            "1110|1101",
        ],
        "C8-ineq",
        "c_1+c_2+c_2^2+(c_1+c_2)c_3+m_0(m_0+2 n_1) <= c_1^2+2(1+c_2)m_0+(c_1+c_2)n_1",
    ),
];

/// The published clique/inequality pairs for a scenario.
pub fn entries(scenario: Scenario) -> Vec<AppendixEntry> {
    let raw = match scenario {
        Scenario::Hardy => HARDY,
        Scenario::Cabello => CABELLO,
    };
    raw.iter()
        .map(|(ct, ev, it, ineq)| AppendixEntry {
            clique_tag: ct.to_string(),
            events: ev.iter().map(|s| s.to_string()).collect(),
            inequality_tag: it.to_string(),
            inequality: ineq.to_string(),
        })
        .collect()
}
