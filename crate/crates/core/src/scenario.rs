//! The Hardy and Cabello correlations: which events never occur, which
//! parameters that eliminates, and what success means.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{build_single_copy_graph, conormal_product, Event, OrthoGraph};
use crate::nsbox::NSBox;
use crate::poly::{Bindings, Polynomial, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// `P(01|01) = 0, P(00|11) = 0, P(10|00) = 0`; success `P(00|10)`.
    Hardy,
    /// `P(00|11) = 0, P(10|00) = 0`; success `P(00|10) − P(01|01)`.
    Cabello,
}

impl Scenario {
    pub const ALL: [Scenario; 2] = [Scenario::Hardy, Scenario::Cabello];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Hardy => "hardy",
            Scenario::Cabello => "cabello",
        }
    }

    pub fn zero_events(self) -> Vec<Event> {
        let mut v = vec![Event::single(0, 0, 1, 1), Event::single(1, 0, 0, 0)];
        if self == Scenario::Hardy {
            v.insert(0, Event::single(0, 1, 0, 1));
        }
        v
    }

    /// Eliminations enforcing the zero events: Hardy `c4 → 0, m0 → c2,
    /// n0 → c1`; Cabello `c4 → 0, n0 → c1`.
    pub fn bindings(self) -> Bindings {
        let b = Bindings::new()
            .bind(Var::C4, Polynomial::zero())
            .bind(Var::N0, Polynomial::var(Var::C1));
        match self {
            Scenario::Hardy => b.bind(Var::M0, Polynomial::var(Var::C2)),
            Scenario::Cabello => b,
        }
    }

    /// Success probability: `c3` (Hardy) or `c3 − m0 + c2` (Cabello).
    pub fn objective(self) -> Polynomial {
        let c3 = Polynomial::var(Var::C3);
        match self {
            Scenario::Hardy => c3,
            Scenario::Cabello => &(&c3 - &Polynomial::var(Var::M0)) + &Polynomial::var(Var::C2),
        }
    }

    pub fn success(self, b: &NSBox) -> f64 {
        let h = b.hardy_parameters();
        match self {
            Scenario::Hardy => h.q4,
            Scenario::Cabello => h.q4 - h.q1,
        }
    }

    pub fn single_copy_graph(self) -> OrthoGraph {
        build_single_copy_graph(&self.zero_events())
    }

    pub fn two_copy_graph(self) -> OrthoGraph {
        let g = self.single_copy_graph();
        conormal_product(&g, &g)
    }

    pub fn graph(self, copies: usize) -> OrthoGraph {
        match copies {
            1 => self.single_copy_graph(),
            2 => self.two_copy_graph(),
            _ => panic!("only one- and two-copy graphs are supported, got {copies}"),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Scenario, String> {
        match s.to_ascii_lowercase().as_str() {
            "hardy" => Ok(Scenario::Hardy),
            "cabello" => Ok(Scenario::Cabello),
            _ => Err(format!(
                "unknown scenario {s:?} (expected hardy or cabello)"
            )),
        }
    }
}
