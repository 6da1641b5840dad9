use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoxError {
    #[error("table entry P({ab}|{xy}) = {value} lies outside [0, 1]")]
    InvalidEntry { xy: String, ab: String, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("events have different copy counts ({0} vs {1})")]
    CopyMismatch(usize, usize),
    #[error("an event needs at least one copy")]
    Empty,
    #[error("malformed event label {0:?}")]
    Parse(String),
    #[error("event {0} is not a vertex of the graph")]
    UnknownVertex(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("substitution bindings are cyclic through {0}")]
    CyclicBindings(String),
    #[error("event probabilities are only defined for 1 or 2 copies, got {0}")]
    UnsupportedCopies(usize),
    #[error("parse error at byte {pos} in {input:?}: {msg}")]
    Parse {
        input: String,
        pos: usize,
        msg: String,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptError {
    #[error("no feasible point found (best violation {best_violation:.3e} over {starts} starts)")]
    Infeasible { best_violation: f64, starts: usize },
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
