//! Upper bounds on the success probability of Hardy's and Cabello's
//! nonlocality arguments under no-signaling, Macroscopic Locality and
//! two-copy Local Orthogonality.
//!
//! The pipeline: [`nsbox`] holds the eight-parameter box, [`graph`] builds
//! orthogonality graphs and their maximal cliques, [`lo`] turns cliques into
//! polynomial inequalities, [`ml`] implements the arcsin criterion, and
//! [`optimize`] maximises success under any of these constraint families.
//! [`quantum`] provides the two-qubit reference values.

pub mod appendix;
pub mod error;
pub mod graph;
pub mod lo;
pub mod local;
pub mod ml;
pub mod nsbox;
pub mod optimize;
pub mod poly;
pub mod quantum;
pub mod scenario;

pub use error::{BoxError, EventError, OptError, PolyError};
pub use graph::{
    build_single_copy_graph, conormal_product, contains_clique, maximal_cliques, orthogonal,
    Clique, CliqueStatus, Event, OrthoGraph,
};
pub use lo::{clique_to_inequality, event_probability_poly, verify_appendix, LOInequality};
pub use local::{is_local, LocalityCertificate};
pub use ml::{d_xy, ml_functional, MLReport};
pub use nsbox::{HardyParameters, NSBox, ProbabilityTable, SignPattern, Strategy};
pub use optimize::{
    compare, maximize, preset, Comparison, Constraint, Objective, OptConfig, OptProblem, OptResult,
};
pub use poly::{Bindings, Polynomial, Var};
pub use quantum::{
    born_box, max_quantum, max_quantum_cabello, max_quantum_hardy, QubitMeasurement, StateFamily,
    TwoQubitState,
};
pub use scenario::Scenario;
