//! Qubit correlation toolbox: operational scenarios over small families of
//! dichotomic observables, exact feasibility checks for noncontextual
//! ontological models, three-tier bounds (local / constrained / quantum)
//! for the associated Bell expressions, and the communication games built
//! on top of them.

pub mod algebra;
pub mod bounds;
pub mod eig;
pub mod error;
pub mod game;
pub mod lp;
pub mod ontology;
pub mod rational;
pub mod scenario;

pub use algebra::{
    bell_operator, maximally_entangled_state, BellState, BlochVector, Mat2, QubitDensity,
    QubitObservable, TwoQubitOperator, TwoQubitState,
};
pub use bounds::{
    constrained_bound, delta_quantum, delta_unc_bound, local_bound, quantum_seesaw,
    quantum_value_at, BellExpression, BoundReport, SeesawOutcome, StrategyPolytope,
    UncBoundCertificate,
};
pub use error::{Error, Result};
pub use game::{
    bell_of_game, classify_window, game_report, preset_strategy, success_from_bell,
    success_probability, GameReport, GameSpec, Predicate, QuantumStrategy, Window,
};
pub use ontology::{
    born_rule_residual, build_assignment_space, measurement_feasibility,
    preparation_feasibility, FeasibilityProblem, FeasibilityVerdict, Mode, OnticSpace,
    OntologicalModel, Status,
};
pub use scenario::{
    catalog, catalog_ids, discover_relations, scenario_from_json, scenario_to_json,
    verify_equivalences, ObservableFamily, OperationalEquivalence, OperationalScenario, Party,
    Relation, Side,
};
