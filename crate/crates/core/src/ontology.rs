//! Feasibility of noncontextual ontological-model constraints, decided in
//! exact rational arithmetic.
//!
//! The ontic space is the canonical product of outcome sign patterns: only
//! per-measurement support disjointness enters the arguments, and any model
//! separating those supports coarse-grains onto sign cells. This is a
//! modeling assumption and is surfaced as such in reports.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{expectation_effect, projector_of};
use crate::error::{Error, Result};
use crate::lp::{
    fourier_motzkin, phase_one_simplex, verify_eq_certificate, verify_eq_witness,
    verify_ineq_certificate, verify_ineq_witness, EqOutcome, EqSystem, IneqOutcome, IneqSystem,
};
use crate::rational::{format_rational, rat_one, rat_to_f64, rat_zero, ratio};
use crate::scenario::{OperationalScenario, Party, Side};

/// All sign patterns over `n` dichotomic measurements; bit `t` clear
/// means outcome `+` for measurement `t`, and cells are ordered by the
/// binary value of the pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OnticSpace {
    n: usize,
}

pub fn build_assignment_space(n: usize) -> Result<OnticSpace> {
    if n == 0 || n > 12 {
        return Err(Error::TooLarge(format!(
            "ontic space needs 1 <= n <= 12 measurements, got {n}"
        )));
    }
    Ok(OnticSpace { n })
}

impl OnticSpace {
    pub fn measurements(&self) -> usize {
        self.n
    }

    pub fn num_cells(&self) -> usize {
        1 << self.n
    }

    /// Outcome sign of measurement `t` in cell `cell`.
    pub fn outcome(&self, cell: usize, t: usize) -> i8 {
        if cell >> t & 1 == 0 {
            1
        } else {
            -1
        }
    }

    /// True when `cell` lies in the support of `rho_t^sign`.
    pub fn supports(&self, cell: usize, t: usize, sign: i8) -> bool {
        self.outcome(cell, t) == sign
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Deterministic,
    Indeterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Feasible,
    Infeasible,
}

/// Rational distribution over ontic cells.
#[derive(Debug, Clone, PartialEq)]
pub struct EpistemicState {
    pub weights: Vec<BigRational>,
}

impl EpistemicState {
    pub fn uniform(cells: usize) -> Self {
        Self { weights: vec![ratio(1, cells as i64); cells] }
    }

    pub fn is_valid(&self) -> bool {
        self.weights.iter().all(|w| *w >= rat_zero())
            && self.weights.iter().sum::<BigRational>() == rat_one()
    }
}

/// Per-measurement response probabilities of the `+` outcome, one value
/// per ontic cell. Completeness is structural: the `-` response is
/// `1 - xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseTable {
    pub xi: Vec<Vec<BigRational>>,
    pub mode: Mode,
}

impl ResponseTable {
    pub fn constant(n: usize, cells: usize, value: BigRational, mode: Mode) -> Self {
        Self { xi: vec![vec![value; cells]; n], mode }
    }

    pub fn is_valid(&self) -> bool {
        self.xi.iter().flatten().all(|v| {
            *v >= rat_zero()
                && *v <= rat_one()
                && (self.mode == Mode::Indeterministic || v.is_zero() || *v == rat_one())
        })
    }
}

/// The compiled linear system behind a feasibility question.
#[derive(Debug, Clone)]
pub enum CompiledSystem {
    /// `Ax = b, x >= 0` over distribution variables.
    Equality(EqSystem),
    /// `Ax >= b` over response variables in `[0, 1]`.
    Inequality(IneqSystem),
    /// Finite scan over deterministic response assignments.
    DeterministicScan { vars: usize, constraints: IneqSystem },
}

#[derive(Debug, Clone)]
pub struct FeasibilityProblem {
    pub scenario_name: String,
    pub side: Side,
    pub mode: Mode,
    pub system: CompiledSystem,
    pub var_names: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityVerdict {
    pub status: Status,
    /// Satisfying assignment, by variable name, as `"p/q"` strings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, String>>,
    /// Row multipliers combining the constraints into a contradiction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<String>>,
    /// Note for deterministic-scan verdicts, where the certificate is the
    /// exhausted assignment space itself.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_note: Option<String>,
    #[serde(skip)]
    raw_witness: Option<Vec<BigRational>>,
    #[serde(skip)]
    raw_certificate: Option<Vec<BigRational>>,
}

impl FeasibilityVerdict {
    fn feasible(names: &[String], x: Vec<BigRational>) -> Self {
        let witness = names
            .iter()
            .cloned()
            .zip(x.iter().map(format_rational))
            .collect();
        Self {
            status: Status::Feasible,
            witness: Some(witness),
            certificate: None,
            scan_note: None,
            raw_witness: Some(x),
            raw_certificate: None,
        }
    }

    fn infeasible(y: Vec<BigRational>) -> Self {
        Self {
            status: Status::Infeasible,
            witness: None,
            certificate: Some(y.iter().map(format_rational).collect()),
            scan_note: None,
            raw_witness: None,
            raw_certificate: Some(y),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }

    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }
}

impl FeasibilityProblem {
    pub fn solve(&self) -> FeasibilityVerdict {
        match &self.system {
            CompiledSystem::Equality(sys) => match phase_one_simplex(sys) {
                EqOutcome::Feasible(x) => FeasibilityVerdict::feasible(&self.var_names, x),
                EqOutcome::Infeasible(y) => FeasibilityVerdict::infeasible(y),
            },
            CompiledSystem::Inequality(sys) => match fourier_motzkin(sys) {
                IneqOutcome::Feasible(x) => FeasibilityVerdict::feasible(&self.var_names, x),
                IneqOutcome::Infeasible(y) => FeasibilityVerdict::infeasible(y),
            },
            CompiledSystem::DeterministicScan { vars, constraints } => {
                for bits in 0..(1u64 << vars) {
                    let x: Vec<BigRational> = (0..*vars)
                        .map(|t| if bits >> t & 1 == 1 { rat_one() } else { rat_zero() })
                        .collect();
                    if verify_ineq_witness(constraints, &x) {
                        return FeasibilityVerdict::feasible(&self.var_names, x);
                    }
                }
                let mut v = FeasibilityVerdict {
                    status: Status::Infeasible,
                    witness: None,
                    certificate: None,
                    scan_note: Some(format!(
                        "all {} deterministic assignments violate a constraint",
                        1u64 << vars
                    )),
                    raw_witness: None,
                    raw_certificate: None,
                };
                // A deterministic contradiction is also witnessed by the
                // relaxation when that happens to be infeasible.
                if let IneqOutcome::Infeasible(y) = fourier_motzkin(constraints) {
                    v.certificate = Some(y.iter().map(format_rational).collect());
                    v.raw_certificate = Some(y);
                }
                v
            }
        }
    }

    /// Re-verify a verdict against the compiled system, exactly.
    pub fn verify(&self, verdict: &FeasibilityVerdict) -> bool {
        match (&self.system, verdict.status) {
            (CompiledSystem::Equality(sys), Status::Feasible) => verdict
                .raw_witness
                .as_ref()
                .is_some_and(|x| verify_eq_witness(sys, x)),
            (CompiledSystem::Equality(sys), Status::Infeasible) => verdict
                .raw_certificate
                .as_ref()
                .is_some_and(|y| verify_eq_certificate(sys, y)),
            (CompiledSystem::Inequality(sys), Status::Feasible) => verdict
                .raw_witness
                .as_ref()
                .is_some_and(|x| verify_ineq_witness(sys, x)),
            (CompiledSystem::Inequality(sys), Status::Infeasible) => verdict
                .raw_certificate
                .as_ref()
                .is_some_and(|y| verify_ineq_certificate(sys, y)),
            (CompiledSystem::DeterministicScan { constraints, .. }, Status::Feasible) => verdict
                .raw_witness
                .as_ref()
                .is_some_and(|x| verify_ineq_witness(constraints, x)),
            (CompiledSystem::DeterministicScan { vars, constraints }, Status::Infeasible) => {
                // Re-run the scan.
                (0..(1u64 << vars)).all(|bits| {
                    let x: Vec<BigRational> = (0..*vars)
                        .map(|t| if bits >> t & 1 == 1 { rat_one() } else { rat_zero() })
                        .collect();
                    !verify_ineq_witness(constraints, &x)
                })
            }
        }
    }
}

/// Compile the preparation-noncontextuality system of a scenario.
///
/// Variables are the epistemic weights `mu(lambda | rho_t^a)` restricted to
/// their support cells, plus the shared mixed-state distribution
/// `nu(lambda)`. Every decomposition of `I/2` contributes one equality per
/// cell; each distribution is normalized.
pub fn compile_preparation(s: &OperationalScenario) -> Result<FeasibilityProblem> {
    let equivalences = s.equivalences_for(Side::Preparation, Party::Alice);
    if equivalences.is_empty() {
        return Err(Error::NoEquivalences("preparation"));
    }
    let n = s.alice.len();
    let space = build_assignment_space(n)?;
    let cells = space.num_cells();

    // Variable layout: nu first, then mu per (t, sign, supported cell).
    let mut var_names: Vec<String> = (0..cells).map(|c| format!("nu[{c}]")).collect();
    let mut mu_index: BTreeMap<(usize, i8, usize), usize> = BTreeMap::new();
    for t in 0..n {
        for sign in [1i8, -1] {
            for cell in 0..cells {
                if space.supports(cell, t, sign) {
                    let idx = var_names.len();
                    let tag = if sign > 0 { '+' } else { '-' };
                    var_names.push(format!("mu[{t}][{tag}][{cell}]"));
                    mu_index.insert((t, sign, cell), idx);
                }
            }
        }
    }

    let mut sys = EqSystem::new(var_names.len());
    // Normalizations.
    let mut row = vec![rat_zero(); sys.num_vars];
    for (v, e) in row.iter_mut().enumerate().take(cells) {
        let _ = v;
        *e = rat_one();
    }
    sys.add_eq(row, rat_one());
    for t in 0..n {
        for sign in [1i8, -1] {
            let mut row = vec![rat_zero(); sys.num_vars];
            for cell in 0..cells {
                if let Some(&idx) = mu_index.get(&(t, sign, cell)) {
                    row[idx] = rat_one();
                }
            }
            sys.add_eq(row, rat_one());
        }
    }
    // One equality per (decomposition, cell): sum coeff mu = nu.
    for eq in &equivalences {
        for cell in 0..cells {
            let mut row = vec![rat_zero(); sys.num_vars];
            row[cell] = -rat_one();
            for term in &eq.terms {
                if let Some(&idx) = mu_index.get(&(term.index, term.sign, cell)) {
                    row[idx] += &term.coeff;
                }
            }
            sys.add_eq(row, rat_zero());
        }
    }

    Ok(FeasibilityProblem {
        scenario_name: s.name.clone(),
        side: Side::Preparation,
        mode: Mode::Indeterministic,
        system: CompiledSystem::Equality(sys),
        var_names,
    })
}

/// Decide preparation noncontextuality. The mode is accepted for interface
/// symmetry; support disjointness of orthogonal pure states already forces
/// outcome determinism for the sharp measurements involved.
pub fn preparation_feasibility(
    s: &OperationalScenario,
    _mode: Mode,
) -> Result<FeasibilityVerdict> {
    let problem = compile_preparation(s)?;
    let verdict = problem.solve();
    debug_assert!(problem.verify(&verdict));
    Ok(verdict)
}

/// Compile the measurement-noncontextuality system: one response variable
/// per (party, measurement), the nontrivial equivalences as equalities, and
/// `[0, 1]` boxes. Constraints carry no cell dependence, so one cell stands
/// for all.
pub fn compile_measurement(s: &OperationalScenario, mode: Mode) -> Result<FeasibilityProblem> {
    let mut vars: Vec<(Party, usize)> = Vec::new();
    let mut constraints: Vec<(Party, Vec<BigRational>, BigRational)> = Vec::new();
    for party in [Party::Alice, Party::Bob] {
        let eqs = s.equivalences_for(Side::Measurement, party);
        let family_len = s.family(party).len();
        let nontrivial: Vec<_> = eqs
            .iter()
            .filter(|e| !e.is_trivial_for_responses(family_len))
            .collect();
        if nontrivial.is_empty() {
            continue;
        }
        let base = vars.len();
        vars.extend((0..family_len).map(|t| (party, t)));
        for eq in nontrivial {
            let (coeffs, rhs) = eq.response_constraint(family_len);
            let mut full = vec![rat_zero(); base + family_len];
            full[base..base + family_len].clone_from_slice(&coeffs);
            constraints.push((party, full, rhs));
        }
    }
    if vars.is_empty() {
        return Err(Error::NoEquivalences("measurement"));
    }
    let num_vars = vars.len();
    let var_names: Vec<String> = vars
        .iter()
        .map(|(party, t)| {
            let p = match party {
                Party::Alice => "alice",
                Party::Bob => "bob",
            };
            format!("xi[{p}][{t}]")
        })
        .collect();

    let mut sys = IneqSystem::new(num_vars);
    for v in 0..num_vars {
        sys.add_box(v, rat_zero(), rat_one());
    }
    for (_, mut coeffs, rhs) in constraints {
        coeffs.resize(num_vars, rat_zero());
        sys.add_eq(coeffs, rhs);
    }

    let system = match mode {
        Mode::Indeterministic => CompiledSystem::Inequality(sys),
        Mode::Deterministic => CompiledSystem::DeterministicScan { vars: num_vars, constraints: sys },
    };
    Ok(FeasibilityProblem {
        scenario_name: s.name.clone(),
        side: Side::Measurement,
        mode,
        system,
        var_names,
    })
}

pub fn measurement_feasibility(s: &OperationalScenario, mode: Mode) -> Result<FeasibilityVerdict> {
    let problem = compile_measurement(s, mode)?;
    let verdict = problem.solve();
    debug_assert!(problem.verify(&verdict));
    Ok(verdict)
}

/// A concrete ontological model of one party's preparations and
/// measurements.
#[derive(Debug, Clone)]
pub struct OntologicalModel {
    pub space: OnticSpace,
    /// Epistemic state per `(measurement, outcome)` pure state.
    pub epistemic: BTreeMap<(usize, i8), EpistemicState>,
    pub responses: ResponseTable,
}

/// Max Born-rule deviation of a model over every (state, effect) pair of
/// the scenario's Alice family.
pub fn born_rule_residual(model: &OntologicalModel, s: &OperationalScenario) -> Result<f64> {
    let n = s.alice.len();
    let cells = model.space.num_cells();
    if model.space.measurements() != n
        || model.responses.xi.len() != n
        || model.responses.xi.iter().any(|row| row.len() != cells)
        || model.epistemic.values().any(|e| e.weights.len() != cells)
    {
        return Err(Error::DimensionMismatch(
            "model dimensions do not match scenario".into(),
        ));
    }
    let mut residual = 0.0f64;
    for (&(t, alpha), mu) in &model.epistemic {
        let state = projector_of(&s.alice.observables[t], alpha);
        for m in 0..n {
            for beta in [1i8, -1] {
                let effect = projector_of(&s.alice.observables[m], beta);
                let predicted: BigRational = (0..cells)
                    .map(|cell| {
                        let xi = &model.responses.xi[m][cell];
                        let p = if beta > 0 { xi.clone() } else { rat_one() - xi };
                        &mu.weights[cell] * p
                    })
                    .sum();
                let quantum = expectation_effect(&state, &effect);
                residual = residual.max((rat_to_f64(&predicted) - quantum).abs());
            }
        }
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::catalog;

    #[test]
    fn ontic_space_sizes() {
        assert_eq!(build_assignment_space(1).unwrap().num_cells(), 2);
        assert_eq!(build_assignment_space(3).unwrap().num_cells(), 8);
        assert_eq!(build_assignment_space(4).unwrap().num_cells(), 16);
        assert!(build_assignment_space(13).is_err());
        assert!(build_assignment_space(0).is_err());
    }

    #[test]
    fn support_cells_of_first_measurement() {
        let space = build_assignment_space(3).unwrap();
        let plus: Vec<usize> = (0..8).filter(|&c| space.supports(c, 0, 1)).collect();
        assert_eq!(plus.len(), 4);
        assert!(plus.iter().all(|&c| c & 1 == 0));
    }

    #[test]
    fn preparation_33_infeasible_with_certificate() {
        let s = catalog("33").unwrap();
        let problem = compile_preparation(&s).unwrap();
        let verdict = problem.solve();
        assert_eq!(verdict.status, Status::Infeasible);
        assert!(verdict.certificate.is_some());
        assert!(problem.verify(&verdict));
    }

    #[test]
    fn preparation_44_feasible_with_witness() {
        let s = catalog("44").unwrap();
        let problem = compile_preparation(&s).unwrap();
        let verdict = problem.solve();
        assert_eq!(verdict.status, Status::Feasible);
        assert!(problem.verify(&verdict));
    }

    #[test]
    fn preparation_nn5_infeasible() {
        let s = catalog("nn:5").unwrap();
        let problem = compile_preparation(&s).unwrap();
        let verdict = problem.solve();
        assert_eq!(verdict.status, Status::Infeasible);
        assert!(problem.verify(&verdict));
    }

    #[test]
    fn measurement_33_deterministic_vs_indeterministic() {
        let s = catalog("33").unwrap();
        let det = measurement_feasibility(&s, Mode::Deterministic).unwrap();
        assert_eq!(det.status, Status::Infeasible);
        let ind = measurement_feasibility(&s, Mode::Indeterministic).unwrap();
        assert_eq!(ind.status, Status::Feasible);
    }

    #[test]
    fn measurement_34_deterministic_feasible() {
        let s = catalog("34").unwrap();
        let det = measurement_feasibility(&s, Mode::Deterministic).unwrap();
        assert_eq!(det.status, Status::Feasible);
        // e.g. xi = (1,1,0,0): 1 - 1 - 0 - 0 = 0... the scan found some
        // deterministic solution of xi1 = xi2 + xi3 + xi4 - 1.
        let problem = compile_measurement(&s, Mode::Deterministic).unwrap();
        assert!(problem.verify(&det));
    }

    #[test]
    fn deterministic_scan_agrees_with_exhaustive_enumeration() {
        for id in ["33", "34", "44", "nn:5"] {
            let s = catalog(id).unwrap();
            let problem = compile_measurement(&s, Mode::Deterministic).unwrap();
            let verdict = problem.solve();
            assert!(problem.verify(&verdict), "{id}");
        }
    }

    #[test]
    fn no_equivalences_error() {
        let mut s = catalog("33").unwrap();
        s.equivalences.retain(|e| e.side != Side::Measurement);
        assert!(matches!(
            measurement_feasibility(&s, Mode::Deterministic),
            Err(Error::NoEquivalences(_))
        ));
        s.equivalences.clear();
        assert!(matches!(
            preparation_feasibility(&s, Mode::Indeterministic),
            Err(Error::NoEquivalences(_))
        ));
    }

    #[test]
    fn born_rule_residual_uniform_model() {
        let s = catalog("33").unwrap();
        let space = build_assignment_space(3).unwrap();
        let mut epistemic = BTreeMap::new();
        for t in 0..3 {
            for sign in [1i8, -1] {
                epistemic.insert((t, sign), EpistemicState::uniform(8));
            }
        }
        let model = OntologicalModel {
            space,
            epistemic,
            responses: ResponseTable::constant(3, 8, ratio(1, 2), Mode::Indeterministic),
        };
        // Prediction is identically 1/2; worst case is Tr[rho P] = 1 on
        // matching state/effect pairs.
        let residual = born_rule_residual(&model, &s).unwrap();
        assert!((residual - 0.5).abs() < 1e-12);
    }

    #[test]
    fn born_rule_dimension_mismatch() {
        let s = catalog("33").unwrap();
        let model = OntologicalModel {
            space: build_assignment_space(4).unwrap(),
            epistemic: BTreeMap::new(),
            responses: ResponseTable::constant(4, 16, ratio(1, 2), Mode::Indeterministic),
        };
        assert!(born_rule_residual(&model, &s).is_err());
    }

    #[test]
    fn verdict_json_shape() {
        let s = catalog("33").unwrap();
        let verdict = preparation_feasibility(&s, Mode::Indeterministic).unwrap();
        let json = verdict.to_json();
        assert!(json.contains("\"status\": \"infeasible\""));
        assert!(json.contains("certificate"));
    }
}
