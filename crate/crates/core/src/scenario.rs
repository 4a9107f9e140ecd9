//! Observable families, operational equivalences, and the built-in
//! scenario catalog, plus the scenario JSON wire format.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::algebra::{projector_of, BlochVector, Mat2, QubitObservable};
use crate::error::{Error, Result};
use crate::rational::{format_rational, is_convex_combination, parse_rational, rat_to_f64, ratio};

pub const EQUIVALENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Preparation,
    Measurement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

/// One `(observable, outcome)` term of an identity decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceTerm {
    pub index: usize,
    pub sign: i8,
    pub coeff: BigRational,
}

/// A convex decomposition of `I/2` over one party's projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct OperationalEquivalence {
    pub side: Side,
    pub party: Party,
    pub terms: Vec<EquivalenceTerm>,
}

impl OperationalEquivalence {
    pub fn new(side: Side, party: Party, terms: Vec<EquivalenceTerm>) -> Self {
        Self { side, party, terms }
    }

    /// Max-entry norm of `sum coeff (I + sign A)/2 - I/2`.
    pub fn residual(&self, family: &ObservableFamily) -> f64 {
        let mut acc = Mat2::zero();
        for term in &self.terms {
            let p = projector_of(&family.observables[term.index], term.sign);
            acc = acc.add(&p.matrix().scale(rat_to_f64(&term.coeff)));
        }
        acc.sub(&Mat2::identity().scale(0.5)).max_abs_entry()
    }

    /// Per-measurement response coefficients and constant for the induced
    /// constraint `sum coeff xi(sign side) = 1/2` over `xi_t = xi(+|P_t^+)`.
    ///
    /// Rewriting `xi(-) = 1 - xi(+)` gives `sum_t c_t xi_t = rhs`.
    pub fn response_constraint(&self, family_len: usize) -> (Vec<BigRational>, BigRational) {
        let mut coeffs = vec![BigRational::from_integer(0.into()); family_len];
        let mut rhs = ratio(1, 2);
        for term in &self.terms {
            if term.sign >= 0 {
                coeffs[term.index] += &term.coeff;
            } else {
                coeffs[term.index] -= &term.coeff;
                rhs -= &term.coeff;
            }
        }
        (coeffs, rhs)
    }

    /// True when the induced response constraint is vacuous (0 = 0), as for
    /// the trivial single-observable decompositions.
    pub fn is_trivial_for_responses(&self, family_len: usize) -> bool {
        let (coeffs, rhs) = self.response_constraint(family_len);
        coeffs.iter().all(|c| c == &BigRational::from_integer(0.into()))
            && rhs == BigRational::from_integer(0.into())
    }
}

/// A named list of dichotomic qubit observables.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableFamily {
    pub name: String,
    pub observables: Vec<QubitObservable>,
}

impl ObservableFamily {
    pub fn new(name: impl Into<String>, observables: Vec<QubitObservable>) -> Self {
        Self { name: name.into(), observables }
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn bloch_sum(&self) -> BlochVector {
        self.observables
            .iter()
            .fold(BlochVector::new(0.0, 0.0, 0.0), |acc, o| acc.add(&o.bloch()))
    }

    pub fn negated(&self) -> Self {
        Self {
            name: format!("{}-negated", self.name),
            observables: self.observables.iter().map(|o| o.negated()).collect(),
        }
    }
}

/// Signed integer relation `sum_t coeffs[t] A_t = 0` on one party's
/// observables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub party: Party,
    pub coeffs: Vec<i64>,
}

/// A full preparation/measurement scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct OperationalScenario {
    pub name: String,
    pub alice: ObservableFamily,
    pub bob: ObservableFamily,
    pub equivalences: Vec<OperationalEquivalence>,
    pub relations: Vec<Relation>,
}

impl OperationalScenario {
    pub fn family(&self, party: Party) -> &ObservableFamily {
        match party {
            Party::Alice => &self.alice,
            Party::Bob => &self.bob,
        }
    }

    pub fn equivalences_for(&self, side: Side, party: Party) -> Vec<&OperationalEquivalence> {
        self.equivalences
            .iter()
            .filter(|e| e.side == side && e.party == party)
            .collect()
    }

    pub fn relations_for(&self, party: Party) -> Vec<&Relation> {
        self.relations.iter().filter(|r| r.party == party).collect()
    }

    /// Check every invariant: convex coefficients, equivalence residuals,
    /// and Bloch-form relations.
    pub fn validate(&self) -> Result<()> {
        for eq in &self.equivalences {
            let coeffs: Vec<BigRational> = eq.terms.iter().map(|t| t.coeff.clone()).collect();
            if !is_convex_combination(&coeffs) {
                return Err(Error::Validation(format!(
                    "equivalence coefficients of {:?}/{:?} are not a convex combination",
                    eq.side, eq.party
                )));
            }
            let family = self.family(eq.party);
            if eq.terms.iter().any(|t| t.index >= family.len()) {
                return Err(Error::Validation("equivalence term index out of range".into()));
            }
            let residual = eq.residual(family);
            if residual > EQUIVALENCE_TOL {
                return Err(Error::Validation(format!(
                    "equivalence residual {residual:.3e} exceeds {EQUIVALENCE_TOL:.0e}"
                )));
            }
        }
        for rel in &self.relations {
            let family = self.family(rel.party);
            if rel.coeffs.len() != family.len() {
                return Err(Error::Validation("relation length mismatch".into()));
            }
            let sum = rel
                .coeffs
                .iter()
                .zip(&family.observables)
                .fold(BlochVector::new(0.0, 0.0, 0.0), |acc, (&c, o)| {
                    acc.add(&o.bloch().scale(c as f64))
                });
            if sum.norm() > 1e-12 {
                return Err(Error::Validation(format!(
                    "relation {:?} residual {:.3e}",
                    rel.coeffs,
                    sum.norm()
                )));
            }
        }
        Ok(())
    }
}

/// Per-constraint residual report from `verify_equivalences`.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub max_residual: f64,
    pub per_constraint: Vec<ConstraintResidual>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstraintResidual {
    pub side: Side,
    pub party: Party,
    pub residual: f64,
    pub pass: bool,
}

pub fn verify_equivalences(s: &OperationalScenario, tol: f64) -> EquivalenceReport {
    let per_constraint: Vec<ConstraintResidual> = s
        .equivalences
        .iter()
        .map(|eq| {
            let residual = eq.residual(s.family(eq.party));
            ConstraintResidual { side: eq.side, party: eq.party, residual, pass: residual <= tol }
        })
        .collect();
    let max_residual = per_constraint.iter().map(|c| c.residual).fold(0.0, f64::max);
    EquivalenceReport { max_residual, per_constraint }
}

/// Exhaustive scan for signed integer relations `sum s_t A_t = 0`,
/// `s_t` in {-1, 0, +1}, up to global sign, minimal support first.
pub fn discover_relations(family: &ObservableFamily) -> Vec<Vec<i64>> {
    let n = family.len();
    assert!(n <= 8, "relation scan limited to 8 observables");
    let mut found: Vec<Vec<i64>> = Vec::new();
    let mut signs = vec![0i64; n];
    scan(family, &mut signs, 0, true, &mut found);
    found.sort_by_key(|s| s.iter().filter(|&&c| c != 0).count());
    found
}

fn scan(
    family: &ObservableFamily,
    signs: &mut Vec<i64>,
    idx: usize,
    leading: bool,
    found: &mut Vec<Vec<i64>>,
) {
    if idx == signs.len() {
        if signs.iter().all(|&s| s == 0) {
            return;
        }
        let sum = signs
            .iter()
            .zip(&family.observables)
            .fold(BlochVector::new(0.0, 0.0, 0.0), |acc, (&c, o)| {
                acc.add(&o.bloch().scale(c as f64))
            });
        if sum.norm() <= 1e-10 {
            found.push(signs.clone());
        }
        return;
    }
    // Fix the first nonzero sign to +1 to quotient out the global sign.
    let choices: &[i64] = if leading { &[0, 1] } else { &[-1, 0, 1] };
    for &c in choices {
        signs[idx] = c;
        scan(family, signs, idx + 1, leading && c == 0, found);
    }
    signs[idx] = 0;
}

// ---------------------------------------------------------------------------
// Built-in observable families

/// Three unit-Bloch observables at 120 degrees in the x-z plane, summing
/// to zero, with the first along sigma_z.
pub fn trine_family() -> ObservableFamily {
    let r = 3f64.sqrt() / 2.0;
    let obs = vec![
        QubitObservable::sigma_z(),
        QubitObservable::from_bloch(BlochVector::new(r, 0.0, -0.5)).unwrap(),
        QubitObservable::from_bloch(BlochVector::new(-r, 0.0, -0.5)).unwrap(),
    ];
    ObservableFamily::new("trine", obs)
}

/// `n` (odd) unit-Bloch observables summing to zero: sigma_z plus `n - 1`
/// members with z-component `-1/(n-1)` and transverse parts at equally
/// spaced angles.
pub fn odd_n_family(n: u32) -> Result<ObservableFamily> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidN(n));
    }
    let m = (n - 1) as f64;
    let z = -1.0 / m;
    let r = (1.0 - z * z).sqrt();
    let mut obs = vec![QubitObservable::sigma_z()];
    for k in 0..(n - 1) {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / m;
        obs.push(
            QubitObservable::from_bloch(BlochVector::new(
                r * theta.cos(),
                r * theta.sin(),
                z,
            ))
            .unwrap(),
        );
    }
    Ok(ObservableFamily::new(format!("odd-{n}"), obs))
}

/// The four tetrahedral observables whose +1 projectors scale to a
/// qubit SIC-POVM.
pub fn sic_family() -> ObservableFamily {
    let s = 1.0 / 3f64.sqrt();
    let obs = [
        (1.0, 1.0, 1.0),
        (1.0, 1.0, -1.0),
        (1.0, -1.0, 1.0),
        (-1.0, 1.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| {
        QubitObservable::from_bloch(BlochVector::new(s * x, s * y, s * z)).unwrap()
    })
    .collect();
    ObservableFamily::new("sic-tetrahedron", obs)
}

/// The canonical mutually unbiased triple: the Pauli axes.
pub fn mub_family() -> ObservableFamily {
    ObservableFamily::new(
        "mub",
        vec![
            QubitObservable::sigma_x(),
            QubitObservable::sigma_y(),
            QubitObservable::sigma_z(),
        ],
    )
}

// ---------------------------------------------------------------------------
// Built-in scenarios

fn trivial_preparation_equivalences(party: Party, n: usize) -> Vec<OperationalEquivalence> {
    (0..n)
        .map(|t| {
            OperationalEquivalence::new(
                Side::Preparation,
                party,
                vec![
                    EquivalenceTerm { index: t, sign: 1, coeff: ratio(1, 2) },
                    EquivalenceTerm { index: t, sign: -1, coeff: ratio(1, 2) },
                ],
            )
        })
        .collect()
}

fn uniform_equivalence(side: Side, party: Party, n: usize, sign: i8) -> OperationalEquivalence {
    OperationalEquivalence::new(
        side,
        party,
        (0..n)
            .map(|t| EquivalenceTerm { index: t, sign, coeff: ratio(1, n as i64) })
            .collect(),
    )
}

/// The `P1+ with P2-, P3-, P4-` decomposition of the tetrahedron (and its
/// mirror), valid because `A1 = A2 + A3 + A4`.
fn tetrahedral_equivalence(side: Side, party: Party, flip: bool) -> OperationalEquivalence {
    let s = |plus: bool| if plus != flip { 1i8 } else { -1i8 };
    OperationalEquivalence::new(
        side,
        party,
        vec![
            EquivalenceTerm { index: 0, sign: s(true), coeff: ratio(1, 4) },
            EquivalenceTerm { index: 1, sign: s(false), coeff: ratio(1, 4) },
            EquivalenceTerm { index: 2, sign: s(false), coeff: ratio(1, 4) },
            EquivalenceTerm { index: 3, sign: s(false), coeff: ratio(1, 4) },
        ],
    )
}

/// Identifiers accepted by [`catalog`].
pub fn catalog_ids() -> Vec<String> {
    vec![
        "33".into(),
        "nn:<odd n>".into(),
        "43".into(),
        "34".into(),
        "44".into(),
    ]
}

/// Build a built-in scenario by identifier: `"33"`, `"nn:<odd n>"`,
/// `"43"`, `"34"`, `"44"`.
pub fn catalog(id: &str) -> Result<OperationalScenario> {
    let scenario = match id {
        "33" => {
            let alice = trine_family();
            let bob = alice.negated();
            let n = 3;
            let mut equivalences = trivial_preparation_equivalences(Party::Alice, n);
            equivalences.push(uniform_equivalence(Side::Preparation, Party::Alice, n, 1));
            equivalences.push(uniform_equivalence(Side::Preparation, Party::Alice, n, -1));
            equivalences.push(uniform_equivalence(Side::Measurement, Party::Alice, n, 1));
            equivalences.push(uniform_equivalence(Side::Measurement, Party::Alice, n, -1));
            OperationalScenario {
                name: "33".into(),
                alice,
                bob,
                equivalences,
                relations: vec![Relation { party: Party::Bob, coeffs: vec![1, 1, 1] }],
            }
        }
        "43" => {
            let alice = sic_family();
            let bob = mub_family();
            let mut equivalences = trivial_preparation_equivalences(Party::Alice, 4);
            equivalences.push(tetrahedral_equivalence(Side::Preparation, Party::Alice, false));
            equivalences.push(tetrahedral_equivalence(Side::Preparation, Party::Alice, true));
            OperationalScenario {
                name: "43".into(),
                alice,
                bob,
                equivalences,
                relations: vec![Relation { party: Party::Alice, coeffs: vec![1, -1, -1, -1] }],
            }
        }
        "34" => {
            let alice = mub_family();
            let bob = sic_family();
            let equivalences = vec![
                tetrahedral_equivalence(Side::Measurement, Party::Bob, false),
                tetrahedral_equivalence(Side::Measurement, Party::Bob, true),
            ];
            OperationalScenario {
                name: "34".into(),
                alice,
                bob,
                equivalences,
                relations: vec![Relation { party: Party::Bob, coeffs: vec![1, -1, -1, -1] }],
            }
        }
        "44" => {
            let alice = sic_family();
            let bob = sic_family();
            let mut equivalences = trivial_preparation_equivalences(Party::Alice, 4);
            equivalences.push(tetrahedral_equivalence(Side::Preparation, Party::Alice, false));
            equivalences.push(tetrahedral_equivalence(Side::Preparation, Party::Alice, true));
            equivalences.push(tetrahedral_equivalence(Side::Measurement, Party::Alice, false));
            equivalences.push(tetrahedral_equivalence(Side::Measurement, Party::Alice, true));
            OperationalScenario {
                name: "44".into(),
                alice,
                bob,
                equivalences,
                relations: vec![Relation { party: Party::Bob, coeffs: vec![1, -1, -1, -1] }],
            }
        }
        other => {
            let Some(n_str) = other.strip_prefix("nn:") else {
                return Err(Error::Parse {
                    field: other.to_string(),
                    message: "unknown scenario id".into(),
                });
            };
            let n: u32 = n_str.parse().map_err(|_| Error::Parse {
                field: other.to_string(),
                message: "invalid n".into(),
            })?;
            let alice = odd_n_family(n)?;
            let bob = alice.clone();
            let len = n as usize;
            let mut equivalences = trivial_preparation_equivalences(Party::Alice, len);
            equivalences.push(uniform_equivalence(Side::Preparation, Party::Alice, len, 1));
            equivalences.push(uniform_equivalence(Side::Preparation, Party::Alice, len, -1));
            equivalences.push(uniform_equivalence(Side::Measurement, Party::Alice, len, 1));
            equivalences.push(uniform_equivalence(Side::Measurement, Party::Alice, len, -1));
            OperationalScenario {
                name: other.to_string(),
                alice,
                bob,
                equivalences,
                relations: vec![Relation { party: Party::Bob, coeffs: vec![1; len] }],
            }
        }
    };
    scenario.validate()?;
    Ok(scenario)
}

// ---------------------------------------------------------------------------
// JSON wire format

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    observables: Vec<ObservableJson>,
}

#[derive(Serialize, Deserialize)]
struct ObservableJson {
    bloch: [f64; 3],
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    index: usize,
    sign: i8,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct EquivalenceJson {
    side: Side,
    party: Party,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct ScenarioJson {
    name: String,
    alice: FamilyJson,
    bob: FamilyJson,
    equivalences: Vec<EquivalenceJson>,
    relations: Vec<Vec<i64>>,
}

pub fn scenario_to_json(s: &OperationalScenario) -> String {
    let to_family = |f: &ObservableFamily| FamilyJson {
        observables: f
            .observables
            .iter()
            .map(|o| {
                let b = o.bloch();
                ObservableJson { bloch: [b.x, b.y, b.z] }
            })
            .collect(),
    };
    let json = ScenarioJson {
        name: s.name.clone(),
        alice: to_family(&s.alice),
        bob: to_family(&s.bob),
        equivalences: s
            .equivalences
            .iter()
            .map(|e| EquivalenceJson {
                side: e.side,
                party: e.party,
                terms: e
                    .terms
                    .iter()
                    .map(|t| TermJson {
                        index: t.index,
                        sign: t.sign,
                        coeff: format_rational(&t.coeff),
                    })
                    .collect(),
            })
            .collect(),
        relations: s.relations.iter().map(|r| r.coeffs.clone()).collect(),
    };
    serde_json::to_string_pretty(&json).expect("scenario serializes")
}

pub fn scenario_from_json(text: &str) -> Result<OperationalScenario> {
    let json: ScenarioJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        field: format!("line {}", e.line()),
        message: e.to_string(),
    })?;
    let to_family = |f: &FamilyJson, name: &str| -> Result<ObservableFamily> {
        let observables = f
            .observables
            .iter()
            .map(|o| QubitObservable::from_bloch(BlochVector::new(o.bloch[0], o.bloch[1], o.bloch[2])))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Validation(format!("{name} family: {e}")))?;
        Ok(ObservableFamily::new(name, observables))
    };
    let alice = to_family(&json.alice, "alice")?;
    let bob = to_family(&json.bob, "bob")?;
    let equivalences = json
        .equivalences
        .iter()
        .map(|e| {
            let terms = e
                .terms
                .iter()
                .map(|t| {
                    Ok(EquivalenceTerm {
                        index: t.index,
                        sign: if t.sign >= 0 { 1 } else { -1 },
                        coeff: parse_rational(&t.coeff)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(OperationalEquivalence::new(e.side, e.party, terms))
        })
        .collect::<Result<Vec<_>>>()?;
    // A bare relation vector names its party by length; when both parties
    // have the same size it attaches to Bob, matching the catalog's use of
    // measurement-side constraints.
    let relations = json
        .relations
        .iter()
        .map(|coeffs| {
            let party = if coeffs.len() == bob.len() {
                Party::Bob
            } else if coeffs.len() == alice.len() {
                Party::Alice
            } else {
                return Err(Error::Validation(format!(
                    "relation length {} matches neither party",
                    coeffs.len()
                )));
            };
            Ok(Relation { party, coeffs: coeffs.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    let scenario = OperationalScenario { name: json.name, alice, bob, equivalences, relations };
    scenario.validate()?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trine_members_and_sum() {
        let trine = trine_family();
        assert_eq!(trine.observables[0].bloch(), BlochVector::new(0.0, 0.0, 1.0));
        let a2 = trine.observables[1].bloch();
        assert!((a2.x - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((a2.z + 0.5).abs() < 1e-15);
        assert!(trine.bloch_sum().norm() < 1e-15);
    }

    #[test]
    fn odd_n_families_sum_to_zero() {
        for n in [3u32, 5, 7, 9, 11, 13, 15] {
            let fam = odd_n_family(n).unwrap();
            assert!(fam.bloch_sum().norm() < 1e-12, "n={n}");
            for o in &fam.observables {
                assert!((o.bloch().norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn odd_5_z_components() {
        let fam = odd_n_family(5).unwrap();
        let zs: Vec<f64> = fam.observables.iter().map(|o| o.bloch().z).collect();
        assert!((zs[0] - 1.0).abs() < 1e-15);
        for &z in &zs[1..] {
            assert!((z + 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn odd_n_rejects_bad_n() {
        assert!(odd_n_family(4).is_err());
        assert!(odd_n_family(1).is_err());
    }

    #[test]
    fn sic_members_and_relation() {
        let sic = sic_family();
        let s = 1.0 / 3f64.sqrt();
        assert_eq!(sic.observables[0].bloch(), BlochVector::new(s, s, s));
        assert_eq!(sic.observables[3].bloch(), BlochVector::new(-s, s, s));
        let rels = discover_relations(&sic);
        assert_eq!(rels, vec![vec![1, -1, -1, -1]]);
    }

    #[test]
    fn mub_orthogonality_and_no_relations() {
        let mub = mub_family();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let dot = mub.observables[i].bloch().dot(&mub.observables[j].bloch());
                assert_eq!(dot, 0.0);
            }
        }
        // Unbiasedness: |<+x|+z>|^2 = Tr[Px+ Pz+] = 1/2.
        let px = projector_of(&mub.observables[0], 1);
        let pz = projector_of(&mub.observables[2], 1);
        assert!((crate::algebra::expectation_effect(&px, &pz) - 0.5).abs() < 1e-15);
        assert!(discover_relations(&mub).is_empty());
    }

    #[test]
    fn trine_relation_discovered() {
        assert_eq!(discover_relations(&trine_family()), vec![vec![1, 1, 1]]);
    }

    #[test]
    fn discovered_relations_resubstitute() {
        for fam in [trine_family(), sic_family(), odd_n_family(5).unwrap()] {
            for rel in discover_relations(&fam) {
                let sum = rel
                    .iter()
                    .zip(&fam.observables)
                    .fold(BlochVector::new(0.0, 0.0, 0.0), |acc, (&c, o)| {
                        acc.add(&o.bloch().scale(c as f64))
                    });
                assert!(sum.norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn catalog_scenarios_validate() {
        for id in ["33", "nn:5", "nn:7", "43", "34", "44"] {
            let s = catalog(id).unwrap();
            let report = verify_equivalences(&s, EQUIVALENCE_TOL);
            assert!(
                report.per_constraint.iter().all(|c| c.pass),
                "{id}: max residual {}",
                report.max_residual
            );
        }
    }

    #[test]
    fn catalog_33_has_five_preparation_decompositions() {
        let s = catalog("33").unwrap();
        assert_eq!(s.equivalences_for(Side::Preparation, Party::Alice).len(), 5);
    }

    #[test]
    fn perturbed_observable_fails_verification() {
        let mut s = catalog("33").unwrap();
        // Rotate the second trine axis by about 1e-3 radians.
        let b = s.alice.observables[1].bloch();
        let eps = 1e-3f64;
        let rotated = BlochVector::new(
            b.x * eps.cos() - b.z * eps.sin(),
            b.y,
            b.x * eps.sin() + b.z * eps.cos(),
        );
        s.alice.observables[1] = QubitObservable::from_bloch(rotated).unwrap();
        let report = verify_equivalences(&s, 1e-12);
        assert!(report.max_residual > 1e-5);
        assert!(report.per_constraint.iter().any(|c| !c.pass));
    }

    #[test]
    fn json_round_trip() {
        for id in ["33", "43", "34", "44", "nn:5"] {
            let s = catalog(id).unwrap();
            let text = scenario_to_json(&s);
            let back = scenario_from_json(&text).unwrap();
            assert_eq!(back.name, s.name);
            assert_eq!(back.equivalences, s.equivalences);
            assert_eq!(back.relations, s.relations);
            for (a, b) in s.alice.observables.iter().zip(&back.alice.observables) {
                assert!((a.bloch().x - b.bloch().x).abs() < 1e-15);
                assert!((a.bloch().y - b.bloch().y).abs() < 1e-15);
                assert!((a.bloch().z - b.bloch().z).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn json_rejects_non_unit_bloch() {
        let s = catalog("33").unwrap();
        let text = scenario_to_json(&s).replace("1.0", "1.5");
        assert!(scenario_from_json(&text).is_err());
    }

    #[test]
    fn unknown_id_rejected() {
        assert!(catalog("nope").is_err());
        assert!(catalog("nn:4").is_err());
    }
}
