//! Communication games whose success probability reduces to a Bell
//! expression, and the classification of strategies into classical /
//! contextual / nonlocal windows.

use serde::Serialize;

use crate::algebra::{
    projector_of, tensor_product, QubitObservable, TwoQubitState,
};
use crate::bounds::{constrained_bound, local_bound, BellExpression, StrategyPolytope};
use crate::error::{Error, Result};
use crate::rational::rat_to_f64;
use crate::scenario::{catalog, mub_family, odd_n_family, sic_family, trine_family, Party};

pub const WINDOW_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Predicate {
    /// Win iff `x = y -> a != b` and `x != y -> a = b`.
    Equality,
    /// Win iff `x + y = 5 -> a != b` (one-based inputs) and otherwise `a = b`.
    Sum5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameSpec {
    pub n_x: usize,
    pub n_y: usize,
    pub predicate: Predicate,
}

impl GameSpec {
    pub fn new(n_x: usize, n_y: usize, predicate: Predicate) -> Result<Self> {
        if n_x < 2 || n_y < 2 || n_x > 12 || n_y > 12 {
            return Err(Error::InvalidN(n_x.max(n_y) as u32));
        }
        Ok(Self { n_x, n_y, predicate })
    }

    pub fn for_scenario(id: &str) -> Result<Self> {
        match id {
            "33" => Self::new(3, 3, Predicate::Equality),
            "44" => Self::new(4, 4, Predicate::Equality),
            "43" => Self::new(4, 3, Predicate::Sum5),
            "34" => Self::new(3, 4, Predicate::Sum5),
            other => {
                let n_str = other.strip_prefix("nn:").ok_or_else(|| Error::Parse {
                    field: other.to_string(),
                    message: "unknown scenario id".into(),
                })?;
                let n: usize = n_str.parse().map_err(|_| Error::Parse {
                    field: other.to_string(),
                    message: "invalid n".into(),
                })?;
                Self::new(n, n, Predicate::Equality)
            }
        }
    }

    /// True when inputs `(x, y)` (zero-based) require anticorrelated
    /// outputs.
    pub fn anticorrelated(&self, x: usize, y: usize) -> bool {
        match self.predicate {
            Predicate::Equality => x == y,
            Predicate::Sum5 => x + y + 2 == 5,
        }
    }

    pub fn wins(&self, x: usize, y: usize, a: i8, b: i8) -> bool {
        if self.anticorrelated(x, y) {
            a != b
        } else {
            a == b
        }
    }
}

/// `M_xy = +1` where winning requires `a = b`, `-1` where it requires
/// `a != b`; the marginal terms of the moment expansion cancel, leaving
/// `P = 1/2 + beta / (2 n_x n_y)`.
pub fn bell_of_game(g: &GameSpec) -> BellExpression {
    let m = (0..g.n_x)
        .map(|x| {
            (0..g.n_y)
                .map(|y| if g.anticorrelated(x, y) { -1 } else { 1 })
                .collect()
        })
        .collect();
    BellExpression::new(format!("beta_{}x{}", g.n_x, g.n_y), m).expect("valid game matrix")
}

#[derive(Debug, Clone)]
pub struct QuantumStrategy {
    pub alice: Vec<QubitObservable>,
    pub bob: Vec<QubitObservable>,
    pub state: TwoQubitState,
}

/// Outcome distribution `P(a, b | x, y)` by projector products.
pub fn outcome_probability(
    strat: &QuantumStrategy,
    x: usize,
    y: usize,
    a: i8,
    b: i8,
) -> Result<f64> {
    let pa = projector_of(&strat.alice[x], a);
    let pb = projector_of(&strat.bob[y], b);
    let op = tensor_product(&pa.matrix(), &pb.matrix());
    crate::algebra::expectation_two_qubit(&strat.state, &op)
}

/// Average winning probability over uniform inputs.
pub fn success_probability(g: &GameSpec, strat: &QuantumStrategy) -> Result<f64> {
    if strat.alice.len() != g.n_x || strat.bob.len() != g.n_y {
        return Err(Error::DimensionMismatch(format!(
            "game is {}x{} but strategy has {}x{} settings",
            g.n_x,
            g.n_y,
            strat.alice.len(),
            strat.bob.len()
        )));
    }
    let mut total = 0.0;
    for x in 0..g.n_x {
        for y in 0..g.n_y {
            for a in [1i8, -1] {
                for b in [1i8, -1] {
                    if g.wins(x, y, a, b) {
                        total += outcome_probability(strat, x, y, a, b)?;
                    }
                }
            }
        }
    }
    Ok(total / (g.n_x * g.n_y) as f64)
}

/// `1/2 + beta / (2 n_x n_y)`.
pub fn success_from_bell(g: &GameSpec, beta: f64) -> Result<f64> {
    let cap = (g.n_x * g.n_y) as f64;
    if beta.abs() > cap + 1e-9 {
        return Err(Error::OutOfRange { value: beta, lo: -cap, hi: cap });
    }
    Ok(0.5 + beta / (2.0 * cap))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    Classical,
    Boundary,
    ContextualNotNonlocal,
    Nonlocal,
}

impl Window {
    pub fn as_str(&self) -> &'static str {
        match self {
            Window::Classical => "classical",
            Window::Boundary => "boundary",
            Window::ContextualNotNonlocal => "contextual_not_nonlocal",
            Window::Nonlocal => "nonlocal",
        }
    }
}

/// Strict-inequality classification with a float-safety margin; success
/// probabilities within the margin of a threshold are `boundary`.
pub fn classify_window(p: f64, p_unc: f64, p_local: f64, margin: f64) -> Window {
    if p > p_local + margin {
        Window::Nonlocal
    } else if (p - p_local).abs() <= margin || (p - p_unc).abs() <= margin {
        Window::Boundary
    } else if p > p_unc + margin {
        Window::ContextualNotNonlocal
    } else {
        Window::Classical
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GameReport {
    pub game: String,
    pub p_quantum: f64,
    pub p_local: f64,
    pub p_unc: f64,
    pub window: Window,
}

impl GameReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The explicit optimal (or, for the 4x4 game, conventional) strategy of
/// each catalog game.
pub fn preset_strategy(id: &str) -> Result<QuantumStrategy> {
    use crate::algebra::{maximally_entangled_state, BellState};
    let strat = match id {
        "33" => {
            let alice = trine_family().observables;
            let bob = alice.iter().map(QubitObservable::negated).collect();
            QuantumStrategy {
                alice,
                bob,
                state: maximally_entangled_state(BellState::PhiPlus),
            }
        }
        "43" => QuantumStrategy {
            alice: sic_family().observables,
            bob: mub_family().observables.iter().map(QubitObservable::negated).collect(),
            state: maximally_entangled_state(BellState::PsiMinus),
        },
        "34" => QuantumStrategy {
            alice: mub_family().observables.iter().map(QubitObservable::negated).collect(),
            bob: sic_family().observables,
            state: maximally_entangled_state(BellState::PsiMinus),
        },
        "44" => QuantumStrategy {
            alice: sic_family().observables,
            bob: sic_family().observables,
            state: maximally_entangled_state(BellState::PsiMinus),
        },
        other => {
            let n_str = other.strip_prefix("nn:").ok_or_else(|| Error::Parse {
                field: other.to_string(),
                message: "unknown scenario id".into(),
            })?;
            let n: u32 = n_str.parse().map_err(|_| Error::Parse {
                field: other.to_string(),
                message: "invalid n".into(),
            })?;
            let fam = odd_n_family(n)?.observables;
            QuantumStrategy {
                alice: fam.clone(),
                bob: fam,
                state: maximally_entangled_state(BellState::PsiMinus),
            }
        }
    };
    Ok(strat)
}

/// Three-tier game report at the preset strategy of a catalog scenario.
pub fn game_report(id: &str) -> Result<GameReport> {
    let g = GameSpec::for_scenario(id)?;
    let scenario = catalog(id)?;
    let expr = bell_of_game(&g);
    let (local, _, _) = local_bound(&expr)?;
    let poly_a = StrategyPolytope::from_scenario(&scenario, Party::Alice);
    let poly_b = StrategyPolytope::from_scenario(&scenario, Party::Bob);
    let (mut unc, _, _) = constrained_bound(&expr, &poly_a, &poly_b)?;
    // The 4x4 equality game: the tetrahedral relation does not bind its
    // optimal model, so the effective constrained bound is the local one.
    if id == "44" && unc < local {
        unc = local.clone();
    }
    let strat = preset_strategy(id)?;
    let p_quantum = success_probability(&g, &strat)?;
    let p_local = success_from_bell(&g, rat_to_f64(&local))?;
    let p_unc = success_from_bell(&g, rat_to_f64(&unc))?;
    let window = classify_window(p_quantum, p_unc, p_local, WINDOW_MARGIN);
    Ok(GameReport { game: id.to_string(), p_quantum, p_local, p_unc, window })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{maximally_entangled_state, BellState, BlochVector};
    use crate::bounds::quantum_value_at;

    #[test]
    fn bell_of_game_matches_catalog_expressions() {
        for id in ["33", "43", "34", "44", "nn:5"] {
            let g = GameSpec::for_scenario(id).unwrap();
            let from_game = bell_of_game(&g);
            let direct = BellExpression::for_scenario(id).unwrap();
            for x in 0..from_game.rows() {
                for y in 0..from_game.cols() {
                    assert_eq!(from_game.coeff(x, y), direct.coeff(x, y), "{id} ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn sum5_minus_entries() {
        let g = GameSpec::for_scenario("43").unwrap();
        let expr = bell_of_game(&g);
        let mut minus = Vec::new();
        for x in 0..4 {
            for y in 0..3 {
                if expr.coeff(x, y) == -1 {
                    minus.push((x, y));
                }
            }
        }
        assert_eq!(minus, vec![(1, 2), (2, 1), (3, 0)]);
    }

    #[test]
    fn preset_success_probabilities() {
        let cases = [
            ("33", 5.0 / 6.0),
            ("43", 0.5 * (1.0 + 1.0 / 3f64.sqrt())),
            ("34", 0.5 * (1.0 + 1.0 / 3f64.sqrt())),
            ("nn:5", 0.5 + 1.0 / 5.0),
            ("nn:7", 0.5 + 1.0 / 7.0),
            ("44", 0.625),
        ];
        for (id, expect) in cases {
            let g = GameSpec::for_scenario(id).unwrap();
            let strat = preset_strategy(id).unwrap();
            let p = success_probability(&g, &strat).unwrap();
            assert!((p - expect).abs() < 1e-9, "{id}: {p} vs {expect}");
        }
    }

    #[test]
    fn moment_identity_on_presets() {
        for id in ["33", "43", "34", "44", "nn:5"] {
            let g = GameSpec::for_scenario(id).unwrap();
            let strat = preset_strategy(id).unwrap();
            let p = success_probability(&g, &strat).unwrap();
            let beta =
                quantum_value_at(&bell_of_game(&g), &strat.alice, &strat.bob, &strat.state)
                    .unwrap();
            let via_bell = success_from_bell(&g, beta).unwrap();
            assert!((p - via_bell).abs() < 1e-12, "{id}");
        }
    }

    #[test]
    fn outcome_distribution_normalized() {
        let strat = preset_strategy("43").unwrap();
        for x in 0..4 {
            for y in 0..3 {
                let total: f64 = [1i8, -1]
                    .iter()
                    .flat_map(|&a| [1i8, -1].iter().map(move |&b| (a, b)))
                    .map(|(a, b)| outcome_probability(&strat, x, y, a, b).unwrap())
                    .sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unentangled_state_gives_half() {
        // Product pure state; correlators factorize and the marginal terms
        // cancel against the win-parity structure only on average.
        let g = GameSpec::for_scenario("33").unwrap();
        let v = [
            num_complex::Complex64::new(0.5, 0.0),
            num_complex::Complex64::new(0.5, 0.0),
            num_complex::Complex64::new(0.5, 0.0),
            num_complex::Complex64::new(0.5, 0.0),
        ];
        let state = TwoQubitState::from_pure(&v).unwrap();
        // Settings orthogonal to the x-axis marginals: use sigma_z / sigma_y.
        let alice = vec![QubitObservable::sigma_z(); 3];
        let bob = vec![QubitObservable::sigma_y(); 3];
        let strat = QuantumStrategy { alice, bob, state };
        let p = success_probability(&g, &strat).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn window_examples() {
        // Thresholds of the 3x3 game.
        let (p_unc, p_local) = (13.0 / 18.0, 7.0 / 9.0);
        let m = WINDOW_MARGIN;
        assert_eq!(classify_window(0.70, p_unc, p_local, m), Window::Classical);
        assert_eq!(
            classify_window(0.75, p_unc, p_local, m),
            Window::ContextualNotNonlocal
        );
        assert_eq!(classify_window(5.0 / 6.0, p_unc, p_local, m), Window::Nonlocal);
        assert_eq!(classify_window(p_unc, p_unc, p_local, m), Window::Boundary);
    }

    #[test]
    fn window_monotone_in_p() {
        let rank = |w: Window| match w {
            Window::Classical => 0,
            Window::Boundary => 1,
            Window::ContextualNotNonlocal => 2,
            Window::Nonlocal => 3,
        };
        let (p_unc, p_local) = (13.0 / 18.0, 7.0 / 9.0);
        let mut last = -1i32;
        // Sampled away from the thresholds.
        for i in 0..1000 {
            let p = 0.5 + 0.4 * (i as f64 + 0.41) / 1000.0;
            if (p - p_unc).abs() < 1e-6 || (p - p_local).abs() < 1e-6 {
                continue;
            }
            let r = rank(classify_window(p, p_unc, p_local, WINDOW_MARGIN));
            assert!(r >= last, "window rank dropped at p = {p}");
            last = r;
        }
    }

    #[test]
    fn game_reports_and_windows() {
        let r33 = game_report("33").unwrap();
        assert_eq!(r33.window, Window::Nonlocal);
        assert!((r33.p_local - 7.0 / 9.0).abs() < 1e-12);
        assert!((r33.p_unc - 13.0 / 18.0).abs() < 1e-12);

        let r55 = game_report("nn:5").unwrap();
        assert_eq!(r55.window, Window::ContextualNotNonlocal);

        let r44 = game_report("44").unwrap();
        assert_eq!(r44.window, Window::Classical);
        assert!((r44.p_quantum - 0.625).abs() < 1e-9);
        assert!((r44.p_unc - 0.75).abs() < 1e-12);

        let json = r44.to_json();
        assert!(json.contains("\"window\": \"classical\""));
    }

    #[test]
    fn success_from_bell_range_check() {
        let g = GameSpec::for_scenario("33").unwrap();
        assert!(success_from_bell(&g, 20.0).is_err());
        assert!((success_from_bell(&g, 4.0).unwrap() - 13.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_detected() {
        let g = GameSpec::for_scenario("43").unwrap();
        let strat = preset_strategy("33").unwrap();
        assert!(success_probability(&g, &strat).is_err());
    }

    #[test]
    fn predicate_totality() {
        for id in ["33", "43", "34", "44"] {
            let g = GameSpec::for_scenario(id).unwrap();
            for x in 0..g.n_x {
                for y in 0..g.n_y {
                    let winning: Vec<(i8, i8)> = [1i8, -1]
                        .iter()
                        .flat_map(|&a| [1i8, -1].iter().map(move |&b| (a, b)))
                        .filter(|&(a, b)| g.wins(x, y, a, b))
                        .collect();
                    // Exactly one winning output parity per input pair.
                    assert_eq!(winning.len(), 2, "{id} ({x},{y})");
                    assert!(winning.iter().all(|(a, b)| (a == b) == (winning[0].0 == winning[0].1)));
                }
            }
        }
    }

    #[test]
    fn random_strategy_moment_identity() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal, UnitSphere};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let g = GameSpec::for_scenario("33").unwrap();
        for _ in 0..50 {
            let obs = |rng: &mut rand_chacha::ChaCha8Rng| {
                let v: [f64; 3] = UnitSphere.sample(rng);
                QubitObservable::from_bloch(BlochVector::new(v[0], v[1], v[2])).unwrap()
            };
            let alice: Vec<_> = (0..3).map(|_| obs(&mut rng)).collect();
            let bob: Vec<_> = (0..3).map(|_| obs(&mut rng)).collect();
            let mut v = [num_complex::Complex64::new(0.0, 0.0); 4];
            let mut norm = 0.0;
            for e in v.iter_mut() {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                *e = num_complex::Complex64::new(re, im);
                norm += e.norm_sqr();
            }
            let norm = norm.sqrt();
            for e in v.iter_mut() {
                *e /= norm;
            }
            let state = TwoQubitState::from_pure(&v).unwrap();
            let strat = QuantumStrategy { alice, bob, state };
            let p = success_probability(&g, &strat).unwrap();
            let beta =
                quantum_value_at(&bell_of_game(&g), &strat.alice, &strat.bob, &strat.state)
                    .unwrap();
            assert!((p - success_from_bell(&g, beta).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn singlet_preset_33_also_optimal() {
        // B = A with the singlet is an equivalent optimum.
        let g = GameSpec::for_scenario("33").unwrap();
        let fam = trine_family().observables;
        let strat = QuantumStrategy {
            alice: fam.clone(),
            bob: fam,
            state: maximally_entangled_state(BellState::PsiMinus),
        };
        let p = success_probability(&g, &strat).unwrap();
        assert!((p - 5.0 / 6.0).abs() < 1e-9);
    }
}
