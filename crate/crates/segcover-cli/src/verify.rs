//! Equivalence property suites: exhaustive families and seeded random
//! round-trips, each reported PASS/FAIL with counterexamples. The report is
//! a pure function of (input formula, trials, seed, mutate), so reruns are
//! byte-identical.

use std::fmt::Write as _;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use segcover::cnf::{
    brute_force_satisfiable, occurrence_profile, preprocess_for_reduction, CnfFormula, Literal,
    Preprocessed,
};
use segcover::dimacs::write_dimacs;
use segcover::equivalence::{contiguous_sat_to_sc, sc_to_contiguous_sat};
use segcover::gen;
use segcover::instance::ScInstance;
use segcover::reduce3sat::reduce_3sat_to_sc;
use segcover::solver::{dpll_satisfiable, solve_dpll};

pub struct VerifyConfig {
    pub formula: Option<CnfFormula>,
    pub trials: usize,
    pub seed: u64,
    pub mutate: bool,
}

pub struct VerifyOutcome {
    pub report: String,
    pub pass: bool,
}

struct Property {
    name: &'static str,
    checked: usize,
    failures: Vec<String>,
}

impl Property {
    fn new(name: &'static str) -> Self {
        Property {
            name,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn one_line_dimacs(formula: &CnfFormula) -> String {
    write_dimacs(formula)
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

fn standard_reducer(formula: &CnfFormula) -> Option<ScInstance> {
    reduce_3sat_to_sc(formula).ok().map(|(inst, _)| inst)
}

/// Deliberately broken reducer: the first clause's second guard forgets its
/// alternative and offers the whole clause interval instead, so that guard
/// can cover the clause's block single-handedly.
fn mutated_reducer(formula: &CnfFormula) -> Option<ScInstance> {
    let (instance, cert) = reduce_3sat_to_sc(formula).ok()?;
    let gadget = &cert.clause_gadgets[0];
    let mut segments = instance.segments().to_vec();
    segments[gadget.t_segments[1]].second = gadget.interval.clone();
    Some(ScInstance::new(instance.target().clone(), segments).expect("still inside the target"))
}

/// Satisfiability of the (preprocessed) formula must match coverability of
/// its reduction. Decided formulas are cross-checked by brute force instead.
fn check_equivalence(
    property: &mut Property,
    formula: &CnfFormula,
    reduce: &dyn Fn(&CnfFormula) -> Option<ScInstance>,
) {
    property.checked += 1;
    let prepared = match preprocess_for_reduction(formula) {
        Ok(p) => p,
        Err(e) => {
            property
                .failures
                .push(format!("{} rejected: {e}", one_line_dimacs(formula)));
            return;
        }
    };
    match prepared {
        Preprocessed::Decided { satisfiable, .. } => {
            let brute = brute_force_satisfiable(formula).is_some();
            if brute != satisfiable {
                property.failures.push(format!(
                    "{} decided satisfiable={satisfiable} but brute force says {brute}",
                    one_line_dimacs(formula)
                ));
            }
        }
        Preprocessed::Reducible(core) => {
            let Some(instance) = reduce(&core) else {
                property
                    .failures
                    .push(format!("{} not reducible", one_line_dimacs(&core)));
                return;
            };
            let sat = dpll_satisfiable(&core).0.is_some();
            let coverable = solve_dpll(&instance).is_coverable();
            if sat != coverable {
                property.failures.push(format!(
                    "{} sat={sat} coverable={coverable}",
                    one_line_dimacs(&core)
                ));
            }
        }
    }
}

/// All eight sign patterns over variables 1,2,3.
fn sign_pattern_clauses() -> Vec<Vec<Literal>> {
    (0..8u32)
        .map(|mask| {
            (0..3)
                .map(|k| Literal {
                    var: k + 1,
                    positive: mask & (1 << k) == 0,
                })
                .collect()
        })
        .collect()
}

fn exhaustive_3var(reduce: &dyn Fn(&CnfFormula) -> Option<ScInstance>) -> Property {
    let mut property = Property::new("exhaustive-3var");
    let patterns = sign_pattern_clauses();
    for subset in 1u32..256 {
        let clauses: Vec<Vec<Literal>> = patterns
            .iter()
            .enumerate()
            .filter(|(i, _)| subset & (1 << i) != 0)
            .map(|(_, c)| c.clone())
            .collect();
        let formula = CnfFormula::new(3, clauses).unwrap();
        check_equivalence(&mut property, &formula, reduce);
    }
    property
}

fn random_roundtrip(trials: usize, rng: &mut ChaCha8Rng) -> Property {
    let mut property = Property::new("random-roundtrip");
    for i in 0..trials {
        let instance = gen::random_sc_instance(rng, 1 + i % 8, 10);
        let (formula, _) = sc_to_contiguous_sat(&instance);
        let direct = solve_dpll(&instance).is_coverable();
        property.checked += 1;
        match contiguous_sat_to_sc(&formula) {
            Ok((back, _)) => {
                let via_formula = dpll_satisfiable(&formula).0.is_some();
                let via_back = solve_dpll(&back).is_coverable();
                if direct != via_formula || direct != via_back {
                    property.failures.push(format!(
                        "{} direct={direct} formula={via_formula} back={via_back}",
                        instance.to_json_string().split_whitespace().collect::<Vec<_>>().join("")
                    ));
                }
            }
            Err(e) => property.failures.push(format!(
                "encoding of a random instance broke contiguity: {e}"
            )),
        }

        let formula = gen::random_contiguous_formula(rng, 5, 6);
        property.checked += 1;
        match contiguous_sat_to_sc(&formula) {
            Ok((inst, _)) => {
                let sat = dpll_satisfiable(&formula).0.is_some();
                let coverable = solve_dpll(&inst).is_coverable();
                if sat != coverable {
                    property.failures.push(format!(
                        "{} sat={sat} coverable={coverable}",
                        one_line_dimacs(&formula)
                    ));
                }
            }
            Err(e) => property.failures.push(format!(
                "{} rejected: {e}",
                one_line_dimacs(&formula)
            )),
        }
    }
    property
}

fn gadget_size(trials: usize, rng: &mut ChaCha8Rng) -> Property {
    let mut property = Property::new("gadget-size");
    for i in 0..trials {
        let formula = gen::random_3cnf(rng, 3 + i % 3, 1 + i % 6);
        let Ok(Preprocessed::Reducible(core)) = preprocess_for_reduction(&formula) else {
            continue;
        };
        property.checked += 1;
        let Ok((instance, _)) = reduce_3sat_to_sc(&core) else {
            property
                .failures
                .push(format!("{} not reducible", one_line_dimacs(&core)));
            continue;
        };
        let profile = occurrence_profile(&core);
        let expected = 2 * core.num_clauses()
            + profile.counts().iter().map(|(p, n)| p * n).sum::<usize>();
        if instance.num_segments() != expected {
            property.failures.push(format!(
                "{} has {} segments, expected {expected}",
                one_line_dimacs(&core),
                instance.num_segments()
            ));
        }
    }
    property
}

pub fn run(config: &VerifyConfig) -> VerifyOutcome {
    let reduce: &dyn Fn(&CnfFormula) -> Option<ScInstance> = if config.mutate {
        &mutated_reducer
    } else {
        &standard_reducer
    };

    let mut properties = Vec::new();
    if let Some(formula) = &config.formula {
        let mut property = Property::new("input-formula");
        check_equivalence(&mut property, formula, reduce);
        properties.push(property);
    }
    properties.push(exhaustive_3var(reduce));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    properties.push(random_roundtrip(config.trials, &mut rng));
    properties.push(gadget_size(config.trials, &mut rng));

    let pass = properties.iter().all(Property::pass);
    let mut report = String::new();
    let _ = writeln!(report, "segcover verify report");
    let _ = writeln!(report, "seed: {}", config.seed);
    let _ = writeln!(report, "trials: {}", config.trials);
    let _ = writeln!(
        report,
        "gadget mutation: {}",
        if config.mutate { "on" } else { "off" }
    );
    for property in &properties {
        if property.pass() {
            let _ = writeln!(
                report,
                "property {}: PASS ({} checked)",
                property.name, property.checked
            );
        } else {
            let _ = writeln!(
                report,
                "property {}: FAIL ({} checked, {} failed)",
                property.name,
                property.checked,
                property.failures.len()
            );
            for failure in property.failures.iter().take(3) {
                let _ = writeln!(report, "  counterexample: {failure}");
            }
            if property.failures.len() > 3 {
                let _ = writeln!(report, "  (further counterexamples elided)");
            }
        }
    }
    let _ = writeln!(report, "verdict: {}", if pass { "PASS" } else { "FAIL" });
    VerifyOutcome { report, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(mutate: bool) -> VerifyConfig {
        VerifyConfig {
            formula: None,
            trials: 20,
            seed: 7,
            mutate,
        }
    }

    #[test]
    fn clean_suites_pass() {
        let outcome = run(&config(false));
        assert!(outcome.pass, "{}", outcome.report);
        assert!(outcome.report.ends_with("verdict: PASS\n"));
    }

    #[test]
    fn seeded_reports_are_byte_identical() {
        assert_eq!(run(&config(false)).report, run(&config(false)).report);
    }

    #[test]
    fn mutated_gadget_is_caught_with_a_counterexample() {
        let outcome = run(&config(true));
        assert!(!outcome.pass);
        assert!(outcome.report.contains("property exhaustive-3var: FAIL"));
        assert!(outcome.report.contains("counterexample:"));
        assert!(outcome.report.ends_with("verdict: FAIL\n"));
    }

    #[test]
    fn input_formula_is_reported_first() {
        let formula = CnfFormula::new(
            3,
            vec![
                segcover::cnf::clause(&[1, 2, 3]),
                segcover::cnf::clause(&[-1, -2, -3]),
            ],
        )
        .unwrap();
        let outcome = run(&VerifyConfig {
            formula: Some(formula),
            trials: 5,
            seed: 0,
            mutate: false,
        });
        assert!(outcome.pass);
        assert!(outcome
            .report
            .contains("property input-formula: PASS (1 checked)"));
    }
}
