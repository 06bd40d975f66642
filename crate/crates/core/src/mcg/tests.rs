use proptest::prelude::*;

use super::*;
use crate::genus::decompose;

fn dec(k: u64, g: u64) -> GenusDecomposition {
    decompose(k, g, false).unwrap()
}

#[test]
fn label_round_trip() {
    for s in ["alpha:1", "alpha:2", "alpha:l", "beta:12", "gamma:4", "xgamma:5", "lantern:x3"] {
        let c: CurveLabel = s.parse().unwrap();
        assert_eq!(c.to_string(), s);
    }
    for bad in ["alpha:3", "beta:0", "beta", "lantern:x4", "delta:1", "gamma:-1"] {
        assert!(bad.parse::<CurveLabel>().is_err(), "{bad}");
    }
}

#[test]
fn four_generator_example() {
    let set = build_action_four(5, &dec(5, 18)).unwrap();
    assert_eq!(set.humphries_labels().len(), 37);
    // excluded gammas sit between the four chains: genera 5, 5, 4, 4
    let xs: Vec<_> = set.labels.iter().filter(|c| matches!(c, CurveLabel::XGamma(_))).collect();
    assert_eq!(xs, vec![&CurveLabel::XGamma(5), &CurveLabel::XGamma(10), &CurveLabel::XGamma(14)]);
    let f = set.action("f").unwrap();
    assert_eq!(f.apply_power(CurveLabel::Beta(5), 1), Some(CurveLabel::Beta(1)));
    assert_eq!(f.apply_power(CurveLabel::Beta(14), 1), None);
    assert_eq!(f.apply_power(CurveLabel::ALPHA1, 1), Some(CurveLabel::ALPHA2));
    assert_eq!(verify_lantern_hypotheses(&set), Ok(true));
    let cert = certify_single_orbit(&set);
    assert!(cert.single_orbit, "{:?}", cert.components);
    assert!(cert.components[0].len() >= 37);
    let h = set.action("h").unwrap();
    assert_eq!(h.apply_power(CurveLabel::GAMMA2, 2), Some(CurveLabel::Beta(4)));
}

#[test]
fn three_generator_example() {
    let set = build_action_three(8, &dec(8, 21)).unwrap();
    assert_eq!((set.dec.a, set.dec.b), (0, 3));
    assert_eq!(set.humphries_labels().len(), 43);
    let f = set.action("f").unwrap();
    assert_eq!(f.apply_power(CurveLabel::ALPHA1, 1), Some(CurveLabel::GAMMA1));
    assert_eq!(f.apply_power(CurveLabel::AlphaL, 1), Some(CurveLabel::ALPHA1));
    assert_eq!(set.apply_word(&set.roles.h, CurveLabel::X2), Some(CurveLabel::GAMMA1));
    assert_eq!(set.apply_word(&set.roles.h, CurveLabel::ALPHA2), Some(CurveLabel::GAMMA2));
    assert_eq!(verify_lantern_hypotheses(&set), Ok(true));
    assert!(certify_single_orbit(&set).single_orbit);
}

#[test]
fn k6_uses_powers_of_g() {
    let set = build_action_three(6, &dec(6, 15)).unwrap();
    assert_eq!(render_gen_word(&set.roles.g), "g^2");
    assert_eq!(render_gen_word(&set.roles.h), "g^4");
    let g = set.action("g").unwrap();
    assert_eq!(g.apply_power(CurveLabel::X1, 2), Some(CurveLabel::GAMMA2));
    assert_eq!(g.apply_power(CurveLabel::X2, 4), Some(CurveLabel::GAMMA1));
    assert_eq!(g.apply_power(CurveLabel::X3, 6), Some(CurveLabel::X3));
    assert_eq!(g.apply_power(CurveLabel::GAMMA1, -2), Some(CurveLabel::X3));
    assert!(verify_lantern_word(&set).is_ok());
    assert!(certify_single_orbit(&set).single_orbit);
}

#[test]
fn plus_one_four_generator() {
    let d = decompose(5, 11, false).unwrap();
    assert!(d.plus_one);
    let set = build_action_four(5, &d).unwrap();
    let g = set.action("g").unwrap();
    assert_eq!(g.apply_power(CurveLabel::GAMMA2, 1), Some(CurveLabel::Beta(11)));
    let h = set.action("h").unwrap();
    assert_eq!(h.apply_power(CurveLabel::Beta(4), 1), Some(CurveLabel::Gamma(10)));
    assert!(certify_single_orbit(&set).single_orbit);
    assert!(verify_lantern_word(&set).is_ok());
    assert_eq!(build_action_three(6, &decompose(6, 13, false).unwrap()), Err(McgError::PlusOneUnsupported));
}

#[test]
fn construction_errors() {
    let d4 = decompose(4, 12, false).unwrap();
    assert_eq!(build_action_four(4, &d4), Err(McgError::RangeError(4)));
    assert!(matches!(build_action_three(5, &dec(5, 18)), Err(McgError::UnsupportedK { k: 5, .. })));
    let seven_no_lead = GenusDecomposition { k: 7, a: 0, b: 2, plus_one: false };
    assert!(matches!(build_action_three(7, &seven_no_lead), Err(McgError::UnsupportedK { k: 7, .. })));
    let d7 = decompose(7, 13, true).unwrap();
    assert!(build_action_three(7, &d7).is_ok());
    let bogus = GenusDecomposition { k: 5, a: 0, b: 0, plus_one: false };
    assert!(matches!(build_action_four(5, &bogus), Err(McgError::InvalidDecomposition(_))));
    let mismatched = dec(6, 18);
    assert!(matches!(build_action_four(5, &mismatched), Err(McgError::InvalidDecomposition(_))));
}

#[test]
fn negative_controls_break_single_orbit() {
    let four = build_action_four(5, &dec(5, 18)).unwrap();
    for family in EdgeFamily::ALL {
        let cert = certify_single_orbit(&without_family(&four, family));
        assert!(!cert.single_orbit && cert.components.len() >= 2, "four {family:?}");
    }
    let three = build_action_three(8, &dec(8, 21)).unwrap();
    for family in EdgeFamily::ALL {
        let cert = certify_single_orbit(&without_family(&three, family));
        assert!(!cert.single_orbit, "three {family:?}");
    }
}

#[test]
fn broken_hypothesis_is_reported() {
    let mut set = build_action_four(5, &dec(5, 18)).unwrap();
    set.actions[0].map.remove(&CurveLabel::GAMMA1);
    assert_eq!(verify_lantern_hypotheses(&set), Ok(false));
    assert!(matches!(verify_lantern_word(&set), Err(McgError::HypothesisFailure(_))));

    let mut set = build_action_four(5, &dec(5, 18)).unwrap();
    for a in &mut set.actions {
        a.map.retain(|x, y| !matches!(x, CurveLabel::Lantern(_)) && !matches!(y, CurveLabel::Lantern(_)));
    }
    assert!(matches!(verify_lantern_hypotheses(&set), Err(McgError::MissingLanternData(_))));
}

#[test]
fn malformed_actions_rejected() {
    let mut a = GeneratorAction::new("f", 5);
    a.record(1, CurveLabel::Beta(1), CurveLabel::Beta(2)).unwrap();
    assert!(a.record(1, CurveLabel::Beta(3), CurveLabel::Beta(2)).is_err());
    assert!(a.record(1, CurveLabel::Beta(1), CurveLabel::Beta(3)).is_err());
    // a 3-cycle cannot occur for an element of order 5
    a.record(1, CurveLabel::Beta(2), CurveLabel::Beta(3)).unwrap();
    a.record(1, CurveLabel::Beta(3), CurveLabel::Beta(1)).unwrap();
    assert!(a.check_invariants().is_err());

    let mut b = GeneratorAction::new("g", 6);
    b.record(1, CurveLabel::X1, CurveLabel::Beta(4)).unwrap();
    b.record(1, CurveLabel::Beta(4), CurveLabel::GAMMA2).unwrap();
    b.record(2, CurveLabel::X1, CurveLabel::ALPHA2).unwrap();
    assert!(b.check_invariants().is_err());
}

#[test]
fn lantern_word_shape() {
    let set = build_action_four(5, &dec(5, 18)).unwrap();
    let word = verify_lantern_word(&set).unwrap();
    assert_eq!(word.to_string(), "f^-1 f' g^-1 f^-1 f' g h f^-1 f' h^-1");
    let set = build_action_three(8, &dec(8, 21)).unwrap();
    let word = verify_lantern_word(&set).unwrap();
    assert_eq!(
        word.to_string(),
        "f^-1 f' g^-1 f^-1 f' g g^-1 g^-1 g^-1 f f f^-1 f' f^-1 f^-1 g g g"
    );
    // sending every twist to the identity (so f' becomes f), everything cancels
    let letters: Vec<Letter> = word
        .0
        .iter()
        .filter_map(|l| match l.sym {
            Symbol::Gen(_) => Some(l.clone()),
            Symbol::FPrime => Some(Letter::gen("f", l.inverse)),
            Symbol::Twist(_) => None,
        })
        .collect();
    let mut stack: Vec<Letter> = Vec::new();
    for l in letters {
        if stack.last() == Some(&l.inv()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    assert!(stack.is_empty());
}

#[test]
fn replay_needs_every_permitted_rule() {
    for set in [
        build_action_four(5, &dec(5, 18)).unwrap(),
        build_action_three(8, &dec(8, 21)).unwrap(),
        build_action_three(6, &dec(6, 15)).unwrap(),
    ] {
        let proof = lantern_proof(&set).unwrap();
        assert!(replay(&proof, &set, RuleSet::ALL).is_ok());
        for mask in 0..7u8 {
            let err = replay(&proof, &set, RuleSet::from_mask(mask)).unwrap_err();
            assert!(matches!(err, McgError::RewriteStepInvalid { .. }));
        }
        let used: Vec<Rule> = proof.steps.iter().map(|s| s.rule).collect();
        for rule in Rule::PERMITTED {
            assert!(used.contains(&rule));
        }
    }
}

#[test]
fn replay_rejects_tampered_steps() {
    let set = build_action_four(5, &dec(5, 18)).unwrap();
    let proof = lantern_proof(&set).unwrap();
    for i in 0..proof.steps.len() {
        let mut bad = proof.clone();
        // swapping the first two letters of a word is never the same rewrite
        let w = &mut bad.steps[i].word.0;
        if w.len() >= 2 && w[0] != w[1] {
            w.swap(0, 1);
            assert!(replay(&bad, &set, RuleSet::ALL).is_err(), "step {i}");
        }
    }
    // commuting two interior curves is not allowed
    let mut bad = proof.clone();
    let first_commute = bad.steps.iter().position(|s| s.rule == Rule::Commute).unwrap();
    let prev = bad.steps[first_commute - 1].word.clone();
    let mut w = prev.0.clone();
    w.swap(0, 1); // gamma1 and x3
    bad.steps[first_commute].word = TwistWord(w);
    assert!(replay(&bad, &set, RuleSet::ALL).is_err());
}

#[test]
fn every_admissible_instance_certifies() {
    for k in 5..=10u32 {
        for g in 1..=120u64 {
            let Some(d) = decompose(u64::from(k), g, false) else { continue };
            let four = build_action_four(k, &d).unwrap();
            assert!(certify_single_orbit(&four).single_orbit, "four k={k} g={g}");
            verify_lantern_word(&four).unwrap();
            let lead = decompose(u64::from(k), g, k == 7);
            if let Some(d3) = lead.filter(|d| k >= 6 && !d.plus_one) {
                let three = build_action_three(k, &d3).unwrap();
                assert!(certify_single_orbit(&three).single_orbit, "three k={k} g={g}");
                verify_lantern_word(&three).unwrap();
            }
        }
    }
}

#[test]
fn table_round_trip() {
    for set in [
        build_action_four(5, &dec(5, 18)).unwrap(),
        build_action_three(8, &dec(8, 21)).unwrap(),
        build_action_three(6, &dec(6, 15)).unwrap(),
    ] {
        let table = ActionTable::from_set(&set);
        let back = ActionTable::from_json(&table.to_json()).unwrap();
        assert_eq!(back, table);
        assert_eq!(back.to_set().unwrap(), set);
    }
}

proptest! {
    #[test]
    fn generated_actions_are_partial_permutations(k in 5u32..=12, g in 1u64..=200) {
        if let Some(d) = decompose(u64::from(k), g, false) {
            let set = build_action_four(k, &d).unwrap();
            for a in &set.actions {
                prop_assert!(a.check_invariants().is_ok());
                for (_, x, y) in a.edges() {
                    prop_assert!(set.labels.contains(&x) && set.labels.contains(&y));
                }
            }
            prop_assert_eq!(set.humphries_labels().len() as u64, 2 * g + 1);
        }
    }
}
