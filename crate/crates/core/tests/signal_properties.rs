mod common;

use std::collections::{BTreeMap, HashSet};

use chrono::TimeDelta;
use orgsignals::signals::{
    balanced_contribution_from, contribution_index, extract_response_events, honest_sentiment, innovative_language,
    oscillation_count, rapid_response, Activity, ReferenceDictionary, ResponseEvent,
};
use orgsignals::LexiconConfig;
use proptest::prelude::*;

use common::*;

fn frequencies(tokens: &[String]) -> BTreeMap<String, f64> {
    let mut counts: BTreeMap<String, f64> = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.clone()).or_default() += 1.0;
    }
    let n = tokens.len() as f64;
    counts.values_mut().for_each(|c| *c /= n);
    counts
}

fn words() -> impl Strategy<Value = Vec<String>> {
    proptest::collection::vec(
        proptest::sample::select(vec!["ab", "cd", "ef", "gh", "ij", "kl"]),
        1..40,
    )
    .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn lexicon() -> LexiconConfig {
    let set = |w: &[&str]| w.iter().map(|s| s.to_string()).collect::<HashSet<_>>();
    LexiconConfig::new(set(&["ab", "cd"]), set(&["ef"]), ReferenceDictionary::default()).unwrap()
}

proptest! {
    #[test]
    fn contribution_index_antisymmetric(s in 0u64..1000, r in 0u64..1000) {
        prop_assume!(s + r > 0);
        let (a, b) = (contribution_index(s, r).unwrap(), contribution_index(r, s).unwrap());
        prop_assert!((a + b).abs() <= 1e-15);
        prop_assert!((-1.0..=1.0).contains(&a));
    }

    #[test]
    fn balanced_contribution_symmetries(counts in proptest::collection::vec((0u64..50, 0u64..50), 2..12)) {
        prop_assume!(counts.iter().filter(|(s, r)| s + r > 0).count() >= 2);
        let build = |swap: bool, shift: usize| -> BTreeMap<orgsignals::ActorId, Activity> {
            counts
                .iter()
                .enumerate()
                .map(|(i, &(s, r))| {
                    let a = if swap { Activity { sent: r, received: s } } else { Activity { sent: s, received: r } };
                    (node((i + shift) % counts.len()), a)
                })
                .collect()
        };
        let base = balanced_contribution_from(&build(false, 0)).unwrap();
        prop_assert!(base >= 0.0);
        prop_assert!((base - balanced_contribution_from(&build(false, 3)).unwrap()).abs() <= 1e-12);
        prop_assert!((base - balanced_contribution_from(&build(true, 0)).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn oscillation_matches_oracle_and_reversal(series in proptest::collection::vec(0u8..4, 0..50)) {
        let s: Vec<f64> = series.iter().map(|&v| v as f64).collect();
        let mut r = s.clone();
        r.reverse();
        prop_assert_eq!(oscillation_count(&s), brute_force_oscillations(&s));
        prop_assert_eq!(oscillation_count(&s), oscillation_count(&r));
    }

    #[test]
    fn responsiveness_decreases_with_delay(a in 0i64..10_000, b in 0i64..10_000) {
        prop_assume!(a != b);
        let event = |secs| ResponseEvent {
            requester: node(0),
            responder: node(1),
            run_start: t0(),
            run_last: t0(),
            response_at: t0() + TimeDelta::minutes(secs),
            nudges: 1,
        };
        let (ra, rb) = (rapid_response(&[event(a)]).unwrap(), rapid_response(&[event(b)]).unwrap());
        prop_assert_eq!(ra.responsiveness > rb.responsiveness, a < b);
        prop_assert_eq!(ra.responsiveness == 1.0, a == 0);
    }

    #[test]
    fn honest_sentiment_ignores_message_order(
        messages in proptest::collection::vec(words(), 2..15),
        seed in any::<u64>(),
    ) {
        let lex = lexicon();
        let mut shuffled = messages.clone();
        let k = (seed as usize) % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let a = honest_sentiment(messages.iter().map(Vec::as_slice), &lex).unwrap();
        let b = honest_sentiment(shuffled.iter().map(Vec::as_slice), &lex).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn language_divergence_symmetric_and_bounded(p in words(), q in words()) {
        let ref_q = ReferenceDictionary::new(frequencies(&q)).unwrap();
        let ref_p = ReferenceDictionary::new(frequencies(&p)).unwrap();
        let pq = innovative_language(p.iter().map(String::as_str), &ref_q).unwrap().divergence;
        let qp = innovative_language(q.iter().map(String::as_str), &ref_p).unwrap().divergence;
        prop_assert!((pq - qp).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&pq));
        if frequencies(&p) == frequencies(&q) {
            prop_assert!(pq <= 1e-12);
        } else {
            prop_assert!(pq > 0.0);
        }
        let self_div = innovative_language(p.iter().map(String::as_str), &ref_p).unwrap().divergence;
        prop_assert!(self_div <= 1e-12);
    }

    #[test]
    fn doubling_counts_keeps_divergence(p in words(), q in words()) {
        let reference = ReferenceDictionary::new(frequencies(&q)).unwrap();
        let once = innovative_language(p.iter().map(String::as_str), &reference).unwrap();
        let twice = innovative_language(p.iter().chain(&p).map(String::as_str), &reference).unwrap();
        prop_assert!((once.divergence - twice.divergence).abs() <= 1e-12);
        prop_assert!((once.oov_rate - twice.oov_rate).abs() <= 1e-12);
    }

    #[test]
    fn responses_match_run_scanner(
        steps in proptest::collection::vec((0i64..4000, 0usize..3, 0usize..3), 1..40),
        horizon_hours in 1i64..400,
    ) {
        let mut secs = 0;
        let events: Vec<_> = steps
            .iter()
            .filter(|(_, a, b)| a != b)
            .enumerate()
            .map(|(k, &(gap, a, b))| {
                secs += gap * 60;
                message(k, secs, &node(a), &[&node(b)])
            })
            .collect();
        let horizon = TimeDelta::hours(horizon_hours);
        let (want, _) = brute_force_responses(&events, horizon.num_seconds());
        let since = |t: chrono::DateTime<chrono::Utc>| (t - t0()).num_seconds();
        let mut got: Vec<RunTuple> = extract_response_events(&events, horizon)
            .into_iter()
            .map(|r| (r.requester.to_string(), r.responder.to_string(), since(r.run_start), since(r.run_last), since(r.response_at), r.nudges))
            .collect();
        got.sort();
        prop_assert_eq!(got, want);
    }
}

#[test]
fn distinct_distributions_diverge() {
    let p: Vec<String> = ["ab", "ab", "cd"].map(String::from).to_vec();
    let q: Vec<String> = ["ab", "cd", "cd"].map(String::from).to_vec();
    let reference = ReferenceDictionary::new(frequencies(&q)).unwrap();
    let d = innovative_language(p.iter().map(String::as_str), &reference)
        .unwrap()
        .divergence;
    assert!(d > 0.0);
}
