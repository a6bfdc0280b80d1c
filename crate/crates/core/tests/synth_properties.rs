use orgsignals::ingest::write_event_csv_to;
use orgsignals::signals::{periods_for, PeriodGranularity, UnitScope};
use orgsignals::synth::{DelaySpec, Topology};
use orgsignals::{compute_signal_record, generate, ScenarioSpec, SignalConfig, SignalRecord, SyntheticCorpus};
use proptest::prelude::*;

fn analyze(c: &SyntheticCorpus) -> SignalRecord {
    let cfg = SignalConfig {
        lexicon: c.lexicon.to_config(),
        ..SignalConfig::default()
    };
    let period = periods_for(&c.events, PeriodGranularity::Whole)[0];
    compute_signal_record(UnitScope::All("all"), period, &c.events, &cfg).unwrap()
}

fn topology() -> impl Strategy<Value = Topology> {
    prop_oneof![
        Just(Topology::Star),
        Just(Topology::Ring),
        Just(Topology::RotatingStar {
            rotation_period_days: 7,
            hubs: 2
        }),
        (0.3..0.9f64).prop_map(|p| Topology::Random { p }),
    ]
}

fn csv(c: &SyntheticCorpus) -> Vec<u8> {
    let mut buf = Vec::new();
    write_event_csv_to(&c.events, &mut buf).unwrap();
    buf
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn same_seed_same_bytes(topology in topology(), n in 3usize..8, seed in any::<u64>()) {
        let spec = ScenarioSpec::new(n, 14, topology, seed);
        let (a, b) = (generate(&spec).unwrap(), generate(&spec).unwrap());
        prop_assert_eq!(csv(&a), csv(&b));
        prop_assert_eq!(a.expected_json(), b.expected_json());
        prop_assert!(a.events.iter().all(|e| e.validate().is_ok()));
    }

    #[test]
    fn slower_replies_lower_responsiveness(
        topology in topology(),
        seed in any::<u64>(),
        fast in 1.0..20.0f64,
        extra in 1.0..40.0f64,
    ) {
        let mut spec = ScenarioSpec::new(5, 28, topology, seed);
        spec.reply_delay_hours = DelaySpec::Constant { hours: fast };
        let quick = analyze(&generate(&spec).unwrap());
        spec.reply_delay_hours = DelaySpec::Constant { hours: fast + extra };
        let slow = analyze(&generate(&spec).unwrap());
        prop_assert!(slow.responsiveness.unwrap() < quick.responsiveness.unwrap());
    }

    #[test]
    fn wider_mix_raises_honest_sentiment(seed in any::<u64>(), narrow in 0.0..0.1f64, gap in 0.15..0.4f64) {
        let mut spec = ScenarioSpec::new(5, 21, Topology::Ring, seed);
        spec.lexicon_mix.emotional_fraction = 0.5;
        spec.lexicon_mix.spread = narrow;
        let a = analyze(&generate(&spec).unwrap());
        spec.lexicon_mix.spread = narrow + gap;
        let b = analyze(&generate(&spec).unwrap());
        prop_assert!(b.honest_sentiment.unwrap() > a.honest_sentiment.unwrap());
    }

    #[test]
    fn planted_values_are_measured(topology in topology(), seed in any::<u64>(), hours in 1.0..20.0f64, nudges in 1u32..4) {
        let mut spec = ScenarioSpec::new(6, 28, topology, seed);
        spec.reply_delay_hours = DelaySpec::Constant { hours };
        spec.nudges = nudges;
        let c = generate(&spec).unwrap();
        let r = analyze(&c);
        let e = &c.expected;
        let close = |want: Option<f64>, got: Option<f64>, tol: f64| match want {
            None => true,
            Some(w) => got.is_some_and(|g| (g - w).abs() <= tol),
        };
        prop_assert_eq!(r.messages, e.messages);
        prop_assert!(close(e.central_leadership, r.central_leadership, 1e-9), "{:?} {:?}", e, r);
        prop_assert!(close(e.degree_centralization, r.degree_centralization, 1e-9));
        prop_assert!(close(e.rotating_leadership, r.rotating_leadership, 1e-9), "{:?} {:?}", e, r);
        prop_assert!(close(e.avg_response_time_hours, r.avg_response_time_hours, 1e-9));
        prop_assert!(close(e.avg_nudges, r.avg_nudges, 1e-12));
        prop_assert!(close(e.honest_sentiment, r.honest_sentiment, 1e-12));
    }
}
