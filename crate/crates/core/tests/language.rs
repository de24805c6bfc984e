mod support;

use std::collections::HashMap;

use proptest::prelude::*;
use rml_core::monitor::{normalize, MonitorState};
use rml_core::{corpus, parse_specification, Event, Monitor, Verdict};
use support::lang::{accepts, alphabet_spec, closed_term, event, extensions, words};

/// Verdicts for every word up to `max_len`, sharing prefixes.
fn verdicts(m: &Monitor, max_len: usize) -> HashMap<Vec<char>, (MonitorState, Verdict)> {
    let mut out = HashMap::new();
    let init = m.initial();
    let v0 = rml_core::classify(m.spec(), &init.term, &init.env).unwrap();
    out.insert(vec![], (init, v0));
    for w in words(max_len).into_iter().skip(1) {
        let (prev, _) = out[&w[..w.len() - 1]].clone();
        let next = m.step(&prev, &event(*w.last().unwrap())).unwrap();
        out.insert(w, next);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn normalize_preserves_language(t in closed_term(true)) {
        let n = normalize(&t);
        for w in words(5) {
            prop_assert_eq!(accepts(&t, &w), accepts(&n, &w), "{:?} vs {:?} on {:?}", t, n, w);
        }
    }

    #[test]
    fn normalize_is_idempotent(t in closed_term(true)) {
        let n = normalize(&t);
        prop_assert_eq!(normalize(&n), n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn monitor_verdicts_agree_with_language(t in closed_term(false)) {
        let m = Monitor::new(alphabet_spec(t.clone()));
        let table = verdicts(&m, 5);
        for (w, (_, v)) in &table {
            prop_assert_eq!(v.is_accepting(), accepts(&t, w), "{:?} on {:?}", t, w);
            if *v == Verdict::False && w.len() <= 3 {
                for u in extensions(3) {
                    let mut full = w.clone();
                    full.extend(&u);
                    prop_assert!(!accepts(&t, &full), "False verdict but {:?} accepted", full);
                }
            }
            if *v == Verdict::True && w.len() <= 3 {
                for u in extensions(2) {
                    let mut full = w.clone();
                    full.extend(&u);
                    prop_assert!(accepts(&t, &full));
                }
            }
        }
    }
}

fn ab(w: &[char]) -> Vec<Event> {
    w.iter().map(|c| Event::new().with("event", c.to_string().as_str())).collect()
}

fn is_anbn(w: &[char]) -> bool {
    let n = w.len() / 2;
    n >= 1 && w.len() % 2 == 0 && w[..n].iter().all(|c| *c == 'a') && w[n..].iter().all(|c| *c == 'b')
}

#[test]
fn counting_spec_recognizes_anbn() {
    let m = Monitor::new(parse_specification(corpus::COUNTING).unwrap());
    let mut all = Vec::new();
    for len in 1..=8 {
        all.extend(
            (0u32..1 << len).map(|bits| (0..len).map(|i| if bits >> i & 1 == 1 { 'b' } else { 'a' }).collect::<Vec<_>>()),
        );
    }
    assert_eq!(all.len(), 510);
    for w in &all {
        let out = m.run(&ab(w)).unwrap();
        let v = out.last().unwrap().1;
        assert_eq!(v.is_accepting(), is_anbn(w), "{w:?}");
    }
}

#[test]
fn counting_rejects_at_the_third_event() {
    let m = Monitor::new(parse_specification(corpus::COUNTING).unwrap());
    let out = m.run(&ab(&['a', 'b', 'b'])).unwrap();
    let v: Vec<_> = out.iter().map(|(_, v)| *v).collect();
    assert_eq!(v, [Verdict::CurrentlyFalse, Verdict::CurrentlyTrue, Verdict::False]);
}

#[test]
fn state_ids_are_deterministic_and_stable() {
    let m = Monitor::new(parse_specification(corpus::COUNTING).unwrap());
    let trace = ab(&['a', 'a', 'b', 'a']);
    let ids = |m: &Monitor| -> Vec<String> {
        m.run(&trace).unwrap().iter().map(|(s, _)| s.id().to_string()).collect()
    };
    assert_eq!(ids(&m), ids(&m));
    for (s, _) in m.run(&trace).unwrap() {
        let again = MonitorState::new(normalize(&s.term), s.env.clone());
        assert_eq!(again.id(), s.id());
    }
}
