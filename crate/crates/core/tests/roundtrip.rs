mod support;

use proptest::prelude::*;
use rml_core::{corpus, parse_specification, pretty_print, validate};
use support::ast_gen::specification;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_specifications_round_trip(spec in specification()) {
        let text = pretty_print(&spec);
        let back = parse_specification(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, spec, "{}", text);
    }
}

#[test]
fn corpus_parses_validates_and_round_trips() {
    for (name, text) in corpus::ALL {
        let spec = parse_specification(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(validate(&spec).is_empty(), "{name}: {:?}", validate(&spec));
        assert_eq!(parse_specification(&pretty_print(&spec)).unwrap(), spec, "{name}");
    }
}

#[test]
fn numerical_definitions() {
    let spec = parse_specification(corpus::NUMERICAL).unwrap();
    let names: Vec<_> = spec.definitions.keys().map(String::as_str).collect();
    assert_eq!(names, ["B", "C", "D"]);
    assert_eq!(spec.event_types.len(), 5);
}
