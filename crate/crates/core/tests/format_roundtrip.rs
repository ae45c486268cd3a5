//! File format round trips, parse errors and trace rendering.

use profit_share::analysis::enumerate_states;
use profit_share::claims::{fair_value_poa_fixture, prop6_game, search_fair_value_poa, FAIR_VALUE_POA_FIXTURE};
use profit_share::corpus::{random_game, CorpusConfig};
use profit_share::dynamics::{run, DynamicsConfig, Selector};
use profit_share::format::{
    parse_game_str, render_trace, GameSpecFile, ParseOptions, TraceFormat, CSV_HEADER,
};
use profit_share::rational::{frac, int};
use profit_share::{Error, Scheme, State};
use proptest::prelude::*;

fn scheme() -> impl proptest::strategy::Strategy<Value = Scheme> {
    prop_oneof![Just(Scheme::FairValue), Just(Scheme::Shapley), Just(Scheme::LaborUnion)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn serialize_then_parse_is_identity(
        scheme in scheme(), seed in any::<u64>(), index in 0u64..1000,
        pick in any::<prop::sample::Index>(), with_dynamics in any::<bool>(),
    ) {
        let g = random_game(scheme, seed, index, &CorpusConfig::default()).unwrap();
        let states: Vec<State> = enumerate_states(&g, 100_000).unwrap().collect();
        let state = pick.get(&states);
        let config = DynamicsConfig::new(frac(1, 3), Selector::RandomSeeded(seed), 77).unwrap();
        let file = GameSpecFile::from_game(&g, Some(state), with_dynamics.then_some(&config));
        let text = file.to_json();
        let parsed = parse_game_str(&text, ParseOptions::default()).unwrap();
        prop_assert_eq!(&parsed.file, &file);
        prop_assert_eq!(parsed.game.valuations(), g.valuations());
        prop_assert_eq!(parsed.game.scheme(), g.scheme());
        prop_assert_eq!(parsed.initial_state.as_ref(), Some(state));
        prop_assert_eq!(&parsed.dynamics, &with_dynamics.then_some(config.clone()));
        prop_assert_eq!(GameSpecFile::from_game(&parsed.game, Some(state), parsed.dynamics.as_ref()).to_json(), text);
    }
}

fn parse_failure(text: &str) -> (String, String) {
    match parse_game_str(text, ParseOptions::default()) {
        Err(Error::Parse { location, message }) => (location, message),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

fn parse_error(text: &str) -> String {
    parse_failure(text).0
}

#[test]
fn parse_errors_point_at_the_problem() {
    let base = r#"{"n": 2, "m": 3, "scheme": "shapley", "valuations": {"shared": {"kind": "additive", "weights": ["1", "2"]}}}"#;
    assert_eq!(parse_error(base), "m");
    let unknown = r#"{"n": 2, "m": 1, "scheme": "shapley", "colour": 1, "valuations": {"shared": {"kind": "additive", "weights": ["1", "2"]}}}"#;
    assert_eq!(parse_error(unknown), "colour");
    let bad_rational = r#"{"n": 2, "m": 1, "scheme": "shapley", "valuations": [{"kind": "additive", "weights": ["1", "2/0"]}]}"#;
    let (at, message) = parse_failure(bad_rational);
    assert_eq!(at, "valuations");
    assert!(message.starts_with("[0]") && message.contains("\"2/0\""), "{message}");
    let lu_vector = r#"{"n": 2, "m": 1, "scheme": "labor_union", "valuations": [{"kind": "additive", "weights": ["1", "2"]}], "initial_state": [1, 1]}"#;
    assert_eq!(parse_error(lu_vector), "initial_state");
    let fv_zero = r#"{"n": 2, "m": 1, "scheme": "fair_value", "valuations": [{"kind": "additive", "weights": ["1", "2"]}], "initial_state": [0, 1]}"#;
    assert_eq!(parse_error(fv_zero), "initial_state/0");
    assert_eq!(parse_error("{\"n\": 2,\n  oops}"), "line 2 column 3");
}

#[test]
fn non_submodular_tables_are_rejected_unless_skipped() {
    let square = r#"{"n": 2, "m": 1, "scheme": "fair_value", "valuations": [{"kind": "table", "n": 2, "values": ["0", "1", "1", "4"]}]}"#;
    let err = parse_game_str(square, ParseOptions::default()).unwrap_err();
    assert!(matches!(err, Error::InvalidValuation { index: 1, ref witness } if witness.contains("I = {}, J = {1}, i = 2")), "{err:?}");
    let parsed = parse_game_str(square, ParseOptions { skip_validate: true }).unwrap();
    assert!(!parsed.game.is_verified());
}

#[test]
fn fixture_is_reproducible_from_its_search() {
    let found = search_fair_value_poa(&frac(3, 2), 0, 2000).unwrap().expect("search finds an instance");
    let fixture = fair_value_poa_fixture().unwrap();
    assert_eq!(found.valuations(), fixture.valuations());
    assert_eq!(GameSpecFile::from_game(&found, None, None).to_json(), FAIR_VALUE_POA_FIXTURE);
}

#[test]
fn traces_render_stably() {
    let g = prop6_game(3).unwrap();
    let config = DynamicsConfig::new(int(0), Selector::BasicMaxImprovement, 100).unwrap();
    let start = g.initial_state();
    let trace = run(&g, &start, &config).unwrap();
    let jsonl = render_trace(&trace, TraceFormat::Jsonl);
    assert_eq!(jsonl, render_trace(&run(&g, &start, &config).unwrap(), TraceFormat::Jsonl));
    assert_eq!(jsonl.lines().count(), trace.len());
    assert!(jsonl.ends_with('\n') && !jsonl.contains('\r'));
    let csv = render_trace(&trace, TraceFormat::Csv);
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), trace.len() + 1);

    let idle = run(&g, &trace.final_state, &config).unwrap();
    assert!(idle.is_empty());
    assert_eq!(render_trace(&idle, TraceFormat::Jsonl), "");
    assert_eq!(render_trace(&idle, TraceFormat::Csv), format!("{CSV_HEADER}\n"));
}
