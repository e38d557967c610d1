use jitterbound::frontend::{
    check, export, parse_model, parse_xta, render_model, validate_model, Model, Report, VerdictKind,
};
use jitterbound::verifier::Explorer;
use jitterbound::{build_time_chain, Limits, Resolution, SearchOrder, Ticks};
use jitterbound_testkit::gen;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model(seed: u64, ticks_per_ms: f64, bound: Option<Ticks>) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chain = gen::chain(&mut rng, 4, 10, true);
    let m = build_time_chain(&chain).unwrap();
    Model {
        resolution: Resolution::new(ticks_per_ms).unwrap(),
        chain,
        stimulus: m.stimulus,
        response: m.response,
        bound,
        boiler: None,
    }
}

fn upper_sum(m: &Model) -> Ticks {
    m.chain
        .components
        .iter()
        .map(|c| jitterbound::total_jitter(&c.spec).unwrap().max)
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn documents_round_trip(seed in any::<u64>(), res in prop::sample::select(vec![0.5, 1.0, 2.0, 4.0, 10.0]), bound in prop::option::of(0i64..50)) {
        let m = model(seed, res, bound);
        let text = render_model(&m).unwrap();
        prop_assert_eq!(parse_model(&text).unwrap(), m);
    }

    #[test]
    fn generated_models_validate(seed in any::<u64>()) {
        let m = model(seed, 1.0, Some(10));
        prop_assert_eq!(validate_model(&m), Vec::<String>::new());
    }

    #[test]
    fn export_parses_back(seed in any::<u64>(), bound in 0i64..50) {
        let m = model(seed, 1.0, Some(bound));
        let out = export(&m, None).unwrap();
        let doc = parse_xta(&out.model).unwrap();
        let net = build_time_chain(&m.chain).unwrap().network;
        prop_assert_eq!(doc.processes.len(), net.automata().len());
        prop_assert_eq!(doc.clocks.len(), 1);
        prop_assert_eq!(doc.system.len(), doc.processes.len());
        let expected = format!("z <= {bound}");
        prop_assert!(out.query.contains(&expected));
        prop_assert_eq!(export(&m, None).unwrap(), out);
    }

    #[test]
    fn machine_reports_round_trip(seed in any::<u64>()) {
        let m = model(seed, 1.0, None);
        let sum = upper_sum(&m);
        prop_assume!(sum > 0);
        let out = check(&m, Some(sum - 1), &Limits::default(), SearchOrder::Bfs).unwrap();
        prop_assert_eq!(out.report.verdict, VerdictKind::Violated);
        prop_assert!(out.report.trace.is_some());
        let back = Report::parse_machine(&out.report.render_machine()).unwrap();
        prop_assert_eq!(&back, &out.report);
        let ex = Explorer::new(&out.prepared.chain.network, &out.prepared.query).unwrap();
        prop_assert!(ex.replay(out.trace().unwrap()).unwrap());
        let ok = check(&m, Some(sum), &Limits::default(), SearchOrder::Dfs).unwrap();
        prop_assert_eq!(ok.report.verdict, VerdictKind::Satisfied);
        prop_assert_eq!(ok.report.exit_code(), 0);
    }
}

#[test]
fn missing_bound_is_an_error() {
    let m = model(1, 1.0, None);
    assert!(matches!(
        check(&m, None, &Limits::default(), SearchOrder::Bfs),
        Err(jitterbound::frontend::FrontendError::MissingBound)
    ));
}
