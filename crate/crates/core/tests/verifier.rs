use jitterbound::verifier::{best_case_response, Explorer, ViolationKind};
use jitterbound::{
    build_time_chain, explore, worst_case_response, Limits, Query, ResponseBound, SearchOrder, StateFormula, Ticks,
    Verdict,
};
use jitterbound_testkit::discrete::{self, Outcome};
use jitterbound_testkit::gen;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn upper_sum(chain: &jitterbound::TimeChain) -> Ticks {
    chain
        .components
        .iter()
        .map(|c| jitterbound::total_jitter(&c.spec).unwrap().max)
        .sum()
}

fn lower_sum(chain: &jitterbound::TimeChain) -> Ticks {
    chain
        .components
        .iter()
        .map(|c| jitterbound::total_jitter(&c.spec).unwrap().min)
        .sum()
}

fn verdict(net: &jitterbound::Network, q: &Query, order: SearchOrder) -> Verdict {
    explore(net, q, &Limits::default(), order).unwrap().verdict
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn agrees_with_discrete_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = gen::chain(&mut rng, 3, 8, true);
        let m = build_time_chain(&chain).unwrap();
        let sum = upper_sum(&chain);
        for d in 0..=sum + 2 {
            let q = Query::new(m.stimulus.clone(), m.response.clone(), d).unwrap();
            let v = verdict(&m.network, &q, SearchOrder::Bfs);
            let o = discrete::check(&m.network, &m.stimulus, &m.response, d);
            prop_assert_eq!(v.is_satisfied(), o == Outcome::Satisfied, "d = {}", d);
            prop_assert_eq!(v.is_satisfied(), d >= sum, "d = {}", d);
        }
    }

    #[test]
    fn order_does_not_change_verdict(seed in any::<u64>(), d in 0i64..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = gen::chain(&mut rng, 4, 10, true);
        let m = build_time_chain(&chain).unwrap();
        let q = Query::new(m.stimulus.clone(), m.response.clone(), d).unwrap();
        let bfs = verdict(&m.network, &q, SearchOrder::Bfs).is_satisfied();
        prop_assert_eq!(verdict(&m.network, &q, SearchOrder::Dfs).is_satisfied(), bfs);
        prop_assert_eq!(verdict(&m.network, &q, SearchOrder::Random { seed }).is_satisfied(), bfs);
    }

    #[test]
    fn violations_replay(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = gen::chain(&mut rng, 3, 8, true);
        let m = build_time_chain(&chain).unwrap();
        let sum = upper_sum(&chain);
        prop_assume!(sum > 0);
        let q = Query::new(m.stimulus.clone(), m.response.clone(), sum - 1).unwrap();
        for order in [SearchOrder::Bfs, SearchOrder::Dfs, SearchOrder::Random { seed }] {
            let Verdict::Violated(trace) = verdict(&m.network, &q, order) else {
                return Err(TestCaseError::fail("expected a violation"));
            };
            prop_assert_eq!(trace.kind, ViolationKind::DeadlineMissed);
            let ex = Explorer::new(&m.network, &q).unwrap();
            prop_assert!(ex.replay(&trace).unwrap());
        }
    }

    #[test]
    fn response_bounds_are_sums(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = gen::chain(&mut rng, 4, 10, false);
        let m = build_time_chain(&chain).unwrap();
        let limits = Limits::default();
        prop_assert_eq!(
            worst_case_response(&m.network, &m.stimulus, &m.response, &limits).unwrap(),
            ResponseBound::Bounded(upper_sum(&chain))
        );
        prop_assert_eq!(
            best_case_response(&m.network, &m.stimulus, &m.response, &limits).unwrap(),
            ResponseBound::Bounded(lower_sum(&chain))
        );
    }
}

#[test]
fn unreachable_response_is_unbounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let chain = gen::chain(&mut rng, 2, 6, false);
    let m = build_time_chain(&chain).unwrap();
    // the source never returns to Start
    let never = StateFormula::atom("Source", "Start");
    let after = StateFormula::atom("Source", "Sent");
    assert_eq!(
        worst_case_response(&m.network, &after, &never, &Limits::default()).unwrap(),
        ResponseBound::Unbounded
    );
}

#[test]
fn tight_state_cap_exhausts() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let chain = gen::chain(&mut rng, 4, 10, false);
    let m = build_time_chain(&chain).unwrap();
    let q = Query::new(m.stimulus.clone(), m.response.clone(), 100).unwrap();
    let limits = Limits {
        max_states: 2,
        max_bound: None,
    };
    assert!(matches!(
        explore(&m.network, &q, &limits, SearchOrder::Bfs).unwrap().verdict,
        Verdict::ResourceExhausted { states: 2 }
    ));
}
