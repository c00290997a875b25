mod common;

use common::*;
use focuswidth::budget::OracleBudget;
use focuswidth::decomp::verify_focused;
use focuswidth::minors::{find_rooted_minor, verify_model, Rooting};
use focuswidth::spw::{decide_spw, SpwOutcome};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn decide_spw_is_total_and_sound(g in graph_strategy(12), mask in any::<u64>(), k in 1u32..=4, choices in proptest::collection::vec(any::<u32>(), 4)) {
        let s = subset(&g, mask, 6);
        let f = forest_from_choices(k, &choices);
        match decide_spw(&g, &s, &f).unwrap() {
            SpwOutcome::Decomposition(c) => {
                let width = verify_focused(&g, &s, &c).unwrap();
                prop_assert!(width <= 2 * k as i64 - 2);
            }
            SpwOutcome::Model(m) => {
                verify_model(&g, &f, &m, &Rooting::Rooted(s.clone())).unwrap();
                let oracle = find_rooted_minor(&g, &f, &Rooting::Rooted(s), &OracleBudget::default()).unwrap();
                prop_assert!(oracle.is_some());
            }
        }
    }
}
