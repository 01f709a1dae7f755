mod common;

use common::props::{self, entropy, CASES};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: CASES, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn qualification_domain_axioms(seed in entropy()) { props::qualdom_axioms(&seed)?; }

    #[test]
    fn certainty_and_weight_match_rational_arithmetic(seed in entropy()) { props::qualdom_oracle(&seed)?; }

    #[test]
    fn proximity_is_reflexive_symmetric_and_monotone(seed in entropy()) { props::proximity_laws(&seed)?; }

    #[test]
    fn validity_is_closed_under_entailment(seed in entropy()) { props::entailment_closure(&seed)?; }

    #[test]
    fn immediate_consequence_is_monotone(seed in entropy()) { props::tp_monotone(&seed)?; }

    #[test]
    fn embedded_bounds_agree_with_the_order(seed in entropy()) { props::embed_agreement(&seed)?; }

    #[test]
    fn herbrand_store_matches_enumeration(seed in entropy()) { props::herbrand_oracle(&seed)?; }

    #[test]
    fn real_store_matches_elimination(seed in entropy()) { props::linear_oracle(&seed)?; }

    #[test]
    fn printed_programs_parse_back(seed in entropy()) { props::round_trip(&seed)?; }
}
