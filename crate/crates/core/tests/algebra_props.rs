mod common;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn ring_axioms(seed in any::<u64>()) {
        prop_assert_eq!(common::ring_axioms(seed), Ok(()));
    }

    #[test]
    fn commutator_leibniz_and_jacobi(seed in any::<u64>()) {
        prop_assert_eq!(common::leibniz_jacobi(seed), Ok(()));
    }

    #[test]
    fn derivation_leibniz(seed in any::<u64>()) {
        prop_assert_eq!(common::derivation_leibniz(seed), Ok(()));
    }

    #[test]
    fn inner_derivation_is_commutator(seed in any::<u64>()) {
        prop_assert_eq!(common::inner_derivation(seed), Ok(()));
    }

    #[test]
    fn inverse_rewriting_confluent(seed in any::<u64>()) {
        prop_assert_eq!(common::inverse_confluence(seed), Ok(()));
    }
}
