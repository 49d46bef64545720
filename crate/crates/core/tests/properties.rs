//! Randomized invariants of brackets, reduction, Gröbner bases, symbol
//! codimensions and symbolic differentiation.

#[path = "support/props.rs"]
mod props;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn jacobi_antisymmetric_with_order_bound(c in props::op_pair()) {
        props::jacobi_antisymmetric_with_order_bound(c)?;
    }

    #[test]
    fn multi_bracket_specializes_to_jacobi(c in props::op_pair()) {
        props::multi_bracket_specializes_to_jacobi(c)?;
    }

    #[test]
    fn multi_bracket_totally_antisymmetric(c in props::triple()) {
        props::multi_bracket_totally_antisymmetric(c)?;
    }

    #[test]
    fn reduction_is_idempotent_and_a_ring_map(c in props::kdv_pair()) {
        props::reduction_is_idempotent_and_a_ring_map(c)?;
    }

    #[test]
    fn s_polynomials_reduce_to_zero(c in props::generators()) {
        props::s_polynomials_reduce_to_zero(c)?;
    }

    #[test]
    fn partial_derivative_matches_finite_differences(c in props::fd_case()) {
        props::partial_derivative_matches_finite_differences(c)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn codim_bounded_by_excess(c in props::excess_case()) {
        props::codim_bounded_by_excess(c)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn commuting_pairs_have_codim_at_most_m(c in props::commuting_case()) {
        props::commuting_pairs_have_codim_at_most_m(c)?;
    }
}
