mod common;

use common::*;
use ecvm_core::integrators::State;
use proptest::prelude::*;

#[test]
fn quadrature() {
    quadrature_exactness();
}

#[test]
fn fluxes() {
    flux_identities();
}

#[test]
fn linearity() {
    rhs_linearity();
}

#[test]
fn reversal() {
    reversal_involution();
}

#[test]
fn implicit_solves_match_dense_oracles() {
    dense_oracles();
}

#[test]
fn jfnk_solves_linear_residuals_in_one_step() {
    jfnk_linear_one_step();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reversal_is_an_involution_on_arbitrary_states(seed in 0u64..1_000_000, k in 1usize..=3) {
        let m = tiny_mesh(2, 2, k);
        let mut s = tiny_state(&m);
        s.f = ecvm_core::DistributionField::from_values(&m, noise(m.f_len(), seed)).unwrap();
        s.em.b3 = noise(m.nx_nodes(), seed + 1);
        let t: State = s.reversed().reversed();
        prop_assert_eq!(t.f.values(), s.f.values());
        prop_assert_eq!(t.em.b3, s.em.b3);
    }
}
