use proptest::prelude::*;
use qshape_core::field::{Fp, Prime, Rational};
use qshape_core::harness::sign_calculus_case;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sign_rules_over_fp(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (name, ok) in sign_calculus_case::<Fp, _>(Prime::new(7).unwrap(), &mut rng).unwrap() {
            prop_assert!(ok, "{}", name);
        }
    }

    #[test]
    fn sign_rules_over_q(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (name, ok) in sign_calculus_case::<Rational, _>((), &mut rng).unwrap() {
            prop_assert!(ok, "{}", name);
        }
    }
}
