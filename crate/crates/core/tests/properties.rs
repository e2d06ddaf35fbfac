mod common;

use k3lines::gf3::make_field;
use k3lines::proj::{all_lines, line_count};
use proptest::prelude::*;

const FIELD_SAMPLES: u32 = 10_000;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(FIELD_SAMPLES))]
    #[test]
    fn field_laws_gf3(a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        common::field_laws(1, a, b, c).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(FIELD_SAMPLES))]
    #[test]
    fn field_laws_gf9(a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        common::field_laws(2, a, b, c).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(FIELD_SAMPLES))]
    #[test]
    fn field_laws_gf27(a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        common::field_laws(3, a, b, c).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(FIELD_SAMPLES))]
    #[test]
    fn field_laws_gf81(a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        common::field_laws(4, a, b, c).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn cubic_splitting_reconstructs(k in 1u32..=2, seed in any::<u64>()) {
        let c = common::random_cubic(k, seed);
        common::cubic_reconstructs(&c).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn line_count_formula() {
    for k in 1..=2 {
        let f = make_field(k).unwrap();
        let q = f.size() as u64;
        let expected = (q * q + 1) * (q * q + q + 1);
        assert_eq!(line_count(&f), expected);
        let mut lines: Vec<_> = all_lines(&f).collect();
        assert_eq!(lines.len() as u64, expected);
        lines.sort();
        lines.dedup();
        assert_eq!(lines.len() as u64, expected, "lines repeat over GF(3^{k})");
    }
}
