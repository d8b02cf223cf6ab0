//! Cross-checks against external or independently implemented references.

mod support;

use golden_cipher::analysis::{paired_t, student_t_two_tailed, unpaired_t, Series};
use golden_cipher::auth;
use golden_cipher::{derive, CipherKey, RationalMatrix, RecurrenceKind};
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn hmac_matches_rfc4231() {
    for (i, case) in support::rfc4231_cases().iter().enumerate() {
        let tag = auth::mac(&case.key, &case.data);
        let got = hex(tag.as_bytes());
        assert_eq!(&got[..case.mac_hex.len()], case.mac_hex, "case {}", i + 1);
        assert!(auth::verify(&case.key, &case.data, &tag));
    }
}

const X: [f64; 6] = [12.1, 14.3, 11.8, 15.0, 13.2, 12.7];
const Y: [f64; 6] = [11.0, 13.9, 12.5, 13.1, 12.0, 11.9];

#[test]
fn paired_test_matches_oracles() {
    let r = paired_t(&Series::new("x", X.to_vec()), &Series::new("y", Y.to_vec())).unwrap();
    let (t, df) = support::paired_t_oracle(&X, &Y);
    assert!((r.t - t).abs() < 1e-6);
    assert_eq!(r.df, df);
    assert!((r.p - support::t_p_value_by_quadrature(t, df)).abs() < 1e-4);
    // scipy.stats.ttest_rel
    assert!((r.t - 2.1814501341159835).abs() < 1e-9);
    assert!((r.p - 0.0809647685149133).abs() < 1e-9);
}

#[test]
fn welch_test_matches_oracles() {
    let r = unpaired_t(&Series::new("x", X.to_vec()), &Series::new("y", Y.to_vec())).unwrap();
    let (t, df) = support::welch_t_oracle(&X, &Y);
    assert!((r.t - t).abs() < 1e-6);
    assert!((r.df - df).abs() < 1e-9);
    assert!((r.p - support::t_p_value_by_quadrature(t, df)).abs() < 1e-4);
    // scipy.stats.ttest_ind(equal_var=False)
    assert!((r.t - 1.1905030763280595).abs() < 1e-9);
    assert!((r.df - 9.571442260486789).abs() < 1e-9);
    assert!((r.p - 0.2625369677073259).abs() < 1e-9);
}

#[test]
fn t_distribution_tail_matches_quadrature() {
    for df in [1.0, 2.0, 3.5, 5.0, 10.0, 18.0, 30.0, 100.0] {
        for t in [0.0, 0.1, 0.5, 1.0, 1.96, 2.5, 4.0, 8.0, -3.0] {
            let exact = support::t_p_value_by_quadrature(t, df);
            let got = student_t_two_tailed(t, df);
            assert!(
                (got - exact).abs() < 1e-4,
                "t = {t}, df = {df}: {got} vs {exact}"
            );
        }
    }
}

#[test]
fn fraction_free_inverse_matches_gauss_jordan() {
    let mut rng = support::rng(1);
    let mut singular = 0;
    for _ in 0..300 {
        let order = rng.gen_range(1..=6);
        let bound = *[1i64, 3, 1000].get(rng.gen_range(0..3)).unwrap();
        let m = support::random_int_matrix(&mut rng, order, bound);
        let oracle = support::rational_inverse(&m);
        match (m.fraction_free_inverse(), oracle) {
            (Some((t, d)), Some(inv)) => {
                let d = BigRational::from_integer(d);
                assert_eq!(t.to_rational().map(|v| v / &d), inv);
                assert!(!m.determinant().is_zero());
            }
            (None, None) => {
                singular += 1;
                assert!(m.determinant().is_zero());
            }
            (ours, theirs) => panic!("disagree on invertibility: {ours:?} vs {theirs:?}"),
        }
    }
    assert!(singular > 0, "sweep should include singular matrices");
}

#[test]
fn random_keys_give_exact_inverse_pairs() {
    let mut rng = support::rng(2);
    for _ in 0..200 {
        let kind = RecurrenceKind::ALL[rng.gen_range(0..3)];
        let key = CipherKey {
            kind,
            n: rng.gen_range(1..=40),
            p: if kind == RecurrenceKind::Fibonacci {
                rng.gen_range(0..=4)
            } else {
                1
            },
            level: rng.gen_range(1..=3),
            seed: rng.gen(),
            mac_key: rng.gen(),
        };
        let kp = derive(&key).unwrap();
        let product = kp.e.to_rational().mul(&kp.e_inv).unwrap();
        assert_eq!(product, RationalMatrix::identity(kp.z), "{key:?}");
    }
}
