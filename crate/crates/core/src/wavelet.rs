//! Exact lifting-scheme Haar transform over dyadic rationals.
//!
//! One lifting step splits a signal into even and odd samples, predicts the
//! odd sample from its even neighbour (`detail = odd - even`) and updates the
//! even sample so the approximation keeps the pairwise mean
//! (`approx = even + detail / 2`). The 2-D transform is Mallat style: each
//! level runs the row pass and then the column pass on the active top-left
//! square, and the next level recurses into its top-left quarter.

use crate::error::{Error, Result};
use crate::matrix::{Dyadic, DyadicMatrix};

pub fn lift_forward_1d(signal: &[Dyadic]) -> Result<(Vec<Dyadic>, Vec<Dyadic>)> {
    if signal.is_empty() || !signal.len().is_multiple_of(2) {
        return Err(Error::Shape(format!(
            "lifting needs a non-empty even-length signal, got {}",
            signal.len()
        )));
    }
    let (approx, detail) = signal
        .chunks_exact(2)
        .map(|pair| {
            let detail = &pair[1] - &pair[0];
            let approx = &pair[0] + &detail.half();
            (approx, detail)
        })
        .unzip();
    Ok((approx, detail))
}

pub fn lift_inverse_1d(approx: &[Dyadic], detail: &[Dyadic]) -> Result<Vec<Dyadic>> {
    if approx.is_empty() || approx.len() != detail.len() {
        return Err(Error::Shape(format!(
            "approximation ({}) and detail ({}) lengths must match and be non-zero",
            approx.len(),
            detail.len()
        )));
    }
    let mut signal = Vec::with_capacity(approx.len() * 2);
    for (a, d) in approx.iter().zip(detail) {
        let even = a - &d.half();
        let odd = d + &even;
        signal.push(even);
        signal.push(odd);
    }
    Ok(signal)
}

fn check_levels(order: usize, levels: u32) -> Result<()> {
    if levels == 0 {
        return Err(Error::Shape(
            "at least one transform level is required".into(),
        ));
    }
    if !order.is_power_of_two() {
        return Err(Error::Shape(format!("order {order} is not a power of two")));
    }
    if levels >= usize::BITS || order < (1usize << levels) {
        return Err(Error::Shape(format!(
            "{levels} levels need order at least 2^{levels}, got {order}"
        )));
    }
    Ok(())
}

fn column(m: &DyadicMatrix, col: usize, len: usize) -> Vec<Dyadic> {
    (0..len).map(|r| m.get(r, col).clone()).collect()
}

/// Runs one level on the top-left `side × side` square.
fn forward_level(m: &mut DyadicMatrix, side: usize) {
    for r in 0..side {
        let (approx, detail) = lift_forward_1d(&m.row(r)[..side]).expect("side is even");
        for (c, v) in approx.into_iter().chain(detail).enumerate() {
            m.set(r, c, v);
        }
    }
    for c in 0..side {
        let (approx, detail) = lift_forward_1d(&column(m, c, side)).expect("side is even");
        for (r, v) in approx.into_iter().chain(detail).enumerate() {
            m.set(r, c, v);
        }
    }
}

fn inverse_level(m: &mut DyadicMatrix, side: usize) {
    let half = side / 2;
    for c in 0..side {
        let col = column(m, c, side);
        let signal = lift_inverse_1d(&col[..half], &col[half..]).expect("equal halves");
        for (r, v) in signal.into_iter().enumerate() {
            m.set(r, c, v);
        }
    }
    for r in 0..side {
        let row = m.row(r)[..side].to_vec();
        let signal = lift_inverse_1d(&row[..half], &row[half..]).expect("equal halves");
        for (c, v) in signal.into_iter().enumerate() {
            m.set(r, c, v);
        }
    }
}

pub fn haar2d_forward(m: &DyadicMatrix, levels: u32) -> Result<DyadicMatrix> {
    check_levels(m.order(), levels)?;
    let mut out = m.clone();
    let mut side = m.order();
    for _ in 0..levels {
        forward_level(&mut out, side);
        side /= 2;
    }
    Ok(out)
}

pub fn haar2d_inverse(m: &DyadicMatrix, levels: u32) -> Result<DyadicMatrix> {
    check_levels(m.order(), levels)?;
    let mut out = m.clone();
    let smallest = m.order() >> (levels - 1);
    let mut side = smallest;
    for _ in 0..levels {
        inverse_level(&mut out, side);
        side *= 2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn d(num: i64, exp: u32) -> Dyadic {
        Dyadic::new(num, exp)
    }

    fn ints(v: &[i64]) -> Vec<Dyadic> {
        v.iter().map(|&x| Dyadic::from(x)).collect()
    }

    fn unit_matrix(order: usize) -> DyadicMatrix {
        let mut m = DyadicMatrix::zeros(order);
        m.set(0, 0, Dyadic::from(1));
        m
    }

    fn unit_level2() -> DyadicMatrix {
        Matrix::new(
            4,
            vec![
                d(1, 4),
                d(-1, 3),
                d(-1, 1),
                d(0, 0),
                d(-1, 3),
                d(1, 2),
                d(0, 0),
                d(0, 0),
                d(-1, 1),
                d(0, 0),
                d(1, 0),
                d(0, 0),
                d(0, 0),
                d(0, 0),
                d(0, 0),
                d(0, 0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn forward_1d_examples() {
        assert_eq!(
            lift_forward_1d(&ints(&[1, 0])).unwrap(),
            (vec![d(1, 1)], ints(&[-1]))
        );
        let c = d(7, 3);
        assert_eq!(
            lift_forward_1d(&[c.clone(), c.clone()]).unwrap(),
            (vec![c], ints(&[0]))
        );
        assert_eq!(
            lift_forward_1d(&ints(&[3, 7, 2, 10])).unwrap(),
            (ints(&[5, 6]), ints(&[4, 8]))
        );
    }

    #[test]
    fn forward_1d_rejects_bad_lengths() {
        assert!(matches!(
            lift_forward_1d(&ints(&[1, 2, 3])),
            Err(Error::Shape(_))
        ));
        assert!(lift_forward_1d(&[]).is_err());
    }

    #[test]
    fn inverse_1d_examples() {
        assert_eq!(
            lift_inverse_1d(&[d(1, 1)], &ints(&[-1])).unwrap(),
            ints(&[1, 0])
        );
        assert_eq!(
            lift_inverse_1d(&ints(&[5, 6]), &ints(&[4, 8])).unwrap(),
            ints(&[3, 7, 2, 10])
        );
        let c = d(-5, 2);
        assert_eq!(
            lift_inverse_1d(std::slice::from_ref(&c), &ints(&[0])).unwrap(),
            vec![c.clone(), c]
        );
        assert!(lift_inverse_1d(&ints(&[1, 2]), &ints(&[1])).is_err());
    }

    #[test]
    fn forward_2d_single_level_example() {
        let expected = Matrix::new(2, vec![d(1, 2), d(-1, 1), d(-1, 1), d(1, 0)]).unwrap();
        assert_eq!(haar2d_forward(&unit_matrix(2), 1).unwrap(), expected);
        assert_eq!(haar2d_inverse(&expected, 1).unwrap(), unit_matrix(2));
    }

    #[test]
    fn forward_2d_two_level_example() {
        assert_eq!(haar2d_forward(&unit_matrix(4), 2).unwrap(), unit_level2());
        assert_eq!(haar2d_inverse(&unit_level2(), 2).unwrap(), unit_matrix(4));
    }

    #[test]
    fn zero_matrix_stays_zero() {
        let z = DyadicMatrix::zeros(8);
        for l in 1..=3 {
            assert_eq!(haar2d_inverse(&z, l).unwrap(), z);
        }
    }

    #[test]
    fn level_bounds() {
        let m = unit_matrix(4);
        assert!(haar2d_forward(&m, 3).is_err());
        assert!(haar2d_forward(&m, 0).is_err());
        assert!(haar2d_forward(&DyadicMatrix::zeros(6), 1).is_err());
        assert!(haar2d_inverse(&m, 3).is_err());
    }

    #[test]
    fn full_transform_root_is_mean() {
        let vals: Vec<i64> = (0..64).map(|i| (i * 37 % 101) - 50).collect();
        let m = DyadicMatrix::new(8, ints(&vals)).unwrap();
        let t = haar2d_forward(&m, 3).unwrap();
        let sum: i64 = vals.iter().sum();
        assert_eq!(t.get(0, 0), &Dyadic::new(sum, 6));
    }

    fn int_matrix(max_log: u32) -> impl Strategy<Value = (DyadicMatrix, u32)> {
        (1..=max_log).prop_flat_map(|log| {
            let order = 1usize << log;
            (
                proptest::collection::vec(-1000i64..1000, order * order),
                1..=log,
            )
                .prop_map(move |(v, l)| (DyadicMatrix::new(order, ints(&v)).unwrap(), l))
        })
    }

    proptest! {
        #[test]
        fn perfect_reconstruction((m, l) in int_matrix(5)) {
            let t = haar2d_forward(&m, l).unwrap();
            prop_assert!(t.max_exponent() <= 2 * l);
            prop_assert_eq!(haar2d_inverse(&t, l).unwrap(), m);
        }

        #[test]
        fn linearity((m1, l) in int_matrix(3), a in -9i64..9, seed in any::<u64>()) {
            let order = m1.order();
            let m2 = DyadicMatrix::new(
                order,
                (0..order * order).map(|i| Dyadic::from(((seed >> (i % 60)) & 0xff) as i64)).collect(),
            ).unwrap();
            let a = Dyadic::from(a);
            let combo = m1.map(|v| &a * v);
            let combo = Matrix::new(order, combo.entries().iter().zip(m2.entries()).map(|(x, y)| x + y).collect()).unwrap();
            let lhs = haar2d_forward(&combo, l).unwrap();
            let t1 = haar2d_forward(&m1, l).unwrap();
            let t2 = haar2d_forward(&m2, l).unwrap();
            for (i, v) in lhs.entries().iter().enumerate() {
                let rhs = &(&a * &t1.entries()[i]) + &t2.entries()[i];
                prop_assert!((v - &rhs).is_zero());
            }
        }
    }
}
