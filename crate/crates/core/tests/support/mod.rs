//! Independent oracles shared by the integration suites.

#![allow(dead_code)]

use golden_cipher::{IntMatrix, RationalMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(tag: u64) -> StdRng {
    StdRng::seed_from_u64(0x6763_6877_0000_0000 ^ tag)
}

pub fn random_bytes(rng: &mut StdRng, max_len: usize) -> Vec<u8> {
    let len = rng.gen_range(0..=max_len);
    // Mix of skewed and uniform alphabets so trees of every shape appear.
    let alphabet = *[2usize, 4, 16, 64, 256].get(rng.gen_range(0..5)).unwrap();
    (0..len).map(|_| rng.gen_range(0..alphabet) as u8).collect()
}

/// Two-tailed Student-t p-value by composite Simpson quadrature.
///
/// With `u = √ν·tan θ` the density becomes proportional to `cos^{ν-1} θ` on
/// `(-π/2, π/2)`, so the tail mass is a ratio of two integrals over finite
/// ranges and no gamma function is involved.
pub fn t_p_value_by_quadrature(t: f64, df: f64) -> f64 {
    let f = |theta: f64| theta.cos().powf(df - 1.0);
    let theta_t = (t.abs() / df.sqrt()).atan();
    let half_pi = std::f64::consts::FRAC_PI_2;
    simpson(f, theta_t, half_pi, 200_000) / simpson(f, 0.0, half_pi, 200_000)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)
}

/// Textbook paired statistic `d̄ / (s_d / √n)` and its degrees of freedom.
pub fn paired_t_oracle(x: &[f64], y: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let n = d.len() as f64;
    (mean(&d) / (sample_variance(&d) / n).sqrt(), n - 1.0)
}

/// Welch statistic and Welch-Satterthwaite degrees of freedom.
pub fn welch_t_oracle(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (a, b) = (sample_variance(x) / nx, sample_variance(y) / ny);
    let t = (mean(x) - mean(y)) / (a + b).sqrt();
    let df = (a + b).powi(2) / (a * a / (nx - 1.0) + b * b / (ny - 1.0));
    (t, df)
}

/// Plain Gauss-Jordan elimination over the rationals.
pub fn rational_inverse(m: &IntMatrix) -> Option<RationalMatrix> {
    let n = m.order();
    let mut a: Vec<Vec<BigRational>> = m
        .rows()
        .map(|row| {
            row.iter()
                .map(|v| BigRational::from_integer(v.clone()))
                .collect()
        })
        .collect();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in 0..n {
                    let (s, t) = (&factor * &a[col][j], &factor * &inv[col][j]);
                    a[r][j] = &a[r][j] - s;
                    inv[r][j] = &inv[r][j] - t;
                }
            }
        }
    }
    RationalMatrix::new(n, inv.into_iter().flatten().collect()).ok()
}

pub fn random_int_matrix(rng: &mut StdRng, order: usize, bound: i64) -> IntMatrix {
    let entries = (0..order * order)
        .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
        .collect();
    IntMatrix::new(order, entries).unwrap()
}

pub struct HmacCase {
    pub key: Vec<u8>,
    pub data: Vec<u8>,
    pub mac_hex: &'static str,
}

/// RFC 4231 test cases 1-7. Case 5 publishes only the first 128 bits.
pub fn rfc4231_cases() -> Vec<HmacCase> {
    vec![
        HmacCase {
            key: vec![0x0b; 20],
            data: b"Hi There".to_vec(),
            mac_hex: "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7",
        },
        HmacCase {
            key: b"Jefe".to_vec(),
            data: b"what do ya want for nothing?".to_vec(),
            mac_hex: "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843",
        },
        HmacCase {
            key: vec![0xaa; 20],
            data: vec![0xdd; 50],
            mac_hex: "773ea91e36800e46854db8ebd09181a72959098b3ef8c122d9635514ced565fe",
        },
        HmacCase {
            key: (1..=25).collect(),
            data: vec![0xcd; 50],
            mac_hex: "82558a389a443c0ea4cc819899f2083a85f0faa3e578f8077a2e3ff46729665b",
        },
        HmacCase {
            key: vec![0x0c; 20],
            data: b"Test With Truncation".to_vec(),
            mac_hex: "a3b6167473100ee06e0c796c2955552b",
        },
        HmacCase {
            key: vec![0xaa; 131],
            data: b"Test Using Larger Than Block-Size Key - Hash Key First".to_vec(),
            mac_hex: "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54",
        },
        HmacCase {
            key: vec![0xaa; 131],
            data: b"This is a test using a larger than block-size key and a larger than \
block-size data. The key needs to be hashed before being used by the HMAC algorithm."
                .to_vec(),
            mac_hex: "9b09ffa71b942fcb27635fbcd5b0e944bfdc63644f0713938a7f51535c3a35e2",
        },
    ]
}
