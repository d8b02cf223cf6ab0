//! `Z × Z` block encryption by right-multiplication with the enciphering
//! matrix.
//!
//! Ciphertext entries are dyadic with exponent at most `scale_exp`, so blocks
//! are carried as `entry · 2^scale_exp` in `i64`. Plain entries are bytes, and
//! `-1` fills the tail of the last block.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::keyschedule::KeyMatrixPair;
use crate::matrix::{Dyadic, DyadicMatrix};

pub const PAD: i16 = -1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainBlock {
    z: usize,
    entries: Vec<i16>,
}

impl PlainBlock {
    /// Checks the entry range and that padding only occupies the tail.
    pub fn new(z: usize, entries: Vec<i16>) -> Result<Self> {
        if entries.len() != z * z {
            return Err(Error::Shape(format!(
                "{} entries for a {z}x{z} block",
                entries.len()
            )));
        }
        if let Some(bad) = entries
            .iter()
            .find(|&&v| v != PAD && !(0..=255).contains(&v))
        {
            return Err(Error::Corruption(format!(
                "block entry {bad} is not a byte"
            )));
        }
        let data_len = entries.iter().take_while(|&&v| v != PAD).count();
        if entries[data_len..].iter().any(|&v| v != PAD) {
            return Err(Error::Corruption("padding is not a contiguous tail".into()));
        }
        Ok(PlainBlock { z, entries })
    }

    pub fn order(&self) -> usize {
        self.z
    }

    pub fn entries(&self) -> &[i16] {
        &self.entries
    }

    /// Leading non-padding entries.
    pub fn data(&self) -> impl Iterator<Item = u8> + '_ {
        self.entries
            .iter()
            .take_while(|&&v| v != PAD)
            .map(|&v| v as u8)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CipherBlock {
    z: usize,
    scale_exp: u32,
    scaled: Vec<i64>,
}

impl CipherBlock {
    pub fn from_scaled(z: usize, scale_exp: u32, scaled: Vec<i64>) -> Result<Self> {
        if scaled.len() != z * z {
            return Err(Error::Shape(format!(
                "{} entries for a {z}x{z} block",
                scaled.len()
            )));
        }
        Ok(CipherBlock {
            z,
            scale_exp,
            scaled,
        })
    }

    pub fn order(&self) -> usize {
        self.z
    }

    pub fn scale_exp(&self) -> u32 {
        self.scale_exp
    }

    /// Entries multiplied by `2^scale_exp`, row-major.
    pub fn scaled(&self) -> &[i64] {
        &self.scaled
    }

    pub fn scaled_mut(&mut self) -> &mut [i64] {
        &mut self.scaled
    }

    pub fn entry(&self, index: usize) -> Dyadic {
        Dyadic::from_scaled(self.scaled[index], self.scale_exp)
    }

    pub fn to_matrix(&self) -> DyadicMatrix {
        DyadicMatrix::new(
            self.z,
            (0..self.scaled.len()).map(|i| self.entry(i)).collect(),
        )
        .expect("square by construction")
    }
}

/// Counts scalar operations performed by the block product.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    pub multiplications: u64,
    pub additions: u64,
}

pub fn partition(data: &[u8], z: usize) -> Vec<PlainBlock> {
    let size = z * z;
    data.chunks(size)
        .map(|chunk| {
            let mut entries: Vec<i16> = chunk.iter().map(|&b| b as i16).collect();
            entries.resize(size, PAD);
            PlainBlock { z, entries }
        })
        .collect()
}

pub fn unpartition(blocks: &[PlainBlock], byte_count: usize) -> Result<Vec<u8>> {
    let entries: Vec<i16> = blocks
        .iter()
        .flat_map(|b| b.entries.iter().copied())
        .collect();
    if entries.len() < byte_count {
        return Err(Error::Corruption(format!(
            "{} block entries cannot hold {byte_count} bytes",
            entries.len()
        )));
    }
    let (data, tail) = entries.split_at(byte_count);
    if data.contains(&PAD) {
        return Err(Error::Corruption("padding inside the data region".into()));
    }
    if tail.iter().any(|&v| v != PAD) {
        return Err(Error::Corruption(
            "non-padding entry after the data region".into(),
        ));
    }
    Ok(data.iter().map(|&v| v as u8).collect())
}

fn check_order(z: usize, kp: &KeyMatrixPair) -> Result<()> {
    if z != kp.z {
        return Err(Error::Shape(format!(
            "block order {z} does not match key order {}",
            kp.z
        )));
    }
    Ok(())
}

pub fn encrypt_block(b: &PlainBlock, kp: &KeyMatrixPair) -> Result<CipherBlock> {
    encrypt_block_counted(b, kp, &mut OpCount::default())
}

/// `b · E`, tallying every scalar multiply and add into `ops`.
pub fn encrypt_block_counted(
    b: &PlainBlock,
    kp: &KeyMatrixPair,
    ops: &mut OpCount,
) -> Result<CipherBlock> {
    check_order(b.z, kp)?;
    let z = b.z;
    let a = kp.scaled_e();
    let mut scaled = Vec::with_capacity(z * z);
    for i in 0..z {
        for j in 0..z {
            let mut acc = BigInt::zero();
            for k in 0..z {
                let term = a.get(k, j) * BigInt::from(b.entries[i * z + k]);
                ops.multiplications += 1;
                if k == 0 {
                    acc = term;
                } else {
                    acc += term;
                    ops.additions += 1;
                }
            }
            scaled.push(acc.to_i64().ok_or(Error::Overflow)?);
        }
    }
    Ok(CipherBlock {
        z,
        scale_exp: kp.scale_exp,
        scaled,
    })
}

/// `c · E^{-1}`; every result must be a byte or the padding value.
pub fn decrypt_block(c: &CipherBlock, kp: &KeyMatrixPair) -> Result<PlainBlock> {
    check_order(c.z, kp)?;
    if c.scale_exp != kp.scale_exp {
        return Err(Error::Corruption(format!(
            "ciphertext scale 2^{} does not match key scale 2^{}",
            c.scale_exp, kp.scale_exp
        )));
    }
    let z = c.z;
    // c = C / 2^s and E^{-1} = 2^s · numer / denom, so c · E^{-1} = C · numer / denom.
    let (numer, denom) = kp.scaled_inverse();
    let mut entries = Vec::with_capacity(z * z);
    for i in 0..z {
        for j in 0..z {
            let mut acc = BigInt::zero();
            for k in 0..z {
                acc += numer.get(k, j) * BigInt::from(c.scaled[i * z + k]);
            }
            let (q, r) = acc.div_rem(denom);
            if !r.is_zero() {
                return Err(Error::Corruption(format!(
                    "entry ({i},{j}) is not an integer"
                )));
            }
            let v = q
                .to_i16()
                .filter(|v| *v == PAD || (0..=255).contains(v))
                .ok_or_else(|| {
                    Error::Corruption(format!("entry ({i},{j}) = {q} is out of range"))
                })?;
            entries.push(v);
        }
    }
    PlainBlock::new(z, entries)
}

pub fn encrypt_blocks(blocks: &[PlainBlock], kp: &KeyMatrixPair) -> Result<Vec<CipherBlock>> {
    blocks.iter().map(|b| encrypt_block(b, kp)).collect()
}

pub fn decrypt_blocks(blocks: &[CipherBlock], kp: &KeyMatrixPair) -> Result<Vec<PlainBlock>> {
    blocks.iter().map(|c| decrypt_block(c, kp)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keyschedule::{derive, CipherKey};
    use crate::recurrence::RecurrenceKind;
    use proptest::prelude::*;

    fn example_key() -> KeyMatrixPair {
        let e = DyadicMatrix::new(
            2,
            vec![
                Dyadic::new(1, 2),
                Dyadic::new(-1, 1),
                Dyadic::new(-1, 1),
                Dyadic::from(2),
            ],
        )
        .unwrap();
        KeyMatrixPair::from_matrix(e, 2).unwrap()
    }

    fn block(z: usize, v: &[i16]) -> PlainBlock {
        PlainBlock::new(z, v.to_vec()).unwrap()
    }

    fn cipher(v: &[(i64, u32)]) -> DyadicMatrix {
        DyadicMatrix::new(2, v.iter().map(|&(n, e)| Dyadic::new(n, e)).collect()).unwrap()
    }

    #[test]
    fn partition_examples() {
        assert_eq!(
            partition(&[65, 66, 67], 2),
            vec![block(2, &[65, 66, 67, -1])]
        );
        assert!(partition(&[], 2).is_empty());
        assert_eq!(partition(&[1, 2, 3, 4], 2), vec![block(2, &[1, 2, 3, 4])]);
        assert_eq!(partition(&[9; 17], 4).len(), 2);
    }

    #[test]
    fn unpartition_examples() {
        assert_eq!(
            unpartition(&[block(2, &[65, 66, 67, -1])], 3).unwrap(),
            vec![65, 66, 67]
        );
        let bad_tail = PlainBlock {
            z: 2,
            entries: vec![65, 66, 67, 0],
        };
        assert!(matches!(
            unpartition(&[bad_tail], 3),
            Err(Error::Corruption(_))
        ));
        assert!(unpartition(&[block(2, &[65, 66, 67, -1])], 4).is_err());
        assert!(unpartition(&[block(2, &[65, 66, 67, -1])], 5).is_err());
    }

    #[test]
    fn plain_block_validation() {
        assert!(PlainBlock::new(2, vec![1, -1, 2, -1]).is_err());
        assert!(PlainBlock::new(2, vec![1, 256, 2, 3]).is_err());
        assert!(PlainBlock::new(2, vec![1, 2, 3]).is_err());
        assert!(PlainBlock::new(2, vec![-1; 4]).is_ok());
    }

    #[test]
    fn encrypt_example() {
        let kp = example_key();
        let plain = block(2, &[65, 66, 67, 68]);
        let c = encrypt_block(&plain, &kp).unwrap();
        // Rational product as the reference.
        let b = crate::matrix::IntMatrix::from_i64_rows([[65, 66], [67, 68]]).to_rational();
        assert_eq!(
            c.to_matrix().to_rational(),
            b.mul(&kp.e.to_rational()).unwrap()
        );
        // 67·(-1/2) + 68·2 = 205/2
        assert_eq!(
            c.to_matrix(),
            cipher(&[(-67, 2), (199, 1), (-69, 2), (205, 1)])
        );
        assert_eq!(decrypt_block(&c, &kp).unwrap(), block(2, &[65, 66, 67, 68]));
    }

    #[test]
    fn identity_key_is_transparent() {
        let kp = KeyMatrixPair::from_matrix(DyadicMatrix::identity(4), 4).unwrap();
        let b = block(4, &[3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, -1, -1, -1, -1, -1]);
        let c = encrypt_block(&b, &kp).unwrap();
        let as_plain: Vec<i16> = (0..16).map(|i| c.entry(i).to_f64() as i16).collect();
        assert_eq!(as_plain, b.entries());
    }

    #[test]
    fn unit_selector_picks_first_row() {
        let kp = example_key();
        let c = encrypt_block(&block(2, &[1, 0, 0, 0]), &kp).unwrap();
        let e = &kp.e;
        assert_eq!(
            c.to_matrix(),
            DyadicMatrix::new(
                2,
                vec![
                    e.get(0, 0).clone(),
                    e.get(0, 1).clone(),
                    Dyadic::from(0),
                    Dyadic::from(0)
                ]
            )
            .unwrap()
        );
    }

    #[test]
    fn tampering_is_detected() {
        let kp = example_key();
        let mut c = encrypt_block(&block(2, &[65, 66, 67, 68]), &kp).unwrap();
        c.scaled_mut()[0] += 1; // +1/4
        assert!(matches!(decrypt_block(&c, &kp), Err(Error::Corruption(_))));
    }

    #[test]
    fn order_and_overflow_errors() {
        let kp = example_key();
        assert!(matches!(
            encrypt_block(&block(4, &[0; 16]), &kp),
            Err(Error::Shape(_))
        ));
        let huge = DyadicMatrix::new(
            2,
            vec![
                Dyadic::from(i64::MAX / 2),
                Dyadic::from(1),
                Dyadic::from(0),
                Dyadic::from(1),
            ],
        )
        .unwrap();
        let kp = KeyMatrixPair::from_matrix(huge, 2).unwrap();
        assert_eq!(
            encrypt_block(&block(2, &[255, 0, 0, 0]), &kp),
            Err(Error::Overflow)
        );
    }

    #[test]
    fn operation_count_is_cubic() {
        for level in 1..=3 {
            let key = CipherKey {
                kind: RecurrenceKind::Fibonacci,
                n: 4,
                p: 1,
                level,
                seed: [1; 32],
                mac_key: [2; 32],
            };
            let kp = derive(&key).unwrap();
            let z = kp.z as u64;
            let mut ops = OpCount::default();
            encrypt_block_counted(&partition(&[7; 5], kp.z)[0], &kp, &mut ops).unwrap();
            assert_eq!(ops.multiplications, z * z * z);
            assert_eq!(ops.additions, z * z * (z - 1));
        }
    }

    proptest! {
        #[test]
        fn roundtrip(data in proptest::collection::vec(any::<u8>(), 0..300), level in 1u32..=3, seed in any::<[u8; 32]>()) {
            let key = CipherKey { kind: RecurrenceKind::Fibonacci, n: 5, p: 1, level, seed, mac_key: [0; 32] };
            let kp = derive(&key).unwrap();
            let blocks = partition(&data, kp.z);
            let enc = encrypt_blocks(&blocks, &kp).unwrap();
            // Per-block independence: reversing the order changes nothing per block.
            let mut rev: Vec<_> = blocks.iter().rev().map(|b| encrypt_block(b, &kp).unwrap()).collect();
            rev.reverse();
            prop_assert_eq!(&rev, &enc);
            let dec = decrypt_blocks(&enc, &kp).unwrap();
            prop_assert_eq!(unpartition(&dec, data.len()).unwrap(), data);
        }
    }
}
