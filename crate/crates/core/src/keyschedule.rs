//! Derivation of the enciphering matrix `E` and its exact inverse from a
//! [`CipherKey`].
//!
//! The golden matrix is zero-padded to `Z × Z` (`Z` a power of two no smaller
//! than `2^level`), Haar transformed, and then perturbed with secret integers
//! in `[1, 255]` until the result is nonsingular. The perturbation stream is
//! HMAC-SHA-256 in counter mode keyed by the key's seed, so both ends rebuild
//! the same `E`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::auth;
use crate::error::{Error, Result};
use crate::matrix::{Dyadic, DyadicMatrix, IntMatrix, RationalMatrix};
use crate::recurrence::{self, RecurrenceKind};
use crate::wavelet;

pub const MAX_LEVEL: u32 = 8;
pub const MAX_N: u64 = 10_000;
pub const MAX_ATTEMPTS: u32 = 64;
pub const SECRET_LEN: usize = 32;

/// The shared secret.
#[derive(Clone, PartialEq, Eq)]
pub struct CipherKey {
    pub kind: RecurrenceKind,
    /// Power of the golden matrix.
    pub n: u64,
    /// Order parameter of `Q_p`; must be 1 for Lucas and ELC.
    pub p: usize,
    /// Number of Haar levels.
    pub level: u32,
    pub seed: [u8; SECRET_LEN],
    pub mac_key: [u8; SECRET_LEN],
}

impl fmt::Debug for CipherKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CipherKey")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("p", &self.p)
            .field("level", &self.level)
            .finish_non_exhaustive()
    }
}

impl CipherKey {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_N {
            return Err(Error::InvalidKey(format!(
                "n must be in 1..={MAX_N}, got {}",
                self.n
            )));
        }
        if self.p > recurrence::MAX_P {
            return Err(Error::InvalidKey(format!(
                "p must be at most {}, got {}",
                recurrence::MAX_P,
                self.p
            )));
        }
        if self.kind != RecurrenceKind::Fibonacci && self.p != 1 {
            return Err(Error::InvalidKey(format!(
                "{} keys require p = 1",
                self.kind
            )));
        }
        if self.level == 0 || self.level > MAX_LEVEL {
            return Err(Error::InvalidKey(format!(
                "level must be in 1..={MAX_LEVEL}, got {}",
                self.level
            )));
        }
        Ok(())
    }

    /// Block side `Z`.
    pub fn block_order(&self) -> usize {
        block_order(self.golden_order(), self.level)
    }

    fn golden_order(&self) -> usize {
        match self.kind {
            RecurrenceKind::Fibonacci => self.p + 1,
            _ => 2,
        }
    }

    /// Line-oriented key file text.
    pub fn to_key_file(&self) -> String {
        format!(
            "kind={}\nn={}\np={}\nlevel={}\nseed={}\nmac_key={}\n",
            self.kind,
            self.n,
            self.p,
            self.level,
            to_hex(&self.seed),
            to_hex(&self.mac_key)
        )
    }

    pub fn from_key_file(text: &str) -> Result<CipherKey> {
        let lines: Vec<&str> = text.lines().collect();
        const FIELDS: [&str; 6] = ["kind", "n", "p", "level", "seed", "mac_key"];
        if lines.len() != FIELDS.len() {
            return Err(Error::InvalidKey(format!(
                "key file must have exactly {} lines, found {}",
                FIELDS.len(),
                lines.len()
            )));
        }
        let mut values = Vec::with_capacity(FIELDS.len());
        for (line, field) in lines.iter().zip(FIELDS) {
            let value = line
                .strip_prefix(field)
                .and_then(|rest| rest.strip_prefix('='))
                .ok_or_else(|| {
                    Error::InvalidKey(format!("expected `{field}=` line, got {line:?}"))
                })?;
            values.push(value);
        }
        let number = |s: &str, field: &str| -> Result<u64> {
            s.parse().map_err(|_| {
                Error::InvalidKey(format!("{field} is not an unsigned integer: {s:?}"))
            })
        };
        let key = CipherKey {
            kind: values[0].parse()?,
            n: number(values[1], "n")?,
            p: number(values[2], "p")? as usize,
            level: u32::try_from(number(values[3], "level")?)
                .map_err(|_| Error::InvalidKey("level too large".into()))?,
            seed: parse_secret(values[4], "seed")?,
            mac_key: parse_secret(values[5], "mac_key")?,
        };
        key.validate()?;
        Ok(key)
    }
}

fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn parse_secret(s: &str, field: &str) -> Result<[u8; SECRET_LEN]> {
    let bad = || Error::InvalidKey(format!("{field} must be {} hex characters", SECRET_LEN * 2));
    if s.len() != SECRET_LEN * 2 || !s.is_ascii() {
        return Err(bad());
    }
    let mut out = [0u8; SECRET_LEN];
    for (i, byte) in out.iter_mut().enumerate() {
        *byte = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).map_err(|_| bad())?;
    }
    Ok(out)
}

fn block_order(golden_order: usize, level: u32) -> usize {
    let needed = golden_order.next_power_of_two().trailing_zeros();
    1usize << needed.max(level)
}

/// Enciphering matrix with its exact inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyMatrixPair {
    pub e: DyadicMatrix,
    pub e_inv: RationalMatrix,
    pub z: usize,
    /// `2^scale_exp · e` is an integer matrix.
    pub scale_exp: u32,
    /// Randomization attempt that produced a nonsingular `e`.
    pub attempt: u32,
    scaled_e: IntMatrix,
    /// `inv_numer / inv_denom` is the inverse of `scaled_e`.
    inv_numer: IntMatrix,
    inv_denom: BigInt,
}

impl KeyMatrixPair {
    /// Builds the pair for an arbitrary nonsingular dyadic matrix whose entries
    /// have exponent at most `scale_exp`.
    pub fn from_matrix(e: DyadicMatrix, scale_exp: u32) -> Result<KeyMatrixPair> {
        Self::build(e, scale_exp, 0)
    }

    fn build(e: DyadicMatrix, scale_exp: u32, attempt: u32) -> Result<KeyMatrixPair> {
        Self::try_build(e, scale_exp, attempt)?
            .ok_or_else(|| Error::Range("matrix is singular".into()))
    }

    /// `Ok(None)` when `e` is singular.
    fn try_build(e: DyadicMatrix, scale_exp: u32, attempt: u32) -> Result<Option<KeyMatrixPair>> {
        let scaled_e = e.scaled(scale_exp).ok_or_else(|| {
            Error::Range(format!(
                "matrix entries need more than 2^{scale_exp} scaling"
            ))
        })?;
        let Some((mut inv_numer, mut inv_denom)) = scaled_e.fraction_free_inverse() else {
            return Ok(None);
        };
        if inv_denom.is_negative() {
            inv_numer = inv_numer.map(|v| -v);
            inv_denom = -inv_denom;
        }
        // E^{-1} = 2^s · A^{-1} with A = 2^s E.
        let lift = BigInt::from(1) << scale_exp;
        let e_inv = inv_numer.map(|v| BigRational::new(v * &lift, inv_denom.clone()));
        Ok(Some(KeyMatrixPair {
            z: e.order(),
            e,
            e_inv,
            scale_exp,
            attempt,
            scaled_e,
            inv_numer,
            inv_denom,
        }))
    }

    /// `2^scale_exp · E` as integers.
    pub fn scaled_e(&self) -> &IntMatrix {
        &self.scaled_e
    }

    /// `(numerator, denominator)` of `(2^scale_exp · E)^{-1}`, denominator positive.
    pub fn scaled_inverse(&self) -> (&IntMatrix, &BigInt) {
        (&self.inv_numer, &self.inv_denom)
    }
}

pub fn golden_base(key: &CipherKey) -> Result<IntMatrix> {
    key.validate()?;
    match key.kind {
        RecurrenceKind::Fibonacci => recurrence::qp_power(key.p, key.n),
        kind => recurrence::golden_matrix(kind, key.n as i64),
    }
}

/// Embeds `g` in the top-left corner of a zero `Z × Z` matrix.
pub fn pad_to_z(g: &IntMatrix, level: u32) -> DyadicMatrix {
    let z = block_order(g.order(), level);
    let mut out = DyadicMatrix::zeros(z);
    for r in 0..g.order() {
        for c in 0..g.order() {
            out.set(r, c, Dyadic::from_int(g.get(r, c).clone()));
        }
    }
    out
}

/// Haar-transformed padded golden matrix before any randomization.
pub fn base_transform(key: &CipherKey) -> Result<DyadicMatrix> {
    let g = golden_base(key)?;
    wavelet::haar2d_forward(&pad_to_z(&g, key.level), key.level)
}

/// Keyed byte stream for randomization attempt `attempt`:
/// `HMAC(seed, attempt_be32 || counter_be32)` blocks, concatenated.
pub struct PerturbationStream<'a> {
    seed: &'a [u8; SECRET_LEN],
    attempt: u32,
    counter: u32,
    block: [u8; auth::TAG_LEN],
    pos: usize,
}

impl<'a> PerturbationStream<'a> {
    pub fn new(seed: &'a [u8; SECRET_LEN], attempt: u32) -> Self {
        PerturbationStream {
            seed,
            attempt,
            counter: 0,
            block: [0; auth::TAG_LEN],
            pos: auth::TAG_LEN,
        }
    }

    /// Next perturbation value in `[1, 255]`.
    pub fn next_entry(&mut self) -> u8 {
        (self.next_byte() % 255) + 1
    }
}

impl Iterator for PerturbationStream<'_> {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.next_byte())
    }
}

impl PerturbationStream<'_> {
    fn next_byte(&mut self) -> u8 {
        if self.pos == self.block.len() {
            let mut msg = [0u8; 8];
            msg[..4].copy_from_slice(&self.attempt.to_be_bytes());
            msg[4..].copy_from_slice(&self.counter.to_be_bytes());
            self.block = auth::mac(self.seed, &msg).0;
            self.counter += 1;
            self.pos = 0;
        }
        let b = self.block[self.pos];
        self.pos += 1;
        b
    }
}

/// Adds the attempt's perturbation to `t`: zero positions only on attempt 0,
/// every position afterwards.
pub fn perturb(t: &DyadicMatrix, seed: &[u8; SECRET_LEN], attempt: u32) -> DyadicMatrix {
    let mut stream = PerturbationStream::new(seed, attempt);
    t.map(|v| {
        if attempt == 0 && !v.is_zero() {
            v.clone()
        } else {
            v + &Dyadic::from(stream.next_entry() as i64)
        }
    })
}

pub fn derive(key: &CipherKey) -> Result<KeyMatrixPair> {
    let t = base_transform(key)?;
    let scale_exp = 2 * key.level;
    for attempt in 0..MAX_ATTEMPTS {
        let e = perturb(&t, &key.seed, attempt);
        if let Some(kp) = KeyMatrixPair::try_build(e, scale_exp, attempt)? {
            return Ok(kp);
        }
    }
    Err(Error::KeyDerivation(MAX_ATTEMPTS))
}
