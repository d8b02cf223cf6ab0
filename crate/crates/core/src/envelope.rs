//! Sealing and opening whole messages, and the `GCHW` wire format.
//!
//! Sealing compresses the message, tags the packed compressed bytes with
//! HMAC-SHA-256 and encrypts them block-wise. Opening decrypts, checks the
//! tag and only then decompresses.
//!
//! Wire layout, big-endian:
//!
//! | bytes | field                    |
//! |-------|--------------------------|
//! | 4     | magic `GCHW`             |
//! | 1     | version (`0x01`)         |
//! | 2     | z                        |
//! | 1     | scale_exp                |
//! | 8     | plain_byte_count         |
//! | 8     | compressed_symbol_count  |
//! | 8     | compressed_bit_count     |
//! | 4     | block_count              |
//! | z²·8  | each block, i64 entries scaled by `2^scale_exp`, row-major |
//! | 32    | HMAC tag                 |

use crate::ahuffman::{self, BitString};
use crate::auth::{self, MacTag, TAG_LEN};
use crate::blockcipher::{self, CipherBlock};
use crate::error::{Error, Result};
use crate::keyschedule::{self, CipherKey, KeyMatrixPair};

pub const MAGIC: [u8; 4] = *b"GCHW";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 4 + 1 + 2 + 1 + 8 + 8 + 8 + 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherEnvelope {
    pub version: u8,
    pub z: usize,
    pub scale_exp: u32,
    pub plain_byte_count: u64,
    pub compressed_symbol_count: u64,
    pub compressed_bit_count: u64,
    pub blocks: Vec<CipherBlock>,
    pub tag: MacTag,
}

impl CipherEnvelope {
    /// Packed compressed bytes carried by the blocks.
    pub fn compressed_byte_count(&self) -> u64 {
        self.compressed_bit_count.div_ceil(8)
    }

    pub fn expected_block_count(&self) -> u64 {
        let per_block = (self.z * self.z) as u64;
        self.compressed_byte_count().div_ceil(per_block)
    }

    /// Scaled ciphertext entries, block after block.
    pub fn scaled_entries(&self) -> impl Iterator<Item = i64> + '_ {
        self.blocks.iter().flat_map(|b| b.scaled().iter().copied())
    }

    fn check_consistency(&self) -> Result<()> {
        if self.version != VERSION {
            return Err(Error::Parse(format!("unknown version {}", self.version)));
        }
        if self.z < 2 || self.z > u16::MAX as usize {
            return Err(Error::Parse(format!("block order {} is invalid", self.z)));
        }
        if self.plain_byte_count != self.compressed_symbol_count {
            return Err(Error::Parse(format!(
                "plain byte count {} disagrees with symbol count {}",
                self.plain_byte_count, self.compressed_symbol_count
            )));
        }
        if self.blocks.len() as u64 != self.expected_block_count() {
            return Err(Error::Parse(format!(
                "{} blocks present, {} expected for {} compressed bits",
                self.blocks.len(),
                self.expected_block_count(),
                self.compressed_bit_count
            )));
        }
        if self
            .blocks
            .iter()
            .any(|b| b.order() != self.z || b.scale_exp() != self.scale_exp)
        {
            return Err(Error::Parse("block shape disagrees with the header".into()));
        }
        Ok(())
    }
}

pub fn seal(message: &[u8], key: &CipherKey) -> Result<CipherEnvelope> {
    let kp = keyschedule::derive(key)?;
    seal_with(message, key, &kp)
}

/// [`seal`] with a key matrix derived once up front.
pub fn seal_with(message: &[u8], key: &CipherKey, kp: &KeyMatrixPair) -> Result<CipherEnvelope> {
    let bits = ahuffman::encode(message);
    let compressed = bits.to_bytes();
    let tag = auth::mac(&key.mac_key, &compressed);
    let blocks = blockcipher::encrypt_blocks(&blockcipher::partition(&compressed, kp.z), kp)?;
    Ok(CipherEnvelope {
        version: VERSION,
        z: kp.z,
        scale_exp: kp.scale_exp,
        plain_byte_count: message.len() as u64,
        compressed_symbol_count: message.len() as u64,
        compressed_bit_count: bits.len() as u64,
        blocks,
        tag,
    })
}

pub fn open(env: &CipherEnvelope, key: &CipherKey) -> Result<Vec<u8>> {
    let kp = keyschedule::derive(key)?;
    open_with(env, key, &kp)
}

pub fn open_with(env: &CipherEnvelope, key: &CipherKey, kp: &KeyMatrixPair) -> Result<Vec<u8>> {
    env.check_consistency()?;
    if env.z != kp.z || env.scale_exp != kp.scale_exp {
        return Err(Error::Corruption(format!(
            "envelope geometry (z={}, scale 2^{}) does not match the key (z={}, scale 2^{})",
            env.z, env.scale_exp, kp.z, kp.scale_exp
        )));
    }
    let plain_blocks = blockcipher::decrypt_blocks(&env.blocks, kp)?;
    let byte_count = usize::try_from(env.compressed_byte_count())
        .map_err(|_| Error::Parse("compressed length does not fit in memory".into()))?;
    let compressed = blockcipher::unpartition(&plain_blocks, byte_count)?;
    if !auth::verify(&key.mac_key, &compressed, &env.tag) {
        return Err(Error::Authentication);
    }
    let bits = BitString::from_bytes(&compressed, env.compressed_bit_count as usize)?;
    ahuffman::decode(&bits, env.compressed_symbol_count)
}

pub fn serialize(env: &CipherEnvelope) -> Vec<u8> {
    let z = env.z;
    let mut out = Vec::with_capacity(HEADER_LEN + env.blocks.len() * z * z * 8 + TAG_LEN);
    out.extend_from_slice(&MAGIC);
    out.push(env.version);
    out.extend_from_slice(&(z as u16).to_be_bytes());
    out.push(env.scale_exp as u8);
    out.extend_from_slice(&env.plain_byte_count.to_be_bytes());
    out.extend_from_slice(&env.compressed_symbol_count.to_be_bytes());
    out.extend_from_slice(&env.compressed_bit_count.to_be_bytes());
    out.extend_from_slice(&(env.blocks.len() as u32).to_be_bytes());
    for v in env.scaled_entries() {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(env.tag.as_bytes());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&end| end <= self.bytes.len())
            .ok_or_else(|| Error::Parse(format!("truncated while reading {what}")))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        Ok(self.take(N, what)?.try_into().expect("exact length"))
    }
}

pub fn deserialize(bytes: &[u8]) -> Result<CipherEnvelope> {
    let mut r = Reader { bytes, pos: 0 };
    if r.array::<4>("magic")? != MAGIC {
        return Err(Error::Parse("bad magic".into()));
    }
    let version = r.array::<1>("version")?[0];
    if version != VERSION {
        return Err(Error::Parse(format!("unknown version {version}")));
    }
    let z = u16::from_be_bytes(r.array("z")?) as usize;
    if z < 2 {
        return Err(Error::Parse(format!("block order {z} is invalid")));
    }
    let scale_exp = r.array::<1>("scale_exp")?[0] as u32;
    let plain_byte_count = u64::from_be_bytes(r.array("plain_byte_count")?);
    let compressed_symbol_count = u64::from_be_bytes(r.array("compressed_symbol_count")?);
    let compressed_bit_count = u64::from_be_bytes(r.array("compressed_bit_count")?);
    let block_count = u32::from_be_bytes(r.array("block_count")?) as usize;
    let block_len = z * z;
    let body = block_count
        .checked_mul(block_len * 8)
        .and_then(|b| b.checked_add(TAG_LEN))
        .ok_or_else(|| Error::Parse("block count overflows".into()))?;
    if bytes.len() - r.pos != body {
        return Err(Error::Parse(format!(
            "expected {body} bytes after the header, found {}",
            bytes.len() - r.pos
        )));
    }
    let mut blocks = Vec::with_capacity(block_count);
    for _ in 0..block_count {
        let raw = r.take(block_len * 8, "block")?;
        let scaled = raw
            .chunks_exact(8)
            .map(|c| i64::from_be_bytes(c.try_into().expect("8 bytes")))
            .collect();
        blocks.push(CipherBlock::from_scaled(z, scale_exp, scaled)?);
    }
    let tag = MacTag(r.array("tag")?);
    let env = CipherEnvelope {
        version,
        z,
        scale_exp,
        plain_byte_count,
        compressed_symbol_count,
        compressed_bit_count,
        blocks,
        tag,
    };
    env.check_consistency()?;
    Ok(env)
}
