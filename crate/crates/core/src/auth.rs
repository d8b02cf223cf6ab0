//! HMAC-SHA-256 tags over the compressed stream.

use hmac::{Hmac, KeyInit, Mac};
use sha2::Sha256;

type HmacSha256 = Hmac<Sha256>;

pub const TAG_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MacTag(pub [u8; TAG_LEN]);

impl MacTag {
    pub fn as_bytes(&self) -> &[u8; TAG_LEN] {
        &self.0
    }
}

fn keyed(key: &[u8]) -> HmacSha256 {
    // HMAC accepts keys of any length.
    HmacSha256::new_from_slice(key).expect("HMAC takes keys of any size")
}

/// HMAC-SHA-256 of `data` under `key`. Keys of any length are accepted so the
/// standard test vectors can be reproduced; cipher keys are always 32 bytes.
pub fn mac(key: &[u8], data: &[u8]) -> MacTag {
    let mut h = keyed(key);
    h.update(data);
    MacTag(h.finalize().into_bytes().into())
}

/// Constant-time tag check.
pub fn verify(key: &[u8], data: &[u8], tag: &MacTag) -> bool {
    let mut h = keyed(key);
    h.update(data);
    h.verify_slice(&tag.0).is_ok()
}
