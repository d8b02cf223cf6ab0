//! Compress-then-encrypt golden-matrix cipher.
//!
//! Messages are compressed with an adaptive (FGK) Huffman coder, authenticated
//! with HMAC-SHA-256 and encrypted block-wise by right-multiplication with an
//! enciphering matrix derived from a Fibonacci, Lucas or ELC golden matrix
//! passed through a lifting-scheme Haar transform. The crate also carries the
//! statistics used to evaluate plain/cipher relationships and a chosen-plaintext
//! key recovery against the older continuous golden cipher.
//!
//! This is a research artifact. It is **not** a secure cipher.
//!
//! ```
//! use golden_cipher::{envelope, CipherKey, RecurrenceKind};
//!
//! let key = CipherKey {
//!     kind: RecurrenceKind::Fibonacci,
//!     n: 5,
//!     p: 1,
//!     level: 2,
//!     seed: [7; 32],
//!     mac_key: [9; 32],
//! };
//! let env = envelope::seal(b"meet me after party", &key).unwrap();
//! let wire = envelope::serialize(&env);
//! let back = envelope::open(&envelope::deserialize(&wire).unwrap(), &key).unwrap();
//! assert_eq!(back, b"meet me after party");
//! ```

pub mod ahuffman;
pub mod analysis;
pub mod attack;
pub mod auth;
pub mod blockcipher;
pub mod envelope;
pub mod error;
pub mod keyschedule;
pub mod matrix;
pub mod recurrence;
pub mod wavelet;

pub use envelope::{open, seal, CipherEnvelope};
pub use error::{Error, Result};
pub use keyschedule::{derive, CipherKey, KeyMatrixPair};
pub use matrix::{Dyadic, DyadicMatrix, IntMatrix, RationalMatrix};
pub use recurrence::RecurrenceKind;
