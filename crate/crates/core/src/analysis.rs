//! Plain/cipher statistics: Pearson correlation, paired and Welch t-tests,
//! and CSV series for contrast and per-character distribution plots.
//!
//! Plain series are the message bytes. Cipher series are the ciphertext
//! entries in block order as reals (scaled integers divided by
//! `2^scale_exp`). Paired statistics use the first `min(len)` entries of each.

use std::fmt::Write as _;

use statrs::function::beta::beta_reg;

use crate::auth;
use crate::envelope::CipherEnvelope;
use crate::error::{Error, Result};
use crate::keyschedule::CipherKey;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub values: Vec<f64>,
    pub label: String,
}

impl Series {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Series {
            values,
            label: label.into(),
        }
    }

    pub fn plain(label: impl Into<String>, message: &[u8]) -> Self {
        Series::new(label, message.iter().map(|&b| b as f64).collect())
    }

    pub fn cipher(label: impl Into<String>, env: &CipherEnvelope) -> Self {
        Series::new(label, cipher_values(env))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn truncated(&self, len: usize) -> &[f64] {
        &self.values[..len.min(self.values.len())]
    }
}

pub fn cipher_values(env: &CipherEnvelope) -> Vec<f64> {
    let scale = 2f64.powi(env.scale_exp as i32);
    env.scaled_entries().map(|v| v as f64 / scale).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub p: f64,
    pub df: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub correlation: f64,
    pub paired_t: f64,
    pub paired_p: f64,
    pub unpaired_t: f64,
    pub unpaired_p: f64,
    pub n_pairs: usize,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Unbiased sample variance.
fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
}

fn check_pairs(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Statistics(format!(
            "series lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Statistics("at least two pairs are required".into()));
    }
    Ok(())
}

/// Two-tailed p-value of Student's t with `df` degrees of freedom:
/// `I_{df/(df+t²)}(df/2, 1/2)`.
pub fn student_t_two_tailed(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

pub fn correlation(x: &Series, y: &Series) -> Result<f64> {
    let (x, y) = (&x.values[..], &y.values[..]);
    check_pairs(x, y)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Statistics("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

pub fn paired_t(x: &Series, y: &Series) -> Result<TTest> {
    check_pairs(&x.values, &y.values)?;
    let d: Vec<f64> = x.values.iter().zip(&y.values).map(|(a, b)| a - b).collect();
    let n = d.len() as f64;
    let sd = variance(&d).sqrt();
    if sd == 0.0 {
        return Err(Error::Statistics("differences have zero variance".into()));
    }
    let t = mean(&d) / (sd / n.sqrt());
    let df = n - 1.0;
    Ok(TTest {
        t,
        p: student_t_two_tailed(t, df),
        df,
    })
}

/// Welch's unequal-variance t-test.
pub fn unpaired_t(x: &Series, y: &Series) -> Result<TTest> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::Statistics(
            "each series needs at least two values".into(),
        ));
    }
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (vx, vy) = (variance(&x.values) / nx, variance(&y.values) / ny);
    let se2 = vx + vy;
    if se2 == 0.0 {
        return Err(Error::Statistics("both series have zero variance".into()));
    }
    let t = (mean(&x.values) - mean(&y.values)) / se2.sqrt();
    let df = se2 * se2 / (vx * vx / (nx - 1.0) + vy * vy / (ny - 1.0));
    Ok(TTest {
        t,
        p: student_t_two_tailed(t, df),
        df,
    })
}

/// Correlation and paired test on the common prefix of plain and cipher
/// series; Welch test on the full series.
pub fn analyze(plain: &[u8], env: &CipherEnvelope) -> Result<AnalysisReport> {
    let p = Series::plain("plain", plain);
    let c = Series::cipher("cipher", env);
    let n = p.len().min(c.len());
    let pp = Series::new("plain", p.truncated(n).to_vec());
    let cc = Series::new("cipher", c.truncated(n).to_vec());
    let corr = correlation(&pp, &cc)?;
    let paired = paired_t(&pp, &cc)?;
    let unpaired = unpaired_t(&p, &c)?;
    Ok(AnalysisReport {
        correlation: corr,
        paired_t: paired.t,
        paired_p: paired.p,
        unpaired_t: unpaired.t,
        unpaired_p: unpaired.p,
        n_pairs: n,
    })
}

/// Keys identical to `base` except for the randomization seed, which is
/// `HMAC(base.seed, "replica" || index_be32)`.
pub fn replica_keys(base: &CipherKey, count: u32) -> Vec<CipherKey> {
    (0..count)
        .map(|i| {
            let mut msg = b"replica".to_vec();
            msg.extend_from_slice(&i.to_be_bytes());
            CipherKey {
                seed: auth::mac(&base.seed, &msg).0,
                ..base.clone()
            }
        })
        .collect()
}

/// For every byte value occurring at least twice within the paired prefix,
/// true iff its cipher values are not all identical.
pub fn repeats_are_hidden(plain: &[u8], cipher: &[f64]) -> bool {
    let n = plain.len().min(cipher.len());
    let mut seen: [Option<f64>; 256] = [None; 256];
    let mut differs = [false; 256];
    let mut repeated = [false; 256];
    for i in 0..n {
        let b = plain[i] as usize;
        match seen[b] {
            None => seen[b] = Some(cipher[i]),
            Some(first) => {
                repeated[b] = true;
                differs[b] |= first != cipher[i];
            }
        }
    }
    (0..256).all(|b| !repeated[b] || differs[b])
}

pub const CONTRAST_HEADER: &str = "index,plain_value,cipher_value";

/// Contrast rows `index,plain_value,cipher_value` for every index up to the
/// longer series (missing side left empty), then `char,position,cipher_value`
/// rows for each occurrence of `focus` in the message.
pub fn contrast_csv(plain: &[u8], env: &CipherEnvelope, focus: Option<u8>) -> String {
    let cipher = cipher_values(env);
    let mut out = String::new();
    out.push_str(CONTRAST_HEADER);
    out.push('\n');
    for i in 0..plain.len().max(cipher.len()) {
        let p = plain.get(i).map(|b| b.to_string()).unwrap_or_default();
        let c = cipher.get(i).map(|v| v.to_string()).unwrap_or_default();
        writeln!(out, "{i},{p},{c}").expect("writing to a String");
    }
    if let Some(ch) = focus {
        for (pos, _) in plain.iter().enumerate().filter(|(_, &b)| b == ch) {
            let c = cipher.get(pos).map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{},{pos},{c}", csv_char(ch)).expect("writing to a String");
        }
    }
    out
}

fn csv_char(b: u8) -> String {
    match b {
        b',' | b'"' | b'\n' | b'\r' => format!("0x{b:02x}"),
        0x20..=0x7e => (b as char).to_string(),
        _ => format!("0x{b:02x}"),
    }
}

pub const REPORT_HEADER: &str =
    "seed_index,correlation,paired_t,paired_p,unpaired_t,unpaired_p,n_pairs";

impl AnalysisReport {
    pub fn csv_row(&self, seed_index: usize) -> String {
        format!(
            "{seed_index},{},{},{},{},{},{}",
            self.correlation,
            self.paired_t,
            self.paired_p,
            self.unpaired_t,
            self.unpaired_p,
            self.n_pairs
        )
    }
}
