//! The continuous golden cipher built on symmetric Fibonacci hyperbolic
//! functions, and the chosen-plaintext recovery of its secret exponent.
//!
//! The cipher multiplies a 2×2 plaintext on the right by
//! `Q(2x) = [[cFs(2x+1), sFs(2x)], [sFs(2x), cFs(2x-1)]]`. Encrypting the unit
//! matrix `M1 = [[1, 0], [0, 0]]` exposes `k1 = sFs(2x)` directly; solving
//! `z - 1/z = k1·√5` for `z = τ^{2x} > 0` gives `x = ½·log_τ z`.

use std::fmt;

use crate::error::{Error, Result};

/// Golden proportion.
pub const TAU: f64 = 1.618_033_988_749_895;
const SQRT5: f64 = 2.236_067_977_499_79;

pub const MAX_ARG: f64 = 300.0;
pub const MAX_KEY: f64 = 100.0;

pub type GoldenRealMatrix = [[f64; 2]; 2];

pub const M1: GoldenRealMatrix = [[1.0, 0.0], [0.0, 0.0]];
pub const M2: GoldenRealMatrix = [[0.0, 1.0], [0.0, 0.0]];
pub const M3: GoldenRealMatrix = [[0.0, 0.0], [1.0, 0.0]];
pub const M4: GoldenRealMatrix = [[0.0, 0.0], [0.0, 1.0]];

fn check_arg(x: f64, bound: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > bound {
        return Err(Error::Range(format!("|{x}| exceeds {bound}")));
    }
    Ok(())
}

/// Symmetric Fibonacci sine `(τ^x - τ^{-x}) / √5`.
pub fn sfs(x: f64) -> Result<f64> {
    check_arg(x, MAX_ARG)?;
    Ok((TAU.powf(x) - TAU.powf(-x)) / SQRT5)
}

/// Symmetric Fibonacci cosine `(τ^x + τ^{-x}) / √5`.
pub fn cfs(x: f64) -> Result<f64> {
    check_arg(x, MAX_ARG)?;
    Ok((TAU.powf(x) + TAU.powf(-x)) / SQRT5)
}

pub fn q_matrix(x: f64) -> Result<GoldenRealMatrix> {
    check_arg(x, MAX_KEY)?;
    let s = sfs(2.0 * x)?;
    Ok([[cfs(2.0 * x + 1.0)?, s], [s, cfs(2.0 * x - 1.0)?]])
}

pub fn mat_mul(a: &GoldenRealMatrix, b: &GoldenRealMatrix) -> GoldenRealMatrix {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn determinant(m: &GoldenRealMatrix) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Numerical inverse by adjugate over determinant.
pub fn inverse(m: &GoldenRealMatrix) -> Result<GoldenRealMatrix> {
    let det = determinant(m);
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Attack("matrix is singular".into()));
    }
    Ok([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

pub fn stakhov_encrypt(m: &GoldenRealMatrix, x: f64) -> Result<GoldenRealMatrix> {
    Ok(mat_mul(m, &q_matrix(x)?))
}

pub fn stakhov_decrypt(c: &GoldenRealMatrix, x: f64) -> Result<GoldenRealMatrix> {
    Ok(mat_mul(c, &inverse(&q_matrix(x)?)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackResult {
    pub recovered_x: f64,
    pub k1: f64,
    /// `τ^{2x}`.
    pub z: f64,
    /// Max-norm distance between re-encrypted `M1` and the observed ciphertext.
    pub residual: f64,
}

fn max_abs_diff(a: &GoldenRealMatrix, b: &GoldenRealMatrix) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Recovers the key from the ciphertext of [`M1`].
pub fn recover_x(c1: &GoldenRealMatrix) -> Result<AttackResult> {
    let k1 = c1[0][1];
    let a = k1 * SQRT5;
    let root = (a * a + 4.0).sqrt();
    // Positive root of z² - a·z - 1 = 0, in the cancellation-free form.
    let z = if a >= 0.0 {
        (a + root) / 2.0
    } else {
        2.0 / (root - a)
    };
    let recovered_x = 0.5 * z.ln() / TAU.ln();
    if !(k1.is_finite() && z.is_finite() && z > 0.0 && recovered_x.is_finite()) {
        return Err(Error::Attack(format!(
            "non-finite intermediate (k1 = {k1}, z = {z})"
        )));
    }
    let reencrypted = stakhov_encrypt(&M1, recovered_x)?;
    Ok(AttackResult {
        recovered_x,
        k1,
        z,
        residual: max_abs_diff(&reencrypted, c1),
    })
}

/// Every chosen plaintext with its ciphertext, plus the recovery.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackDemo {
    pub x: f64,
    pub pairs: Vec<(&'static str, GoldenRealMatrix, GoldenRealMatrix)>,
    pub result: AttackResult,
    /// Max residual when all four chosen plaintexts are re-encrypted with the
    /// recovered key.
    pub cross_residual: f64,
}

pub fn demo(x: f64) -> Result<AttackDemo> {
    let mut pairs = Vec::with_capacity(4);
    for (name, m) in [("M1", M1), ("M2", M2), ("M3", M3), ("M4", M4)] {
        pairs.push((name, m, stakhov_encrypt(&m, x)?));
    }
    let result = recover_x(&pairs[0].2)?;
    let mut cross_residual: f64 = 0.0;
    for (_, m, c) in &pairs {
        cross_residual =
            cross_residual.max(max_abs_diff(&stakhov_encrypt(m, result.recovered_x)?, c));
    }
    Ok(AttackDemo {
        x,
        pairs,
        result,
        cross_residual,
    })
}

fn fmt_matrix(f: &mut fmt::Formatter<'_>, m: &GoldenRealMatrix) -> fmt::Result {
    for row in m {
        writeln!(f, "    [{:>22.15e} {:>22.15e}]", row[0], row[1])?;
    }
    Ok(())
}

impl fmt::Display for AttackDemo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "secret x = {}", self.x)?;
        for (name, m, c) in &self.pairs {
            writeln!(f, "{name} =")?;
            fmt_matrix(f, m)?;
            writeln!(f, "  ciphertext =")?;
            fmt_matrix(f, c)?;
        }
        writeln!(f, "k1 = sFs(2x) = {:.15e}", self.result.k1)?;
        writeln!(f, "z = tau^(2x) = {:.15e}", self.result.z)?;
        writeln!(f, "recovered x = {:.15}", self.result.recovered_x)?;
        writeln!(
            f,
            "|recovered - x| = {:.3e}",
            (self.result.recovered_x - self.x).abs()
        )?;
        writeln!(f, "residual (M1) = {:.3e}", self.result.residual)?;
        writeln!(f, "residual (M1..M4) = {:.3e}", self.cross_residual)
    }
}
