//! Fibonacci-rule sequences (Fibonacci, Lucas, ELC), their 2×2 golden
//! matrices and the companion-form `Q_p` generalisation.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{IntMatrix, Matrix, RationalMatrix};

/// Largest absolute index accepted by [`sequence_term`] and [`golden_matrix`].
pub const MAX_INDEX: i64 = 1_000_000;
/// Largest `p` accepted by [`qp_matrix`].
pub const MAX_P: usize = 64;
/// Largest power accepted by [`qp_power`].
pub const MAX_QP_POWER: u64 = 10_000;

/// Which second-order recurrence seeds the golden matrix.
///
/// All three obey `t(i+1) = t(i) + t(i-1)` and differ only in their
/// initial conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecurrenceKind {
    /// `F_0 = 0, F_1 = 1`.
    Fibonacci,
    /// `L_0 = 2, L_1 = 1`.
    Lucas,
    /// `E_0 = 8, E_1 = 14`.
    Elc,
}

impl RecurrenceKind {
    pub const ALL: [RecurrenceKind; 3] = [Self::Fibonacci, Self::Lucas, Self::Elc];

    /// Terms at index 0 and 1.
    pub fn initial_terms(self) -> (i64, i64) {
        match self {
            Self::Fibonacci => (0, 1),
            Self::Lucas => (2, 1),
            Self::Elc => (8, 14),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Fibonacci => "fibonacci",
            Self::Lucas => "lucas",
            Self::Elc => "elc",
        }
    }
}

impl fmt::Display for RecurrenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RecurrenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fibonacci" => Ok(Self::Fibonacci),
            "lucas" => Ok(Self::Lucas),
            "elc" => Ok(Self::Elc),
            other => Err(Error::InvalidKey(format!(
                "unknown recurrence kind {other:?}"
            ))),
        }
    }
}

fn check_index(index: i64) -> Result<()> {
    if index.unsigned_abs() > MAX_INDEX as u64 {
        return Err(Error::Range(format!(
            "index {index} exceeds the bound {MAX_INDEX}"
        )));
    }
    Ok(())
}

/// `(F_n, F_{n+1})` for `n >= 0` by fast doubling.
fn fib_pair(n: u64) -> (BigInt, BigInt) {
    if n == 0 {
        return (BigInt::zero(), BigInt::one());
    }
    let (a, b) = fib_pair(n / 2);
    // F_2k = F_k (2 F_{k+1} - F_k), F_2k+1 = F_k^2 + F_{k+1}^2
    let c = &a * (&b * 2 - &a);
    let d = &a * &a + &b * &b;
    if n.is_multiple_of(2) {
        (c, d)
    } else {
        let e = &c + &d;
        (d, e)
    }
}

/// Fibonacci number for any signed index, `F_{-n} = (-1)^{n+1} F_n`.
fn fibonacci(index: i64) -> BigInt {
    let (f, _) = fib_pair(index.unsigned_abs());
    if index < 0 && index % 2 == 0 {
        -f
    } else {
        f
    }
}

/// The `index`-th term of the recurrence, extended to negative indices with
/// `t(i-1) = t(i+1) - t(i)`.
pub fn sequence_term(kind: RecurrenceKind, index: i64) -> Result<BigInt> {
    check_index(index)?;
    // Any Fibonacci-rule sequence satisfies t(n) = t(0) F_{n-1} + t(1) F_n.
    let (t0, t1) = kind.initial_terms();
    let term = match kind {
        RecurrenceKind::Fibonacci => fibonacci(index),
        _ => fibonacci(index - 1) * t0 + fibonacci(index) * t1,
    };
    Ok(term)
}

/// `[[t(n+1), t(n)], [t(n), t(n-1)]]`.
pub fn golden_matrix(kind: RecurrenceKind, n: i64) -> Result<IntMatrix> {
    check_index(n)?;
    let (t0, t1) = kind.initial_terms();
    let f_prev = fibonacci(n - 1);
    let f_cur = fibonacci(n);
    let f_next = &f_prev + &f_cur;
    let f_prev2 = &f_cur - &f_prev;
    let term = |a: &BigInt, b: &BigInt| a * t0 + b * t1;
    let (next, cur, prev) = match kind {
        RecurrenceKind::Fibonacci => (f_next, f_cur, f_prev),
        _ => (
            term(&f_cur, &f_next),
            term(&f_prev, &f_cur),
            term(&f_prev2, &f_prev),
        ),
    };
    Matrix::new(2, vec![next, cur.clone(), cur, prev])
}

/// Exact inverse of [`golden_matrix`] by adjugate over determinant.
pub fn golden_inverse(kind: RecurrenceKind, n: i64) -> Result<RationalMatrix> {
    let g = golden_matrix(kind, n)?;
    let (a, b, c, d) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
    let det = a * d - b * c;
    debug_assert!(!det.is_zero(), "golden matrices are nonsingular");
    let entry = |v: BigInt| BigRational::new(v, det.clone());
    Matrix::new(
        2,
        vec![
            entry(d.clone()),
            entry(-b.clone()),
            entry(-c.clone()),
            entry(a.clone()),
        ],
    )
}

/// Companion-form `(p+1)×(p+1)` matrix: first row `(1, 1, 0, …)`, a shifted
/// identity in the middle rows and `(1, 0, …, 0)` as the last row.
/// `p = 0` gives the 1×1 matrix `[1]`.
pub fn qp_matrix(p: usize) -> Result<IntMatrix> {
    if p > MAX_P {
        return Err(Error::Range(format!("p = {p} exceeds {MAX_P}")));
    }
    let order = p + 1;
    let mut m = IntMatrix::zeros(order);
    if p == 0 {
        m.set(0, 0, BigInt::one());
        return Ok(m);
    }
    m.set(0, 0, BigInt::one());
    m.set(0, 1, BigInt::one());
    for row in 1..p {
        m.set(row, row + 1, BigInt::one());
    }
    m.set(p, 0, BigInt::one());
    Ok(m)
}

/// `qp_matrix(p)^n`.
pub fn qp_power(p: usize, n: u64) -> Result<IntMatrix> {
    if n > MAX_QP_POWER {
        return Err(Error::Range(format!("power {n} exceeds {MAX_QP_POWER}")));
    }
    Ok(qp_matrix(p)?.pow(n))
}
