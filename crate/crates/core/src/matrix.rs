//! Exact square matrices over big integers, dyadic rationals and general
//! rationals, plus the fraction-free inverse used by the key schedule.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A number of the form `num / 2^exp`, always stored reduced
/// (`num` odd, or `num == 0` with `exp == 0`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        let mut d = Dyadic {
            num: num.into(),
            exp,
        };
        d.normalize();
        d
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic {
            num: v.into(),
            exp: 0,
        }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exp as u64) as u32;
        if shift > 0 {
            self.num >>= shift;
            self.exp -= shift;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    /// Power of two in the reduced denominator.
    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    pub fn half(&self) -> Self {
        Dyadic::new(self.num.clone(), self.exp + 1)
    }

    /// `self * 2^scale` as an integer, or `None` when that is not integral.
    pub fn scaled(&self, scale: u32) -> Option<BigInt> {
        (self.exp <= scale).then(|| &self.num << (scale - self.exp))
    }

    pub fn from_scaled(v: impl Into<BigInt>, scale: u32) -> Self {
        Dyadic::new(v, scale)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::NAN) / 2f64.powi(self.exp as i32)
    }

    fn align(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, u32) {
        let e = a.exp.max(b.exp);
        (&a.num << (e - a.exp), &b.num << (e - b.exp), e)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, BigInt::one() << self.exp)
        }
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Dyadic::from_int(v)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = Dyadic::align(self, rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = Dyadic::align(self, rhs);
        Dyadic::new(a - b, e)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl Zero for Dyadic {
    fn zero() -> Self {
        Dyadic::from_int(0)
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for Dyadic {
    fn one() -> Self {
        Dyadic::from_int(1)
    }
}

/// Square matrix with row-major storage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    order: usize,
    entries: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RationalMatrix = Matrix<BigRational>;
pub type DyadicMatrix = Matrix<Dyadic>;

impl<T> Matrix<T> {
    pub fn new(order: usize, entries: Vec<T>) -> Result<Self> {
        if order == 0 || entries.len() != order * order {
            return Err(Error::Shape(format!(
                "{} entries cannot form a square matrix of order {}",
                entries.len(),
                order
            )));
        }
        Ok(Matrix { order, entries })
    }

    pub fn from_rows<R, I>(rows: R) -> Result<Self>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator,
        I::Item: Into<T>,
    {
        let mut entries = Vec::new();
        let mut order = 0;
        for row in rows {
            let before = entries.len();
            entries.extend(row.into_iter().map(Into::into));
            let width = entries.len() - before;
            if order == 0 {
                order = width;
            } else if width != order {
                return Err(Error::Shape("ragged rows".into()));
            }
        }
        Matrix::new(order, entries)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.entries[row * self.order + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.entries[row * self.order + col] = value;
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.entries[row * self.order..(row + 1) * self.order]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.entries.chunks(self.order)
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            order: self.order,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(order: usize) -> Self {
        let mut m = Matrix::zeros(order);
        for i in 0..order {
            m.set(i, i, T::one());
        }
        m
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(order: usize) -> Self {
        Matrix {
            order,
            entries: vec![T::zero(); order * order],
        }
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    /// Exact product `self · rhs`.
    pub fn mul(&self, rhs: &Matrix<T>) -> Result<Matrix<T>> {
        if self.order != rhs.order {
            return Err(Error::Shape(format!(
                "cannot multiply orders {} and {}",
                self.order, rhs.order
            )));
        }
        let n = self.order;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + self.get(i, k) * rhs.get(k, j);
                }
                out.push(acc);
            }
        }
        Ok(Matrix {
            order: n,
            entries: out,
        })
    }
}

impl IntMatrix {
    pub fn from_i64_rows<const N: usize>(rows: [[i64; N]; N]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v))))
            .expect("array rows are square")
    }

    /// Exact power by repeated squaring.
    pub fn pow(&self, mut exp: u64) -> IntMatrix {
        let mut base = self.clone();
        let mut acc = IntMatrix::identity(self.order);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).expect("same order");
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base).expect("same order");
            }
        }
        acc
    }

    pub fn to_rational(&self) -> RationalMatrix {
        self.map(|v| BigRational::from_integer(v.clone()))
    }

    /// Fraction-free Gauss-Jordan elimination.
    ///
    /// Returns `(t, d)` with `t · self = d · I` and `d != 0`, so the inverse
    /// is `t / d`. `d` equals the determinant up to sign.
    pub fn fraction_free_inverse(&self) -> Option<(IntMatrix, BigInt)> {
        let n = self.order;
        let w = 2 * n;
        let mut m: Vec<BigInt> = Vec::with_capacity(n * w);
        for i in 0..n {
            m.extend(self.row(i).iter().cloned());
            m.extend((0..n).map(|j| {
                if i == j {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            }));
        }
        let mut prev = BigInt::one();
        for k in 0..n {
            let pivot = (k..n).find(|&r| !m[r * w + k].is_zero())?;
            if pivot != k {
                for j in 0..w {
                    m.swap(k * w + j, pivot * w + j);
                }
            }
            let pkk = m[k * w + k].clone();
            for i in (0..n).filter(|&i| i != k) {
                let factor = m[i * w + k].clone();
                for j in 0..w {
                    let v = &pkk * &m[i * w + j] - &factor * &m[k * w + j];
                    let (q, r) = v.div_rem(&prev);
                    debug_assert!(r.is_zero(), "fraction-free division must be exact");
                    m[i * w + j] = q;
                }
            }
            prev = pkk;
        }
        // Every diagonal entry now equals the last pivot.
        let t: Vec<BigInt> = (0..n)
            .flat_map(|i| m[i * w + n..(i + 1) * w].to_vec())
            .collect();
        Some((
            Matrix {
                order: n,
                entries: t,
            },
            prev,
        ))
    }

    pub fn determinant(&self) -> BigInt {
        let n = self.order;
        let mut m = self.entries.clone();
        let mut prev = BigInt::one();
        let mut negate = false;
        for k in 0..n {
            let Some(pivot) = (k..n).find(|&r| !m[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            if pivot != k {
                for j in 0..n {
                    m.swap(k * n + j, pivot * n + j);
                }
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[k * n + k] * &m[i * n + j] - &m[i * n + k] * &m[k * n + j];
                    m[i * n + j] = v / &prev;
                }
            }
            prev = m[k * n + k].clone();
        }
        if negate {
            -prev
        } else {
            prev
        }
    }
}

impl DyadicMatrix {
    pub fn from_int_matrix(m: &IntMatrix) -> Self {
        m.map(|v| Dyadic::from_int(v.clone()))
    }

    /// Largest reduced denominator exponent over all entries.
    pub fn max_exponent(&self) -> u32 {
        self.entries.iter().map(Dyadic::exponent).max().unwrap_or(0)
    }

    /// `self · 2^scale` as an integer matrix, if every entry allows it.
    pub fn scaled(&self, scale: u32) -> Option<IntMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|d| d.scaled(scale))
            .collect::<Option<Vec<_>>>()?;
        Some(Matrix {
            order: self.order,
            entries,
        })
    }

    pub fn to_rational(&self) -> RationalMatrix {
        self.map(Dyadic::to_rational)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Display for DyadicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
