//! Exact arithmetic in a prime field GF(q) with q < 2^63.
//!
//! [`FieldModulus`] carries the prime and performs every operation;
//! [`FieldElement`] is the canonical representative in `[0, q)`. Products
//! are computed in `u128` so nothing depends on word overflow.
//!
//! The module also hosts the generalized Vandermonde machinery used for
//! reconstruction: [`vandermonde_solve`] recovers the coefficients of a
//! polynomial with a known sparse support, and [`extraction_vector`] returns
//! the weights that pull a single coefficient out of a set of evaluations.

use std::collections::HashSet;
use std::fmt;

use rand_chacha::rand_core::RngCore;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::powersets::ExponentSet;

/// 2^61 - 1.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// An element of GF(q), always reduced below the modulus it was built from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A prime modulus q. Primality is checked on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldModulus {
    q: u64,
    // bit mask covering q - 1, used for rejection sampling
    mask: u64,
}

impl Default for FieldModulus {
    fn default() -> Self {
        Self::mersenne61()
    }
}

impl FieldModulus {
    /// Builds the field GF(q). Moduli of 2^63 or more are rejected so that
    /// sums of two reduced elements always fit in a `u64`.
    pub fn new(q: u64) -> Result<Self> {
        if q >= 1 << 63 || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let bits = 64 - (q - 1).leading_zeros();
        let mask = if bits == 64 {
            u64::MAX
        } else {
            (1u64 << bits) - 1
        };
        Ok(Self { q, mask })
    }

    pub fn mersenne61() -> Self {
        Self::new(MERSENNE_61).expect("2^61 - 1 is prime")
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn element(&self, v: u64) -> FieldElement {
        FieldElement(v % self.q)
    }

    /// Accepts `v` only if it is already canonical.
    pub fn canonical(&self, v: u64) -> Result<FieldElement> {
        if v < self.q {
            Ok(FieldElement(v))
        } else {
            Err(Error::Parse(format!(
                "{v} is not below the modulus {}",
                self.q
            )))
        }
    }

    /// Maps a signed integer into the field.
    pub fn from_i64(&self, v: i64) -> FieldElement {
        let r = v.rem_euclid(self.q as i64);
        FieldElement(r as u64)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 + b.0;
        FieldElement(if s >= self.q { s - self.q } else { s })
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(if a.0 >= b.0 {
            a.0 - b.0
        } else {
            a.0 + self.q - b.0
        })
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if a.0 == 0 {
            a
        } else {
            FieldElement(self.q - a.0)
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(((a.0 as u128 * b.0 as u128) % self.q as u128) as u64)
    }

    pub fn pow(&self, base: FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = FieldElement::ONE;
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// Uniform sample by rejection on the bit length of q - 1.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> FieldElement {
        loop {
            let v = rng.next_u64() & self.mask;
            if v < self.q {
                return FieldElement(v);
            }
        }
    }

    /// Uniform sample from the nonzero elements.
    pub fn sample_nonzero<R: RngCore + ?Sized>(&self, rng: &mut R) -> FieldElement {
        loop {
            let v = self.sample(rng);
            if !v.is_zero() {
                return v;
            }
        }
    }
}

/// Free-function form of [`FieldModulus::inv`].
pub fn fp_inv(a: FieldElement, q: &FieldModulus) -> Result<FieldElement> {
    q.inv(a)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact for
/// every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Worker evaluation points: pairwise distinct and nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationPoints(Vec<FieldElement>);

impl EvaluationPoints {
    pub fn new(alphas: Vec<FieldElement>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(alphas.len());
        for a in &alphas {
            if a.is_zero() || !seen.insert(*a) {
                return Err(Error::InvalidPoints);
            }
        }
        Ok(Self(alphas))
    }

    pub fn as_slice(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The first `n` points.
    pub fn prefix(&self, n: usize) -> &[FieldElement] {
        &self.0[..n.min(self.0.len())]
    }
}

/// Evaluates `sum_k coeffs[k] * x^support[k]`.
pub fn eval_sparse(
    q: &FieldModulus,
    support: &ExponentSet,
    coeffs: &[FieldElement],
    x: FieldElement,
) -> Result<FieldElement> {
    if coeffs.len() != support.len() {
        return Err(Error::LengthMismatch {
            expected: support.len(),
            actual: coeffs.len(),
        });
    }
    Ok(support
        .iter()
        .zip(coeffs)
        .fold(FieldElement::ZERO, |acc, (e, c)| {
            q.add(acc, q.mul(*c, q.pow(x, e)))
        }))
}

/// The matrix `V[n][k] = points[n]^support[k]`.
pub fn generalized_vandermonde(
    q: &FieldModulus,
    points: &[FieldElement],
    support: &ExponentSet,
) -> Matrix {
    let mut v = Matrix::zeros(points.len(), support.len());
    for (n, &a) in points.iter().enumerate() {
        for (k, e) in support.iter().enumerate() {
            v[(n, k)] = q.pow(a, e);
        }
    }
    v
}

fn check_square(points: usize, support: usize) -> Result<()> {
    if points != support {
        return Err(Error::LengthMismatch {
            expected: support,
            actual: points,
        });
    }
    Ok(())
}

/// Recovers the coefficients of a polynomial supported on `support` from its
/// values at `points`.
pub fn vandermonde_solve(
    q: &FieldModulus,
    points: &[FieldElement],
    support: &ExponentSet,
    values: &[FieldElement],
) -> Result<Vec<FieldElement>> {
    check_square(points.len(), support.len())?;
    if values.len() != points.len() {
        return Err(Error::LengthMismatch {
            expected: points.len(),
            actual: values.len(),
        });
    }
    let v = generalized_vandermonde(q, points, support);
    v.solve(q, values)
}

/// Row of `V^{-1}` for `target`: the weights `r` with
/// `sum_n r[n] * P(points[n]) = coeff(P, target)` for every `P` supported on
/// `support`.
pub fn extraction_vector(
    q: &FieldModulus,
    points: &[FieldElement],
    support: &ExponentSet,
    target: u64,
) -> Result<Vec<FieldElement>> {
    let rows = extraction_vectors(q, points, support, &[target])?;
    Ok(rows.into_iter().next().expect("one target requested"))
}

/// [`extraction_vector`] for several targets, sharing a single inversion.
pub fn extraction_vectors(
    q: &FieldModulus,
    points: &[FieldElement],
    support: &ExponentSet,
    targets: &[u64],
) -> Result<Vec<Vec<FieldElement>>> {
    check_square(points.len(), support.len())?;
    let idx = targets
        .iter()
        .map(|&t| support.position(t).ok_or(Error::TargetNotInSupport(t)))
        .collect::<Result<Vec<_>>>()?;
    let inv = generalized_vandermonde(q, points, support).inverse(q)?;
    Ok(idx.into_iter().map(|k| inv.row(k).to_vec()).collect())
}
