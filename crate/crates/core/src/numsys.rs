//! Factorial number system and the logarithmic bit basis used by the
//! O(n log n) circuit.
//!
//! Every `x < n!` has a unique factoradic expansion `x = Σ_{k=1}^{n-1} a_k·k!`
//! with `0 ≤ a_k ≤ k`. Each digit `a_k` can further be written with
//! `⌈log₂ n⌉` bits against the weights `⌈k/2^i⌉` (i = 1, 2, …), so that
//!
//! ```text
//! x = Σ_k Σ_i c_{k,i} · ⌈k/2^i⌉ · k!
//! ```
//!
//! That representation is not unique; [`digit_to_bits`] fixes the greedy one
//! (largest weight first), which makes every downstream circuit deterministic.
//!
//! All arithmetic is on `u64` with explicit overflow checks: `21!` does not fit,
//! so any request that would need it is rejected instead of wrapping.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest `n` with `n!` representable in a `u64`.
pub const MAX_FACTORIAL_N: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("value {x} is out of range for n = {n} (need x < n!)")]
    OutOfRange { x: u64, n: usize },
    #[error("digit a_{k} = {digit} is out of range (need 0 <= a_{k} <= {k})")]
    DigitOutOfRange { k: usize, digit: u64 },
    #[error("expected {expected} digits for n = {n}, got {got}")]
    DigitCount { n: usize, expected: usize, got: usize },
    #[error("k = {k} is out of range for n = {n} (need 1 <= k <= n-1)")]
    PlaceOutOfRange { k: usize, n: usize },
    #[error("n! overflows 64 bits for n = {n}")]
    Overflow { n: usize },
    #[error("n must be positive")]
    ZeroN,
}

/// `n!`, or an overflow error for `n > 20`.
pub fn factorial(n: usize) -> Result<u64, NumError> {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k).ok_or(NumError::Overflow { n }))
}

/// `⌈log₂ n⌉` for `n ≥ 1` (so `1 ↦ 0`, `2 ↦ 1`, `4 ↦ 2`, `5 ↦ 3`).
pub fn ceil_log2(n: usize) -> u32 {
    assert!(n >= 1, "ceil_log2 of zero");
    usize::BITS - (n - 1).leading_zeros()
}

/// `⌈k / 2^i⌉`, the weight of bit `c_{k,i}`.
pub fn bit_weight(k: usize, i: u32) -> u64 {
    let div = 1u64 << i;
    (k as u64).div_ceil(div)
}

/// Factoradic digits `a_1, …, a_{n-1}` of some `x < n!`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactoradicDigits {
    n: usize,
    /// `digits[k - 1] = a_k`.
    digits: Vec<u64>,
}

impl FactoradicDigits {
    /// Validates `0 ≤ a_k ≤ k` and the digit count.
    pub fn new(n: usize, digits: Vec<u64>) -> Result<Self, NumError> {
        if n == 0 {
            return Err(NumError::ZeroN);
        }
        if digits.len() != n - 1 {
            return Err(NumError::DigitCount { n, expected: n - 1, got: digits.len() });
        }
        for (idx, &d) in digits.iter().enumerate() {
            let k = idx + 1;
            if d > k as u64 {
                return Err(NumError::DigitOutOfRange { k, digit: d });
            }
        }
        Ok(Self { n, digits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The digit `a_k` for `1 ≤ k ≤ n-1`.
    pub fn digit(&self, k: usize) -> u64 {
        self.digits[k - 1]
    }

    /// Digits ordered `a_1, a_2, …`.
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }
}

/// Factoradic expansion of `x` for the given `n`.
pub fn to_factoradic(x: u64, n: usize) -> Result<FactoradicDigits, NumError> {
    if n == 0 {
        return Err(NumError::ZeroN);
    }
    let limit = factorial(n)?;
    if x >= limit {
        return Err(NumError::OutOfRange { x, n });
    }
    // Peel off radices 2, 3, …, n: the remainder mod (k+1) is a_k.
    let mut rest = x;
    let mut digits = Vec::with_capacity(n - 1);
    for k in 1..n {
        let radix = k as u64 + 1;
        digits.push(rest % radix);
        rest /= radix;
    }
    debug_assert_eq!(rest, 0);
    Ok(FactoradicDigits { n, digits })
}

/// `Σ a_k·k!`; re-checks the digit invariants since the value may have been
/// deserialized.
pub fn from_factoradic(d: &FactoradicDigits) -> Result<u64, NumError> {
    let checked = FactoradicDigits::new(d.n, d.digits.clone())?;
    let mut total = 0u64;
    let mut fact = 1u64;
    for (idx, &a) in checked.digits.iter().enumerate() {
        let k = idx as u64 + 1;
        fact = fact.checked_mul(k).ok_or(NumError::Overflow { n: d.n })?;
        total = total
            .checked_add(a.checked_mul(fact).ok_or(NumError::Overflow { n: d.n })?)
            .ok_or(NumError::Overflow { n: d.n })?;
    }
    Ok(total)
}

/// Greedy bit expansion of one factoradic digit: `c_{k,i} = 1` iff what is
/// left of `a_k` after bits `1..i` still covers `⌈k/2^i⌉`.
///
/// Returns `⌈log₂ n⌉` bits, `bits[i - 1] = c_{k,i}`.
pub fn digit_to_bits(a_k: u64, k: usize, n: usize) -> Result<Vec<bool>, NumError> {
    if n == 0 {
        return Err(NumError::ZeroN);
    }
    if k == 0 || k >= n {
        return Err(NumError::PlaceOutOfRange { k, n });
    }
    if a_k > k as u64 {
        return Err(NumError::DigitOutOfRange { k, digit: a_k });
    }
    let width = ceil_log2(n);
    let mut remaining = a_k;
    let bits = (1..=width)
        .map(|i| {
            let w = bit_weight(k, i);
            let take = remaining >= w;
            if take {
                remaining -= w;
            }
            take
        })
        .collect();
    debug_assert_eq!(remaining, 0, "greedy expansion left a remainder");
    Ok(bits)
}

/// The `(n-1)·⌈log₂ n⌉` control bits `c_{k,i}` of some `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitBasisRep {
    n: usize,
    width: u32,
    /// Row-major by `k`: `bits[(k - 1) * width + (i - 1)] = c_{k,i}`.
    bits: Vec<bool>,
}

impl BitBasisRep {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `î = ⌈log₂ n⌉`.
    pub fn width(&self) -> u32 {
        self.width
    }

    /// Number of bit slots, always `(n-1)·⌈log₂ n⌉`.
    pub fn slot_count(&self) -> usize {
        self.bits.len()
    }

    pub fn bit(&self, k: usize, i: u32) -> bool {
        assert!(k >= 1 && k < self.n && i >= 1 && i <= self.width, "bit ({k},{i}) out of range");
        self.bits[(k - 1) * self.width as usize + (i as usize - 1)]
    }

    /// Iterates `((k, i), c_{k,i})` in `k`-major order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, u32), bool)> + '_ {
        let w = self.width as usize;
        self.bits
            .iter()
            .enumerate()
            .map(move |(idx, &b)| ((idx / w + 1, (idx % w) as u32 + 1), b))
    }

    /// `Σ c_{k,i}·⌈k/2^i⌉·k!`.
    pub fn evaluate(&self) -> Result<u64, NumError> {
        let mut total = 0u64;
        for ((k, i), b) in self.iter() {
            if b {
                let term = bit_weight(k, i)
                    .checked_mul(factorial(k)?)
                    .ok_or(NumError::Overflow { n: self.n })?;
                total = total.checked_add(term).ok_or(NumError::Overflow { n: self.n })?;
            }
        }
        Ok(total)
    }
}

/// Canonical (greedy) bit-basis representation of `x`.
pub fn to_bit_basis(x: u64, n: usize) -> Result<BitBasisRep, NumError> {
    let digits = to_factoradic(x, n)?;
    let width = ceil_log2(n);
    let mut bits = Vec::with_capacity((n - 1) * width as usize);
    for k in 1..n {
        bits.extend(digit_to_bits(digits.digit(k), k, n)?);
    }
    Ok(BitBasisRep { n, width, bits })
}
