//! Pairwise commutation phases and normal ordering of gate words.
//!
//! A table entry `e[j][k]` means `U_j U_k = ω^{e[j][k]·y} U_k U_j` with
//! `ω = e^{2πi/n!}`. Only exponents are tracked; `y` stays symbolic.
//!
//! Words are written as products, left to right: `[1, 2, 0]` is `U_1 U_2 U_0`.
//! Swapping an adjacent pair `(a, b)` into `(b, a)` picks up `e[a][b]`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numsys::{factorial, NumError};
use crate::perms::PermWord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CommutationError {
    #[error("gate index {index} repeated in word")]
    Duplicate { index: usize },
    #[error("gate index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("table is not antisymmetric at ({j},{k})")]
    NotAntisymmetric { j: usize, k: usize },
    #[error("table shape does not match n = {n}")]
    Shape { n: usize },
    #[error("table diagonal entry ({j},{j}) is nonzero")]
    Diagonal { j: usize },
    #[error(transparent)]
    Num(#[from] NumError),
}

/// An exponent `p` standing for the phase `ω^{p·y}`, reduced mod `n!`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseExp {
    value: u64,
    modulus: u64,
}

impl PhaseExp {
    pub fn new(value: u64, modulus: u64) -> Self {
        assert!(modulus > 0, "zero modulus");
        Self { value: value % modulus, modulus }
    }

    pub fn zero(modulus: u64) -> Self {
        Self::new(0, modulus)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn add(self, other: u64) -> Self {
        Self::new(add_mod(self.value, other % self.modulus, self.modulus), self.modulus)
    }

    pub fn sub(self, other: u64) -> Self {
        self.add(neg_mod(other % self.modulus, self.modulus))
    }

    pub fn neg(self) -> Self {
        Self::new(neg_mod(self.value, self.modulus), self.modulus)
    }

    /// Multiplies the exponent by `s` (e.g. substituting a concrete `y`).
    pub fn scale(self, s: u64) -> Self {
        Self::new(mul_mod(self.value, s, self.modulus), self.modulus)
    }
}

impl fmt::Display for PhaseExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub(crate) fn neg_mod(a: u64, m: u64) -> u64 {
    (m - a % m) % m
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Antisymmetric exponent matrix modulo `n!`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutationTable {
    n: usize,
    modulus: u64,
    e: Vec<u64>,
}

impl CommutationTable {
    /// Builds a table from its strictly upper triangle; `upper(j, k)` is
    /// called for `j < k`.
    pub fn from_upper(n: usize, mut upper: impl FnMut(usize, usize) -> u64) -> Result<Self, CommutationError> {
        let modulus = factorial(n)?;
        let mut e = vec![0; n * n];
        for j in 0..n {
            for k in j + 1..n {
                let v = upper(j, k) % modulus;
                e[j * n + k] = v;
                e[k * n + j] = neg_mod(v, modulus);
            }
        }
        Ok(Self { n, modulus, e })
    }

    /// Checks a full matrix (row-major, `n × n`) for antisymmetry mod `n!`.
    pub fn from_matrix(n: usize, rows: &[Vec<u64>]) -> Result<Self, CommutationError> {
        let modulus = factorial(n)?;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(CommutationError::Shape { n });
        }
        let mut e = vec![0; n * n];
        for j in 0..n {
            if rows[j][j] % modulus != 0 {
                return Err(CommutationError::Diagonal { j });
            }
            for k in 0..n {
                e[j * n + k] = rows[j][k] % modulus;
            }
        }
        for j in 0..n {
            for k in j + 1..n {
                if add_mod(e[j * n + k], e[k * n + j], modulus) != 0 {
                    return Err(CommutationError::NotAntisymmetric { j, k });
                }
            }
        }
        Ok(Self { n, modulus, e })
    }

    /// Uniformly random antisymmetric table.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, CommutationError> {
        let modulus = factorial(n)?;
        Self::from_upper(n, |_, _| rng.gen_range(0..modulus))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `e[j][k]`; zero on the diagonal.
    pub fn get(&self, j: usize, k: usize) -> u64 {
        self.e[j * self.n + k]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.e.chunks(self.n).map(<[u64]>::to_vec).collect()
    }

    fn check_indices(&self, word: &[usize]) -> Result<(), CommutationError> {
        match word.iter().find(|&&g| g >= self.n) {
            Some(&index) => Err(CommutationError::IndexOutOfRange { index, n: self.n }),
            None => Ok(()),
        }
    }
}

/// `e[j][k] = k!` for `j < k`.
pub fn factoradic_table(n: usize) -> Result<CommutationTable, CommutationError> {
    let facts: Vec<u64> = (0..n).map(factorial).collect::<Result<_, _>>()?;
    CommutationTable::from_upper(n, |_, k| facts[k])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Descending,
    Ascending,
}

impl Direction {
    fn out_of_order(self, left: usize, right: usize) -> bool {
        match self {
            Direction::Descending => left < right,
            Direction::Ascending => left > right,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalOrderResult {
    pub phase: PhaseExp,
    pub word: Vec<usize>,
}

/// Insertion-sorts `word` into `direction`, summing `e[a][b]` for each
/// adjacent `(a, b) → (b, a)` step.
pub fn normal_order(
    word: &[usize],
    table: &CommutationTable,
    direction: Direction,
) -> Result<NormalOrderResult, CommutationError> {
    table.check_indices(word)?;
    let mut seen = vec![false; table.n];
    for &g in word {
        if std::mem::replace(&mut seen[g], true) {
            return Err(CommutationError::Duplicate { index: g });
        }
    }
    let mut w = word.to_vec();
    let mut phase = PhaseExp::zero(table.modulus);
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && direction.out_of_order(w[j - 1], w[j]) {
            phase = phase.add(table.get(w[j - 1], w[j]));
            w.swap(j - 1, j);
            j -= 1;
        }
    }
    Ok(NormalOrderResult { phase, word: w })
}

/// Phase of `word` relative to the descending word, via the closed form
/// `Σ_{p<q, w[p]<w[q]} e[w[p]][w[q]]`.
pub fn perm_phase_exponent(word: &PermWord, table: &CommutationTable) -> PhaseExp {
    let w = word.order();
    assert_eq!(w.len(), table.n, "word size does not match table");
    let mut acc = 0u64;
    for p in 0..w.len() {
        for q in p + 1..w.len() {
            if w[p] < w[q] {
                acc = add_mod(acc, table.get(w[p], w[q]), table.modulus);
            }
        }
    }
    PhaseExp::new(acc, table.modulus)
}

/// Reference oracle: repeated bubble-sort passes toward descending order,
/// one table lookup per swap.
pub fn brute_force_phase(word: &[usize], table: &CommutationTable) -> PhaseExp {
    let mut w = word.to_vec();
    let mut total = 0u64;
    loop {
        let mut swapped = false;
        for p in 0..w.len().saturating_sub(1) {
            if w[p] < w[p + 1] {
                total = add_mod(total, table.get(w[p], w[p + 1]), table.modulus);
                w.swap(p, p + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    PhaseExp::new(total, table.modulus)
}

/// Exponent `p` with `product(from) = ω^{p·y} product(to)`, or `None` when
/// `to` is not a rearrangement of `from`. Repeated symbols are allowed and
/// matched in order of occurrence.
pub fn relative_phase(from: &[usize], to: &[usize], table: &CommutationTable) -> Option<u64> {
    if from.len() != to.len() || from.iter().chain(to).any(|&g| g >= table.n) {
        return None;
    }
    // Queue of target positions per symbol, consumed left to right.
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); table.n];
    for (pos, &g) in to.iter().enumerate().rev() {
        slots[g].push(pos);
    }
    let mut dest = Vec::with_capacity(from.len());
    for &g in from {
        dest.push(slots[g].pop()?);
    }
    let mut acc = 0u64;
    for p in 0..from.len() {
        for q in p + 1..from.len() {
            if dest[p] > dest[q] {
                acc = add_mod(acc, table.get(from[p], from[q]), table.modulus);
            }
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn factoradic_table_small() {
        let t = factoradic_table(3).unwrap();
        assert_eq!((t.get(0, 1), t.get(0, 2), t.get(1, 2)), (1, 2, 2));
        let t4 = factoradic_table(4).unwrap();
        assert_eq!(
            [t4.get(0, 3), t4.get(1, 3), t4.get(2, 3), t4.get(0, 2), t4.get(1, 2), t4.get(0, 1)],
            [6, 6, 6, 2, 2, 1]
        );
        assert_eq!(t4.get(3, 0), 18);
    }

    #[test]
    fn antisymmetry_to_eight() {
        for n in 2..=8 {
            let t = factoradic_table(n).unwrap();
            for j in 0..n {
                assert_eq!(t.get(j, j), 0);
                for k in 0..n {
                    assert_eq!((t.get(j, k) + t.get(k, j)) % t.modulus(), 0);
                }
            }
        }
    }

    #[test]
    fn from_matrix_rejects_asymmetric() {
        let bad = vec![vec![0, 1], vec![0, 0]];
        assert_eq!(
            CommutationTable::from_matrix(2, &bad),
            Err(CommutationError::NotAntisymmetric { j: 0, k: 1 })
        );
        let good = vec![vec![0, 1], vec![1, 0]];
        assert!(CommutationTable::from_matrix(2, &good).is_ok());
    }

    #[test]
    fn descending_is_fixed() {
        let t = factoradic_table(5).unwrap();
        let r = normal_order(&[4, 3, 2, 1, 0], &t, Direction::Descending).unwrap();
        assert_eq!(r.phase.value(), 0);
        assert_eq!(r.word, vec![4, 3, 2, 1, 0]);
    }

    #[test]
    fn four_gate_example() {
        // U1 U2 U0 U3 → U3 U2 U1 U0 crosses (0,3), (2,3), (1,3), (1,2).
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = CommutationTable::random(4, &mut rng).unwrap();
        let r = normal_order(&[1, 2, 0, 3], &t, Direction::Descending).unwrap();
        let m = t.modulus();
        let expect = (t.get(0, 3) + t.get(2, 3) + t.get(1, 3) + t.get(1, 2)) % m;
        assert_eq!(r.phase.value(), expect);
        assert_eq!(r.word, vec![3, 2, 1, 0]);

        let f = factoradic_table(4).unwrap();
        let r = normal_order(&[1, 2, 0, 3], &f, Direction::Descending).unwrap();
        assert_eq!(r.phase.value(), 20);
        assert_eq!(brute_force_phase(&[1, 2, 0, 3], &f).value(), 20);
    }

    #[test]
    fn ascending_three() {
        let t = factoradic_table(3).unwrap();
        let w = PermWord::new(vec![0, 1, 2]).unwrap();
        assert_eq!(perm_phase_exponent(&w, &t).value(), 5);
        assert_eq!(brute_force_phase(w.order(), &t).value(), 5);
        let r = normal_order(&[2, 1, 0], &t, Direction::Ascending).unwrap();
        assert_eq!(r.word, vec![0, 1, 2]);
        assert_eq!(r.phase.value(), 1);
    }

    #[test]
    fn duplicates_rejected() {
        let t = factoradic_table(3).unwrap();
        assert_eq!(
            normal_order(&[1, 0, 1], &t, Direction::Descending),
            Err(CommutationError::Duplicate { index: 1 })
        );
        assert!(matches!(
            normal_order(&[3], &t, Direction::Descending),
            Err(CommutationError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn relative_phase_with_repeats() {
        let t = factoradic_table(3).unwrap();
        // U1 U0 U1 → U1 U1 U0 moves one U0 left past U1: e[0][1].
        assert_eq!(relative_phase(&[1, 0, 1], &[1, 1, 0], &t), Some(1));
        assert_eq!(relative_phase(&[1, 1], &[1, 1], &t), Some(0));
        assert_eq!(relative_phase(&[1, 0], &[1, 1], &t), None);
        assert_eq!(relative_phase(&[1], &[1, 0], &t), None);
    }

    #[test]
    fn relative_phase_matches_difference_of_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..=7);
            let t = CommutationTable::random(n, &mut rng).unwrap();
            let mut a: Vec<usize> = (0..n).collect();
            let mut b = a.clone();
            a.shuffle(&mut rng);
            b.shuffle(&mut rng);
            let pa = brute_force_phase(&a, &t);
            let pb = brute_force_phase(&b, &t);
            assert_eq!(relative_phase(&a, &b, &t), Some(pa.sub(pb.value()).value()));
        }
    }

    #[test]
    fn phase_arithmetic() {
        let p = PhaseExp::new(5, 6);
        assert_eq!(p.add(3).value(), 2);
        assert_eq!(p.sub(7).value(), 4);
        assert_eq!(p.neg().value(), 1);
        assert_eq!(p.scale(5).value(), 1);
    }
}
