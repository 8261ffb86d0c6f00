//! Permutation words and labelings `x ↦ Π_x`.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::commutation::{add_mod, brute_force_phase, neg_mod, CommutationTable};
use crate::numsys::{factorial, to_factoradic, NumError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("word {0:?} is not a permutation of 0..n")]
    NotPermutation(Vec<usize>),
    #[error("word has size {got}, expected {expected}")]
    WrongSize { expected: usize, got: usize },
    #[error("labeling needs n >= {min}, got {n}")]
    TooSmall { n: usize, min: usize },
    #[error("labeling has {got} words, expected n! = {expected}")]
    WrongCount { expected: u64, got: usize },
    #[error("word {0} appears more than once in the labeling")]
    NotBijective(PermWord),
    #[error("enumeration is only supported for n = 3, got {0}")]
    Unsupported(usize),
    #[error("labeling table line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Num(#[from] NumError),
}

/// A product `U_{σ(n-1)} … U_{σ(0)}` stored left to right, so the last entry
/// acts first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PermWord {
    order: Vec<usize>,
}

impl PermWord {
    pub fn new(order: Vec<usize>) -> Result<Self, PermError> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &g in &order {
            if g >= n || std::mem::replace(&mut seen[g], true) {
                return Err(PermError::NotPermutation(order));
            }
        }
        Ok(Self { order })
    }

    /// `U_{n-1} … U_1 U_0`.
    pub fn descending(n: usize) -> Self {
        Self { order: (0..n).rev().collect() }
    }

    /// `U_0 U_1 … U_{n-1}`.
    pub fn ascending(n: usize) -> Self {
        Self { order: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Product order, left to right.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `σ(i)`: the gate acting `i`-th (0-based) in time.
    pub fn sigma(&self, i: usize) -> usize {
        self.order[self.order.len() - 1 - i]
    }

    /// Gates in the order they act.
    pub fn application_order(&self) -> Vec<usize> {
        self.order.iter().rev().copied().collect()
    }

    /// Applies a relabeling of gate indices, `U_g ↦ U_{pi[g]}`.
    pub fn relabel(&self, pi: &[usize]) -> Self {
        Self { order: self.order.iter().map(|&g| pi[g]).collect() }
    }
}

impl fmt::Display for PermWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.order {
            write!(f, "U{g}")?;
        }
        Ok(())
    }
}

/// A bijection between `{0, …, n!-1}` and the permutation words on `n` gates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    n: usize,
    name: String,
    words: Vec<PermWord>,
    index: HashMap<PermWord, u64>,
}

impl Labeling {
    /// `words[x]` is `Π_x`.
    pub fn from_words(name: impl Into<String>, n: usize, words: Vec<PermWord>) -> Result<Self, PermError> {
        if n < 1 {
            return Err(PermError::TooSmall { n, min: 1 });
        }
        let expected = factorial(n)?;
        if words.len() as u64 != expected {
            return Err(PermError::WrongCount { expected, got: words.len() });
        }
        let mut index = HashMap::with_capacity(words.len());
        for (x, w) in words.iter().enumerate() {
            if w.n() != n {
                return Err(PermError::WrongSize { expected: n, got: w.n() });
            }
            if index.insert(w.clone(), x as u64).is_some() {
                return Err(PermError::NotBijective(w.clone()));
            }
        }
        Ok(Self { n, name: name.into(), words, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Number of labels, `n!`.
    pub fn size(&self) -> u64 {
        self.words.len() as u64
    }

    pub fn map(&self, x: u64) -> &PermWord {
        &self.words[x as usize]
    }

    pub fn words(&self) -> &[PermWord] {
        &self.words
    }

    /// Inverse lookup.
    pub fn label_of(&self, w: &PermWord) -> Result<u64, PermError> {
        if w.n() != self.n {
            return Err(PermError::WrongSize { expected: self.n, got: w.n() });
        }
        Ok(self.index[w])
    }

    /// Relabels gates by `pi` and multiplies every label by `unit`
    /// (which must be invertible mod `n!` for the result to be bijective).
    pub fn transformed(&self, pi: &[usize], unit: u64) -> Result<Self, PermError> {
        let m = self.size();
        let mut words = vec![PermWord::descending(0); self.words.len()];
        for (x, w) in self.words.iter().enumerate() {
            let nx = ((x as u128 * unit as u128) % m as u128) as usize;
            words[nx] = w.relabel(pi);
        }
        let name = format!("{}*{}@{:?}", self.name, unit, pi);
        Self::from_words(name, self.n, words)
    }

    /// One line per label: `x g0 g1 … g_{n-1}`.
    pub fn to_table_text(&self) -> String {
        let mut out = String::new();
        for (x, w) in self.words.iter().enumerate() {
            out.push_str(&x.to_string());
            for g in w.order() {
                out.push(' ');
                out.push_str(&g.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`Labeling::to_table_text`]. Blank lines
    /// and `#` comments are ignored; lines may appear in any order.
    pub fn parse_table_text(name: impl Into<String>, text: &str) -> Result<Self, PermError> {
        let mut entries: Vec<(u64, PermWord)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| PermError::Parse { line: lineno + 1, msg };
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| perr(format!("{t:?}: {e}"))))
                .collect::<Result<_, _>>()?;
            let (&x, word) = nums.split_first().ok_or_else(|| perr("empty".into()))?;
            let w = PermWord::new(word.to_vec()).map_err(|e| perr(e.to_string()))?;
            entries.push((x as u64, w));
        }
        let n = entries.first().map(|(_, w)| w.n()).ok_or(PermError::Parse { line: 0, msg: "no entries".into() })?;
        let count = factorial(n)?;
        let mut slots: Vec<Option<PermWord>> = vec![None; entries.len()];
        if entries.len() as u64 != count {
            return Err(PermError::WrongCount { expected: count, got: entries.len() });
        }
        for (x, w) in entries {
            let slot = slots.get_mut(x as usize).ok_or(PermError::Parse { line: 0, msg: format!("label {x} >= n!") })?;
            if slot.replace(w).is_some() {
                return Err(PermError::Parse { line: 0, msg: format!("label {x} listed twice") });
            }
        }
        let words = slots.into_iter().map(|w| w.expect("all labels present")).collect();
        Self::from_words(name, n, words)
    }
}

/// A random labeling consistent whenever `l` is: gates are relabeled by a
/// random permutation and labels multiplied by a random unit mod `n!`.
pub fn random_equivalent<R: rand::Rng + ?Sized>(l: &Labeling, rng: &mut R) -> Result<Labeling, PermError> {
    use rand::seq::SliceRandom;
    let m = l.size();
    let mut pi: Vec<usize> = (0..l.n).collect();
    pi.shuffle(rng);
    let unit = loop {
        let u = rng.gen_range(1..m.max(2));
        if gcd(u, m) == 1 {
            break u;
        }
    };
    l.transformed(&pi, unit)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `Π_x` obtained from `U_{n-1} … U_0` by moving `U_1` right `a_1` places,
/// then `U_2` right `a_2` places, and so on.
pub fn factoradic_labeling(n: usize) -> Result<Labeling, PermError> {
    if n < 2 {
        return Err(PermError::TooSmall { n, min: 2 });
    }
    let count = factorial(n)?;
    let words = (0..count)
        .map(|x| {
            let digits = to_factoradic(x, n)?;
            let mut w: Vec<usize> = (0..n).rev().collect();
            for k in 1..n {
                let mut pos = w.iter().position(|&g| g == k).expect("gate present");
                for _ in 0..digits.digit(k) {
                    w.swap(pos, pos + 1);
                    pos += 1;
                }
            }
            Ok(PermWord { order: w })
        })
        .collect::<Result<Vec<_>, NumError>>()?;
    Labeling::from_words("factoradic", n, words)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub pair: (usize, usize),
    /// The exponent derived from the reference pair of words.
    pub derived: u64,
    /// A conflicting exponent implied elsewhere in the labeling.
    pub conflicting: u64,
    /// The words `… U_j U_k …` and `… U_k U_j …` that imply `conflicting`.
    pub words: (PermWord, PermWord),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsistencyResult {
    Consistent { table: CommutationTable },
    Contradiction { witness: Witness },
}

impl ConsistencyResult {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ConsistencyResult::Consistent { .. })
    }

    pub fn table(&self) -> Option<&CommutationTable> {
        match self {
            ConsistencyResult::Consistent { table } => Some(table),
            ConsistencyResult::Contradiction { .. } => None,
        }
    }
}

fn pair_words(n: usize, j: usize, k: usize) -> (PermWord, PermWord) {
    let rest: Vec<usize> = (0..n).rev().filter(|&g| g != j && g != k).collect();
    let mut a = rest.clone();
    a.extend([j, k]);
    let mut b = rest;
    b.extend([k, j]);
    (PermWord { order: a }, PermWord { order: b })
}

/// Reads the pairwise exponents off the words `… U_0 U_j U_k` and
/// `… U_0 U_k U_j`, then checks every label against the phase those
/// exponents predict relative to `Π_0`.
pub fn validate_labeling(l: &Labeling) -> Result<ConsistencyResult, PermError> {
    let n = l.n;
    let m = l.size();
    let table = CommutationTable::from_upper(n, |j, k| {
        let (a, b) = pair_words(n, j, k);
        add_mod(l.index[&a], neg_mod(l.index[&b], m), m)
    })
    .map_err(|_| PermError::TooSmall { n, min: 1 })?;

    let base = brute_force_phase(l.map(0).order(), &table);
    let all_match = (0..m).all(|x| brute_force_phase(l.map(x).order(), &table).sub(base.value()).value() == x);
    if all_match {
        return Ok(ConsistencyResult::Consistent { table });
    }
    Ok(ConsistencyResult::Contradiction { witness: find_witness(l, &table) })
}

fn find_witness(l: &Labeling, table: &CommutationTable) -> Witness {
    let n = l.n;
    let m = l.size();
    for j in 0..n {
        for k in j + 1..n {
            for w in &l.words {
                let o = w.order();
                for p in 0..n - 1 {
                    if o[p] == j && o[p + 1] == k {
                        let mut swapped = o.to_vec();
                        swapped.swap(p, p + 1);
                        let swapped = PermWord { order: swapped };
                        let implied = add_mod(l.index[w], neg_mod(l.index[&swapped], m), m);
                        if implied != table.get(j, k) {
                            return Witness {
                                pair: (j, k),
                                derived: table.get(j, k),
                                conflicting: implied,
                                words: (w.clone(), swapped),
                            };
                        }
                    }
                }
            }
        }
    }
    unreachable!("labeling failed the phase check but every adjacent swap agrees with the table")
}

/// All consistent labelings of three gates with `Π_0 = U_2 U_1 U_0`, in
/// lexicographic order of the label assignment.
pub fn enumerate_valid_labelings(n: usize) -> Result<Vec<Labeling>, PermError> {
    if n != 3 {
        return Err(PermError::Unsupported(n));
    }
    let base = factoradic_labeling(3)?;
    let others: Vec<&PermWord> = base.words.iter().skip(1).collect();
    let mut out = Vec::new();
    for labels in (1..6usize).permutations(5) {
        let mut words = vec![PermWord::descending(3); 6];
        for (w, &x) in others.iter().zip(&labels) {
            words[x] = (*w).clone();
        }
        let idx = out.len();
        let l = Labeling::from_words(format!("enumerate-index:{idx}"), 3, words)?;
        if validate_labeling(&l)?.is_consistent() {
            out.push(l);
        }
    }
    for (i, l) in out.iter_mut().enumerate() {
        l.name = format!("enumerate-index:{i}");
    }
    Ok(out)
}
