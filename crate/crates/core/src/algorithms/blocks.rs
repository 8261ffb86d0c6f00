//! Splitting a permutation into `k̂` blocks of `n̂ = ⌈√n⌉` consecutive
//! positions of `σ`, and the words whose phases add up to that of the whole.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::commutation::{normal_order, perm_phase_exponent, CommutationTable, Direction, PhaseExp};
use crate::perms::PermWord;

/// Smallest `m` with `m² ≥ n`.
pub fn ceil_sqrt(n: usize) -> usize {
    let mut m = (n as f64).sqrt() as usize;
    while m * m < n {
        m += 1;
    }
    while m > 0 && (m - 1) * (m - 1) >= n {
        m -= 1;
    }
    m
}

/// `(n̂, k̂) = (⌈√n⌉, ⌈n/n̂⌉)`.
pub fn block_params(n: usize) -> (usize, usize) {
    let nh = ceil_sqrt(n).max(1);
    (nh, n.div_ceil(nh))
}

/// `σ` positions of block `k`: `[k·n̂, min((k+1)·n̂, n))`.
pub(super) fn block_range(n: usize, k: usize) -> Range<usize> {
    let (nh, _) = block_params(n);
    (k * nh).min(n)..((k + 1) * nh).min(n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDecomposition {
    pub n: usize,
    pub n_hat: usize,
    pub k_hat: usize,
    /// `Π_{x0} … Π_{x,k̂−1}`.
    pub pi_xk: Vec<PermWord>,
    /// `Π̃^r_{x1} … Π̃^r_{x,k̂−1}`.
    pub pi_r_xk: Vec<PermWord>,
}

fn sorted(mut v: Vec<usize>, direction: Direction) -> Vec<usize> {
    match direction {
        Direction::Descending => v.sort_unstable_by(|a, b| b.cmp(a)),
        Direction::Ascending => v.sort_unstable(),
    }
    v
}

/// `Π_{xk} = [σ((k+1)n̂..n) desc] [block k as in w] [σ(0..kn̂) desc]` and
/// `Π̃^r_{xk} = [σ(0..kn̂) asc] [σ(kn̂..n) asc]`.
pub fn decompose_blocks(w: &PermWord) -> BlockDecomposition {
    let n = w.n();
    let (n_hat, k_hat) = block_params(n);
    let sigma = |r: Range<usize>| -> Vec<usize> { r.map(|j| w.sigma(j)).collect() };
    let mut pi_xk = Vec::with_capacity(k_hat);
    let mut pi_r_xk = Vec::with_capacity(k_hat.saturating_sub(1));
    for k in 0..k_hat {
        let r = block_range(n, k);
        let block = &w.order()[n - r.end..n - r.start];
        let mut word = sorted(sigma(r.end..n), Direction::Descending);
        word.extend_from_slice(block);
        word.extend(sorted(sigma(0..r.start), Direction::Descending));
        pi_xk.push(PermWord::new(word).expect("block word is a permutation"));
        if k >= 1 {
            let mut word = sorted(sigma(0..r.start), Direction::Ascending);
            word.extend(sorted(sigma(r.start..n), Direction::Ascending));
            pi_r_xk.push(PermWord::new(word).expect("block word is a permutation"));
        }
    }
    BlockDecomposition { n, n_hat, k_hat, pi_xk, pi_r_xk }
}

/// `Σ_k phase(Π_{xk}) + Σ_k phase_asc(Π̃^r_{xk})`, which equals the
/// descending phase of the decomposed word.
pub fn lemma_phase(d: &BlockDecomposition, table: &CommutationTable) -> PhaseExp {
    let mut total = PhaseExp::zero(table.modulus());
    for w in &d.pi_xk {
        total = total.add(perm_phase_exponent(w, table).value());
    }
    for w in &d.pi_r_xk {
        let r = normal_order(w.order(), table, Direction::Ascending).expect("permutation word");
        total = total.add(r.phase.value());
    }
    total
}
