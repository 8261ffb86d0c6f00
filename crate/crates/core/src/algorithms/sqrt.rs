//! The `O(n√n)` circuit for arbitrary labelings.
//!
//! Wires `Ψ_0 … Ψ_{k̂−1}`, `Φ_1 … Φ_{k̂−1}` and `a_0 … a_{n−1}`. For every
//! `x`, `Ψ_k` ends with `Π_{xk}` and `Φ_k` with `Π̃^r_{xk}`, while `a_i` ends
//! with `U_i` repeated `n̂ + 2k̂ − 3` times.

use std::sync::Arc;

use super::blocks::{block_params, block_range};
use super::AlgorithmError;
use crate::circuit::{Circuit, CircuitBuilder, ControlDescriptor, Family, Gate, WireId, WireKind, NO_ROUTE};
use crate::perms::{Labeling, PermWord};

struct Builder<'a> {
    b: CircuitBuilder,
    ctrl: WireId,
    aux: Vec<WireId>,
    words: &'a [PermWord],
    /// `pos[x][g]`: time position of `U_g` in `Π_x`, i.e. `σ_x^{-1}(g)`.
    pos: Vec<Vec<u8>>,
    step: usize,
}

impl Builder<'_> {
    /// Calls every `U_i` once on `a_i` in the given order; before each call,
    /// `target` swaps onto `a_i` whenever `σ_x^{-1}(i)` lies in `range`.
    fn sweep(&mut self, target: WireId, ascending: bool, range: std::ops::Range<usize>) {
        let n = self.aux.len();
        let order: Vec<usize> = if ascending { (0..n).collect() } else { (0..n).rev().collect() };
        for i in order {
            let route: Arc<[u8]> =
                self.pos.iter().map(|p| if range.contains(&(p[i] as usize)) { 0 } else { NO_ROUTE }).collect();
            let swap = Gate::SwitchSwap { control: self.ctrl, step: self.step, target, candidates: vec![self.aux[i]], route };
            self.step += 1;
            self.b.push(swap.clone());
            self.b.apply(i, self.aux[i]);
            self.b.push(swap);
        }
    }
}

pub fn sqrt_circuit(l: &Labeling) -> Result<Circuit, AlgorithmError> {
    sqrt_circuit_for_words(l.n(), l.words())
}

/// The same circuit with control value `x` selecting `words[x]`. The gate
/// sequence depends only on `n`; the words fix the routes.
pub fn sqrt_circuit_for_words(n: usize, words: &[PermWord]) -> Result<Circuit, AlgorithmError> {
    if words.iter().any(|w| w.n() != n) {
        return Err(AlgorithmError::LabelingSize { expected: n, got: words.iter().map(PermWord::n).find(|&m| m != n).unwrap_or(n) });
    }
    if n < 2 {
        return Err(AlgorithmError::Unsupported { what: "sqrt circuit", n });
    }
    if n > u8::MAX as usize {
        return Err(AlgorithmError::Unsupported { what: "sqrt circuit (route width)", n });
    }
    let (n_hat, k_hat) = block_params(n);
    let mut b = CircuitBuilder::new(format!("sqrt-{n}"), Family::Sqrt, n);
    let ctrl = b.wire(WireKind::ControlQudit { dim: words.len() as u64 }, "x");
    let psi: Vec<WireId> = (0..k_hat).map(|k| b.wire(WireKind::Target, format!("Ψ_{k}"))).collect();
    let phi: Vec<WireId> = (1..k_hat).map(|k| b.wire(WireKind::Target, format!("Φ_{k}"))).collect();
    let aux: Vec<WireId> = (0..n).map(|i| b.wire(WireKind::Auxiliary, format!("a_{i}"))).collect();
    let pos = words
        .iter()
        .map(|w| {
            let mut p = vec![0u8; n];
            for j in 0..n {
                p[w.sigma(j)] = j as u8;
            }
            p
        })
        .collect();
    let mut s = Builder { b, ctrl, aux: aux.clone(), words, pos, step: 0 };

    // Part 1: the lower gates onto Ψ_k, the upper gates (descending) onto Φ_k.
    for k in 1..k_hat {
        let start = block_range(n, k).start;
        s.sweep(psi[k], true, 0..start);
    }
    for k in 1..k_hat {
        let start = block_range(n, k).start;
        s.sweep(phi[k - 1], false, start..n);
    }

    // Part 2: block k in its original order onto Ψ_k, all blocks in parallel.
    for i in 0..n_hat {
        let mut swaps = Vec::new();
        for (k, &target) in psi.iter().enumerate() {
            let j = block_range(n, k).start + i;
            if j < block_range(n, k).end {
                let route: Arc<[u8]> = s.words.iter().map(|w| w.sigma(j) as u8).collect();
                swaps.push(Gate::SwitchSwap { control: ctrl, step: s.step, target, candidates: aux.clone(), route });
            }
        }
        s.step += 1;
        for g in &swaps {
            s.b.push(g.clone());
        }
        for (g, &a) in aux.iter().enumerate() {
            s.b.apply(g, a);
        }
        for g in swaps {
            s.b.push(g);
        }
    }

    // Part 3: the upper gates (ascending) onto Ψ_k, the lower gates
    // (descending) onto Φ_k.
    for k in 0..k_hat.saturating_sub(1) {
        let end = block_range(n, k).end;
        s.sweep(psi[k], true, end..n);
    }
    for k in 1..k_hat {
        let start = block_range(n, k).start;
        s.sweep(phi[k - 1], false, 0..start);
    }
    Ok(s.b.build(ControlDescriptor::Qudit { wire: ctrl })?)
}
