//! Circuit families for Fourier promise problems, the block decomposition
//! used by the `O(n√n)` family, and the verifier.

mod blocks;
mod nlogn;
mod six_query;
mod sqrt;
mod superperm;
mod switch;
mod verify;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use blocks::{block_params, ceil_sqrt, decompose_blocks, lemma_phase, BlockDecomposition};
pub use nlogn::nlogn_circuit;
pub use six_query::six_query_n3;
pub use sqrt::{sqrt_circuit, sqrt_circuit_for_words};
pub use superperm::{superperm_routing, superperm_sim_switch, SUPERPERM_STRING_3, SUPERPERM_STRING_4};
pub use switch::{reference_switch, sim_switch_circuit, ReferenceSwitch};
pub use verify::{verify_and_solve, PhaseProfile, Protocol, VerificationReport, VerifyError, WireWord, XEntry};

use crate::circuit::{CircuitError, Family, NO_ROUTE};
use crate::numsys::{ceil_log2, NumError};
use crate::perms::{Labeling, PermError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgorithmError {
    #[error("{what} is not supported for n = {n}")]
    Unsupported { what: &'static str, n: usize },
    #[error("labeling is for n = {got}, expected {expected}")]
    LabelingSize { expected: usize, got: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// `n²`.
pub fn sim_switch_queries(n: usize) -> u64 {
    (n as u64) * (n as u64)
}

/// `n² − 2n + 4`, the minimal superpermutation length for `3 ≤ n ≤ 7`.
pub fn superperm_length(n: usize) -> u64 {
    let n = n as u64;
    n * n - 2 * n + 4
}

/// `2(n−1)⌈log₂n⌉ + 2^{⌈log₂n⌉+1} − 2`.
pub fn nlogn_queries(n: usize) -> u64 {
    let ih = ceil_log2(n) as u64;
    2 * (n as u64 - 1) * ih + (1u64 << (ih + 1)) - 2
}

/// `2(n−1)(log₂n + 1) + 4n − 2`.
pub fn nlogn_bound(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * (nf - 1.0) * (nf.log2() + 1.0) + 4.0 * nf - 2.0
}

/// `(n̂ + 4k̂ − 4)·n`.
pub fn sqrt_queries(n: usize) -> u64 {
    let (nh, kh) = block_params(n);
    (nh as u64 + 4 * kh as u64 - 4) * n as u64
}

/// `(5√n + 1)·n`.
pub fn sqrt_bound(n: usize) -> f64 {
    let nf = n as f64;
    (5.0 * nf.sqrt() + 1.0) * nf
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: u64,
    pub relation: String,
    pub bound: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn eq(name: &str, value: u64, bound: u64) -> Self {
        Self { name: name.into(), value, relation: "==".into(), bound: bound as f64, holds: value == bound }
    }

    fn le(name: &str, value: u64, bound: f64) -> Self {
        Self { name: name.into(), value, relation: "<=".into(), bound, holds: (value as f64) <= bound }
    }

    fn lt(name: &str, value: u64, bound: f64) -> Self {
        Self { name: name.into(), value, relation: "<".into(), bound, holds: (value as f64) < bound }
    }
}

/// Query-count checks that apply to a circuit family.
pub fn bound_checks(family: Family, n: usize, queries: usize) -> Vec<BoundCheck> {
    let q = queries as u64;
    match family {
        Family::SimSwitch => vec![BoundCheck::eq("n^2", q, sim_switch_queries(n))],
        Family::Superperm => vec![BoundCheck::eq("n^2-2n+4", q, superperm_length(n))],
        Family::SixQuery => vec![BoundCheck::eq("six", q, 6)],
        Family::NLogN { reduced: false } => vec![
            BoundCheck::eq("2(n-1)ceil(log2 n)+2^(ceil(log2 n)+1)-2", q, nlogn_queries(n)),
            BoundCheck::le("2(n-1)(log2 n+1)+4n-2", q, nlogn_bound(n)),
        ],
        Family::NLogN { reduced: true } => vec![
            BoundCheck::lt("unreduced count", q, nlogn_queries(n) as f64),
            BoundCheck::le("2(n-1)(log2 n+1)+4n-2", q, nlogn_bound(n)),
        ],
        Family::Sqrt => vec![
            BoundCheck::eq("(n_hat+4k_hat-4)n", q, sqrt_queries(n)),
            BoundCheck::lt("(5 sqrt(n)+1)n", q, sqrt_bound(n)),
        ],
        Family::Custom => Vec::new(),
    }
}

/// Per-`x` route table, `f` returning a candidate index or `None`.
fn route_table(l: &Labeling, f: impl Fn(u64) -> Option<usize>) -> Arc<[u8]> {
    (0..l.size())
        .map(|x| match f(x) {
            Some(i) => u8::try_from(i).expect("candidate index fits in u8"),
            None => NO_ROUTE,
        })
        .collect()
}

fn check_labeling(l: &Labeling, expected: usize) -> Result<(), AlgorithmError> {
    if l.n() != expected {
        return Err(AlgorithmError::LabelingSize { expected, got: l.n() });
    }
    Ok(())
}
