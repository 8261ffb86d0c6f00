//! Checks that a protocol realises `|x⟩ ↦ ω^{x·y}|x⟩ ⊗ (x-independent
//! residual)` and reads off `y`.
//!
//! Every data wire of the outcome for `x` is normal-ordered into the word it
//! carries for `x = 0`; the summed exponent `p(x)` is a multiple of the
//! symbolic `y`. After substituting `y`, the phase must be linear in `x`
//! with slope `s`, and the inverse Fourier transform then returns `s`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{bound_checks, BoundCheck, ReferenceSwitch};
use crate::circuit::{Circuit, CircuitError, WireOutcome};
use crate::commutation::{add_mod, mul_mod, relative_phase, CommutationTable};
use crate::perms::{validate_labeling, Labeling, PermError, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("labeling is inconsistent: pair {:?} has exponents {} and {}", .0.pair, .0.derived, .0.conflicting)]
    InconsistentLabeling(Box<Witness>),
    #[error("protocol is for n = {protocol}, labeling for n = {labeling}")]
    SizeMismatch { protocol: usize, labeling: usize },
    #[error("protocol control ranges over {protocol} values, labeling has {labeling}")]
    ControlSizeMismatch { protocol: u64, labeling: u64 },
    #[error("y = {y} out of range (need y < {modulus})")]
    YOutOfRange { y: u64, modulus: u64 },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Anything that maps a control state to per-wire words.
pub trait Protocol: Sync {
    fn n(&self) -> usize;
    fn name(&self) -> String;
    fn query_count(&self) -> usize;
    /// Number of control values `x`.
    fn control_size(&self) -> u64;
    /// `(index into WireOutcome::words, label)` for every data wire.
    fn data_wires(&self) -> Vec<(usize, String)>;
    fn outcome(&self, x: u64) -> Result<WireOutcome, CircuitError>;
    fn bound_checks(&self) -> Vec<BoundCheck>;
}

impl Protocol for Circuit {
    fn n(&self) -> usize {
        Circuit::n(self)
    }

    fn name(&self) -> String {
        Circuit::name(self).to_string()
    }

    fn query_count(&self) -> usize {
        Circuit::query_count(self)
    }

    fn control_size(&self) -> u64 {
        Circuit::control_size(self)
    }

    fn data_wires(&self) -> Vec<(usize, String)> {
        Circuit::data_wires(self).map(|w| (w.id, w.label.clone())).collect()
    }

    fn outcome(&self, x: u64) -> Result<WireOutcome, CircuitError> {
        self.execute(x)
    }

    fn bound_checks(&self) -> Vec<BoundCheck> {
        bound_checks(self.family(), Circuit::n(self), Circuit::query_count(self))
    }
}

impl Protocol for ReferenceSwitch {
    fn n(&self) -> usize {
        ReferenceSwitch::n(self)
    }

    fn name(&self) -> String {
        format!("switch-{}", ReferenceSwitch::n(self))
    }

    fn query_count(&self) -> usize {
        ReferenceSwitch::query_count(self)
    }

    fn control_size(&self) -> u64 {
        self.labeling().size()
    }

    fn data_wires(&self) -> Vec<(usize, String)> {
        vec![(0, "Ψ_t".into())]
    }

    fn outcome(&self, x: u64) -> Result<WireOutcome, CircuitError> {
        let size = self.labeling().size();
        if x >= size {
            return Err(CircuitError::ControlOutOfRange { x, limit: size });
        }
        Ok(WireOutcome { words: vec![self.word(x).application_order()], final_rails: vec![0] })
    }

    fn bound_checks(&self) -> Vec<BoundCheck> {
        let n = ReferenceSwitch::n(self) as u64;
        let q = ReferenceSwitch::query_count(self) as u64;
        vec![BoundCheck { name: "n".into(), value: q, relation: "==".into(), bound: n as f64, holds: q == n }]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireWord {
    pub label: String,
    /// Product order.
    pub word: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XEntry {
    pub x: u64,
    /// Exponent of `ω` for the chosen `y`; absent when a residual differs.
    pub phase: Option<u64>,
    /// Every wire carries a rearrangement of its `x = 0` word and the final
    /// arrangement of states on rails matches.
    pub residual_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: usize,
    pub protocol: String,
    pub labeling: String,
    pub y: u64,
    pub modulus: u64,
    pub query_count: usize,
    pub reference_words: Vec<WireWord>,
    pub entries: Vec<XEntry>,
    pub residuals_x_independent: bool,
    pub phase_linear: bool,
    pub solved_y: Option<u64>,
    pub passed: bool,
    pub bound_checks: Vec<BoundCheck>,
}

impl VerificationReport {
    pub fn bounds_hold(&self) -> bool {
        self.bound_checks.iter().all(|b| b.holds)
    }
}

/// Per-`x` exponents with `y` left symbolic; solve for any `y` afterwards.
#[derive(Debug, Clone)]
pub struct PhaseProfile {
    n: usize,
    protocol: String,
    labeling: String,
    modulus: u64,
    query_count: usize,
    reference_words: Vec<WireWord>,
    /// `(p(x), residual_ok)`; `p(x)` is `None` when some wire is not a
    /// rearrangement of its reference.
    per_x: Vec<(Option<u64>, bool)>,
    bound_checks: Vec<BoundCheck>,
    table: CommutationTable,
}

impl PhaseProfile {
    pub fn compute(protocol: &dyn Protocol, l: &Labeling) -> Result<Self, VerifyError> {
        if protocol.n() != l.n() {
            return Err(VerifyError::SizeMismatch { protocol: protocol.n(), labeling: l.n() });
        }
        if protocol.control_size() != l.size() {
            return Err(VerifyError::ControlSizeMismatch { protocol: protocol.control_size(), labeling: l.size() });
        }
        let table = match validate_labeling(l)? {
            crate::perms::ConsistencyResult::Consistent { table } => table,
            crate::perms::ConsistencyResult::Contradiction { witness } => {
                return Err(VerifyError::InconsistentLabeling(Box::new(witness)))
            }
        };
        let modulus = table.modulus();
        let wires = protocol.data_wires();
        let reference = protocol.outcome(0)?;
        let ref_products: Vec<Vec<usize>> = wires.iter().map(|(w, _)| reference.product(*w)).collect();
        let per_x = (0..l.size())
            .into_par_iter()
            .map(|x| -> Result<(Option<u64>, bool), CircuitError> {
                let o = protocol.outcome(x)?;
                let mut total = Some(0u64);
                for ((w, _), r) in wires.iter().zip(&ref_products) {
                    total = match (total, relative_phase(&o.product(*w), r, &table)) {
                        (Some(t), Some(p)) => Some(add_mod(t, p, modulus)),
                        _ => None,
                    };
                }
                let ok = total.is_some() && o.final_rails == reference.final_rails;
                Ok((total, ok))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            n: l.n(),
            protocol: protocol.name(),
            labeling: l.name().to_string(),
            modulus,
            query_count: protocol.query_count(),
            reference_words: wires
                .iter()
                .zip(ref_products)
                .map(|((_, label), word)| WireWord { label: label.clone(), word })
                .collect(),
            per_x,
            bound_checks: protocol.bound_checks(),
            table,
        })
    }

    pub fn table(&self) -> &CommutationTable {
        &self.table
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Unscaled exponent `p(x)` (coefficient of `y`).
    pub fn exponent(&self, x: u64) -> Option<u64> {
        self.per_x[x as usize].0
    }

    pub fn solve(&self, y: u64) -> Result<VerificationReport, VerifyError> {
        let m = self.modulus;
        if y >= m {
            return Err(VerifyError::YOutOfRange { y, modulus: m });
        }
        let entries: Vec<XEntry> = self
            .per_x
            .iter()
            .enumerate()
            .map(|(x, &(p, ok))| XEntry { x: x as u64, phase: p.map(|p| mul_mod(p, y, m)), residual_ok: ok })
            .collect();
        let residuals_x_independent = entries.iter().all(|e| e.residual_ok);
        let slope = if m > 1 { entries[1].phase } else { Some(0) };
        let phase_linear = match slope {
            Some(s) => entries.iter().all(|e| e.phase == Some(mul_mod(e.x, s, m))),
            None => false,
        };
        let solved_y = if phase_linear && residuals_x_independent { slope } else { None };
        Ok(VerificationReport {
            n: self.n,
            protocol: self.protocol.clone(),
            labeling: self.labeling.clone(),
            y,
            modulus: m,
            query_count: self.query_count,
            reference_words: self.reference_words.clone(),
            entries,
            residuals_x_independent,
            phase_linear,
            solved_y,
            passed: solved_y == Some(y),
            bound_checks: self.bound_checks.clone(),
        })
    }
}

pub fn verify_and_solve(protocol: &dyn Protocol, l: &Labeling, y: u64) -> Result<VerificationReport, VerifyError> {
    PhaseProfile::compute(protocol, l)?.solve(y)
}
