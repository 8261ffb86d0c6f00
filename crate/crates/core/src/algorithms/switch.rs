//! The ideal `n`-switch and its `O(n²)` causal simulation.

use super::{route_table, AlgorithmError};
use crate::circuit::{Circuit, CircuitBuilder, ControlDescriptor, Family, Gate, WireKind};
use crate::perms::{Labeling, PermWord};

/// The switch itself: control `x` applies `Π_x` to a single target, using
/// each black box once.
#[derive(Debug, Clone)]
pub struct ReferenceSwitch {
    labeling: Labeling,
}

impl ReferenceSwitch {
    pub fn n(&self) -> usize {
        self.labeling.n()
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn word(&self, x: u64) -> &PermWord {
        self.labeling.map(x)
    }

    pub fn query_count(&self) -> usize {
        self.labeling.n()
    }
}

pub fn reference_switch(l: &Labeling) -> ReferenceSwitch {
    ReferenceSwitch { labeling: l.clone() }
}

/// Target `Ψ_t` plus auxiliaries `a_0 … a_{n-1}`. In step `i` the target is
/// swapped onto `a_{σ_x(i)}`, every `U_j` is applied once on `a_j`, and the
/// target is swapped back.
pub fn sim_switch_circuit(l: &Labeling) -> Result<Circuit, AlgorithmError> {
    let n = l.n();
    if n < 2 {
        return Err(AlgorithmError::Unsupported { what: "switch simulation", n });
    }
    let mut b = CircuitBuilder::new(format!("sim-switch-{n}"), Family::SimSwitch, n);
    let ctrl = b.wire(WireKind::ControlQudit { dim: l.size() }, "x");
    let target = b.wire(WireKind::Target, "Ψ_t");
    let aux: Vec<_> = (0..n).map(|i| b.wire(WireKind::Auxiliary, format!("a_{i}"))).collect();
    for step in 0..n {
        let route = route_table(l, |x| Some(l.map(x).sigma(step)));
        let swap = Gate::SwitchSwap { control: ctrl, step, target, candidates: aux.clone(), route };
        b.push(swap.clone());
        for (j, &a) in aux.iter().enumerate() {
            b.apply(j, a);
        }
        b.push(swap);
    }
    Ok(b.build(ControlDescriptor::Qudit { wire: ctrl })?)
}
