//! Circuit IR over typed wires and its symbolic execution per control state.
//!
//! Gates address *rails*, identified by the id of the wire that starts on
//! them. Swaps and rewirings move states between rails; the executor tracks
//! which state sits on which rail and appends gate indices to the word of the
//! state they hit. Control is always classical on the computational basis,
//! so one run per `x` describes the whole superposition by linearity.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numsys::{factorial, to_bit_basis, NumError};

pub type WireId = usize;

/// Route entry meaning "no swap for this control state".
pub const NO_ROUTE: u8 = u8::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("control value {x} out of range (need x < {limit})")]
    ControlOutOfRange { x: u64, limit: u64 },
    #[error("wire {0} does not exist")]
    NoSuchWire(WireId),
    #[error("wire {wire} has kind {found}, expected {expected}")]
    WrongKind { wire: WireId, found: String, expected: &'static str },
    #[error("gate index {index} out of range for n = {n}")]
    GateOutOfRange { index: usize, n: usize },
    #[error("malformed gate {gate}: {msg}")]
    Malformed { gate: usize, msg: String },
    #[error("control bit c_({k},{i}) is 1 for x = {x} but the circuit has no wire for it")]
    DroppedBitSet { x: u64, k: usize, i: u32 },
    #[error("export parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WireKind {
    ControlBit,
    ControlQudit { dim: u64 },
    Target,
    Auxiliary,
}

impl WireKind {
    pub fn is_control(self) -> bool {
        matches!(self, WireKind::ControlBit | WireKind::ControlQudit { .. })
    }

    fn token(self) -> String {
        match self {
            WireKind::ControlBit => "control-bit".into(),
            WireKind::ControlQudit { dim } => format!("control-qudit:{dim}"),
            WireKind::Target => "target".into(),
            WireKind::Auxiliary => "auxiliary".into(),
        }
    }

    fn parse(tok: &str) -> Option<Self> {
        match tok {
            "control-bit" => Some(WireKind::ControlBit),
            "target" => Some(WireKind::Target),
            "auxiliary" => Some(WireKind::Auxiliary),
            _ => tok.strip_prefix("control-qudit:")?.parse().ok().map(|dim| WireKind::ControlQudit { dim }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub id: WireId,
    pub kind: WireKind,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    OnOne,
    OnZero,
}

impl Polarity {
    pub fn fires(self, bit: bool) -> bool {
        match self {
            Polarity::OnOne => bit,
            Polarity::OnZero => !bit,
        }
    }

    fn token(self) -> &'static str {
        match self {
            Polarity::OnOne => "1",
            Polarity::OnZero => "0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    /// Black-box `U_gate` on whatever state occupies `rail`.
    Apply { gate: usize, rail: WireId },
    ControlledApply { gate: usize, rail: WireId, control: WireId, polarity: Polarity },
    ControlledSwap { a: WireId, b: WireId, control: WireId, polarity: Polarity },
    /// For control state `x`, the state on `rails[i]` afterwards is the one
    /// that was on `rails[perms[x][i]]`.
    Rewire { control: WireId, rails: Vec<WireId>, perms: Vec<Vec<usize>> },
    /// For control state `x`, swaps `target` with `candidates[route[x]]`
    /// unless `route[x]` is [`NO_ROUTE`].
    SwitchSwap { control: WireId, step: usize, target: WireId, candidates: Vec<WireId>, route: Arc<[u8]> },
}

impl Gate {
    pub fn is_query(&self) -> bool {
        matches!(self, Gate::Apply { .. } | Gate::ControlledApply { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BitEncoding {
    /// `x ↦ c_{k,i}` via [`to_bit_basis`].
    FactoradicGreedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitSlot {
    pub wire: WireId,
    pub k: usize,
    pub i: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ControlDescriptor {
    /// One `n!`-level qudit holding `x`.
    Qudit { wire: WireId },
    /// Named bits; bits of the encoding without a slot must stay zero.
    Bits { encoding: BitEncoding, slots: Vec<BitSlot> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    SimSwitch,
    Superperm,
    SixQuery,
    NLogN { reduced: bool },
    Sqrt,
    Custom,
}

impl Family {
    fn token(self) -> &'static str {
        match self {
            Family::SimSwitch => "sim-switch",
            Family::Superperm => "superperm",
            Family::SixQuery => "six-query",
            Family::NLogN { reduced: false } => "nlogn",
            Family::NLogN { reduced: true } => "nlogn-reduced",
            Family::Sqrt => "sqrt",
            Family::Custom => "custom",
        }
    }

    fn parse(tok: &str) -> Option<Self> {
        Some(match tok {
            "sim-switch" => Family::SimSwitch,
            "superperm" => Family::Superperm,
            "six-query" => Family::SixQuery,
            "nlogn" => Family::NLogN { reduced: false },
            "nlogn-reduced" => Family::NLogN { reduced: true },
            "sqrt" => Family::Sqrt,
            "custom" => Family::Custom,
            _ => return None,
        })
    }
}

/// Resolved control state for one `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ControlValues {
    Qudit(u64),
    /// Bit value per wire id (only control-bit wires are meaningful).
    Bits(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    name: String,
    family: Family,
    n: usize,
    wires: Vec<Wire>,
    gates: Vec<Gate>,
    control: ControlDescriptor,
    size: u64,
}

/// Per-state words after execution, in application order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireOutcome {
    /// `words[w]`: gates applied to the state that started on wire `w`.
    pub words: Vec<Vec<usize>>,
    /// `final_rails[r]`: which state ends on rail `r`.
    pub final_rails: Vec<WireId>,
}

impl WireOutcome {
    pub fn word(&self, w: WireId) -> &[usize] {
        &self.words[w]
    }

    /// Product order (last applied gate first).
    pub fn product(&self, w: WireId) -> Vec<usize> {
        self.words[w].iter().rev().copied().collect()
    }

    /// Sorted multiset of all applied gate indices.
    pub fn gate_multiset(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.words.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }
}

pub struct CircuitBuilder {
    name: String,
    family: Family,
    n: usize,
    wires: Vec<Wire>,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(name: impl Into<String>, family: Family, n: usize) -> Self {
        Self { name: name.into(), family, n, wires: Vec::new(), gates: Vec::new() }
    }

    pub fn wire(&mut self, kind: WireKind, label: impl Into<String>) -> WireId {
        let id = self.wires.len();
        self.wires.push(Wire { id, kind, label: label.into() });
        id
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn apply(&mut self, gate: usize, rail: WireId) -> &mut Self {
        self.push(Gate::Apply { gate, rail })
    }

    pub fn build(self, control: ControlDescriptor) -> Result<Circuit, CircuitError> {
        Circuit::new(self.name, self.family, self.n, self.wires, self.gates, control)
    }
}

impl Circuit {
    pub fn new(
        name: String,
        family: Family,
        n: usize,
        wires: Vec<Wire>,
        gates: Vec<Gate>,
        control: ControlDescriptor,
    ) -> Result<Self, CircuitError> {
        // A qudit control may range over any word list; bits always encode `0..n!`.
        let size = match &control {
            ControlDescriptor::Qudit { wire } => match wires.get(*wire).map(|w| w.kind) {
                Some(WireKind::ControlQudit { dim }) if dim > 0 => dim,
                _ => factorial(n)?,
            },
            ControlDescriptor::Bits { .. } => factorial(n)?,
        };
        let c = Self { name, family, n, wires, gates, control, size };
        c.validate()?;
        Ok(c)
    }

    fn kind(&self, w: WireId) -> Result<WireKind, CircuitError> {
        self.wires.get(w).map(|wire| wire.kind).ok_or(CircuitError::NoSuchWire(w))
    }

    fn expect_rail(&self, w: WireId) -> Result<(), CircuitError> {
        match self.kind(w)? {
            WireKind::Target | WireKind::Auxiliary => Ok(()),
            other => Err(CircuitError::WrongKind { wire: w, found: other.token(), expected: "target or auxiliary" }),
        }
    }

    fn expect_bit(&self, w: WireId) -> Result<(), CircuitError> {
        match self.kind(w)? {
            WireKind::ControlBit => Ok(()),
            other => Err(CircuitError::WrongKind { wire: w, found: other.token(), expected: "control-bit" }),
        }
    }

    fn expect_qudit(&self, w: WireId) -> Result<(), CircuitError> {
        match self.kind(w)? {
            WireKind::ControlQudit { dim } if dim == self.size => Ok(()),
            other => Err(CircuitError::WrongKind { wire: w, found: other.token(), expected: "control-qudit matching the control size" }),
        }
    }

    fn validate(&self) -> Result<(), CircuitError> {
        for (i, w) in self.wires.iter().enumerate() {
            if w.id != i {
                return Err(CircuitError::Malformed { gate: 0, msg: format!("wire ids must be 0..m, found {} at {i}", w.id) });
            }
        }
        match &self.control {
            ControlDescriptor::Qudit { wire } => self.expect_qudit(*wire)?,
            ControlDescriptor::Bits { slots, .. } => {
                for s in slots {
                    self.expect_bit(s.wire)?;
                }
            }
        }
        let bad = |gate: usize, msg: String| CircuitError::Malformed { gate, msg };
        for (gi, g) in self.gates.iter().enumerate() {
            match g {
                Gate::Apply { gate, rail } => {
                    self.check_index(*gate)?;
                    self.expect_rail(*rail)?;
                }
                Gate::ControlledApply { gate, rail, control, .. } => {
                    self.check_index(*gate)?;
                    self.expect_rail(*rail)?;
                    self.expect_bit(*control)?;
                }
                Gate::ControlledSwap { a, b, control, .. } => {
                    self.expect_rail(*a)?;
                    self.expect_rail(*b)?;
                    self.expect_bit(*control)?;
                    if a == b {
                        return Err(bad(gi, "swap of a rail with itself".into()));
                    }
                }
                Gate::Rewire { control, rails, perms } => {
                    self.expect_qudit(*control)?;
                    for &r in rails {
                        self.expect_rail(r)?;
                    }
                    if perms.len() as u64 != self.size {
                        return Err(bad(gi, format!("{} rewire entries, need {}", perms.len(), self.size)));
                    }
                    for p in perms {
                        let mut seen = vec![false; rails.len()];
                        if p.len() != rails.len() || p.iter().any(|&i| i >= rails.len() || std::mem::replace(&mut seen[i], true)) {
                            return Err(bad(gi, format!("rewire entry {p:?} is not a permutation of the rails")));
                        }
                    }
                }
                Gate::SwitchSwap { control, target, candidates, route, .. } => {
                    self.expect_qudit(*control)?;
                    self.expect_rail(*target)?;
                    for &r in candidates {
                        self.expect_rail(r)?;
                        if r == *target {
                            return Err(bad(gi, "candidate equals target".into()));
                        }
                    }
                    if route.len() as u64 != self.size {
                        return Err(bad(gi, format!("{} route entries, need {}", route.len(), self.size)));
                    }
                    if route.iter().any(|&r| r != NO_ROUTE && r as usize >= candidates.len()) {
                        return Err(bad(gi, "route points past the candidate list".into()));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_index(&self, index: usize) -> Result<(), CircuitError> {
        if index >= self.n {
            return Err(CircuitError::GateOutOfRange { index, n: self.n });
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn control(&self) -> &ControlDescriptor {
        &self.control
    }

    /// Number of control states, `n!`.
    pub fn control_size(&self) -> u64 {
        self.size
    }

    /// Wires that carry data (targets and auxiliaries).
    pub fn data_wires(&self) -> impl Iterator<Item = &Wire> {
        self.wires.iter().filter(|w| !w.kind.is_control())
    }

    pub fn wire_by_label(&self, label: &str) -> Option<WireId> {
        self.wires.iter().find(|w| w.label == label).map(|w| w.id)
    }

    /// Black-box instances in the gate list; swaps and rewirings count zero.
    pub fn query_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_query()).count()
    }

    /// Resolves `x` into the value seen by every control wire.
    pub fn control_values(&self, x: u64) -> Result<ControlValues, CircuitError> {
        if x >= self.size {
            return Err(CircuitError::ControlOutOfRange { x, limit: self.size });
        }
        match &self.control {
            ControlDescriptor::Qudit { .. } => Ok(ControlValues::Qudit(x)),
            ControlDescriptor::Bits { encoding: BitEncoding::FactoradicGreedy, slots } => {
                let rep = to_bit_basis(x, self.n)?;
                let mut bits = vec![false; self.wires.len()];
                for ((k, i), b) in rep.iter() {
                    match slots.iter().find(|s| s.k == k && s.i == i) {
                        Some(s) => bits[s.wire] = b,
                        None if b => return Err(CircuitError::DroppedBitSet { x, k, i }),
                        None => {}
                    }
                }
                Ok(ControlValues::Bits(bits))
            }
        }
    }

    /// Runs the circuit for control state `x`.
    pub fn execute(&self, x: u64) -> Result<WireOutcome, CircuitError> {
        let ctrl = self.control_values(x)?;
        Ok(self.run(&ctrl, x as usize))
    }

    /// Runs a bit-controlled circuit on an explicit assignment, indexed by
    /// wire id, bypassing the encoding of `x`.
    pub fn execute_bits(&self, bits: &[bool]) -> Result<WireOutcome, CircuitError> {
        if !matches!(self.control, ControlDescriptor::Bits { .. }) || bits.len() != self.wires.len() {
            return Err(CircuitError::Malformed { gate: 0, msg: "bit assignment needs a bit-controlled circuit and one entry per wire".into() });
        }
        Ok(self.run(&ControlValues::Bits(bits.to_vec()), 0))
    }

    fn run(&self, ctrl: &ControlValues, xi: usize) -> WireOutcome {
        let bit = |w: WireId| match ctrl {
            ControlValues::Bits(b) => b[w],
            ControlValues::Qudit(_) => unreachable!("validated: bit gates need bit controls"),
        };
        let mut on_rail: Vec<WireId> = (0..self.wires.len()).collect();
        let mut words: Vec<Vec<usize>> = vec![Vec::new(); self.wires.len()];
        for g in &self.gates {
            match g {
                Gate::Apply { gate, rail } => words[on_rail[*rail]].push(*gate),
                Gate::ControlledApply { gate, rail, control, polarity } => {
                    if polarity.fires(bit(*control)) {
                        words[on_rail[*rail]].push(*gate);
                    }
                }
                Gate::ControlledSwap { a, b, control, polarity } => {
                    if polarity.fires(bit(*control)) {
                        on_rail.swap(*a, *b);
                    }
                }
                Gate::Rewire { rails, perms, .. } => {
                    let old: Vec<WireId> = rails.iter().map(|&r| on_rail[r]).collect();
                    for (i, &src) in perms[xi].iter().enumerate() {
                        on_rail[rails[i]] = old[src];
                    }
                }
                Gate::SwitchSwap { target, candidates, route, .. } => {
                    let r = route[xi];
                    if r != NO_ROUTE {
                        on_rail.swap(*target, candidates[r as usize]);
                    }
                }
            }
        }
        WireOutcome { words, final_rails: on_rail }
    }

    /// Writes the line-oriented export format (see [`parse_export`]).
    pub fn export_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "circuit {}", self.name);
        let _ = writeln!(s, "family {}", self.family.token());
        let _ = writeln!(s, "n {}", self.n);
        match &self.control {
            ControlDescriptor::Qudit { wire } => {
                let _ = writeln!(s, "control qudit {wire}");
            }
            ControlDescriptor::Bits { encoding: BitEncoding::FactoradicGreedy, slots } => {
                let _ = write!(s, "control bits factoradic-greedy");
                for sl in slots {
                    let _ = write!(s, " {}:{}:{}", sl.wire, sl.k, sl.i);
                }
                s.push('\n');
            }
        }
        for w in &self.wires {
            let _ = writeln!(s, "wire {} {} {}", w.id, w.kind.token(), w.label);
        }
        for g in &self.gates {
            match g {
                Gate::Apply { gate, rail } => {
                    let _ = writeln!(s, "apply {gate} {rail}");
                }
                Gate::ControlledApply { gate, rail, control, polarity } => {
                    let _ = writeln!(s, "capply {gate} {rail} {control} {}", polarity.token());
                }
                Gate::ControlledSwap { a, b, control, polarity } => {
                    let _ = writeln!(s, "cswap {a} {b} {control} {}", polarity.token());
                }
                Gate::Rewire { control, rails, perms } => {
                    let perms: Vec<String> = perms.iter().map(|p| join(p, ",")).collect();
                    let _ = writeln!(s, "rewire {control} {} {}", join(rails, ","), perms.join(";"));
                }
                Gate::SwitchSwap { control, step, target, candidates, route } => {
                    let route: Vec<String> =
                        route.iter().map(|&r| if r == NO_ROUTE { "-".to_string() } else { r.to_string() }).collect();
                    let _ = writeln!(
                        s,
                        "sswap {control} {step} {target} {} {}",
                        join(candidates, ","),
                        route.join(",")
                    );
                }
            }
        }
        s
    }
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

/// Parses the format written by [`Circuit::export_text`].
///
/// ```text
/// circuit <name>
/// family <family>
/// n <n>
/// control qudit <wire> | control bits factoradic-greedy <wire>:<k>:<i> ...
/// wire <id> <kind> <label>
/// apply <gate> <rail>
/// capply <gate> <rail> <control> <1|0>
/// cswap <a> <b> <control> <1|0>
/// rewire <control> <r,r,...> <p,p,...;p,p,...;...>
/// sswap <control> <step> <target> <c,c,...> <route,...>   ('-' = no swap)
/// ```
pub fn parse_export(text: &str) -> Result<Circuit, CircuitError> {
    let mut name = None;
    let mut family = None;
    let mut n = None;
    let mut control = None;
    let mut wires = Vec::new();
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let perr = |msg: &str| CircuitError::Parse { line: idx + 1, msg: msg.to_string() };
        let (head, rest) = line.split_once(' ').ok_or_else(|| perr("missing fields"))?;
        let toks: Vec<&str> = rest.split_whitespace().collect();
        let num = |i: usize| -> Result<usize, CircuitError> {
            toks.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| perr(&format!("bad field {i}")))
        };
        let list = |i: usize| -> Result<Vec<usize>, CircuitError> {
            let t = toks.get(i).ok_or_else(|| perr("missing list"))?;
            if t.is_empty() {
                return Ok(Vec::new());
            }
            t.split(',').map(|v| v.parse().map_err(|_| perr("bad list entry"))).collect()
        };
        let pol = |i: usize| match toks.get(i) {
            Some(&"1") => Ok(Polarity::OnOne),
            Some(&"0") => Ok(Polarity::OnZero),
            _ => Err(perr("bad polarity")),
        };
        match head {
            "circuit" => name = Some(rest.to_string()),
            "family" => family = Some(Family::parse(rest).ok_or_else(|| perr("unknown family"))?),
            "n" => n = Some(num(0)?),
            "control" => {
                control = Some(match toks.first() {
                    Some(&"qudit") => ControlDescriptor::Qudit { wire: num(1)? },
                    Some(&"bits") if toks.get(1) == Some(&"factoradic-greedy") => {
                        let slots = toks[2..]
                            .iter()
                            .map(|t| {
                                let p: Vec<&str> = t.split(':').collect();
                                match p.as_slice() {
                                    [w, k, i] => Ok(BitSlot {
                                        wire: w.parse().map_err(|_| perr("bad slot"))?,
                                        k: k.parse().map_err(|_| perr("bad slot"))?,
                                        i: i.parse().map_err(|_| perr("bad slot"))?,
                                    }),
                                    _ => Err(perr("bad slot")),
                                }
                            })
                            .collect::<Result<_, _>>()?;
                        ControlDescriptor::Bits { encoding: BitEncoding::FactoradicGreedy, slots }
                    }
                    _ => return Err(perr("unknown control descriptor")),
                })
            }
            "wire" => {
                let mut parts = rest.splitn(3, ' ');
                let id = parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| perr("bad wire id"))?;
                let kind = parts.next().and_then(WireKind::parse).ok_or_else(|| perr("bad wire kind"))?;
                let label = parts.next().unwrap_or("").to_string();
                wires.push(Wire { id, kind, label });
            }
            "apply" => gates.push(Gate::Apply { gate: num(0)?, rail: num(1)? }),
            "capply" => gates.push(Gate::ControlledApply { gate: num(0)?, rail: num(1)?, control: num(2)?, polarity: pol(3)? }),
            "cswap" => gates.push(Gate::ControlledSwap { a: num(0)?, b: num(1)?, control: num(2)?, polarity: pol(3)? }),
            "rewire" => {
                let perms = toks
                    .get(2)
                    .ok_or_else(|| perr("missing rewire table"))?
                    .split(';')
                    .map(|p| p.split(',').map(|v| v.parse().map_err(|_| perr("bad rewire entry"))).collect())
                    .collect::<Result<_, _>>()?;
                gates.push(Gate::Rewire { control: num(0)?, rails: list(1)?, perms });
            }
            "sswap" => {
                let route: Vec<u8> = toks
                    .get(4)
                    .ok_or_else(|| perr("missing route"))?
                    .split(',')
                    .map(|v| if v == "-" { Ok(NO_ROUTE) } else { v.parse().map_err(|_| perr("bad route entry")) })
                    .collect::<Result<_, _>>()?;
                gates.push(Gate::SwitchSwap {
                    control: num(0)?,
                    step: num(1)?,
                    target: num(2)?,
                    candidates: list(3)?,
                    route: route.into(),
                });
            }
            _ => return Err(perr("unknown record")),
        }
    }
    let missing = |what: &str| CircuitError::Parse { line: 0, msg: format!("missing {what} record") };
    Circuit::new(
        name.ok_or_else(|| missing("circuit"))?,
        family.ok_or_else(|| missing("family"))?,
        n.ok_or_else(|| missing("n"))?,
        wires,
        gates,
        control.ok_or_else(|| missing("control"))?,
    )
}

/// Replaces each controlled black box by controlled swaps around an
/// uncontrolled application on a fresh auxiliary `a_k` (one per gate index).
pub fn eliminate_controlled_unknowns(c: &Circuit) -> Circuit {
    let mut wires = c.wires.clone();
    let mut aux: BTreeMap<usize, WireId> = BTreeMap::new();
    let mut gates = Vec::with_capacity(c.gates.len() * 3);
    for g in &c.gates {
        match g {
            Gate::ControlledApply { gate, rail, control, polarity } => {
                let a = *aux.entry(*gate).or_insert_with(|| {
                    let id = wires.len();
                    wires.push(Wire { id, kind: WireKind::Auxiliary, label: format!("a_{gate}") });
                    id
                });
                let swap = Gate::ControlledSwap { a: *rail, b: a, control: *control, polarity: *polarity };
                gates.push(swap.clone());
                gates.push(Gate::Apply { gate: *gate, rail: a });
                gates.push(swap);
            }
            other => gates.push(other.clone()),
        }
    }
    Circuit { name: format!("{}-eliminated", c.name), wires, gates, ..c.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_qudit(n: usize) -> CircuitBuilder {
        let mut b = CircuitBuilder::new("tiny", Family::Custom, n);
        b.wire(WireKind::ControlQudit { dim: factorial(n).unwrap() }, "x");
        b
    }

    #[test]
    fn empty_circuit_has_empty_words() {
        let mut b = tiny_qudit(3);
        b.wire(WireKind::Target, "t");
        let c = b.build(ControlDescriptor::Qudit { wire: 0 }).unwrap();
        for x in 0..6 {
            let o = c.execute(x).unwrap();
            assert!(o.words.iter().all(Vec::is_empty));
        }
        assert_eq!(c.query_count(), 0);
        assert!(matches!(c.execute(6), Err(CircuitError::ControlOutOfRange { .. })));
    }

    #[test]
    fn switch_swap_moves_state() {
        let mut b = tiny_qudit(2);
        let t = b.wire(WireKind::Target, "t");
        let a = b.wire(WireKind::Auxiliary, "a");
        let route: Arc<[u8]> = vec![0u8, NO_ROUTE].into();
        b.push(Gate::SwitchSwap { control: 0, step: 0, target: t, candidates: vec![a], route: route.clone() });
        b.apply(1, a);
        b.push(Gate::SwitchSwap { control: 0, step: 0, target: t, candidates: vec![a], route });
        let c = b.build(ControlDescriptor::Qudit { wire: 0 }).unwrap();
        assert_eq!(c.execute(0).unwrap().words[t], vec![1]);
        assert_eq!(c.execute(1).unwrap().words[a], vec![1]);
        assert_eq!(c.execute(0).unwrap().final_rails, vec![0, 1, 2]);
        assert_eq!(c.query_count(), 1);
    }

    #[test]
    fn rewire_permutes_rails() {
        let mut b = tiny_qudit(2);
        let p = b.wire(WireKind::Target, "p");
        let q = b.wire(WireKind::Target, "q");
        b.push(Gate::Rewire { control: 0, rails: vec![p, q], perms: vec![vec![0, 1], vec![1, 0]] });
        b.apply(0, p);
        let c = b.build(ControlDescriptor::Qudit { wire: 0 }).unwrap();
        assert_eq!(c.execute(0).unwrap().words[p], vec![0]);
        assert_eq!(c.execute(1).unwrap().words[q], vec![0]);
        assert_eq!(c.execute(1).unwrap().final_rails[p], q);
    }

    #[test]
    fn malformed_rewire_rejected() {
        let mut b = tiny_qudit(2);
        let p = b.wire(WireKind::Target, "p");
        let q = b.wire(WireKind::Target, "q");
        b.push(Gate::Rewire { control: 0, rails: vec![p, q], perms: vec![vec![0, 1], vec![1, 1]] });
        assert!(matches!(b.build(ControlDescriptor::Qudit { wire: 0 }), Err(CircuitError::Malformed { .. })));
    }

    #[test]
    fn gate_index_checked() {
        let mut b = tiny_qudit(2);
        let t = b.wire(WireKind::Target, "t");
        b.apply(2, t);
        assert_eq!(b.build(ControlDescriptor::Qudit { wire: 0 }), Err(CircuitError::GateOutOfRange { index: 2, n: 2 }));
    }

    fn bit_circuit() -> Circuit {
        // n = 3: bits c_(1,1), c_(1,2) dropped, c_(2,1), c_(2,2).
        let mut b = CircuitBuilder::new("bits", Family::Custom, 3);
        let c11 = b.wire(WireKind::ControlBit, "c_{1,1}");
        let c21 = b.wire(WireKind::ControlBit, "c_{2,1}");
        let t = b.wire(WireKind::Target, "t");
        b.push(Gate::ControlledApply { gate: 1, rail: t, control: c11, polarity: Polarity::OnOne });
        b.push(Gate::ControlledApply { gate: 2, rail: t, control: c21, polarity: Polarity::OnZero });
        let slots = vec![BitSlot { wire: c11, k: 1, i: 1 }, BitSlot { wire: c21, k: 2, i: 1 }];
        b.build(ControlDescriptor::Bits { encoding: BitEncoding::FactoradicGreedy, slots }).unwrap()
    }

    #[test]
    fn bit_controls_follow_encoding() {
        let c = bit_circuit();
        // x = 0: no bits set, only the on-zero gate fires.
        assert_eq!(c.execute(0).unwrap().words[2], vec![2]);
        // x = 1: a_1 = 1 → c_(1,1) = 1.
        assert_eq!(c.execute(1).unwrap().words[2], vec![1, 2]);
        // x = 2: a_2 = 1 → c_(2,1) = 1 (weight 1).
        assert_eq!(c.execute(2).unwrap().words[2], Vec::<usize>::new());
        // x = 4: a_2 = 2 → c_(2,2) = 1, which has no wire.
        assert_eq!(c.execute(4), Err(CircuitError::DroppedBitSet { x: 4, k: 2, i: 2 }));
    }

    #[test]
    fn elimination_keeps_queries_and_routes() {
        let c = bit_circuit();
        let e = eliminate_controlled_unknowns(&c);
        assert_eq!(e.query_count(), c.query_count());
        assert!(e.gates.iter().all(|g| !matches!(g, Gate::ControlledApply { .. })));
        let a1 = e.wire_by_label("a_1").unwrap();
        let a2 = e.wire_by_label("a_2").unwrap();
        let o = e.execute(1).unwrap();
        assert_eq!(o.words[2], vec![1, 2]);
        assert!(o.words[a1].is_empty() && o.words[a2].is_empty());
        let o = e.execute(2).unwrap();
        assert_eq!(o.words[a1], vec![1]);
        assert_eq!(o.words[a2], vec![2]);
        assert_eq!(o.final_rails, (0..e.wires.len()).collect::<Vec<_>>());
    }

    #[test]
    fn export_roundtrip() {
        for c in [bit_circuit(), eliminate_controlled_unknowns(&bit_circuit())] {
            let text = c.export_text();
            let back = parse_export(&text).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.export_text(), text);
        }
        let mut b = tiny_qudit(2);
        let p = b.wire(WireKind::Target, "Ψ_1");
        let q = b.wire(WireKind::Auxiliary, "a_0");
        b.push(Gate::Rewire { control: 0, rails: vec![p, q], perms: vec![vec![0, 1], vec![1, 0]] });
        b.push(Gate::SwitchSwap { control: 0, step: 3, target: p, candidates: vec![q], route: vec![NO_ROUTE, 0].into() });
        let c = b.build(ControlDescriptor::Qudit { wire: 0 }).unwrap();
        assert_eq!(parse_export(&c.export_text()).unwrap(), c);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(parse_export("bogus line\n"), Err(CircuitError::Parse { line: 1, .. })));
        assert!(parse_export("circuit x\n").is_err());
    }
}
