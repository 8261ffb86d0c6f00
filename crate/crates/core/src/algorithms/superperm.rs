//! Switch simulations driven by a fixed string of black-box calls that
//! contains every permutation as a subsequence.

use super::{check_labeling, AlgorithmError};
use crate::circuit::{Circuit, CircuitBuilder, ControlDescriptor, Family, Gate, WireId, WireKind};
use crate::perms::{Labeling, PermWord};

/// Call string for three gates, in time order.
pub const SUPERPERM_STRING_3: [usize; 7] = [1, 0, 1, 2, 1, 0, 1];

/// Twelve-call string for four gates, in time order.
pub const SUPERPERM_STRING_4: [usize; 12] = [0, 1, 2, 3, 0, 1, 2, 0, 3, 1, 0, 2];

/// Time steps routed to the target for each `Π_x` with three gates.
const TABLE_3: [([usize; 3], [usize; 3]); 6] = [
    ([2, 1, 0], [1, 2, 3]),
    ([2, 0, 1], [0, 1, 3]),
    ([1, 2, 0], [1, 3, 4]),
    ([0, 2, 1], [2, 3, 5]),
    ([1, 0, 2], [3, 5, 6]),
    ([0, 1, 2], [3, 4, 5]),
];

/// Time steps at which the target receives the gates of `w`, or `None` if
/// the string does not contain `w`. Three gates use the fixed table; four
/// gates use the leftmost subsequence match.
pub fn superperm_routing(w: &PermWord) -> Option<Vec<usize>> {
    match w.n() {
        3 => TABLE_3.iter().find(|(word, _)| word == w.order()).map(|(_, t)| t.to_vec()),
        4 => {
            let mut times = Vec::with_capacity(4);
            let mut t = 0;
            for g in w.application_order() {
                t += SUPERPERM_STRING_4[t..].iter().position(|&s| s == g)?;
                times.push(t);
                t += 1;
            }
            Some(times)
        }
        _ => None,
    }
}

/// Builds a circuit where every call in `time` acts on rail 0 and a rewiring
/// before each call moves the state `assign(Π_x)[t]` onto rail 0. A final
/// rewiring restores the initial arrangement.
pub(super) fn scheduled(
    name: String,
    family: Family,
    l: &Labeling,
    time: &[usize],
    states: &[(WireKind, String)],
    assign: impl Fn(&PermWord) -> Vec<usize>,
) -> Result<Circuit, AlgorithmError> {
    let n = l.n();
    let mut b = CircuitBuilder::new(name, family, n);
    let ctrl = b.wire(WireKind::ControlQudit { dim: l.size() }, "x");
    let rails: Vec<WireId> = states.iter().map(|(k, label)| b.wire(*k, label.clone())).collect();
    let m = rails.len();
    let plans: Vec<Vec<usize>> = l.words().iter().map(&assign).collect();
    // arrangement[x][r] = state index currently on rail r
    let mut arrangement: Vec<Vec<usize>> = vec![(0..m).collect(); plans.len()];
    let mut rewire = |b: &mut CircuitBuilder, wanted: &dyn Fn(usize) -> Vec<usize>| {
        let perms = arrangement
            .iter_mut()
            .enumerate()
            .map(|(x, arr)| {
                let next = wanted(x);
                let perm = next.iter().map(|s| arr.iter().position(|a| a == s).expect("state present")).collect();
                *arr = next;
                perm
            })
            .collect();
        b.push(Gate::Rewire { control: ctrl, rails: rails.clone(), perms });
    };
    for (t, &g) in time.iter().enumerate() {
        rewire(&mut b, &|x| {
            let chosen = plans[x][t];
            std::iter::once(chosen).chain((0..m).filter(|&s| s != chosen)).collect()
        });
        b.apply(g, rails[0]);
    }
    rewire(&mut b, &|_| (0..m).collect());
    Ok(b.build(ControlDescriptor::Qudit { wire: ctrl })?)
}

/// Simulation of the switch for `n ∈ {3, 4}` with `n² − 2n + 4` calls.
/// The target is state 0; every other call lands on the auxiliary for its
/// gate index.
pub fn superperm_sim_switch(l: &Labeling) -> Result<Circuit, AlgorithmError> {
    let n = l.n();
    let time: &[usize] = match n {
        3 => &SUPERPERM_STRING_3,
        4 => &SUPERPERM_STRING_4,
        _ => return Err(AlgorithmError::Unsupported { what: "superpermutation simulation", n }),
    };
    check_labeling(l, n)?;
    // Auxiliaries only for gates called more than once.
    let aux_gates: Vec<usize> = (0..n).filter(|&g| time.iter().filter(|&&s| s == g).count() > 1).collect();
    let mut states = vec![(WireKind::Target, "Ψ_t".to_string())];
    states.extend(aux_gates.iter().map(|g| (WireKind::Auxiliary, format!("a_{g}"))));
    scheduled(format!("superperm-{n}"), Family::Superperm, l, time, &states, |w| {
        let hits = superperm_routing(w).expect("string contains every permutation");
        time.iter()
            .enumerate()
            .map(|(t, g)| if hits.contains(&t) { 0 } else { 1 + aux_gates.iter().position(|a| a == g).expect("aux exists") })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perms::factoradic_labeling;

    #[test]
    fn three_gate_table_matches_string() {
        for (word, times) in TABLE_3 {
            let got: Vec<usize> = times.iter().map(|&t| SUPERPERM_STRING_3[t]).collect();
            let w = PermWord::new(word.to_vec()).unwrap();
            assert_eq!(got, w.application_order());
        }
    }

    #[test]
    fn every_four_gate_word_is_contained() {
        let l = factoradic_labeling(4).unwrap();
        let found = l.words().iter().filter_map(superperm_routing).count();
        assert_eq!(found, 24);
        // Only nine contiguous windows exist, so containment is as a subsequence.
        assert!(SUPERPERM_STRING_4.windows(4).count() < 24);
    }

    #[test]
    fn three_gate_counts_and_aux() {
        let l = factoradic_labeling(3).unwrap();
        let c = superperm_sim_switch(&l).unwrap();
        assert_eq!(c.query_count(), 7);
        let rewires = c.gates().iter().filter(|g| matches!(g, Gate::Rewire { .. })).count();
        assert_eq!(rewires, 8);
        for x in 0..6 {
            let o = c.execute(x).unwrap();
            assert_eq!(o.product(1), l.map(x).order());
            assert_eq!(o.words[2], vec![0]);
            assert_eq!(o.words[3], vec![1, 1, 1]);
            assert_eq!(o.final_rails, vec![0, 1, 2, 3]);
        }
        // Π_3 = U_0 U_2 U_1
        assert_eq!(c.execute(3).unwrap().product(1), vec![0, 2, 1]);
    }

    #[test]
    fn four_gate_circuit() {
        let l = factoradic_labeling(4).unwrap();
        let c = superperm_sim_switch(&l).unwrap();
        assert_eq!(c.query_count(), 12);
        for x in 0..24 {
            let o = c.execute(x).unwrap();
            assert_eq!(o.product(1), l.map(x).order());
            for g in 0..4 {
                let calls = SUPERPERM_STRING_4.iter().filter(|&&s| s == g).count();
                assert_eq!(o.words[2 + g], vec![g; calls - 1]);
            }
        }
    }

    #[test]
    fn other_sizes_rejected() {
        let l = factoradic_labeling(5).unwrap();
        assert!(matches!(superperm_sim_switch(&l), Err(AlgorithmError::Unsupported { .. })));
    }
}
