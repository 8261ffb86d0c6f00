//! The `O(n log n)` circuit for the factoradic labeling.
//!
//! Target `Ψ_{2^i,j}` collects every `U_k` with `((k−1) mod 2^i) + 1 = j`.
//! Each `U_k` is called `î` times controlled on `c_{k,i} = 1` before the
//! `U_0` layer (descending `k`) and `î` times controlled on `c_{k,i} = 0`
//! after it (ascending `k`), so a set bit moves `U_k` past `U_0` and the
//! smaller gates on that wire, for a phase of `⌈k/2^i⌉·k!`.

use super::AlgorithmError;
use crate::circuit::{BitEncoding, BitSlot, Circuit, CircuitBuilder, ControlDescriptor, Family, Gate, Polarity, WireId, WireKind};
use crate::numsys::ceil_log2;

/// Wires `(i, j)` and bits `(k, i)` removed by the reduced variants.
fn dropped(n: usize) -> (Vec<(u32, usize)>, Vec<(usize, u32)>) {
    match n {
        4 => (vec![(2, 4), (2, 1)], vec![(1, 2)]),
        8 => (vec![(3, 1), (3, 2), (3, 3), (3, 8)], vec![(1, 3), (2, 3), (3, 3)]),
        _ => (Vec::new(), Vec::new()),
    }
}

fn target_index(k: usize, i: u32) -> usize {
    ((k - 1) % (1usize << i)) + 1
}

pub fn nlogn_circuit(n: usize, reduced: bool) -> Result<Circuit, AlgorithmError> {
    if n < 2 {
        return Err(AlgorithmError::Unsupported { what: "n log n circuit", n });
    }
    if reduced && n != 4 && n != 8 {
        return Err(AlgorithmError::Unsupported { what: "reduced n log n circuit", n });
    }
    let ih = ceil_log2(n);
    let (drop_wires, drop_bits) = if reduced { dropped(n) } else { (Vec::new(), Vec::new()) };
    let name = if reduced { format!("nlogn-reduced-{n}") } else { format!("nlogn-{n}") };
    let mut b = CircuitBuilder::new(name, Family::NLogN { reduced }, n);

    let mut slots = Vec::new();
    let mut bit_wire = vec![vec![None; ih as usize + 1]; n];
    for k in 1..n {
        for i in 1..=ih {
            if !drop_bits.contains(&(k, i)) {
                let wire = b.wire(WireKind::ControlBit, format!("c_{{{k},{i}}}"));
                bit_wire[k][i as usize] = Some(wire);
                slots.push(BitSlot { wire, k, i });
            }
        }
    }
    let mut targets: Vec<((u32, usize), WireId)> = Vec::new();
    for i in 1..=ih {
        for j in 1..=(1usize << i) {
            if !drop_wires.contains(&(i, j)) {
                targets.push(((i, j), b.wire(WireKind::Target, format!("Ψ_{{{},{j}}}", 1usize << i))));
            }
        }
    }
    let target_of = |i: u32, k: usize| targets.iter().find(|(key, _)| *key == (i, target_index(k, i))).map(|(_, w)| *w);

    let controlled = |b: &mut CircuitBuilder, k: usize, i: u32, polarity: Polarity| {
        if let (Some(rail), Some(control)) = (target_of(i, k), bit_wire[k][i as usize]) {
            b.push(Gate::ControlledApply { gate: k, rail, control, polarity });
        }
    };
    for k in (1..n).rev() {
        for i in 1..=ih {
            controlled(&mut b, k, i, Polarity::OnOne);
        }
    }
    for &(_, w) in &targets {
        b.apply(0, w);
    }
    for k in 1..n {
        for i in (1..=ih).rev() {
            controlled(&mut b, k, i, Polarity::OnZero);
        }
    }
    Ok(b.build(ControlDescriptor::Bits { encoding: BitEncoding::FactoradicGreedy, slots })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::nlogn_queries;
    use crate::circuit::eliminate_controlled_unknowns;
    use crate::numsys::factorial;

    #[test]
    fn counts() {
        assert_eq!(nlogn_circuit(4, false).unwrap().query_count(), 18);
        assert_eq!(nlogn_circuit(4, true).unwrap().query_count(), 14);
        assert_eq!(nlogn_circuit(8, false).unwrap().query_count(), 56);
        assert_eq!(nlogn_circuit(8, true).unwrap().query_count(), 46);
        for n in 2..=16 {
            assert_eq!(nlogn_circuit(n, false).unwrap().query_count() as u64, nlogn_queries(n));
        }
        assert!(nlogn_circuit(5, true).is_err());
    }

    #[test]
    fn zero_state_words_for_four() {
        let c = nlogn_circuit(4, false).unwrap();
        let o = c.execute(0).unwrap();
        let prod = |label: &str| o.product(c.wire_by_label(label).unwrap());
        assert_eq!(prod("Ψ_{2,1}"), vec![3, 1, 0]);
        assert_eq!(prod("Ψ_{2,2}"), vec![2, 0]);
        assert_eq!(prod("Ψ_{4,1}"), vec![1, 0]);
        assert_eq!(prod("Ψ_{4,2}"), vec![2, 0]);
        assert_eq!(prod("Ψ_{4,3}"), vec![3, 0]);
        assert_eq!(prod("Ψ_{4,4}"), vec![0]);
    }

    #[test]
    fn reduced_runs_for_all_x() {
        for n in [4, 8] {
            let c = nlogn_circuit(n, true).unwrap();
            for x in 0..factorial(n).unwrap() {
                c.execute(x).unwrap();
            }
        }
    }

    #[test]
    fn eliminated_aux_words() {
        for n in 2..=6 {
            let e = eliminate_controlled_unknowns(&nlogn_circuit(n, false).unwrap());
            let ih = ceil_log2(n) as usize;
            for x in 0..factorial(n).unwrap() {
                let o = e.execute(x).unwrap();
                for k in 1..n {
                    let a = e.wire_by_label(&format!("a_{k}")).unwrap();
                    assert_eq!(o.words[a], vec![k; ih]);
                }
            }
        }
    }
}
