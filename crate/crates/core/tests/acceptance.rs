//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any criterion fails.

use std::time::{Duration, Instant};

use fpp_core::algorithms::{
    block_params, decompose_blocks, lemma_phase, nlogn_circuit, sim_switch_circuit, six_query_n3,
    sqrt_bound, sqrt_circuit, sqrt_circuit_for_words, sqrt_queries, superperm_sim_switch, PhaseProfile,
};
use fpp_core::circuit::{eliminate_controlled_unknowns, Circuit, ControlDescriptor};
use fpp_core::commutation::{
    brute_force_phase, factoradic_table, normal_order, relative_phase, CommutationTable, Direction,
};
use fpp_core::densesim::{build_promise_unitaries, run_dense, InitialState, PROBABILITY_TOL};
use fpp_core::numsys::{bit_weight, ceil_log2, digit_to_bits, factorial};
use fpp_core::perms::{enumerate_valid_labelings, factoradic_labeling, Labeling, PermWord};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn solves_all(c: &Circuit, l: &Labeling, ys: &[u64]) -> Result<(), String> {
    let prof = PhaseProfile::compute(c, l).map_err(|e| format!("{}: {e}", c.name()))?;
    for &y in ys {
        let r = prof.solve(y).map_err(|e| e.to_string())?;
        ensure(r.passed && r.bounds_hold(), || format!("{} labeling {} y={y}: solved {:?}", c.name(), l.name(), r.solved_y))?;
    }
    Ok(())
}

fn c1_six_query() -> Check {
    let labelings = enumerate_valid_labelings(3).map_err(|e| e.to_string())?;
    let ys: Vec<u64> = (0..6).collect();
    for l in &labelings {
        let c = six_query_n3(l).map_err(|e| e.to_string())?;
        ensure(c.query_count() == 6, || format!("six-query uses {} queries", c.query_count()))?;
        solves_all(&c, l, &ys)?;
    }
    let sp = superperm_sim_switch(&factoradic_labeling(3).unwrap()).map_err(|e| e.to_string())?;
    ensure(sp.query_count() == 7, || format!("superpermutation simulation uses {}", sp.query_count()))?;
    Ok(format!("{} labelings x 6 y solved, 6 vs 7 queries", labelings.len()))
}

fn c2_sim_switch() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 2..=6 {
        let l = factoradic_labeling(n).unwrap();
        let c = sim_switch_circuit(&l).map_err(|e| e.to_string())?;
        ensure(c.query_count() == n * n, || format!("n={n}: {} queries", c.query_count()))?;
        for x in 0..l.size() {
            let o = c.execute(x).map_err(|e| e.to_string())?;
            for i in 0..n {
                let aux = c.wire_by_label(&format!("a_{i}")).ok_or("missing aux wire")?;
                ensure(o.words[aux] == vec![i; n - 1], || format!("n={n} x={x}: a_{i} holds {:?}", o.words[aux]))?;
            }
        }
        let m = l.size();
        let mut ys = vec![0, 1, m - 1];
        ys.extend((0..10).map(|_| rng.gen_range(0..m)));
        solves_all(&c, &l, &ys)?;
    }
    Ok("n=2..6 solved, n^2 queries, aux exponent n-1".into())
}

fn c3_nlogn() -> Check {
    for (n, reduced, want) in [(4, false, 18), (8, false, 56), (8, true, 46)] {
        let q = nlogn_circuit(n, reduced).map_err(|e| e.to_string())?.query_count();
        ensure(q == want, || format!("n={n} reduced={reduced}: {q} queries, expected {want}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut toggles = 0;
    for n in 2..=6 {
        let l = factoradic_labeling(n).unwrap();
        let c = nlogn_circuit(n, false).map_err(|e| e.to_string())?;
        let m = l.size();
        let mut ys = vec![0, 1, m - 1];
        ys.extend((0..5).map(|_| rng.gen_range(0..m)));
        solves_all(&c, &l, &ys)?;

        let t = factoradic_table(n).unwrap();
        let ControlDescriptor::Bits { slots, .. } = c.control() else { return Err("expected bit control".into()) };
        let zero = vec![false; c.wires().len()];
        let base = c.execute_bits(&zero).map_err(|e| e.to_string())?;
        for s in slots {
            let mut bits = zero.clone();
            bits[s.wire] = true;
            let o = c.execute_bits(&bits).map_err(|e| e.to_string())?;
            let mut total = 0;
            for w in c.data_wires() {
                let p = relative_phase(&o.product(w.id), &base.product(w.id), &t).ok_or("residual changed")?;
                total = (total + p) % m;
            }
            let expect = bit_weight(s.k, s.i) * factorial(s.k).unwrap() % m;
            ensure(total == expect, || format!("n={n} c_({},{}): phase {total}, expected {expect}", s.k, s.i))?;
            toggles += 1;
        }
    }
    Ok(format!("18/56/46 queries, n=2..6 solved, {toggles} bit toggles"))
}

fn c4_sqrt() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 2..=12 {
        let (nh, kh) = block_params(n);
        let formula = ((nh + 4 * kh - 4) * n) as u64;
        // Beyond n = 8 the full table is too large; a word sample fixes the routes.
        let words: Vec<PermWord> = if n <= 8 {
            factoradic_labeling(n).unwrap().words().to_vec()
        } else {
            (0..64)
                .map(|_| {
                    let mut v: Vec<usize> = (0..n).collect();
                    v.shuffle(&mut rng);
                    PermWord::new(v).unwrap()
                })
                .collect()
        };
        let c = sqrt_circuit_for_words(n, &words).map_err(|e| e.to_string())?;
        let counted = c.query_count() as u64;
        ensure(counted == formula && sqrt_queries(n) == formula, || format!("n={n}: counted {counted}, formula {formula}"))?;
        for (x, w) in words.iter().enumerate().step_by(if n <= 8 { 97 } else { 1 }) {
            let o = c.execute(x as u64).map_err(|e| e.to_string())?;
            let d = decompose_blocks(w);
            ensure(o.product(1) == d.pi_xk[0].order(), || format!("n={n} x={x}: Ψ_0 word differs"))?;
        }
    }
    for n in 1..=10_000 {
        let q = sqrt_queries(n) as f64;
        ensure(q <= sqrt_bound(n), || format!("n={n}: {q} > {}", sqrt_bound(n)))?;
    }
    for n in 4..=7 {
        let l = factoradic_labeling(n).unwrap();
        let c = sqrt_circuit(&l).map_err(|e| e.to_string())?;
        let ys: Vec<u64> = (0..20).map(|_| rng.gen_range(0..l.size())).collect();
        solves_all(&c, &l, &ys)?;
    }
    Ok("counts match formula n=2..12, bound holds n<=10^4, n=4..7 solved".into())
}

fn c5_lemma() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let n = rng.gen_range(4..=12);
        let t = CommutationTable::random(n, &mut rng).map_err(|e| e.to_string())?;
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(&mut rng);
        let d = decompose_blocks(&PermWord::new(v.clone()).unwrap());
        ensure(lemma_phase(&d, &t) == brute_force_phase(&v, &t), || format!("lemma fails for {v:?}"))?;
    }
    let w = |v: &[usize]| PermWord::new(v.to_vec()).unwrap();
    let d = decompose_blocks(&w(&[3, 5, 8, 0, 2, 7, 4, 6, 1]));
    ensure(
        d.pi_xk == [w(&[8, 7, 5, 3, 2, 0, 4, 6, 1]), w(&[8, 5, 3, 0, 2, 7, 6, 4, 1]), w(&[3, 5, 8, 7, 6, 4, 2, 1, 0])]
            && d.pi_r_xk == [w(&[1, 4, 6, 0, 2, 3, 5, 7, 8]), w(&[0, 1, 2, 4, 6, 7, 3, 5, 8])],
        || "nine-gate block example differs".into(),
    )?;
    Ok("1000 random permutations, nine-gate example reproduced".into())
}

fn c6_greedy_bits() -> Check {
    let mut cases = 0;
    for n in 2..=64 {
        for k in 1..n {
            for a in 0..=k as u64 {
                let bits = digit_to_bits(a, k, n).map_err(|e| e.to_string())?;
                let sum: u64 = bits.iter().zip(1..).filter(|(b, _)| **b).map(|(_, i)| bit_weight(k, i)).sum();
                ensure(bits.len() == ceil_log2(n) as usize && sum == a, || format!("n={n} k={k} a={a}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} digit cases"))
}

fn c7_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut count = 0;
    for n in 1..=7 {
        let t = CommutationTable::random(n, &mut rng).map_err(|e| e.to_string())?;
        for p in (0..n).permutations(n) {
            let fast = normal_order(&p, &t, Direction::Descending).map_err(|e| e.to_string())?;
            ensure(fast.phase == brute_force_phase(&p, &t), || format!("mismatch on {p:?}"))?;
            count += 1;
        }
    }
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=10);
        let t = CommutationTable::random(n, &mut rng).map_err(|e| e.to_string())?;
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(&mut rng);
        let fast = normal_order(&v, &t, Direction::Descending).map_err(|e| e.to_string())?;
        ensure(fast.phase == brute_force_phase(&v, &t), || format!("mismatch on {v:?}"))?;
    }
    Ok(format!("{count} exhaustive + 10000 random words"))
}

fn c8_elimination() -> Check {
    for n in 2..=6 {
        let l = factoradic_labeling(n).unwrap();
        let c = nlogn_circuit(n, false).map_err(|e| e.to_string())?;
        let e = eliminate_controlled_unknowns(&c);
        let pc = PhaseProfile::compute(&c, &l).map_err(|e| e.to_string())?;
        let pe = PhaseProfile::compute(&e, &l).map_err(|e| e.to_string())?;
        let i_hat = ceil_log2(n) as usize;
        for x in 0..l.size() {
            ensure(pc.exponent(x) == pe.exponent(x), || format!("n={n} x={x}: phase differs"))?;
            let o = e.execute(x).map_err(|e| e.to_string())?;
            for k in 1..n {
                let a = e.wire_by_label(&format!("a_{k}")).ok_or_else(|| format!("n={n}: no a_{k}"))?;
                ensure(o.product(a) == vec![k; i_hat], || format!("n={n} x={x}: a_{k} holds {:?}", o.product(a)))?;
            }
        }
        for y in [0, 1, l.size() - 1] {
            let (rc, re) = (pc.solve(y).map_err(|e| e.to_string())?, pe.solve(y).map_err(|e| e.to_string())?);
            ensure(rc.passed && re.passed && rc.solved_y == re.solved_y, || format!("n={n} y={y}"))?;
        }
    }
    Ok("n=2..6 identical phases, every a_k holds U_k^(ceil log2 n)".into())
}

fn c9_dense() -> Check {
    let mut runs = 0;
    let cases: Vec<(usize, Circuit)> = vec![
        (2, sim_switch_circuit(&factoradic_labeling(2).unwrap()).map_err(|e| e.to_string())?),
        (3, six_query_n3(&factoradic_labeling(3).unwrap()).map_err(|e| e.to_string())?),
        (3, sim_switch_circuit(&factoradic_labeling(3).unwrap()).map_err(|e| e.to_string())?),
    ];
    for (n, c) in &cases {
        let l = factoradic_labeling(*n).unwrap();
        let t = factoradic_table(*n).unwrap();
        let prof = PhaseProfile::compute(c, &l).map_err(|e| e.to_string())?;
        for y in 0..l.size() {
            let symbolic = prof.solve(y).map_err(|e| e.to_string())?.solved_y;
            let units = build_promise_unitaries(*n, y, &t).map_err(|e| e.to_string())?;
            let out = run_dense(c, &units, y, InitialState::Random { seed: y }).map_err(|e| e.to_string())?;
            ensure(Some(out.measured_y) == symbolic && out.peak_probability >= 1.0 - PROBABILITY_TOL, || {
                format!("{} y={y}: dense {} (p={}), symbolic {symbolic:?}", c.name(), out.measured_y, out.peak_probability)
            })?;
            runs += 1;
        }
    }
    Ok(format!("{runs} dense runs agree with symbolic"))
}

fn c10_enumeration() -> Check {
    let all = enumerate_valid_labelings(3).map_err(|e| e.to_string())?;
    ensure(all.len() == 24, || format!("{} labelings", all.len()))?;
    ensure(all.iter().all(|l| l.map(0) == &PermWord::descending(3)), || "x_210 != 0".into())?;
    Ok("24 consistent labelings with x_210 = 0".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, Duration, fn() -> Check); 10] = [
        ("1 six-query n=3", Duration::from_secs(1), c1_six_query),
        ("2 n^2 simulation", Duration::from_secs(30), c2_sim_switch),
        ("3 n log n", Duration::from_secs(120), c3_nlogn),
        ("4 n sqrt n", Duration::from_secs(300), c4_sqrt),
        ("5 block lemma", Duration::from_secs(10), c5_lemma),
        ("6 greedy bits", Duration::from_secs(5), c6_greedy_bits),
        ("7 oracle equivalence", Duration::from_secs(30), c7_oracle),
        ("8 elimination", Duration::MAX, c8_elimination),
        ("9 dense cross-check", Duration::from_secs(120), c9_dense),
        ("10 enumeration", Duration::from_secs(1), c10_enumeration),
    ];
    let mut failed = Vec::new();
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let limit_txt = if limit == Duration::MAX { "none".to_string() } else { format!("{:.0} s", limit.as_secs_f64()) };
        let (ok, detail) = match result {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over time limit")),
            Err(e) => (false, e),
        };
        println!("{} criterion {name}: {detail} [{:.2} s, limit {limit_txt}]", if ok { "PASS" } else { "FAIL" }, took.as_secs_f64());
        if !ok {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
