//! Six calls suffice for every promise problem on three gates.

use super::superperm::scheduled;
use super::{check_labeling, AlgorithmError};
use crate::circuit::{Circuit, Family, WireKind};
use crate::perms::Labeling;

/// Call order in time.
const TIME: [usize; 6] = [0, 1, 2, 1, 0, 1];

/// Per `Π_x`, which state receives each call: `P = Ψ_1`, `Q = Ψ_2`, `A = a_1`.
const ROUTES: [([usize; 3], &str); 6] = [
    ([2, 1, 0], "PPPAQQ"),
    ([2, 0, 1], "PPPQQA"),
    ([1, 2, 0], "PAPPQQ"),
    ([0, 2, 1], "QPPAPQ"),
    ([1, 0, 2], "QQPAPP"),
    ([0, 1, 2], "QQPPPA"),
];

/// Works for any labeling: the routing depends only on the word `Π_x`.
pub fn six_query_n3(l: &Labeling) -> Result<Circuit, AlgorithmError> {
    check_labeling(l, 3)?;
    let states = [
        (WireKind::Target, "Ψ_1".to_string()),
        (WireKind::Target, "Ψ_2".to_string()),
        (WireKind::Auxiliary, "a_1".to_string()),
    ];
    scheduled("six-query-3".into(), Family::SixQuery, l, &TIME, &states, |w| {
        let (_, route) = ROUTES.iter().find(|(word, _)| word == w.order()).expect("all six words listed");
        route
            .chars()
            .map(|c| match c {
                'P' => 0,
                'Q' => 1,
                _ => 2,
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perms::{factoradic_labeling, PermWord};

    #[test]
    fn rows_of_the_table() {
        let l = factoradic_labeling(3).unwrap();
        let c = six_query_n3(&l).unwrap();
        assert_eq!(c.query_count(), 6);
        let o = c.execute(0).unwrap();
        assert_eq!(o.product(1), vec![2, 1, 0]);
        assert_eq!(o.product(2), vec![1, 0]);
        let x201 = l.label_of(&PermWord::new(vec![2, 0, 1]).unwrap()).unwrap();
        let o = c.execute(x201).unwrap();
        assert_eq!(o.product(1), vec![2, 1, 0]);
        assert_eq!(o.product(2), vec![0, 1]);
        assert_eq!(o.product(3), vec![1]);
    }

    #[test]
    fn route_letters_are_consistent() {
        for (word, route) in ROUTES {
            let p: Vec<usize> = route.chars().zip(TIME).filter(|(c, _)| *c == 'P').map(|(_, g)| g).collect();
            let q: Vec<usize> = route.chars().zip(TIME).filter(|(c, _)| *c == 'Q').map(|(_, g)| g).collect();
            let a: Vec<usize> = route.chars().zip(TIME).filter(|(c, _)| *c == 'A').map(|(_, g)| g).collect();
            let mut p_sorted = p.clone();
            p_sorted.sort();
            assert_eq!(p_sorted, vec![0, 1, 2], "{word:?}");
            let mut q_sorted = q.clone();
            q_sorted.sort();
            assert_eq!(q_sorted, vec![0, 1]);
            assert_eq!(a, vec![1]);
        }
    }

    #[test]
    fn wrong_size_rejected() {
        assert!(six_query_n3(&factoradic_labeling(4).unwrap()).is_err());
    }
}
