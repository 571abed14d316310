mod common;

use common::dense;
use fermiforge_core::num_complex::Complex64;
use fermiforge_core::operator::{commutator, qwc_compatible};
use fermiforge_core::{Pauli, PauliWord, QubitOperator};
use proptest::prelude::*;

fn word_strategy(n: usize) -> impl Strategy<Value = PauliWord> {
    prop::collection::vec(0u8..4, n).prop_map(|codes| {
        let factors = codes
            .iter()
            .enumerate()
            .filter_map(|(q, &c)| {
                [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)][c as usize].map(|a| (q, a))
            })
            .collect();
        PauliWord::new(factors).unwrap()
    })
}

fn operator_strategy(n: usize) -> impl Strategy<Value = QubitOperator> {
    prop::collection::vec((word_strategy(n), -1.0f64..1.0, -1.0f64..1.0), 1..6).prop_map(|terms| {
        let mut op = QubitOperator::zero();
        for (w, re, im) in terms {
            op.add_term(w, Complex64::new(re, im));
        }
        op
    })
}

fn max_diff(a: &dense::M, b: &dense::M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn product_matches_dense(a in operator_strategy(3), b in operator_strategy(3)) {
        let p = a.multiply(&b);
        prop_assert!(max_diff(&dense::operator(&p, 3), &(dense::operator(&a, 3) * dense::operator(&b, 3))) < 1e-12);
    }

    #[test]
    fn commutator_matches_dense(a in operator_strategy(3), b in operator_strategy(3)) {
        let (ma, mb) = (dense::operator(&a, 3), dense::operator(&b, 3));
        let c = commutator(&a, &b);
        prop_assert!(max_diff(&dense::operator(&c, 3), &(&ma * &mb - &mb * &ma)) < 1e-12);
    }

    #[test]
    fn multiplication_is_associative(a in operator_strategy(3), b in operator_strategy(3), c in operator_strategy(3)) {
        let left = a.multiply(&b).multiply(&c);
        let right = a.multiply(&b.multiply(&c));
        let diff = (&left - &right).compress(0.0);
        prop_assert!(diff.iter().all(|(_, z)| z.norm() < 1e-14));
    }

    #[test]
    fn qwc_symmetric_and_reflexive(a in word_strategy(4), b in word_strategy(4)) {
        prop_assert!(qwc_compatible(&a, &a));
        prop_assert_eq!(qwc_compatible(&a, &b), qwc_compatible(&b, &a));
        if qwc_compatible(&a, &b) {
            prop_assert!(a.commutes_with(&b));
        }
    }

    #[test]
    fn compress_spectrum_shift_bounded(terms in prop::collection::vec((word_strategy(3), -1.0f64..1.0), 1..8), eps in 0.0f64..0.5) {
        let op = QubitOperator::from_terms(terms);
        let small = op.compress(eps);
        prop_assert_eq!(small.compress(eps), small.clone());
        let dropped: f64 = op.iter().filter(|(w, _)| small.coefficient(w).norm() == 0.0).map(|(_, c)| c.norm()).sum();
        let a = dense::eigenvalues(&dense::operator(&op, 3));
        let b = dense::eigenvalues(&dense::operator(&small, 3));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= dropped + 1e-12);
        }
    }
}

#[test]
fn pauli_relations() {
    let w = |s: &str| PauliWord::parse(s).unwrap();
    let x0 = QubitOperator::term(w("X0"), 1.0);
    let y0 = QubitOperator::term(w("Y0"), 1.0);
    let z0 = QubitOperator::term(w("Z0"), 1.0);
    assert_eq!(x0.multiply(&x0), QubitOperator::identity(1.0));
    assert_eq!(
        x0.multiply(&y0),
        QubitOperator::term(w("Z0"), Complex64::new(0.0, 1.0))
    );
    assert!(commutator(&z0, &QubitOperator::term(w("Z1"), 1.0)).is_empty());
    assert_eq!(
        commutator(&x0, &z0),
        QubitOperator::term(w("Y0"), Complex64::new(0.0, -2.0))
    );
    assert!(QubitOperator::identity(1e-12).compress(1e-8).is_empty());
    assert!(qwc_compatible(&w("X0 X1"), &w("X0")));
    assert!(!qwc_compatible(&w("X0"), &w("Z0")));
    assert!(qwc_compatible(&w("X0"), &w("Z1")));
}
