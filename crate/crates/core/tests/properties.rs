use std::collections::BTreeMap;

use aisemi::algebra::{registry, registry_names, validate};
use aisemi::derivation::{check_step, successors, SearchBounds};
use aisemi::enumeration::{canonical_form, enumerate_ai_semirings, permutations, relabel};
use aisemi::satisfaction::{eval, holds_identity, holds_inequality, reduce_identity, Assignment};
use aisemi::structure::{enumerate_congruences, is_congruence, quotient};
use aisemi::terms::{var, Identity, Substitution, Term, Variable, Word};
use aisemi::{natural_order, FiniteAiSemiring};
use proptest::prelude::*;

const NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn word_strategy(vars: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..vars, 1..=max_len).prop_map(|ix| Word::new(ix.into_iter().map(|i| var(NAMES[i])).collect()).unwrap())
}

fn term_strategy(vars: usize, max_summands: usize, max_len: usize) -> impl Strategy<Value = Term> {
    prop::collection::vec(word_strategy(vars, max_len), 1..=max_summands).prop_map(|ws| Term::from_words(ws).unwrap())
}

fn subst_strategy() -> impl Strategy<Value = Substitution> {
    prop::collection::vec(term_strategy(3, 2, 2), 3).prop_map(|images| {
        Substitution::from_pairs(NAMES.iter().zip(images).map(|(n, t)| (var(n), t)))
    })
}

fn registry_algebra() -> impl Strategy<Value = FiniteAiSemiring> {
    prop::sample::select(registry_names().to_vec()).prop_map(|n| registry(n).unwrap())
}

fn assignment(s: &FiniteAiSemiring, values: &[usize]) -> Assignment {
    NAMES
        .iter()
        .zip(values)
        .map(|(n, &v)| (var(n), v % s.order()))
        .collect::<BTreeMap<Variable, usize>>()
}

proptest! {
    #[test]
    fn substitutions_are_homomorphisms(u in term_strategy(4, 3, 3), v in term_strategy(4, 3, 3), phi in subst_strategy()) {
        prop_assert_eq!(phi.apply(&u.add(&v)), phi.apply(&u).add(&phi.apply(&v)));
        prop_assert_eq!(phi.apply(&u.mul(&v)), phi.apply(&u).mul(&phi.apply(&v)));
    }

    #[test]
    fn content_of_an_image(u in term_strategy(4, 3, 3), phi in subst_strategy()) {
        let expected = u.content().iter().flat_map(|x| phi.image(x).content()).collect();
        prop_assert_eq!(phi.apply(&u).content(), expected);
    }

    #[test]
    fn addition_is_a_semilattice(u in term_strategy(4, 3, 3), v in term_strategy(4, 3, 3), w in term_strategy(4, 3, 3)) {
        prop_assert_eq!(u.add(&u), u.clone());
        prop_assert_eq!(u.add(&v), v.add(&u));
        prop_assert_eq!(u.add(&v).add(&w), u.add(&v.add(&w)));
        prop_assert_eq!(u.mul(&v).mul(&w), u.mul(&v.mul(&w)));
        prop_assert_eq!(u.mul(&v.add(&w)), u.mul(&v).add(&u.mul(&w)));
    }

    #[test]
    fn evaluation_is_a_homomorphism(
        s in registry_algebra(),
        u in term_strategy(4, 3, 3),
        v in term_strategy(4, 3, 3),
        values in prop::collection::vec(0usize..6, 4),
    ) {
        let a = assignment(&s, &values);
        let (eu, ev) = (eval(&u, &s, &a).unwrap(), eval(&v, &s, &a).unwrap());
        prop_assert_eq!(eval(&u.add(&v), &s, &a).unwrap(), s.add(eu, ev));
        prop_assert_eq!(eval(&u.mul(&v), &s, &a).unwrap(), s.mul(eu, ev));
    }

    #[test]
    fn substitution_then_evaluation(
        s in registry_algebra(),
        u in term_strategy(4, 3, 3),
        phi in subst_strategy(),
        values in prop::collection::vec(0usize..6, 4),
    ) {
        let a = assignment(&s, &values);
        let composed: Assignment = NAMES.iter().map(|n| (var(n), eval(&phi.image(&var(n)), &s, &a).unwrap())).collect();
        prop_assert_eq!(eval(&phi.apply(&u), &s, &a).unwrap(), eval(&u, &s, &composed).unwrap());
    }

    #[test]
    fn identities_reduce_to_inequalities(s in registry_algebra(), u in term_strategy(3, 3, 3), v in term_strategy(3, 3, 3)) {
        let direct = holds_identity(&s, &u, &v).unwrap().holds;
        let reduced = reduce_identity(&u, &v)
            .iter()
            .all(|i| holds_inequality(&s, &i.lhs, &i.rhs).unwrap().holds);
        prop_assert_eq!(direct, reduced);
    }

    #[test]
    fn counterexamples_reproduce(s in registry_algebra(), u in term_strategy(3, 3, 3), v in term_strategy(3, 3, 3)) {
        let verdict = holds_identity(&s, &u, &v).unwrap();
        if let Some(c) = verdict.counterexample {
            prop_assert_eq!(eval(&u, &s, &c.assignment).unwrap(), c.lhs_value);
            prop_assert_eq!(eval(&v, &s, &c.assignment).unwrap(), c.rhs_value);
            prop_assert_ne!(c.lhs_value, c.rhs_value);
        }
    }

    #[test]
    fn subterms_have_witnesses(u in term_strategy(3, 2, 2), p in prop::option::of(word_strategy(3, 2)), q in prop::option::of(word_strategy(3, 2)), r in prop::option::of(term_strategy(3, 2, 3))) {
        let wrapped = u.wrap(p.as_ref(), q.as_ref());
        let v = match &r { Some(r) => wrapped.add(r), None => wrapped };
        let w = u.is_subterm_of(&v).expect("constructed as a subterm");
        let rebuilt = u.wrap(w.left.as_ref(), w.right.as_ref());
        let rebuilt = Term::from_words(rebuilt.words().iter().chain(&w.rest).cloned()).unwrap();
        prop_assert_eq!(rebuilt, v);
    }

    #[test]
    fn delta_sets_meet_each_summand_once(u in term_strategy(4, 4, 3)) {
        for z in u.delta() {
            for w in u.words() {
                let hits: Vec<&Variable> = w.letters().iter().filter(|x| z.contains(*x)).collect();
                prop_assert_eq!(hits.len(), 1);
            }
        }
    }

    #[test]
    fn generated_steps_check(
        lhs in term_strategy(2, 2, 2),
        rhs in term_strategy(2, 2, 2),
        t in term_strategy(3, 3, 2),
    ) {
        let sigma = [Identity::new(lhs, rhs)];
        for (next, step) in successors(&sigma, &t, &SearchBounds::default()) {
            prop_assert_eq!(check_step(&sigma, &t, &next, &step), Ok(()));
        }
    }
}

#[test]
fn canonical_form_survives_every_relabelling() {
    let mut three = enumerate_ai_semirings(3).unwrap();
    three.extend(enumerate_ai_semirings(4).unwrap().into_iter().step_by(37));
    for s in &three {
        let c = canonical_form(s);
        for p in permutations(s.order()) {
            assert_eq!(canonical_form(&relabel(s, &p)), c, "{}", s.name());
        }
    }
}

#[test]
fn quotients_by_congruences_validate() {
    for name in registry_names() {
        let s = registry(name).unwrap();
        for p in enumerate_congruences(&s).unwrap() {
            assert!(is_congruence(&s, &p).is_ok());
            let q = quotient(&s, &p).unwrap();
            assert!(validate(&q.add_table(), &q.mul_table()).unwrap().passed());
            assert_eq!(q.order(), p.len());
        }
    }
}

#[test]
fn natural_order_is_a_partial_order_with_top() {
    for s in enumerate_ai_semirings(4).unwrap() {
        let p = natural_order(&s);
        let k = s.order();
        for a in 0..k {
            assert!(p.leq(a, a) && p.leq(a, p.top));
            for b in 0..k {
                if p.leq(a, b) && p.leq(b, a) {
                    assert_eq!(a, b);
                }
                for c in 0..k {
                    if p.leq(a, b) && p.leq(b, c) {
                        assert!(p.leq(a, c));
                    }
                }
            }
        }
    }
}
