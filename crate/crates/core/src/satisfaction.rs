//! Evaluation of terms in a finite ai-semiring and satisfaction of
//! identities and inequalities.
//!
//! [`BruteForce`] enumerates every assignment of the variables. Assignments
//! are visited as mixed-radix counters over the variables sorted by name,
//! with the last variable changing fastest; the reported counterexample is
//! always the first failing assignment in that order, whether or not the
//! search runs in parallel.
//!
//! [`decide_s2`], [`decide_s7`] and [`decide_s53`] decide inequalities in
//! the three three-element algebras `S2`, `S7`, `S53` from the shape of the
//! terms alone.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::FiniteAiSemiring;
use crate::terms::{Identity, Inequality, Term, Variable, Word};

pub type Assignment = BTreeMap<Variable, usize>;

/// Largest assignment space searched without an override (`4^16`).
pub const DEFAULT_ASSIGNMENT_LIMIT: u128 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("variable {0} is not assigned")]
    Unassigned(Variable),
    #[error("{vars} variables over {order} elements give {space} assignments, above the limit of {limit}; pass an override to search anyway")]
    TooManyAssignments {
        vars: usize,
        order: usize,
        space: u128,
        limit: u128,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub assignment: Assignment,
    /// Value of the left side (`q` of `q <= u`, or `u` of `u = v`).
    pub lhs_value: usize,
    /// Value of the right side.
    pub rhs_value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatisfactionVerdict {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

impl SatisfactionVerdict {
    fn from_search(c: Option<Counterexample>) -> Self {
        Self {
            holds: c.is_none(),
            counterexample: c,
        }
    }
}

fn eval_word_with(s: &FiniteAiSemiring, w: &Word, value: impl Fn(&Variable) -> Result<usize, SatError>) -> Result<usize, SatError> {
    let mut letters = w.letters().iter();
    let first = value(letters.next().expect("nonempty word"))?;
    letters.try_fold(first, |acc, x| Ok(s.mul(acc, value(x)?)))
}

/// Value of a word under an assignment (left-to-right product).
pub fn eval_word(w: &Word, s: &FiniteAiSemiring, a: &Assignment) -> Result<usize, SatError> {
    eval_word_with(s, w, |x| a.get(x).copied().ok_or_else(|| SatError::Unassigned(x.clone())))
}

/// Value of a term under an assignment (sum of its words).
pub fn eval(t: &Term, s: &FiniteAiSemiring, a: &Assignment) -> Result<usize, SatError> {
    let mut words = t.words().iter();
    let first = eval_word(words.next().expect("nonempty term"), s, a)?;
    words.try_fold(first, |acc, w| Ok(s.add(acc, eval_word(w, s, a)?)))
}

/// A term with its variables replaced by slots into a value vector.
struct Compiled {
    words: Vec<Vec<usize>>,
}

impl Compiled {
    fn new(t: &Term, slots: &BTreeMap<&Variable, usize>) -> Self {
        Compiled {
            words: t
                .words()
                .iter()
                .map(|w| w.letters().iter().map(|x| slots[x]).collect())
                .collect(),
        }
    }

    #[inline]
    fn eval(&self, s: &FiniteAiSemiring, values: &[usize]) -> usize {
        let word = |w: &Vec<usize>| {
            w[1..]
                .iter()
                .fold(values[w[0]], |acc, &i| s.mul(acc, values[i]))
        };
        self.words[1..]
            .iter()
            .fold(word(&self.words[0]), |acc, w| s.add(acc, word(w)))
    }
}

/// Exhaustive satisfaction checker.
#[derive(Debug, Clone, Copy)]
pub struct BruteForce {
    /// Search spaces above [`DEFAULT_ASSIGNMENT_LIMIT`] are refused unless set.
    pub allow_large: bool,
    pub parallel: bool,
}

impl Default for BruteForce {
    fn default() -> Self {
        Self {
            allow_large: false,
            parallel: true,
        }
    }
}

const CHUNK: u128 = 1 << 14;

impl BruteForce {
    pub fn sequential() -> Self {
        Self {
            parallel: false,
            ..Self::default()
        }
    }

    pub fn allowing_large(self) -> Self {
        Self {
            allow_large: true,
            ..self
        }
    }

    fn guard(&self, vars: usize, order: usize) -> Result<u128, SatError> {
        let space = (order as u128).checked_pow(vars as u32).unwrap_or(u128::MAX);
        if !self.allow_large && space > DEFAULT_ASSIGNMENT_LIMIT {
            return Err(SatError::TooManyAssignments {
                vars,
                order,
                space,
                limit: DEFAULT_ASSIGNMENT_LIMIT,
            });
        }
        Ok(space)
    }

    /// First assignment (in counter order) for which `holds` is false.
    fn first_failure(
        &self,
        order: usize,
        vars: usize,
        holds: impl Fn(&[usize]) -> bool + Sync,
    ) -> Result<Option<Vec<usize>>, SatError> {
        let space = self.guard(vars, order)?;
        let scan = |start: u128, end: u128| -> Option<Vec<usize>> {
            let mut digits = decode(start, order, vars);
            let mut idx = start;
            while idx < end {
                if !holds(&digits) {
                    return Some(digits);
                }
                idx += 1;
                increment(&mut digits, order);
            }
            None
        };
        if !self.parallel || space <= CHUNK {
            return Ok(scan(0, space));
        }
        let chunks = space.div_ceil(CHUNK);
        Ok((0..chunks as u64)
            .into_par_iter()
            .find_map_first(|c| {
                let start = c as u128 * CHUNK;
                scan(start, (start + CHUNK).min(space))
            }))
    }

    pub fn inequality(&self, s: &FiniteAiSemiring, q: &Word, u: &Term) -> Result<SatisfactionVerdict, SatError> {
        let q_term = Term::word(q.clone());
        let mut vars = u.content();
        vars.extend(q.content());
        let vars: Vec<&Variable> = vars.iter().collect();
        let slots: BTreeMap<&Variable, usize> = vars.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let cq = Compiled::new(&q_term, &slots);
        let cu = Compiled::new(u, &slots);
        let failure = self.first_failure(s.order(), vars.len(), |vals| {
            let uv = cu.eval(s, vals);
            s.add(uv, cq.eval(s, vals)) == uv
        })?;
        Ok(SatisfactionVerdict::from_search(failure.map(|vals| Counterexample {
            lhs_value: cq.eval(s, &vals),
            rhs_value: cu.eval(s, &vals),
            assignment: to_assignment(&vars, &vals),
        })))
    }

    pub fn identity(&self, s: &FiniteAiSemiring, u: &Term, v: &Term) -> Result<SatisfactionVerdict, SatError> {
        let mut vars = u.content();
        vars.extend(v.content());
        let vars: Vec<&Variable> = vars.iter().collect();
        let slots: BTreeMap<&Variable, usize> = vars.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let cu = Compiled::new(u, &slots);
        let cv = Compiled::new(v, &slots);
        let failure = self.first_failure(s.order(), vars.len(), |vals| cu.eval(s, vals) == cv.eval(s, vals))?;
        Ok(SatisfactionVerdict::from_search(failure.map(|vals| Counterexample {
            lhs_value: cu.eval(s, &vals),
            rhs_value: cv.eval(s, &vals),
            assignment: to_assignment(&vars, &vals),
        })))
    }
}

fn decode(mut idx: u128, order: usize, vars: usize) -> Vec<usize> {
    let mut digits = vec![0; vars];
    for d in digits.iter_mut().rev() {
        *d = (idx % order as u128) as usize;
        idx /= order as u128;
    }
    digits
}

fn increment(digits: &mut [usize], order: usize) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < order {
            return;
        }
        *d = 0;
    }
}

fn to_assignment(vars: &[&Variable], vals: &[usize]) -> Assignment {
    vars.iter().map(|x| (*x).clone()).zip(vals.iter().copied()).collect()
}

/// Does `s` satisfy `q <= u`? Uses the default guard and parallel search.
pub fn holds_inequality(s: &FiniteAiSemiring, q: &Word, u: &Term) -> Result<SatisfactionVerdict, SatError> {
    BruteForce::default().inequality(s, q, u)
}

pub fn holds_identity(s: &FiniteAiSemiring, u: &Term, v: &Term) -> Result<SatisfactionVerdict, SatError> {
    BruteForce::default().identity(s, u, v)
}

/// Splits `u = v` into `u_i <= v` for each summand of `u` and `v_j <= u`
/// for each summand of `v`.
pub fn reduce_identity(u: &Term, v: &Term) -> Vec<Inequality> {
    u.words()
        .iter()
        .map(|w| Inequality::new(w.clone(), v.clone()))
        .chain(v.words().iter().map(|w| Inequality::new(w.clone(), u.clone())))
        .collect()
}

pub fn reduce(id: &Identity) -> Vec<Inequality> {
    reduce_identity(&id.lhs, &id.rhs)
}

fn content_of(words: &BTreeSet<Word>) -> BTreeSet<Variable> {
    words.iter().flat_map(Word::content).collect()
}

/// Decides `q <= u` in `S2` syntactically.
pub fn decide_s2(q: &Word, u: &Term) -> bool {
    if u.words().iter().any(|w| w.len() >= 3) {
        return true;
    }
    let c1 = content_of(&u.level(1));
    let c2 = content_of(&u.level(2));
    if !c1.is_disjoint(&c2) {
        return true;
    }
    match q.len() {
        1 => u.contains(q),
        2 => q.content().is_subset(&c2),
        _ => false,
    }
}

/// Decides `q <= u` in `S7`: `c(q) ⊆ c(u)` and `δ(u) ⊆ δ(u + q)`.
pub fn decide_s7(q: &Word, u: &Term) -> bool {
    q.content().is_subset(&u.content()) && u.delta().is_subset(&u.add_word(q).delta())
}

/// Decides `q <= u` in `S53` syntactically: `c(q) ⊆ c(u)`, and either `u`
/// is a sum of single letters containing `q`, or every length-two scattered
/// subword of `q` has a length-two scattered subword of `u` whose content it
/// covers.
pub fn decide_s53(q: &Word, u: &Term) -> bool {
    if !q.content().is_subset(&u.content()) {
        return false;
    }
    if u.level_geq(2).is_empty() {
        return u.contains(q);
    }
    let pairs = u.subwords2();
    q.subwords2()
        .iter()
        .all(|w| pairs.iter().any(|p| p.content().is_subset(&w.content())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::registry;
    use crate::terms::{parse_inequality, parse_term, parse_word, var};

    fn check(s: &FiniteAiSemiring, ineq: &str) -> SatisfactionVerdict {
        let i = parse_inequality(ineq).unwrap();
        BruteForce::sequential().inequality(s, &i.lhs, &i.rhs).unwrap()
    }

    fn assign(s: &FiniteAiSemiring, pairs: &[(&str, &str)]) -> Assignment {
        pairs
            .iter()
            .map(|(x, l)| (var(x), s.index_of(l).unwrap()))
            .collect()
    }

    #[test]
    fn eval_examples() {
        let s7 = registry("S7").unwrap();
        let a = assign(&s7, &[("x", "a"), ("y", "1")]);
        assert_eq!(s7.label(eval(&parse_term("xy").unwrap(), &s7, &a).unwrap()), "a");

        let s = registry("S4_124").unwrap();
        let a = assign(&s, &[("x", "3"), ("y", "4")]);
        assert_eq!(s.label(eval(&parse_term("xy + yx").unwrap(), &s, &a).unwrap()), "4");

        for e in 0..s.order() {
            let a = Assignment::from([(var("x"), e)]);
            assert_eq!(eval(&parse_term("x").unwrap(), &s, &a).unwrap(), e);
        }
        assert_eq!(
            eval(&parse_term("xz").unwrap(), &s, &a_only_x()),
            Err(SatError::Unassigned(var("z")))
        );
    }

    fn a_only_x() -> Assignment {
        Assignment::from([(var("x"), 0)])
    }

    #[test]
    fn family_member_in_s7() {
        let s7 = registry("S7").unwrap();
        assert!(check(&s7, "y2 <= x1x2 + x2x3 + x3x1 + y1y2 + y2y1 + y1").holds);
    }

    #[test]
    fn reflexive_inequality() {
        for name in crate::algebra::registry_names() {
            assert!(check(&registry(name).unwrap(), "x <= x").holds);
        }
    }

    #[test]
    fn s2_counterexample_is_first_in_counter_order() {
        let s2 = registry("S2").unwrap();
        let v = check(&s2, "x <= y");
        assert!(!v.holds);
        let c = v.counterexample.unwrap();
        // x -> 1 (top), y -> 2 is the least failing assignment
        assert_eq!(c.assignment, assign(&s2, &[("x", "1"), ("y", "2")]));
        assert_eq!(s2.add(c.rhs_value, c.lhs_value), s2.index_of("1").unwrap());
        // the assignment x -> 2, y -> 3 also fails: 2 + 3 = 1 != 3
        let (two, three) = (s2.index_of("2").unwrap(), s2.index_of("3").unwrap());
        assert_ne!(s2.add(three, two), three);
    }

    #[test]
    fn counterexamples_reproduce() {
        let s = registry("S53").unwrap();
        let v = check(&s, "xz <= xy + z");
        let c = v.counterexample.expect("fails in S53");
        let q = parse_word("xz").unwrap();
        let u = parse_term("xy + z").unwrap();
        let qv = eval_word(&q, &s, &c.assignment).unwrap();
        let uv = eval(&u, &s, &c.assignment).unwrap();
        assert_eq!((qv, uv), (c.lhs_value, c.rhs_value));
        assert_ne!(s.add(uv, qv), uv);
    }

    #[test]
    fn parallel_matches_sequential() {
        let s = registry("S4_124").unwrap();
        // 4^8 assignments, larger than one chunk
        let u = parse_term("x1x2 + x2x3 + x3x4 + x4x5 + x5x1 + y1 + y2y3").unwrap();
        let q = parse_word("y3").unwrap();
        let a = BruteForce::sequential().inequality(&s, &q, &u).unwrap();
        let b = BruteForce::default().inequality(&s, &q, &u).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn guard_refuses_huge_spaces() {
        let s = registry("S4_124").unwrap();
        let names: Vec<String> = (1..=17).map(|i| format!("x{i}")).collect();
        let u = parse_term(&names.join(" + ")).unwrap();
        let q = parse_word("x1").unwrap();
        assert!(matches!(
            BruteForce::default().inequality(&s, &q, &u),
            Err(SatError::TooManyAssignments { vars: 17, .. })
        ));
    }

    #[test]
    fn reduction_shape() {
        let r = reduce_identity(&parse_term("x + y").unwrap(), &parse_term("z").unwrap());
        let shown: Vec<String> = r.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["x <= z", "y <= z", "z <= x + y"]);
        let r = reduce_identity(&parse_term("x").unwrap(), &parse_term("y").unwrap());
        let shown: Vec<String> = r.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["x <= y", "y <= x"]);
    }

    #[test]
    fn deciders_on_small_cases() {
        let ineq = |s: &str| parse_inequality(s).unwrap();
        let i = ineq("x <= x");
        assert!(decide_s2(&i.lhs, &i.rhs) && decide_s7(&i.lhs, &i.rhs) && decide_s53(&i.lhs, &i.rhs));
        let i = ineq("x <= y");
        assert!(!decide_s2(&i.lhs, &i.rhs));
        let i = ineq("xz <= xy + z");
        assert!(!decide_s53(&i.lhs, &i.rhs));
        assert_eq!(decide_s53(&i.lhs, &i.rhs), check(&registry("S53").unwrap(), "xz <= xy + z").holds);
        let i = ineq("y <= xy + x");
        assert_eq!(decide_s7(&i.lhs, &i.rhs), check(&registry("S7").unwrap(), "y <= xy + x").holds);
    }
}
