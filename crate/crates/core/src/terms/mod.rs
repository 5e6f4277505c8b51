//! Terms of the free ai-semiring: finite nonempty sets of nonempty words.
//!
//! A [`Word`] is a nonempty sequence of [`Variable`]s and a [`Term`] is a
//! nonempty set of words, written as a formal sum. Addition is union and
//! multiplication is pairwise concatenation.

mod parse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use parse::{parse_identity, parse_inequality, parse_term, parse_word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("empty term")]
    Empty,
    #[error("empty summand at position {0}")]
    EmptySummand(usize),
    #[error("illegal identifier {0:?}: a variable is one letter followed by optional digits")]
    IllegalIdentifier(String),
    #[error("expected a single word, found {0} summands")]
    NotAWord(usize),
    #[error("expected `{0}`")]
    MissingRelation(&'static str),
}

/// A variable: one ASCII letter followed by optional digits (`x`, `x1`,
/// `y12`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: &str) -> Result<Self, TermError> {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() && chars.all(|c| c.is_ascii_digit()) => {
                Ok(Variable(name.into()))
            }
            _ => Err(TermError::IllegalIdentifier(name.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    fn key(&self) -> (&str, usize, &str) {
        let (letter, digits) = self.0.split_at(1);
        let trimmed = digits.trim_start_matches('0');
        (letter, trimmed.len(), trimmed)
    }
}

/// Letter first, then the numeric suffix by value, so `x2 < x10`.
impl Ord for Variable {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key()
            .cmp(&other.key())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Variable {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Shorthand for tests and generators; panics on an illegal name.
pub fn var(name: &str) -> Variable {
    Variable::new(name).expect("legal variable name")
}

/// A nonempty word over the variables, ordered by length and then
/// lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<Variable>);

impl Word {
    pub fn new(letters: Vec<Variable>) -> Option<Self> {
        (!letters.is_empty()).then_some(Word(letters))
    }

    pub fn from_var(x: Variable) -> Self {
        Word(vec![x])
    }

    pub fn letters(&self) -> &[Variable] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `left · self · right`, where either context may be the empty word.
    pub fn wrap(&self, left: Option<&Word>, right: Option<&Word>) -> Word {
        let mut v = Vec::new();
        if let Some(l) = left {
            v.extend_from_slice(&l.0);
        }
        v.extend_from_slice(&self.0);
        if let Some(r) = right {
            v.extend_from_slice(&r.0);
        }
        Word(v)
    }

    pub fn content(&self) -> BTreeSet<Variable> {
        self.0.iter().cloned().collect()
    }

    pub fn occ(&self, x: &Variable) -> usize {
        self.0.iter().filter(|y| *y == x).count()
    }

    pub fn is_linear(&self) -> bool {
        let c = self.content();
        c.len() == self.len()
    }

    /// Contiguous factors of length two.
    pub fn factors2(&self) -> BTreeSet<Word> {
        self.0.windows(2).map(|w| Word(w.to_vec())).collect()
    }

    /// Scattered subwords of length two: `w[i] w[j]` for all `i < j`.
    pub fn subwords2(&self) -> BTreeSet<Word> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| Word(vec![self.0[i].clone(), self.0[j].clone()]))
            .collect()
    }

    /// All contiguous nonempty factors.
    pub fn factors(&self) -> BTreeSet<Word> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .map(|(i, j)| Word(self.0[i..j].to_vec()))
            .collect()
    }

    pub fn sorted_letters(&self) -> Word {
        let mut v = self.0.clone();
        v.sort();
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.0 {
            f.write_str(x.name())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Variable> for Word {
    fn from(x: Variable) -> Self {
        Word::from_var(x)
    }
}

/// A nonempty finite set of words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term(BTreeSet<Word>);

impl Term {
    pub fn from_words(words: impl IntoIterator<Item = Word>) -> Option<Self> {
        let set: BTreeSet<Word> = words.into_iter().collect();
        (!set.is_empty()).then_some(Term(set))
    }

    pub fn word(w: Word) -> Self {
        Term(BTreeSet::from([w]))
    }

    pub fn variable(x: Variable) -> Self {
        Term::word(Word::from_var(x))
    }

    pub fn words(&self) -> &BTreeSet<Word> {
        &self.0
    }

    pub fn into_words(self) -> BTreeSet<Word> {
        self.0
    }

    /// Number of summands.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.0.contains(w)
    }

    pub fn add(&self, other: &Term) -> Term {
        Term(self.0.union(&other.0).cloned().collect())
    }

    pub fn add_word(&self, w: &Word) -> Term {
        let mut s = self.0.clone();
        s.insert(w.clone());
        Term(s)
    }

    pub fn mul(&self, other: &Term) -> Term {
        Term(
            self.0
                .iter()
                .flat_map(|a| other.0.iter().map(move |b| a.concat(b)))
                .collect(),
        )
    }

    /// `left · self · right` applied summand-wise.
    pub fn wrap(&self, left: Option<&Word>, right: Option<&Word>) -> Term {
        Term(self.0.iter().map(|w| w.wrap(left, right)).collect())
    }

    pub fn content(&self) -> BTreeSet<Variable> {
        self.0.iter().flat_map(|w| w.0.iter().cloned()).collect()
    }

    pub fn max_word_len(&self) -> usize {
        self.0.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn factors2(&self) -> BTreeSet<Word> {
        self.0.iter().flat_map(Word::factors2).collect()
    }

    pub fn subwords2(&self) -> BTreeSet<Word> {
        self.0.iter().flat_map(Word::subwords2).collect()
    }

    /// Summands of length exactly `k`.
    pub fn level(&self, k: usize) -> BTreeSet<Word> {
        self.0.iter().filter(|w| w.len() == k).cloned().collect()
    }

    /// Summands of length at least `k`.
    pub fn level_geq(&self, k: usize) -> BTreeSet<Word> {
        self.0.iter().filter(|w| w.len() >= k).cloned().collect()
    }

    /// All sets `Z` of variables meeting every summand in exactly one
    /// variable, which occurs exactly once in that summand.
    pub fn delta(&self) -> BTreeSet<BTreeSet<Variable>> {
        let words: Vec<&Word> = self.0.iter().collect();
        let mut out = BTreeSet::new();
        delta_search(&words, 0, &mut BTreeSet::new(), &mut BTreeSet::new(), &mut out);
        out
    }

    pub fn apply(&self, phi: &Substitution) -> Term {
        phi.apply(self)
    }

    /// Looks for words `p1`, `p2` (possibly empty) with
    /// `other = p1 · self · p2 + p3`.
    pub fn is_subterm_of(&self, other: &Term) -> Option<SubtermWitness> {
        is_subterm(self, other)
    }

    /// Sorts the letters of every word, merging summands that become equal.
    pub fn commutative_normalize(&self) -> Term {
        Term(self.0.iter().map(Word::sorted_letters).collect())
    }
}

fn delta_search(
    words: &[&Word],
    i: usize,
    chosen: &mut BTreeSet<Variable>,
    forbidden: &mut BTreeSet<Variable>,
    out: &mut BTreeSet<BTreeSet<Variable>>,
) {
    let Some(w) = words.get(i) else {
        out.insert(chosen.clone());
        return;
    };
    let content = w.content();
    let here: Vec<&Variable> = content.iter().filter(|x| chosen.contains(*x)).collect();
    match here.as_slice() {
        [x] => {
            if w.occ(x) != 1 {
                return;
            }
            let added: Vec<Variable> = content
                .iter()
                .filter(|y| y != x && forbidden.insert((*y).clone()))
                .cloned()
                .collect();
            delta_search(words, i + 1, chosen, forbidden, out);
            for y in added {
                forbidden.remove(&y);
            }
        }
        [] => {
            for x in &content {
                if forbidden.contains(x) || w.occ(x) != 1 {
                    continue;
                }
                chosen.insert(x.clone());
                let added: Vec<Variable> = content
                    .iter()
                    .filter(|y| *y != x && forbidden.insert((*y).clone()))
                    .cloned()
                    .collect();
                delta_search(words, i + 1, chosen, forbidden, out);
                for y in added {
                    forbidden.remove(&y);
                }
                chosen.remove(x);
            }
        }
        _ => {}
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({self})")
    }
}

impl From<Word> for Term {
    fn from(w: Word) -> Self {
        Term::word(w)
    }
}

/// Witness for `v = p1 · u · p2 + p3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtermWitness {
    pub left: Option<Word>,
    pub right: Option<Word>,
    /// Summands of `v` not covered by `p1 · u · p2`.
    pub rest: BTreeSet<Word>,
}

fn slice_word(letters: &[Variable]) -> Option<Word> {
    Word::new(letters.to_vec())
}

pub fn is_subterm(u: &Term, v: &Term) -> Option<SubtermWitness> {
    let first = u.0.iter().next().expect("terms are nonempty");
    let m = first.len();
    for host in &v.0 {
        if host.len() < m {
            continue;
        }
        for i in 0..=host.len() - m {
            if host.0[i..i + m] != first.0[..] {
                continue;
            }
            let left = slice_word(&host.0[..i]);
            let right = slice_word(&host.0[i + m..]);
            let covered = u.wrap(left.as_ref(), right.as_ref());
            if covered.0.is_subset(&v.0) {
                let rest = v.0.difference(&covered.0).cloned().collect();
                return Some(SubtermWitness { left, right, rest });
            }
        }
    }
    None
}

/// An endomorphism of the free ai-semiring, given by the images of finitely
/// many variables; every other variable is fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<Variable, Term>);

impl Substitution {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Variable, Term)>) -> Self {
        Substitution(pairs.into_iter().collect())
    }

    pub fn insert(&mut self, x: Variable, image: Term) {
        self.0.insert(x, image);
    }

    pub fn remove(&mut self, x: &Variable) {
        self.0.remove(x);
    }

    pub fn get(&self, x: &Variable) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn mapping(&self) -> &BTreeMap<Variable, Term> {
        &self.0
    }

    pub fn image(&self, x: &Variable) -> Term {
        self.0
            .get(x)
            .cloned()
            .unwrap_or_else(|| Term::variable(x.clone()))
    }

    pub fn apply_word(&self, w: &Word) -> Term {
        let mut letters = w.0.iter();
        let first = self.image(letters.next().expect("words are nonempty"));
        letters.fold(first, |acc, x| acc.mul(&self.image(x)))
    }

    pub fn apply(&self, t: &Term) -> Term {
        Term(t.0.iter().flat_map(|w| self.apply_word(w).0).collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}->{t}")?;
        }
        Ok(())
    }
}

/// An identity `lhs = rhs` between terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Self { lhs, rhs }
    }

    pub fn is_trivial(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn flipped(&self) -> Self {
        Self::new(self.rhs.clone(), self.lhs.clone())
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// An inequality `q <= u` with a single word on the left, shorthand for
/// `u = u + q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub lhs: Word,
    pub rhs: Term,
}

impl Inequality {
    pub fn new(lhs: Word, rhs: Term) -> Self {
        Self { lhs, rhs }
    }

    pub fn as_identity(&self) -> Identity {
        Identity::new(self.rhs.clone(), self.rhs.add_word(&self.lhs))
    }

    pub fn content(&self) -> BTreeSet<Variable> {
        let mut c = self.rhs.content();
        c.extend(self.lhs.content());
        c
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    fn vars(names: &[&str]) -> BTreeSet<Variable> {
        names.iter().map(|n| var(n)).collect()
    }

    #[test]
    fn variable_order_is_numeric() {
        assert!(var("x2") < var("x10"));
        assert!(var("x") < var("x1"));
        assert!(var("x9") < var("y1"));
        assert!(Variable::new("1x").is_err());
        assert!(Variable::new("xy").is_err());
    }

    #[test]
    fn add_and_mul() {
        assert_eq!(t("x").add(&t("x")), t("x"));
        assert_eq!(t("x + y").mul(&t("z")), t("xz + yz"));
        assert_eq!(t("x + y").mul(&t("u + v")), t("xu + xv + yu + yv"));
    }

    #[test]
    fn attributes() {
        let x1x2x1 = w("x1x2x1");
        assert_eq!(x1x2x1.content(), vars(&["x1", "x2"]));
        assert_eq!(x1x2x1.len(), 3);
        assert_eq!(x1x2x1.occ(&var("x1")), 2);
        assert_eq!(w("x").occ(&var("y")), 0);
        assert_eq!(w("xyz").factors2(), [w("xy"), w("yz")].into());
        assert_eq!(w("xyz").subwords2(), [w("xy"), w("xz"), w("yz")].into());
        assert!(t("x + y").level_geq(2).is_empty());
        assert!(w("x1x2x3").is_linear());
        assert!(!w("x1x1").is_linear());
    }

    #[test]
    fn delta_small_cases() {
        assert_eq!(t("xy").delta(), [vars(&["x"]), vars(&["y"])].into());
        assert_eq!(t("x + xy").delta(), [vars(&["x"])].into());
        assert_eq!(t("xx").delta(), BTreeSet::new());
        assert_eq!(t("xy + yx").delta(), [vars(&["x"]), vars(&["y"])].into());
    }

    #[test]
    fn substitution() {
        let phi = Substitution::from_pairs([(var("x"), t("y1"))]);
        assert_eq!(phi.apply(&t("x + xx")), t("y1 + y1y1"));
        let phi = Substitution::from_pairs([(var("x"), t("a + b"))]);
        assert_eq!(phi.apply(&t("xx")), t("aa + ab + ba + bb"));
        let u = t("x1x2 + x2x3 + y1");
        assert_eq!(Substitution::identity().apply(&u), u);
    }

    #[test]
    fn subterms() {
        let wit = t("x").is_subterm_of(&t("yxz + w")).unwrap();
        assert_eq!(wit.left, Some(w("y")));
        assert_eq!(wit.right, Some(w("z")));
        assert_eq!(wit.rest, [w("w")].into());

        let u = t("xy + z");
        let wit = u.is_subterm_of(&u).unwrap();
        assert_eq!((wit.left, wit.right), (None, None));
        assert!(wit.rest.is_empty());

        assert!(t("x + y").is_subterm_of(&t("axb + w")).is_none());
        assert!(t("x + y").is_subterm_of(&t("axb + ayb")).is_some());
    }

    #[test]
    fn commutative_normalization() {
        assert_eq!(t("y2y1").commutative_normalize(), t("y1y2"));
        let fixed = t("x1x2 + x3 + x1x4x5");
        assert_eq!(fixed.commutative_normalize(), fixed);
        assert_eq!(t("xy + yx + x").commutative_normalize(), t("xy + x"));
    }

    #[test]
    fn inequality_as_identity() {
        let ineq = parse_inequality("y <= x + xy").unwrap();
        let id = ineq.as_identity();
        assert_eq!(id.lhs, t("x + xy"));
        assert_eq!(id.rhs, t("x + y + xy"));
    }
}
