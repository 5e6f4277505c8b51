//! Derivations in the equational logic of ai-semirings.
//!
//! An identity `t = t'` follows from a set `Σ` of identities exactly when
//! there is a chain `t = t1, t2, ..., tn = t'` in which consecutive terms
//! have the shape
//!
//! ```text
//! ti   = p · φ(s)  · q + r
//! ti+1 = p · φ(s') · q + r
//! ```
//!
//! for words `p`, `q` (possibly empty), a term `r` (possibly empty), a
//! substitution `φ` and an identity `s = s'` of `Σ` used in either
//! direction. [`check_derivation`] verifies explicit witnesses and never
//! searches; [`search_derivation`] looks for a chain breadth-first inside
//! explicit bounds.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::terms::{parse_identity, parse_term, parse_word, Identity, Substitution, Term, TermError, Variable, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    /// Rewrite the left side of the rule into its right side.
    Forward,
    Backward,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Forward => "fwd",
            Orientation::Backward => "bwd",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    pub left: Option<Word>,
    pub right: Option<Word>,
    pub remainder: BTreeSet<Word>,
    pub rule: Identity,
    pub orientation: Orientation,
    pub subst: Substitution,
}

impl DerivationStep {
    /// `(s, s')` for this step's direction.
    pub fn sides(&self) -> (&Term, &Term) {
        match self.orientation {
            Orientation::Forward => (&self.rule.lhs, &self.rule.rhs),
            Orientation::Backward => (&self.rule.rhs, &self.rule.lhs),
        }
    }

    fn build(&self, side: &Term) -> Term {
        let core = self.subst.apply(side).wrap(self.left.as_ref(), self.right.as_ref());
        Term::from_words(core.into_words().into_iter().chain(self.remainder.iter().cloned()))
            .expect("nonempty")
    }

    /// `p · φ(s) · q + r`.
    pub fn source(&self) -> Term {
        self.build(self.sides().0)
    }

    /// `p · φ(s') · q + r`.
    pub fn target(&self) -> Term {
        self.build(self.sides().1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub sigma: Vec<Identity>,
    pub chain: Vec<Term>,
    pub steps: Vec<DerivationStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("rule {0} is not in sigma in either direction")]
    RuleNotInSigma(Identity),
    #[error("step rebuilds {expected}, not the current term")]
    SourceMismatch { expected: Term },
    #[error("step produces {expected}, not the next term")]
    TargetMismatch { expected: Term },
}

fn rule_in_sigma(sigma: &[Identity], rule: &Identity) -> bool {
    let flipped = rule.flipped();
    sigma.iter().any(|r| *r == *rule || *r == flipped)
}

pub fn check_step(sigma: &[Identity], t: &Term, t_next: &Term, step: &DerivationStep) -> Result<(), StepError> {
    if !rule_in_sigma(sigma, &step.rule) {
        return Err(StepError::RuleNotInSigma(step.rule.clone()));
    }
    let source = step.source();
    if source != *t {
        return Err(StepError::SourceMismatch { expected: source });
    }
    let target = step.target();
    if target != *t_next {
        return Err(StepError::TargetMismatch { expected: target });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("empty chain")]
    EmptyChain,
    #[error("{steps} steps for a chain of {terms} terms")]
    StepCount { steps: usize, terms: usize },
    #[error("chain starts at {found}, claim starts at {expected}")]
    WrongStart { expected: Term, found: Term },
    #[error("chain ends at {found}, claim ends at {expected}")]
    WrongEnd { expected: Term, found: Term },
    #[error("step {index}: {source}")]
    Step {
        index: usize,
        #[source]
        source: StepError,
    },
}

impl DerivationError {
    /// Zero-based index of the failing step, if a step failed.
    pub fn step_index(&self) -> Option<usize> {
        match self {
            DerivationError::Step { index, .. } => Some(*index),
            _ => None,
        }
    }
}

pub fn check_derivation(d: &Derivation, claim: &Identity) -> Result<(), DerivationError> {
    let (first, last) = match (d.chain.first(), d.chain.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(DerivationError::EmptyChain),
    };
    if d.steps.len() + 1 != d.chain.len() {
        return Err(DerivationError::StepCount {
            steps: d.steps.len(),
            terms: d.chain.len(),
        });
    }
    if *first != claim.lhs {
        return Err(DerivationError::WrongStart {
            expected: claim.lhs.clone(),
            found: first.clone(),
        });
    }
    if *last != claim.rhs {
        return Err(DerivationError::WrongEnd {
            expected: claim.rhs.clone(),
            found: last.clone(),
        });
    }
    for (index, (pair, step)) in d.chain.windows(2).zip(&d.steps).enumerate() {
        check_step(&d.sigma, &pair[0], &pair[1], step).map_err(|source| DerivationError::Step { index, source })?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    /// Most terms in a chain, endpoints included.
    pub max_chain: usize,
    pub max_word_len: usize,
    pub max_summands: usize,
    /// Most letters, summed over all words, in the image of one variable.
    pub max_subst_image: usize,
    /// Most distinct terms visited.
    pub max_nodes: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_chain: 4,
            max_word_len: 4,
            max_summands: 4,
            max_subst_image: 2,
            max_nodes: 20_000,
        }
    }
}

impl SearchBounds {
    fn admits(&self, t: &Term) -> bool {
        t.len() <= self.max_summands && t.max_word_len() <= self.max_word_len
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExhaustReason {
    /// An endpoint of the claim already violates the bounds.
    ClaimOutOfBounds,
    /// Every term reachable inside the bounds was visited.
    SpaceExhausted,
    /// Chains of `max_chain` terms were tried without reaching the target.
    ChainLimit,
    NodeLimit,
}

impl fmt::Display for ExhaustReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExhaustReason::ClaimOutOfBounds => "claim lies outside the bounds",
            ExhaustReason::SpaceExhausted => "all terms within the bounds were visited",
            ExhaustReason::ChainLimit => "chain length limit reached",
            ExhaustReason::NodeLimit => "node limit reached",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Derivation),
    /// Nothing found inside the bounds. This says nothing about derivability.
    Exhausted(ExhaustReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search bounds must be positive")]
    InvalidBounds,
}

/// Breadth-first search from `claim.lhs` to `claim.rhs`. Successors are
/// generated in a fixed order, so the result is a deterministic shortest
/// chain.
pub fn search_derivation(sigma: &[Identity], claim: &Identity, bounds: SearchBounds) -> Result<SearchOutcome, SearchError> {
    let b = bounds;
    if b.max_chain == 0 || b.max_word_len == 0 || b.max_summands == 0 || b.max_subst_image == 0 || b.max_nodes == 0 {
        return Err(SearchError::InvalidBounds);
    }
    let start = &claim.lhs;
    let goal = &claim.rhs;
    let done = |chain: Vec<Term>, steps: Vec<DerivationStep>| {
        Ok(SearchOutcome::Found(Derivation {
            sigma: sigma.to_vec(),
            chain,
            steps,
        }))
    };
    if start == goal {
        return done(vec![start.clone()], Vec::new());
    }
    if !b.admits(start) || !b.admits(goal) {
        return Ok(SearchOutcome::Exhausted(ExhaustReason::ClaimOutOfBounds));
    }
    let extra: BTreeSet<Variable> = goal.content();
    let mut parent: HashMap<Term, (Term, DerivationStep)> = HashMap::new();
    let mut depth: HashMap<Term, usize> = HashMap::from([(start.clone(), 1)]);
    let mut queue = VecDeque::from([start.clone()]);
    let mut truncated = false;
    while let Some(t) = queue.pop_front() {
        let d = depth[&t];
        if d >= b.max_chain {
            truncated = true;
            continue;
        }
        for (next, step) in successors_with(sigma, &t, &b, &extra) {
            if depth.contains_key(&next) {
                continue;
            }
            if depth.len() >= b.max_nodes {
                return Ok(SearchOutcome::Exhausted(ExhaustReason::NodeLimit));
            }
            depth.insert(next.clone(), d + 1);
            parent.insert(next.clone(), (t.clone(), step));
            if next == *goal {
                let mut chain = vec![next.clone()];
                let mut steps = Vec::new();
                let mut cur = next;
                while let Some((prev, step)) = parent.remove(&cur) {
                    chain.push(prev.clone());
                    steps.push(step);
                    cur = prev;
                }
                chain.reverse();
                steps.reverse();
                return done(chain, steps);
            }
            queue.push_back(next);
        }
    }
    Ok(SearchOutcome::Exhausted(if truncated {
        ExhaustReason::ChainLimit
    } else {
        ExhaustReason::SpaceExhausted
    }))
}

/// Every single step out of `t` whose result lies inside the bounds, in
/// the order the search explores them.
pub fn successors(sigma: &[Identity], t: &Term, bounds: &SearchBounds) -> Vec<(Term, DerivationStep)> {
    successors_with(sigma, t, bounds, &BTreeSet::new())
}

fn successors_with(
    sigma: &[Identity],
    t: &Term,
    bounds: &SearchBounds,
    extra: &BTreeSet<Variable>,
) -> Vec<(Term, DerivationStep)> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let contexts = contexts(t);
    for rule in sigma {
        for orientation in [Orientation::Forward, Orientation::Backward] {
            let (s, s_next) = match orientation {
                Orientation::Forward => (&rule.lhs, &rule.rhs),
                Orientation::Backward => (&rule.rhs, &rule.lhs),
            };
            // variables of s' absent from s range over single letters
            let free: Vec<Variable> = s_next.content().difference(&s.content()).cloned().collect();
            let pool: BTreeSet<Variable> = t.content().union(extra).cloned().collect();
            for (left, right) in &contexts {
                let middles = middles(t, left.as_ref(), right.as_ref());
                for phi in matches(s, &middles, bounds.max_subst_image) {
                    let covered = phi.apply(s).wrap(left.as_ref(), right.as_ref());
                    let base: Vec<Word> = t.words().difference(covered.words()).cloned().collect();
                    let optional: Vec<Word> = covered.words().iter().cloned().collect();
                    for phi in extend_free(&phi, &free, &pool) {
                        let produced = phi.apply(s_next).wrap(left.as_ref(), right.as_ref());
                        if produced.max_word_len() > bounds.max_word_len {
                            continue;
                        }
                        for mask in 0u64..(1u64 << optional.len()) {
                            let remainder: BTreeSet<Word> = base
                                .iter()
                                .cloned()
                                .chain(optional.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, w)| w.clone()))
                                .collect();
                            let step = DerivationStep {
                                left: left.clone(),
                                right: right.clone(),
                                remainder,
                                rule: rule.clone(),
                                orientation,
                                subst: phi.clone(),
                            };
                            let next = step.target();
                            if next == *t || !bounds.admits(&next) || !seen.insert(next.clone()) {
                                continue;
                            }
                            out.push((next, step));
                        }
                    }
                }
            }
        }
    }
    out
}

type Context = (Option<Word>, Option<Word>);

/// Every `(p, q)` with `p · m · q` a summand of `t` for a nonempty `m`.
fn contexts(t: &Term) -> BTreeSet<Context> {
    let mut out = BTreeSet::new();
    for w in t.words() {
        let l = w.letters();
        for i in 0..l.len() {
            for j in i + 1..=l.len() {
                out.insert((Word::new(l[..i].to_vec()), Word::new(l[j..].to_vec())));
            }
        }
    }
    out
}

/// The words `m` with `p · m · q` a summand of `t`.
fn middles(t: &Term, left: Option<&Word>, right: Option<&Word>) -> BTreeSet<Word> {
    let lp = left.map_or(0, Word::len);
    let lq = right.map_or(0, Word::len);
    t.words()
        .iter()
        .filter_map(|w| {
            let l = w.letters();
            if l.len() <= lp + lq {
                return None;
            }
            let (pre, rest) = l.split_at(lp);
            let (mid, suf) = rest.split_at(rest.len() - lq);
            let prefix_ok = left.is_none_or(|p| p.letters() == pre);
            let suffix_ok = right.is_none_or(|q| q.letters() == suf);
            (prefix_ok && suffix_ok).then(|| Word::new(mid.to_vec()).expect("nonempty middle"))
        })
        .collect()
}

/// Nonempty sets of words drawn from `pool`, with at most `cap` letters in
/// total, in a fixed order.
fn image_candidates(pool: &[Word], cap: usize) -> Vec<Term> {
    fn go(pool: &[Word], from: usize, budget: usize, cur: &mut Vec<Word>, out: &mut Vec<Term>) {
        for i in from..pool.len() {
            let w = &pool[i];
            if w.len() > budget {
                continue;
            }
            cur.push(w.clone());
            out.push(Term::from_words(cur.iter().cloned()).expect("nonempty"));
            go(pool, i + 1, budget - w.len(), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, 0, cap, &mut Vec::new(), &mut out);
    out
}

/// Substitutions on the variables of `s` with `φ(s) ⊆ middles`.
fn matches(s: &Term, middles: &BTreeSet<Word>, cap: usize) -> Vec<Substitution> {
    if middles.is_empty() {
        return Vec::new();
    }
    let mut order: Vec<Variable> = Vec::new();
    for w in s.words() {
        for x in w.letters() {
            if !order.contains(x) {
                order.push(x.clone());
            }
        }
    }
    let pool: Vec<Word> = middles
        .iter()
        .flat_map(|m| m.factors())
        .filter(|f| f.len() <= cap)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let candidates = image_candidates(&pool, cap);
    let mut out = Vec::new();
    let mut phi = BTreeMap::new();
    assign(s, middles, &order, &candidates, &mut phi, &mut out);
    out
}

fn assign(
    s: &Term,
    middles: &BTreeSet<Word>,
    order: &[Variable],
    candidates: &[Term],
    phi: &mut BTreeMap<Variable, Term>,
    out: &mut Vec<Substitution>,
) {
    if phi.len() == order.len() {
        out.push(Substitution::from_pairs(phi.iter().map(|(x, t)| (x.clone(), t.clone()))));
        return;
    }
    let x = &order[phi.len()];
    for c in candidates {
        phi.insert(x.clone(), c.clone());
        if partial_fits(s, middles, phi) {
            assign(s, middles, order, candidates, phi, out);
        }
        phi.remove(x);
    }
}

/// For each word of `s`, the images of its assigned prefix must extend to
/// words of `middles` of a compatible length.
fn partial_fits(s: &Term, middles: &BTreeSet<Word>, phi: &BTreeMap<Variable, Term>) -> bool {
    s.words().iter().all(|w| {
        let letters = w.letters();
        let known = letters.iter().take_while(|x| phi.contains_key(*x)).count();
        if known == 0 {
            return true;
        }
        let mut images = phi[&letters[0]].clone();
        for x in &letters[1..known] {
            images = images.mul(&phi[x]);
        }
        let left = letters.len() - known;
        images.words().iter().all(|e| {
            if left == 0 {
                middles.contains(e)
            } else {
                middles
                    .iter()
                    .any(|m| m.len() >= e.len() + left && m.letters()[..e.len()] == *e.letters())
            }
        })
    })
}

fn extend_free(phi: &Substitution, free: &[Variable], pool: &BTreeSet<Variable>) -> Vec<Substitution> {
    let mut out = vec![phi.clone()];
    for x in free {
        let choices: BTreeSet<Variable> = pool.iter().cloned().chain([x.clone()]).collect();
        out = out
            .into_iter()
            .flat_map(|p| {
                choices.iter().map(move |y| {
                    let mut q = p.clone();
                    q.insert(x.clone(), Term::variable(y.clone()));
                    q
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DerivationFileError {
    pub line: usize,
    pub message: String,
}

/// A parsed derivation file together with its claim (the endpoints of the
/// chain unless a `claim:` line says otherwise).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationFile {
    pub derivation: Derivation,
    pub claim: Identity,
}

/// Reads the derivation file format:
///
/// ```text
/// sigma: xy = yx
/// claim: xyz = zyx
/// chain: xyz
/// chain: yxz
/// step: rule=1; dir=fwd; left=; right=z; rest=; subst=
/// ```
///
/// `rule` is a 1-based index into the `sigma:` lines, `dir` is `fwd` or
/// `bwd`, `left` and `right` are words or empty, `rest` is a term or empty
/// and `subst` lists `x->term` entries separated by commas. Lines starting
/// with `#` are comments.
pub fn parse_derivation(text: &str) -> Result<DerivationFile, DerivationFileError> {
    let mut sigma = Vec::new();
    let mut claim = None;
    let mut chain = Vec::new();
    let mut raw_steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| DerivationFileError { line, message };
        let term_err = |e: TermError| err(e.to_string());
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed
            .split_once(':')
            .ok_or_else(|| err(format!("expected `key: value`, found {trimmed:?}")))?;
        let value = value.trim();
        match key.trim() {
            "sigma" => sigma.push(parse_identity(value).map_err(term_err)?),
            "claim" => {
                if claim.replace(parse_identity(value).map_err(term_err)?).is_some() {
                    return Err(err("more than one claim".into()));
                }
            }
            "chain" => chain.push(parse_term(value).map_err(term_err)?),
            "step" => raw_steps.push((line, value.to_string())),
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    let steps = raw_steps
        .iter()
        .map(|(line, v)| parse_step(v, &sigma).map_err(|message| DerivationFileError { line: *line, message }))
        .collect::<Result<Vec<_>, _>>()?;
    let claim = match claim {
        Some(c) => c,
        None => match (chain.first(), chain.last()) {
            (Some(f), Some(l)) => Identity::new(f.clone(), l.clone()),
            _ => {
                return Err(DerivationFileError {
                    line: text.lines().count(),
                    message: "no chain and no claim".into(),
                })
            }
        },
    };
    Ok(DerivationFile {
        derivation: Derivation { sigma, chain, steps },
        claim,
    })
}

fn parse_step(text: &str, sigma: &[Identity]) -> Result<DerivationStep, String> {
    let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected `field=value`, found {part:?}"))?;
        if fields.insert(k.trim(), v.trim()).is_some() {
            return Err(format!("field {:?} given twice", k.trim()));
        }
    }
    let get = |k: &str| fields.get(k).copied().unwrap_or("");
    for k in fields.keys() {
        if !["rule", "dir", "left", "right", "rest", "subst"].contains(k) {
            return Err(format!("unknown step field {k:?}"));
        }
    }
    let index: usize = get("rule").parse().map_err(|_| format!("bad rule index {:?}", get("rule")))?;
    let rule = index
        .checked_sub(1)
        .and_then(|i| sigma.get(i))
        .ok_or_else(|| format!("rule {index} is not among the {} sigma lines", sigma.len()))?
        .clone();
    let orientation = match get("dir") {
        "fwd" | "" => Orientation::Forward,
        "bwd" => Orientation::Backward,
        other => return Err(format!("dir must be fwd or bwd, found {other:?}")),
    };
    let word = |k: &str| -> Result<Option<Word>, String> {
        match get(k) {
            "" => Ok(None),
            v => parse_word(v).map(Some).map_err(|e| format!("{k}: {e}")),
        }
    };
    let remainder = match get("rest") {
        "" => BTreeSet::new(),
        v => parse_term(v).map_err(|e| format!("rest: {e}"))?.into_words(),
    };
    let mut subst = Substitution::identity();
    for entry in get("subst").split(',').map(str::trim).filter(|e| !e.is_empty()) {
        let (x, image) = entry.split_once("->").ok_or_else(|| format!("subst entry {entry:?} lacks `->`"))?;
        let x = Variable::new(x.trim()).map_err(|e| e.to_string())?;
        subst.insert(x, parse_term(image).map_err(|e| format!("subst: {e}"))?);
    }
    Ok(DerivationStep {
        left: word("left")?,
        right: word("right")?,
        remainder,
        rule,
        orientation,
        subst,
    })
}

/// Inverse of [`parse_derivation`]; steps refer to the first matching
/// `sigma` line.
pub fn format_derivation(d: &Derivation, claim: &Identity) -> String {
    let mut out = String::new();
    for r in &d.sigma {
        let _ = writeln!(out, "sigma: {r}");
    }
    let _ = writeln!(out, "claim: {claim}");
    for t in &d.chain {
        let _ = writeln!(out, "chain: {t}");
    }
    let opt = |w: &Option<Word>| w.as_ref().map(Word::to_string).unwrap_or_default();
    for s in &d.steps {
        let index = d.sigma.iter().position(|r| *r == s.rule).map_or(0, |i| i + 1);
        let rest = Term::from_words(s.remainder.iter().cloned()).map(|t| t.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "step: rule={index}; dir={}; left={}; right={}; rest={rest}; subst={}",
            s.orientation,
            opt(&s.left),
            opt(&s.right),
            s.subst
        );
    }
    out
}
