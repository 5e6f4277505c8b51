//! The inequalities `q(n) <= u(n)` where
//!
//! ```text
//! u(n) = x1x2 + x2x3 + ... + x(2n)x(2n+1) + x(2n+1)x1 + y1y2 + y2y1 + y1
//! q(n) = y2
//! ```
//!
//! and membership of a finite ai-semiring in the variety `W` they define,
//! checked for `n` up to a bound.

use thiserror::Error;

use crate::algebra::FiniteAiSemiring;
use crate::satisfaction::{BruteForce, SatError, SatisfactionVerdict};
use crate::terms::{var, Inequality, Term, Word};

/// `n` up to which [`in_w`] runs without an override.
pub const DEFAULT_N_MAX: usize = 3;
/// Hard ceiling with an override.
pub const OVERRIDE_N_MAX: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("n must be at least 1")]
    ZeroIndex,
    #[error("n_max = {requested} exceeds {limit}; larger bounds need an override (at most {OVERRIDE_N_MAX})")]
    Guard { requested: usize, limit: usize },
    #[error(transparent)]
    Satisfaction(#[from] SatError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyInstance {
    pub n: usize,
    pub u: Term,
    pub q: Word,
}

impl FamilyInstance {
    pub fn inequality(&self) -> Inequality {
        Inequality::new(self.q.clone(), self.u.clone())
    }
}

pub fn make_family(n: usize) -> Result<FamilyInstance, FamilyError> {
    if n == 0 {
        return Err(FamilyError::ZeroIndex);
    }
    let m = 2 * n + 1;
    let x = |i: usize| var(&format!("x{i}"));
    let pair = |a, b| Word::new(vec![a, b]).expect("two letters");
    let mut words: Vec<Word> = (1..m).map(|i| pair(x(i), x(i + 1))).collect();
    words.push(pair(x(m), x(1)));
    let (y1, y2) = (var("y1"), var("y2"));
    words.push(pair(y1.clone(), y2.clone()));
    words.push(pair(y2.clone(), y1.clone()));
    words.push(Word::from_var(y1));
    Ok(FamilyInstance {
        n,
        u: Term::from_words(words).expect("nonempty"),
        q: Word::from_var(y2),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipReport {
    /// Verdict for `n = 1, 2, ...`.
    pub verdicts: Vec<(usize, SatisfactionVerdict)>,
}

impl MembershipReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| v.holds)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MembershipOptions {
    /// Lifts the `n_max` bound from [`DEFAULT_N_MAX`] to [`OVERRIDE_N_MAX`].
    pub allow_large: bool,
    pub sequential: bool,
    /// Stop after the first failing `n`.
    pub stop_on_failure: bool,
}

pub fn in_w(s: &FiniteAiSemiring, n_max: usize) -> Result<MembershipReport, FamilyError> {
    in_w_with(s, n_max, MembershipOptions::default())
}

pub fn in_w_with(s: &FiniteAiSemiring, n_max: usize, opts: MembershipOptions) -> Result<MembershipReport, FamilyError> {
    if n_max == 0 {
        return Err(FamilyError::ZeroIndex);
    }
    let limit = if opts.allow_large { OVERRIDE_N_MAX } else { DEFAULT_N_MAX };
    if n_max > limit {
        return Err(FamilyError::Guard {
            requested: n_max,
            limit,
        });
    }
    let mut checker = if opts.sequential {
        BruteForce::sequential()
    } else {
        BruteForce::default()
    };
    checker.allow_large = opts.allow_large;
    let mut verdicts = Vec::new();
    for n in 1..=n_max {
        let f = make_family(n)?;
        let v = checker.inequality(s, &f.q, &f.u)?;
        let failed = !v.holds;
        verdicts.push((n, v));
        if failed && opts.stop_on_failure {
            break;
        }
    }
    Ok(MembershipReport { verdicts })
}
