//! Term grammar: summands separated by `+`; a summand is a sequence of
//! variables written side by side, optionally separated by `*` or
//! whitespace. A variable is a letter followed by optional digits, so
//! `x1x2` reads as `x1 · x2` and `xy` as `x · y`.

use super::{Identity, Inequality, Term, TermError, Variable, Word};

fn parse_summand(text: &str, position: usize) -> Result<Word, TermError> {
    let mut letters = Vec::new();
    let mut current = String::new();
    let flush = |current: &mut String, letters: &mut Vec<Variable>| -> Result<(), TermError> {
        if !current.is_empty() {
            letters.push(Variable::new(current)?);
            current.clear();
        }
        Ok(())
    };
    for c in text.chars() {
        if c.is_ascii_alphabetic() {
            flush(&mut current, &mut letters)?;
            current.push(c);
        } else if c.is_ascii_digit() {
            if current.is_empty() {
                return Err(TermError::IllegalIdentifier(text.trim().to_string()));
            }
            current.push(c);
        } else if c == '*' || c.is_whitespace() {
            flush(&mut current, &mut letters)?;
        } else {
            return Err(TermError::IllegalIdentifier(text.trim().to_string()));
        }
    }
    flush(&mut current, &mut letters)?;
    Word::new(letters).ok_or(TermError::EmptySummand(position))
}

pub fn parse_term(text: &str) -> Result<Term, TermError> {
    if text.trim().is_empty() {
        return Err(TermError::Empty);
    }
    let words = text
        .split('+')
        .enumerate()
        .map(|(i, s)| parse_summand(s, i + 1))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Term::from_words(words).expect("at least one summand"))
}

pub fn parse_word(text: &str) -> Result<Word, TermError> {
    let t = parse_term(text)?;
    if t.len() != 1 || text.contains('+') {
        return Err(TermError::NotAWord(text.split('+').count()));
    }
    Ok(t.into_words().into_iter().next().expect("one summand"))
}

/// Parses `u = v`.
pub fn parse_identity(text: &str) -> Result<Identity, TermError> {
    let (l, r) = text.split_once('=').ok_or(TermError::MissingRelation("="))?;
    Ok(Identity::new(parse_term(l)?, parse_term(r)?))
}

/// Parses `q <= u` where `q` is a single word.
pub fn parse_inequality(text: &str) -> Result<Inequality, TermError> {
    let (l, r) = text.split_once("<=").ok_or(TermError::MissingRelation("<="))?;
    Ok(Inequality::new(parse_word(l)?, parse_term(r)?))
}
