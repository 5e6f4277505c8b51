//! Line-oriented text format:
//!
//! ```text
//! # comment
//! algebra S7
//! elements 0 a 1
//! add
//! 0 0 0
//! 0 a 0
//! 0 0 1
//! mul
//! 0 0 0
//! 0 0 a
//! 0 a 1
//! ```
//!
//! Several records may be concatenated with `---` lines between them.

use std::fmt::Write as _;

use thiserror::Error;

use super::{AlgebraError, FiniteAiSemiring};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Invalid(#[from] AlgebraError),
}

impl FormatError {
    pub fn is_syntax(&self) -> bool {
        matches!(self, FormatError::Syntax { .. })
    }
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str, first_line: usize) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (first_line + i, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

fn parse_record(lines: &[(usize, &str)], eof_line: usize) -> Result<FiniteAiSemiring, FormatError> {
    let mut it = lines.iter().copied().peekable();

    let (ln, header) = it.next().ok_or_else(|| syntax(eof_line, "empty input"))?;
    let name = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["algebra", name] => name.to_string(),
        _ => return Err(syntax(ln, "expected `algebra <name>`")),
    };

    let (ln, elements) = it
        .next()
        .ok_or_else(|| syntax(eof_line, "expected `elements ...`"))?;
    let mut toks = elements.split_whitespace();
    if toks.next() != Some("elements") {
        return Err(syntax(ln, "expected `elements <label> ...`"));
    }
    let labels: Vec<String> = toks.map(str::to_string).collect();
    if labels.is_empty() {
        return Err(syntax(ln, "no elements listed"));
    }
    let k = labels.len();

    let mut read_table = |keyword: &str| -> Result<Vec<Vec<usize>>, FormatError> {
        match it.next() {
            Some((_, l)) if l == keyword => {}
            Some((ln, _)) => return Err(syntax(ln, format!("expected `{keyword}`"))),
            None => return Err(syntax(eof_line, format!("missing `{keyword}` table"))),
        }
        let mut rows = Vec::new();
        while let Some(&(ln, l)) = it.peek() {
            if l == "add" || l == "mul" {
                break;
            }
            it.next();
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != k || rows.len() >= k {
                return Err(syntax(
                    ln,
                    format!("table/label arity mismatch: {k} labels but row {} has {} entries", rows.len() + 1, toks.len()),
                ));
            }
            let row = toks
                .iter()
                .map(|t| {
                    labels
                        .iter()
                        .position(|l| l == t)
                        .ok_or_else(|| syntax(ln, format!("unknown element label {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        if rows.len() != k {
            return Err(syntax(
                eof_line,
                format!("table/label arity mismatch: {k} labels but `{keyword}` has {} rows", rows.len()),
            ));
        }
        Ok(rows)
    };
    let add = read_table("add")?;
    let mul = read_table("mul")?;
    if let Some((ln, _)) = it.next() {
        return Err(syntax(ln, "unexpected content after `mul` table"));
    }
    Ok(FiniteAiSemiring::new(name, labels, add, mul)?)
}

pub fn parse_algebra(text: &str) -> Result<FiniteAiSemiring, FormatError> {
    let lines = content_lines(text, 1);
    let eof = text.lines().count().max(1);
    parse_record(&lines, eof)
}

/// Parses `---`-separated records. Chunks holding only comments (such as a
/// census summary block) are skipped.
pub fn parse_algebras(text: &str) -> Result<Vec<FiniteAiSemiring>, FormatError> {
    let mut out = Vec::new();
    let mut chunk_start = 1;
    let mut chunk = String::new();
    let all: Vec<&str> = text.lines().collect();
    for (i, line) in all.iter().enumerate() {
        if line.trim() == "---" {
            let lines = content_lines(&chunk, chunk_start);
            if !lines.is_empty() {
                out.push(parse_record(&lines, i + 1)?);
            }
            chunk.clear();
            chunk_start = i + 2;
        } else {
            chunk.push_str(line);
            chunk.push('\n');
        }
    }
    let lines = content_lines(&chunk, chunk_start);
    if !lines.is_empty() {
        out.push(parse_record(&lines, all.len())?);
    }
    Ok(out)
}

pub fn serialize_algebra(s: &FiniteAiSemiring) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "algebra {}", s.name());
    let _ = writeln!(out, "elements {}", s.labels().join(" "));
    for (keyword, f) in [
        ("add", FiniteAiSemiring::add as fn(&FiniteAiSemiring, usize, usize) -> usize),
        ("mul", FiniteAiSemiring::mul),
    ] {
        let _ = writeln!(out, "{keyword}");
        for a in 0..s.order() {
            let row: Vec<&str> = (0..s.order()).map(|b| s.label(f(s, a, b))).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{registry, registry_names};

    #[test]
    fn registry_round_trips() {
        for name in registry_names() {
            let s = registry(name).unwrap();
            assert_eq!(parse_algebra(&serialize_algebra(&s)).unwrap(), s);
        }
    }

    #[test]
    fn s53_typed_by_hand() {
        let text = "\
# S53, typed from its printed tables
algebra S53
elements 1 2 3
add
1 1 3
1 2 3
3 3 3
mul
3 1 3
1 2 3
3 3 3
";
        assert_eq!(parse_algebra(text).unwrap(), registry("S53").unwrap());
    }

    #[test]
    fn arity_mismatch() {
        let text = "algebra X\nelements 1 2 3\nadd\n1 1 1 1\n1 2 1 1\n1 1 3 1\n1 1 1 4\nmul\n";
        let err = parse_algebra(text).unwrap_err();
        assert!(err.to_string().contains("table/label arity mismatch"), "{err}");
        assert!(matches!(err, FormatError::Syntax { line: 4, .. }));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        assert!(matches!(parse_algebra("").unwrap_err(), FormatError::Syntax { .. }));
        let err = parse_algebra("algebra X\nelements 1 2\nadd\n1 1\n1 q\nmul\n1 1\n1 1\n").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 5, .. }), "{err}");
        let err = parse_algebra("algebra\n").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 1, .. }));
    }

    #[test]
    fn axiom_failure_is_not_syntax() {
        let text = "algebra X\nelements 1 2\nadd\n2 1\n1 2\nmul\n1 1\n1 1\n";
        let err = parse_algebra(text).unwrap_err();
        assert!(!err.is_syntax());
    }

    #[test]
    fn multiple_records() {
        let mut text = String::new();
        for name in ["S2", "S7"] {
            text.push_str(&serialize_algebra(&registry(name).unwrap()));
            text.push_str("---\n");
        }
        text.push_str("# summary\n# total 2\n");
        let all = parse_algebras(&text).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[1], registry("S7").unwrap());
    }
}
