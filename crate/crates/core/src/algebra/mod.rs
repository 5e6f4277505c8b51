//! Finite ai-semirings given by Cayley tables.
//!
//! Elements are the indices `0..k`; labels only matter for display and for
//! the text format in [`format`].

mod format;
mod registry;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use format::{parse_algebra, parse_algebras, serialize_algebra, FormatError};
pub use registry::{registry, registry_names, UnknownAlgebra};

/// Maximum number of violations collected by [`validate`].
pub const MAX_WITNESSES: usize = 32;

/// A table that cannot even be checked against the axioms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MalformedTable {
    #[error("empty carrier")]
    Empty,
    #[error("{table} table is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        table: &'static str,
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("addition and multiplication tables have different orders ({add} vs {mul})")]
    OrderMismatch { add: usize, mul: usize },
    #[error("{table} table entry ({row}, {col}) = {value} is out of range for order {order}")]
    OutOfRange {
        table: &'static str,
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("table/label arity mismatch: {labels} labels for a table of order {order}")]
    LabelArity { labels: usize, order: usize },
    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Axiom {
    AddIdempotent,
    AddCommutative,
    AddAssociative,
    MulAssociative,
    LeftDistributive,
    RightDistributive,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::AddIdempotent => "x + x = x",
            Axiom::AddCommutative => "x + y = y + x",
            Axiom::AddAssociative => "(x + y) + z = x + (y + z)",
            Axiom::MulAssociative => "(xy)z = x(yz)",
            Axiom::LeftDistributive => "x(y + z) = xy + xz",
            Axiom::RightDistributive => "(x + y)z = xz + yz",
        };
        f.write_str(s)
    }
}

/// One failed axiom instance; `witness` lists the element indices bound to
/// `x`, `y`, `z` in the axiom's statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Set when more than [`MAX_WITNESSES`] violations exist.
    pub truncated: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

fn check_shape(add: &[Vec<usize>], mul: &[Vec<usize>]) -> Result<usize, MalformedTable> {
    let k = add.len();
    if k == 0 {
        return Err(MalformedTable::Empty);
    }
    if mul.len() != k {
        return Err(MalformedTable::OrderMismatch {
            add: k,
            mul: mul.len(),
        });
    }
    for (table, rows) in [("add", add), ("mul", mul)] {
        for (row, r) in rows.iter().enumerate() {
            if r.len() != k {
                return Err(MalformedTable::NotSquare {
                    table,
                    row,
                    len: r.len(),
                    expected: k,
                });
            }
            if let Some((col, &value)) = r.iter().enumerate().find(|(_, &v)| v >= k) {
                return Err(MalformedTable::OutOfRange {
                    table,
                    row,
                    col,
                    value,
                    order: k,
                });
            }
        }
    }
    Ok(k)
}

/// Checks every ai-semiring axiom and collects up to [`MAX_WITNESSES`]
/// violations.
pub fn validate(add: &[Vec<usize>], mul: &[Vec<usize>]) -> Result<ValidationReport, MalformedTable> {
    let k = check_shape(add, mul)?;
    let mut report = ValidationReport::default();
    let mut push = |axiom: Axiom, witness: Vec<usize>| {
        if report.violations.len() < MAX_WITNESSES {
            report.violations.push(Violation { axiom, witness });
        } else {
            report.truncated = true;
        }
    };
    for a in 0..k {
        if add[a][a] != a {
            push(Axiom::AddIdempotent, vec![a]);
        }
    }
    for a in 0..k {
        for b in a + 1..k {
            if add[a][b] != add[b][a] {
                push(Axiom::AddCommutative, vec![a, b]);
            }
        }
    }
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                if add[add[a][b]][c] != add[a][add[b][c]] {
                    push(Axiom::AddAssociative, vec![a, b, c]);
                }
                if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                    push(Axiom::MulAssociative, vec![a, b, c]);
                }
                if mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]] {
                    push(Axiom::LeftDistributive, vec![a, b, c]);
                }
                if mul[add[a][b]][c] != add[mul[a][c]][mul[b][c]] {
                    push(Axiom::RightDistributive, vec![a, b, c]);
                }
            }
        }
    }
    Ok(report)
}

/// Fast-fail axiom check over flattened row-major tables of order `k`.
pub(crate) fn satisfies_axioms(k: usize, add: &[usize], mul: &[usize]) -> bool {
    let a_ = |x: usize, y: usize| add[x * k + y];
    let m_ = |x: usize, y: usize| mul[x * k + y];
    for a in 0..k {
        if a_(a, a) != a {
            return false;
        }
        for b in 0..k {
            if a_(a, b) != a_(b, a) {
                return false;
            }
            for c in 0..k {
                if a_(a_(a, b), c) != a_(a, a_(b, c))
                    || m_(m_(a, b), c) != m_(a, m_(b, c))
                    || m_(a, a_(b, c)) != a_(m_(a, b), m_(a, c))
                    || m_(a_(a, b), c) != a_(m_(a, c), m_(b, c))
                {
                    return false;
                }
            }
        }
    }
    true
}

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Malformed(#[from] MalformedTable),
    #[error("axioms violated: {}", describe_violations(.0))]
    Axioms(ValidationReport),
}

fn describe_violations(report: &ValidationReport) -> String {
    let mut parts: Vec<String> = report
        .violations
        .iter()
        .map(|v| format!("{} at {:?}", v.axiom, v.witness))
        .collect();
    if report.truncated {
        parts.push("...".into());
    }
    parts.join("; ")
}

/// A validated finite ai-semiring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAiSemiring {
    name: String,
    labels: Vec<String>,
    // row-major, k * k
    add: Vec<usize>,
    mul: Vec<usize>,
}

impl FiniteAiSemiring {
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        add: Vec<Vec<usize>>,
        mul: Vec<Vec<usize>>,
    ) -> Result<Self, AlgebraError> {
        let report = validate(&add, &mul)?;
        if labels.len() != add.len() {
            return Err(MalformedTable::LabelArity {
                labels: labels.len(),
                order: add.len(),
            }
            .into());
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(MalformedTable::DuplicateLabel(l.clone()).into());
            }
        }
        if !report.passed() {
            return Err(AlgebraError::Axioms(report));
        }
        Ok(Self {
            name: name.into(),
            labels,
            add: add.concat(),
            mul: mul.concat(),
        })
    }

    /// Builds an algebra with labels `1..=k`.
    pub fn with_numeric_labels(
        name: impl Into<String>,
        add: Vec<Vec<usize>>,
        mul: Vec<Vec<usize>>,
    ) -> Result<Self, AlgebraError> {
        let labels = (1..=add.len()).map(|i| i.to_string()).collect();
        Self::new(name, labels, add, mul)
    }

    /// Flat tables already known to satisfy the axioms.
    pub(crate) fn from_flat_unchecked(
        name: String,
        labels: Vec<String>,
        add: Vec<usize>,
        mul: Vec<usize>,
    ) -> Self {
        debug_assert!(satisfies_axioms(labels.len(), &add, &mul));
        Self {
            name,
            labels,
            add,
            mul,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..self.clone()
        }
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.order() + b]
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order() + b]
    }

    pub fn add_table(&self) -> Vec<Vec<usize>> {
        self.add.chunks(self.order()).map(<[usize]>::to_vec).collect()
    }

    pub fn mul_table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order()).map(<[usize]>::to_vec).collect()
    }

    pub(crate) fn flat_add(&self) -> &[usize] {
        &self.add
    }

    pub(crate) fn flat_mul(&self) -> &[usize] {
        &self.mul
    }

    /// `a <= b` in the natural order, i.e. `a + b = b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.add(a, b) == b
    }

    pub fn is_commutative_mult(&self) -> bool {
        let k = self.order();
        (0..k).all(|a| (a + 1..k).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

/// The natural order `a <= b iff a + b = b` together with the elements the
/// census classifies on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdditiveProfile {
    pub top: usize,
    pub minimals: BTreeSet<usize>,
    pub coatoms: BTreeSet<usize>,
    pub order_relation: BTreeSet<(usize, usize)>,
}

impl AdditiveProfile {
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.order_relation.contains(&(a, b))
    }
}

pub fn natural_order(s: &FiniteAiSemiring) -> AdditiveProfile {
    let k = s.order();
    let order_relation: BTreeSet<(usize, usize)> = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .filter(|&(a, b)| s.leq(a, b))
        .collect();
    let top = (1..k).fold(0, |acc, a| s.add(acc, a));
    let below = |a: usize, b: usize| a != b && s.leq(a, b);
    let minimals = (0..k).filter(|&a| !(0..k).any(|b| below(b, a))).collect();
    let coatoms = if k == 1 {
        BTreeSet::from([top])
    } else {
        (0..k)
            .filter(|&a| a != top && !(0..k).any(|b| b != top && below(a, b)))
            .collect()
    };
    AdditiveProfile {
        top,
        minimals,
        coatoms,
        order_relation,
    }
}

pub fn is_commutative_mult(s: &FiniteAiSemiring) -> bool {
    s.is_commutative_mult()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(s: &FiniteAiSemiring, labels: &[&str]) -> BTreeSet<usize> {
        labels.iter().map(|l| s.index_of(l).unwrap()).collect()
    }

    #[test]
    fn registry_algebras_validate() {
        for name in registry_names() {
            let s = registry(name).unwrap();
            let report = validate(&s.add_table(), &s.mul_table()).unwrap();
            assert!(report.passed(), "{name}: {report:?}");
        }
    }

    #[test]
    fn trivial_algebra() {
        let s = FiniteAiSemiring::with_numeric_labels("T", vec![vec![0]], vec![vec![0]]).unwrap();
        let p = natural_order(&s);
        assert_eq!(p.top, 0);
        assert_eq!(p.minimals, BTreeSet::from([0]));
        assert_eq!(p.coatoms, BTreeSet::from([0]));
        assert!(s.is_commutative_mult());
    }

    #[test]
    fn broken_idempotency_is_reported() {
        let s7 = registry("S7").unwrap();
        let a = s7.index_of("a").unwrap();
        let one = s7.index_of("1").unwrap();
        let mut add = s7.add_table();
        add[a][a] = one;
        let report = validate(&add, &s7.mul_table()).unwrap();
        assert!(!report.passed());
        assert!(report
            .violations
            .contains(&Violation { axiom: Axiom::AddIdempotent, witness: vec![a] }));
    }

    #[test]
    fn malformed_tables_are_distinct_from_axiom_failures() {
        let err = validate(&[vec![0, 1], vec![1]], &[vec![0, 0], vec![0, 0]]).unwrap_err();
        assert!(matches!(err, MalformedTable::NotSquare { table: "add", row: 1, .. }));
        let err = validate(&[vec![0, 2], vec![1, 1]], &[vec![0, 0], vec![0, 0]]).unwrap_err();
        assert!(matches!(err, MalformedTable::OutOfRange { value: 2, .. }));
        assert_eq!(validate(&[], &[]).unwrap_err(), MalformedTable::Empty);
    }

    #[test]
    fn violations_are_capped() {
        // constant-zero addition on 4 elements breaks idempotency and much else
        let add = vec![vec![0; 4]; 4];
        let mul = vec![vec![1, 2, 3, 0]; 4];
        let report = validate(&add, &mul).unwrap();
        assert_eq!(report.violations.len(), MAX_WITNESSES);
        assert!(report.truncated);
    }

    #[test]
    fn profile_of_s4_124() {
        let s = registry("S4_124").unwrap();
        let p = natural_order(&s);
        assert_eq!(s.label(p.top), "1");
        assert_eq!(p.minimals, idx(&s, &["3", "4"]));
        assert_eq!(p.coatoms, idx(&s, &["2", "4"]));
    }

    #[test]
    fn profile_of_s7() {
        let s = registry("S7").unwrap();
        let p = natural_order(&s);
        assert_eq!(s.label(p.top), "0");
        assert_eq!(p.minimals, idx(&s, &["a", "1"]));
        assert_eq!(p.coatoms, idx(&s, &["a", "1"]));
    }

    #[test]
    fn addition_is_join_of_natural_order() {
        for name in registry_names() {
            let s = registry(name).unwrap();
            let p = natural_order(&s);
            let k = s.order();
            for a in 0..k {
                assert!(p.leq(a, a));
                for b in 0..k {
                    if p.leq(a, b) && p.leq(b, a) {
                        assert_eq!(a, b);
                    }
                    for c in 0..k {
                        if p.leq(a, b) && p.leq(b, c) {
                            assert!(p.leq(a, c));
                        }
                    }
                    let j = s.add(a, b);
                    assert!(p.leq(a, j) && p.leq(b, j));
                    for c in 0..k {
                        if p.leq(a, c) && p.leq(b, c) {
                            assert!(p.leq(j, c), "{name}: {a}+{b} not least");
                        }
                    }
                }
                assert!(p.leq(a, p.top));
            }
            // top does not depend on fold order
            let rev = (0..k).rev().fold(k - 1, |acc, a| s.add(acc, a));
            assert_eq!(rev, p.top);
        }
    }

    #[test]
    fn commutativity_scan() {
        assert!(registry("S4_124").unwrap().is_commutative_mult());
        // R6's multiplication table is symmetric
        assert!(registry("R6").unwrap().is_commutative_mult());
        let s = FiniteAiSemiring::with_numeric_labels(
            "left-zero",
            vec![vec![0, 0], vec![0, 1]],
            vec![vec![0, 0], vec![1, 1]],
        )
        .unwrap();
        assert!(!s.is_commutative_mult());
    }
}
