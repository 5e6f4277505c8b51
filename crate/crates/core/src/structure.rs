//! Congruences, quotients, subalgebras, direct products, isomorphisms and
//! subdirect decompositions of finite ai-semirings.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::FiniteAiSemiring;

/// Largest carrier for [`enumerate_congruences`] (Bell(8) = 4140 partitions).
pub const MAX_CONGRUENCE_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Operation {
    Add,
    Mul,
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operation::Add => "+",
            Operation::Mul => "*",
        })
    }
}

fn apply(s: &FiniteAiSemiring, op: Operation, a: usize, b: usize) -> usize {
    match op {
        Operation::Add => s.add(a, b),
        Operation::Mul => s.mul(a, b),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("blocks overlap at element {0}")]
    Overlap(usize),
    #[error("element {0} is outside the carrier")]
    OutOfRange(usize),
    #[error("blocks do not cover element {0}")]
    Uncovered(usize),
    #[error("empty block")]
    EmptyBlock,
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
    #[error("not a congruence: {0}")]
    NotCongruence(NotCongruence),
    #[error("subset is empty")]
    EmptySubset,
    #[error("subset not closed: {a} {op} {b} = {result} lies outside")]
    NotClosed {
        a: usize,
        b: usize,
        op: Operation,
        result: usize,
    },
    #[error("carrier of order {0} is too large (limit {MAX_CONGRUENCE_ORDER})")]
    TooLarge(usize),
}

/// A partition of `0..n` into nonempty blocks, kept sorted by least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<BTreeSet<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, blocks: impl IntoIterator<Item = BTreeSet<usize>>) -> Result<Self, StructureError> {
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for b in blocks {
            if b.is_empty() {
                return Err(StructureError::EmptyBlock);
            }
            for &a in &b {
                if a >= n {
                    return Err(StructureError::OutOfRange(a));
                }
                if std::mem::replace(&mut seen[a], true) {
                    return Err(StructureError::Overlap(a));
                }
            }
            out.push(b);
        }
        if let Some(a) = seen.iter().position(|s| !s) {
            return Err(StructureError::Uncovered(a));
        }
        Ok(Self::from_blocks(n, out))
    }

    /// The given blocks plus a singleton for every element they miss.
    pub fn with_singletons(n: usize, blocks: impl IntoIterator<Item = BTreeSet<usize>>) -> Result<Self, StructureError> {
        let mut blocks: Vec<BTreeSet<usize>> = blocks.into_iter().collect();
        let covered: BTreeSet<usize> = blocks.iter().flatten().copied().collect();
        blocks.extend((0..n).filter(|a| !covered.contains(a)).map(|a| BTreeSet::from([a])));
        Self::new(n, blocks)
    }

    fn from_blocks(n: usize, mut blocks: Vec<BTreeSet<usize>>) -> Self {
        blocks.sort_by_key(|b| *b.iter().next().expect("nonempty block"));
        let mut block_of = vec![0; n];
        for (i, b) in blocks.iter().enumerate() {
            for &a in b {
                block_of[a] = i;
            }
        }
        Partition { blocks, block_of }
    }

    /// Blocks written with element labels: `1,2|3|4`. Elements not named
    /// become singletons.
    pub fn parse_labels(s: &FiniteAiSemiring, text: &str) -> Result<Self, StructureError> {
        let blocks = text
            .split('|')
            .filter(|b| !b.trim().is_empty())
            .map(|b| parse_label_set(s, b))
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_singletons(s.order(), blocks)
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_blocks(n, (0..n).map(|a| BTreeSet::from([a])).collect())
    }

    pub fn total(n: usize) -> Self {
        Self::from_blocks(n, vec![(0..n).collect()])
    }

    pub fn blocks(&self) -> &[BTreeSet<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn carrier_size(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_of(&self, a: usize) -> usize {
        self.block_of[a]
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.block_of.len()
    }

    /// Intersection of the two equivalence relations.
    pub fn meet(&self, other: &Partition) -> Partition {
        let n = self.carrier_size();
        let mut blocks: Vec<BTreeSet<usize>> = Vec::new();
        for a in 0..n {
            match blocks
                .iter_mut()
                .find(|b| {
                    let r = *b.iter().next().expect("nonempty");
                    self.same_block(a, r) && other.same_block(a, r)
                }) {
                Some(b) => {
                    b.insert(a);
                }
                None => blocks.push(BTreeSet::from([a])),
            }
        }
        Self::from_blocks(n, blocks)
    }

    pub fn display_with(&self, s: &FiniteAiSemiring) -> String {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&a| s.label(a)).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Comma-separated element labels.
pub fn parse_label_set(s: &FiniteAiSemiring, text: &str) -> Result<BTreeSet<usize>, StructureError> {
    text.split(',')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| s.index_of(l).ok_or_else(|| StructureError::UnknownLabel(l.to_string())))
        .collect()
}

/// `a ≡ b` but `c op a` and `c op b` (or `a op c`, `b op c`) fall in
/// different blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NotCongruence {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub op: Operation,
    /// `true` when `c` multiplies from the left.
    pub c_on_left: bool,
}

impl fmt::Display for NotCongruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = if self.c_on_left { "left" } else { "right" };
        write!(
            f,
            "elements {} and {} share a block but differ after {} by {} on the {}",
            self.a, self.b, self.op, self.c, side
        )
    }
}

pub fn is_congruence(s: &FiniteAiSemiring, p: &Partition) -> Result<(), NotCongruence> {
    let k = s.order();
    for a in 0..k {
        for b in a + 1..k {
            if !p.same_block(a, b) {
                continue;
            }
            for c in 0..k {
                for op in [Operation::Add, Operation::Mul] {
                    if !p.same_block(apply(s, op, a, c), apply(s, op, b, c)) {
                        return Err(NotCongruence { a, b, c, op, c_on_left: false });
                    }
                    if !p.same_block(apply(s, op, c, a), apply(s, op, c, b)) {
                        return Err(NotCongruence { a, b, c, op, c_on_left: true });
                    }
                }
            }
        }
    }
    Ok(())
}

fn block_label(s: &FiniteAiSemiring, block: &BTreeSet<usize>) -> String {
    let labels: Vec<&str> = block.iter().map(|&a| s.label(a)).collect();
    format!("{{{}}}", labels.join(","))
}

pub fn quotient(s: &FiniteAiSemiring, p: &Partition) -> Result<FiniteAiSemiring, StructureError> {
    is_congruence(s, p).map_err(StructureError::NotCongruence)?;
    let reps: Vec<usize> = p.blocks().iter().map(|b| *b.iter().next().expect("nonempty")).collect();
    let table = |op| {
        reps.iter()
            .map(|&a| reps.iter().map(|&b| p.block_of(apply(s, op, a, b))).collect())
            .collect()
    };
    let labels = p.blocks().iter().map(|b| block_label(s, b)).collect();
    Ok(FiniteAiSemiring::new(
        format!("{}_quot", s.name()),
        labels,
        table(Operation::Add),
        table(Operation::Mul),
    )
    .expect("quotients of ai-semirings are ai-semirings"))
}

/// The subalgebra on `subset`, keeping the original labels.
pub fn subalgebra(s: &FiniteAiSemiring, subset: &BTreeSet<usize>) -> Result<FiniteAiSemiring, StructureError> {
    if subset.is_empty() {
        return Err(StructureError::EmptySubset);
    }
    if let Some(&a) = subset.iter().find(|&&a| a >= s.order()) {
        return Err(StructureError::OutOfRange(a));
    }
    let elems: Vec<usize> = subset.iter().copied().collect();
    for &a in &elems {
        for &b in &elems {
            for op in [Operation::Add, Operation::Mul] {
                let result = apply(s, op, a, b);
                if !subset.contains(&result) {
                    return Err(StructureError::NotClosed { a, b, op, result });
                }
            }
        }
    }
    let pos = |x: usize| elems.binary_search(&x).expect("closed");
    let table = |op| {
        elems
            .iter()
            .map(|&a| elems.iter().map(|&b| pos(apply(s, op, a, b))).collect())
            .collect()
    };
    let labels = elems.iter().map(|&a| s.label(a).to_string()).collect();
    Ok(FiniteAiSemiring::new(
        format!("{}_sub", s.name()),
        labels,
        table(Operation::Add),
        table(Operation::Mul),
    )
    .expect("subalgebras of ai-semirings are ai-semirings"))
}

pub fn is_homomorphism(a: &FiniteAiSemiring, b: &FiniteAiSemiring, map: &[usize]) -> bool {
    let k = a.order();
    map.len() == k
        && map.iter().all(|&m| m < b.order())
        && (0..k).all(|x| {
            (0..k).all(|y| map[a.add(x, y)] == b.add(map[x], map[y]) && map[a.mul(x, y)] == b.mul(map[x], map[y]))
        })
}

/// First bijection `A -> B` (lexicographic in the images of `0, 1, ...`)
/// preserving both operations.
pub fn find_isomorphism(a: &FiniteAiSemiring, b: &FiniteAiSemiring) -> Option<Vec<usize>> {
    let k = a.order();
    if k != b.order() {
        return None;
    }
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; k];
    iso_search(a, b, 0, &mut map, &mut used).then_some(map)
}

fn consistent(a: &FiniteAiSemiring, b: &FiniteAiSemiring, map: &[usize], upto: usize) -> bool {
    let x = upto;
    (0..=upto).all(|y| {
        [(x, y), (y, x)].iter().all(|&(p, q)| {
            [Operation::Add, Operation::Mul].iter().all(|&op| {
                let r = apply(a, op, p, q);
                let image = apply(b, op, map[p], map[q]);
                if r <= upto {
                    map[r] == image
                } else {
                    // image must stay free for r
                    !map[..=upto].contains(&image)
                }
            })
        })
    })
}

fn iso_search(a: &FiniteAiSemiring, b: &FiniteAiSemiring, x: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    let k = a.order();
    if x == k {
        return true;
    }
    for t in 0..k {
        if used[t] {
            continue;
        }
        map[x] = t;
        used[t] = true;
        if consistent(a, b, map, x) && iso_search(a, b, x + 1, map, used) {
            return true;
        }
        used[t] = false;
    }
    map[x] = usize::MAX;
    false
}

pub fn is_isomorphic(a: &FiniteAiSemiring, b: &FiniteAiSemiring) -> bool {
    find_isomorphism(a, b).is_some()
}

/// Pairs `(a, b)` at index `a * |B| + b`, with componentwise operations.
pub fn direct_product(a: &FiniteAiSemiring, b: &FiniteAiSemiring) -> FiniteAiSemiring {
    let (ka, kb) = (a.order(), b.order());
    let pairs: Vec<(usize, usize)> = (0..ka).flat_map(|x| (0..kb).map(move |y| (x, y))).collect();
    let table = |op| -> Vec<Vec<usize>> {
        pairs
            .iter()
            .map(|&(x1, y1)| {
                pairs
                    .iter()
                    .map(|&(x2, y2)| apply(a, op, x1, x2) * kb + apply(b, op, y1, y2))
                    .collect()
            })
            .collect()
    };
    let labels = pairs
        .iter()
        .map(|&(x, y)| format!("({},{})", a.label(x), b.label(y)))
        .collect();
    FiniteAiSemiring::new(
        format!("{}x{}", a.name(), b.name()),
        labels,
        table(Operation::Add),
        table(Operation::Mul),
    )
    .expect("products of ai-semirings are ai-semirings")
}

#[derive(Debug, Clone)]
pub struct SubdirectReport {
    pub injective: bool,
    pub first_projection_surjective: bool,
    pub second_projection_surjective: bool,
    /// Whether the meet of the two congruences is the identity relation.
    pub meet_is_discrete: bool,
    pub factor1: FiniteAiSemiring,
    pub factor2: FiniteAiSemiring,
    /// `s -> ([s]θ1, [s]θ2)` as indices into `factor1 × factor2`.
    pub embedding: Vec<usize>,
}

impl SubdirectReport {
    pub fn is_subdirect_embedding(&self) -> bool {
        self.injective && self.first_projection_surjective && self.second_projection_surjective
    }
}

pub fn check_subdirect(s: &FiniteAiSemiring, theta1: &Partition, theta2: &Partition) -> Result<SubdirectReport, StructureError> {
    let factor1 = quotient(s, theta1)?;
    let factor2 = quotient(s, theta2)?;
    let k2 = factor2.order();
    let pairs: Vec<(usize, usize)> = (0..s.order())
        .map(|a| (theta1.block_of(a), theta2.block_of(a)))
        .collect();
    let embedding: Vec<usize> = pairs.iter().map(|&(x, y)| x * k2 + y).collect();
    let distinct: BTreeSet<usize> = embedding.iter().copied().collect();
    let firsts: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
    let seconds: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
    Ok(SubdirectReport {
        injective: distinct.len() == s.order(),
        first_projection_surjective: firsts.len() == factor1.order(),
        second_projection_surjective: seconds.len() == k2,
        meet_is_discrete: theta1.meet(theta2).is_discrete(),
        factor1,
        factor2,
        embedding,
    })
}

/// Every congruence, by filtering all set partitions of the carrier.
pub fn enumerate_congruences(s: &FiniteAiSemiring) -> Result<Vec<Partition>, StructureError> {
    let n = s.order();
    if n > MAX_CONGRUENCE_ORDER {
        return Err(StructureError::TooLarge(n));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    set_partitions(&mut rgs, 1, 0, &mut |labels| {
        let blocks_n = labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![BTreeSet::new(); blocks_n];
        for (a, &l) in labels.iter().enumerate() {
            blocks[l].insert(a);
        }
        let p = Partition::from_blocks(n, blocks);
        if is_congruence(s, &p).is_ok() {
            out.push(p);
        }
    });
    Ok(out)
}

/// Restricted growth strings: `rgs[0] = 0`, `rgs[i] <= 1 + max(rgs[..i])`.
fn set_partitions(rgs: &mut [usize], i: usize, max: usize, visit: &mut impl FnMut(&[usize])) {
    if rgs.is_empty() {
        return;
    }
    if i == rgs.len() {
        visit(rgs);
        return;
    }
    for v in 0..=max + 1 {
        rgs[i] = v;
        set_partitions(rgs, i + 1, max.max(v), visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{registry, registry_names, validate};

    fn alg(name: &str) -> FiniteAiSemiring {
        registry(name).unwrap()
    }

    fn blocks(s: &FiniteAiSemiring, text: &str) -> Partition {
        Partition::parse_labels(s, text).unwrap()
    }

    fn subset(s: &FiniteAiSemiring, text: &str) -> BTreeSet<usize> {
        parse_label_set(s, text).unwrap()
    }

    #[test]
    fn partitions() {
        assert_eq!(Partition::new(3, [BTreeSet::from([0, 1])]), Err(StructureError::Uncovered(2)));
        assert_eq!(
            Partition::new(3, [BTreeSet::from([0, 1]), BTreeSet::from([1, 2])]),
            Err(StructureError::Overlap(1))
        );
        let p = Partition::with_singletons(4, [BTreeSet::from([2, 0])]).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.same_block(0, 2));
        assert!(Partition::discrete(5).is_discrete());
        assert_eq!(Partition::total(3).len(), 1);
    }

    #[test]
    fn s4_124_quotient_by_1_2() {
        let s = alg("S4_124");
        let rho = blocks(&s, "1,2|3|4");
        assert!(is_congruence(&s, &rho).is_ok());
        let q = quotient(&s, &rho).unwrap();
        assert_eq!(q.labels(), ["{1,2}", "{3}", "{4}"]);
        let map = find_isomorphism(&q, &alg("S7")).unwrap();
        assert!(is_homomorphism(&q, &alg("S7"), &map));
    }

    #[test]
    fn discrete_is_always_congruence() {
        for name in registry_names() {
            let s = alg(name);
            let d = Partition::discrete(s.order());
            assert!(is_congruence(&s, &d).is_ok());
            assert!(is_isomorphic(&quotient(&s, &d).unwrap(), &s));
        }
    }

    #[test]
    fn s7_blocks_0_1() {
        // {0,1} is not compatible: 0·a = 0 but 1·a = a, and {0} and {a} differ
        let s7 = alg("S7");
        let err = is_congruence(&s7, &blocks(&s7, "0,1|a")).unwrap_err();
        let (a, b) = (err.a, err.b);
        assert!([a, b] == [0, 2]);
        assert!(quotient(&s7, &blocks(&s7, "0,1|a")).is_err());
    }

    #[test]
    fn s4_124_subalgebras() {
        let s = alg("S4_124");
        assert!(is_isomorphic(&subalgebra(&s, &subset(&s, "1,2,4")).unwrap(), &alg("S2")));
        assert!(is_isomorphic(&subalgebra(&s, &subset(&s, "1,2,3")).unwrap(), &alg("S53")));
        let whole: BTreeSet<usize> = (0..4).collect();
        assert_eq!(subalgebra(&s, &whole).unwrap().add_table(), s.add_table());
        assert!(matches!(
            subalgebra(&s, &subset(&s, "3,4")),
            Err(StructureError::NotClosed { .. })
        ));
        assert_eq!(subalgebra(&s, &BTreeSet::new()), Err(StructureError::EmptySubset));
    }

    #[test]
    fn isomorphism_search() {
        let s2 = alg("S2");
        assert_eq!(find_isomorphism(&s2, &s2), Some(vec![0, 1, 2]));
        assert_eq!(find_isomorphism(&s2, &alg("S53")), None);
        assert_eq!(find_isomorphism(&s2, &alg("S4_124")), None);
    }

    #[test]
    fn products() {
        let p = direct_product(&alg("S2"), &alg("S4_359"));
        assert_eq!(p.order(), 12);
        assert!(validate(&p.add_table(), &p.mul_table()).unwrap().passed());
        let proj1: Vec<usize> = (0..12).map(|i| i / 4).collect();
        let proj2: Vec<usize> = (0..12).map(|i| i % 4).collect();
        assert!(is_homomorphism(&p, &alg("S2"), &proj1));
        assert!(is_homomorphism(&p, &alg("S4_359"), &proj2));
    }

    #[test]
    fn r6_decomposition() {
        let r6 = alg("R6");
        let rep = check_subdirect(&r6, &blocks(&r6, "1,2,3,4"), &blocks(&r6, "1,6|2,5")).unwrap();
        assert!(rep.is_subdirect_embedding());
        assert!(rep.meet_is_discrete);
        assert!(is_isomorphic(&rep.factor1, &alg("S2")));
        assert!(is_isomorphic(&rep.factor2, &alg("S4_359")));
        let product = direct_product(&rep.factor1, &rep.factor2);
        assert!(is_homomorphism(&r6, &product, &rep.embedding));
    }

    #[test]
    fn s4_359_decomposition() {
        let s = alg("S4_359");
        let rep = check_subdirect(&s, &blocks(&s, "1,2"), &blocks(&s, "1,4")).unwrap();
        assert!(rep.is_subdirect_embedding());
        assert!(is_isomorphic(&rep.factor1, &alg("S7")));
        assert!(is_isomorphic(&rep.factor2, &alg("S53")));
    }

    #[test]
    fn discrete_pair_is_trivially_subdirect() {
        let s = alg("S4_124");
        let d = Partition::discrete(4);
        let rep = check_subdirect(&s, &d, &d).unwrap();
        assert!(rep.injective && rep.meet_is_discrete);
        assert!(is_isomorphic(&rep.factor1, &s) && is_isomorphic(&rep.factor2, &s));
    }

    #[test]
    fn congruence_enumeration() {
        for name in registry_names() {
            let s = alg(name);
            let all = enumerate_congruences(&s).unwrap();
            assert!(all.contains(&Partition::discrete(s.order())));
            assert!(all.contains(&Partition::total(s.order())));
            assert!(all.iter().all(|p| is_congruence(&s, p).is_ok()));
        }
        let s = alg("S4_124");
        assert!(enumerate_congruences(&s).unwrap().contains(&blocks(&s, "1,2")));
        // Bell(4) partitions are visited
        let mut count = 0;
        set_partitions(&mut [0; 4], 1, 0, &mut |_| count += 1);
        assert_eq!(count, 15);
    }

    #[test]
    fn injectivity_matches_meet() {
        for name in registry_names() {
            let s = alg(name);
            let cs = enumerate_congruences(&s).unwrap();
            for a in &cs {
                for b in &cs {
                    let rep = check_subdirect(&s, a, b).unwrap();
                    assert_eq!(rep.injective, rep.meet_is_discrete);
                    assert!(rep.first_projection_surjective && rep.second_projection_surjective);
                }
            }
        }
    }
}
