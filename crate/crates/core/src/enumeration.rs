//! Enumeration of semilattices and ai-semirings of order at most 4 up to
//! isomorphism, classification by additive reduct, and screening against
//! the family inequalities.
//!
//! The additive table is fixed to a canonical semilattice first; the
//! multiplication table is then filled cell by cell in row-major order,
//! rejecting a partial table as soon as a fully determined instance of
//! associativity or one of the distributive laws fails. Survivors are
//! deduplicated by [`CanonicalForm`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{natural_order, serialize_algebra, FiniteAiSemiring};
use crate::family::{in_w_with, FamilyError, MembershipOptions};

pub const MAX_ENUMERATION_ORDER: usize = 4;
/// Canonical forms try every permutation, so keep the carrier small.
pub const MAX_CANONICAL_ORDER: usize = 8;

const UNSET: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("order {0} is outside 1..={MAX_ENUMERATION_ORDER}")]
    OrderOutOfRange(usize),
    #[error("dedup set exceeded its cap of {cap} classes")]
    DedupCapExceeded { cap: usize },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Least `(add, mul)` pair over all relabellings, each flattened row-major.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub add: Vec<u8>,
    pub mul: Vec<u8>,
}

impl CanonicalForm {
    pub fn order(&self) -> usize {
        (self.add.len() as f64).sqrt() as usize
    }

    pub fn to_algebra(&self, name: impl Into<String>) -> FiniteAiSemiring {
        let widen = |t: &[u8]| t.iter().map(|&x| x as usize).collect();
        FiniteAiSemiring::from_flat_unchecked(
            name.into(),
            (1..=self.order()).map(|i| i.to_string()).collect(),
            widen(&self.add),
            widen(&self.mul),
        )
    }
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

/// Table of the relabelled algebra: `t'[p(a)][p(b)] = p(t[a][b])`.
fn permute_table(k: usize, table: &[usize], p: &[usize]) -> Vec<u8> {
    let mut out = vec![0u8; k * k];
    for a in 0..k {
        for b in 0..k {
            out[p[a] * k + p[b]] = p[table[a * k + b]] as u8;
        }
    }
    out
}

fn canonical_flat(k: usize, add: &[usize], mul: &[usize], perms: &[Vec<usize>]) -> CanonicalForm {
    perms
        .iter()
        .map(|p| CanonicalForm {
            add: permute_table(k, add, p),
            mul: permute_table(k, mul, p),
        })
        .min()
        .expect("at least one permutation")
}

pub fn canonical_form(s: &FiniteAiSemiring) -> CanonicalForm {
    let k = s.order();
    assert!(k <= MAX_CANONICAL_ORDER, "canonical form needs order <= {MAX_CANONICAL_ORDER}");
    canonical_flat(k, s.flat_add(), s.flat_mul(), &permutations(k))
}

/// Canonical form of the additive reduct alone.
pub fn additive_key(s: &FiniteAiSemiring) -> Vec<u8> {
    let k = s.order();
    permutations(k)
        .iter()
        .map(|p| permute_table(k, s.flat_add(), p))
        .min()
        .expect("at least one permutation")
}

/// The same algebra with element `a` renamed to `p[a]`.
pub fn relabel(s: &FiniteAiSemiring, p: &[usize]) -> FiniteAiSemiring {
    let k = s.order();
    let widen = |t: Vec<u8>| t.into_iter().map(usize::from).collect();
    let mut labels = vec![String::new(); k];
    for a in 0..k {
        labels[p[a]] = s.label(a).to_string();
    }
    FiniteAiSemiring::from_flat_unchecked(
        s.name().to_string(),
        labels,
        widen(permute_table(k, s.flat_add(), p)),
        widen(permute_table(k, s.flat_mul(), p)),
    )
}

/// A join table in canonical labelling.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Semilattice {
    order: usize,
    join: Vec<usize>,
}

impl Semilattice {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.order + b]
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.join.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    /// The semilattice as an ai-semiring with `· = +`.
    pub fn as_algebra(&self) -> FiniteAiSemiring {
        FiniteAiSemiring::from_flat_unchecked(
            format!("L{}", self.order),
            (1..=self.order).map(|i| i.to_string()).collect(),
            self.join.clone(),
            self.join.clone(),
        )
    }
}

fn check_order(k: usize) -> Result<(), EnumerationError> {
    if (1..=MAX_ENUMERATION_ORDER).contains(&k) {
        Ok(())
    } else {
        Err(EnumerationError::OrderOutOfRange(k))
    }
}

pub fn enumerate_semilattices(k: usize) -> Result<Vec<Semilattice>, EnumerationError> {
    check_order(k)?;
    let perms = permutations(k);
    let upper: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
    let mut table = vec![0; k * k];
    for a in 0..k {
        table[a * k + a] = a;
    }
    let mut found = BTreeSet::new();
    let total = k.pow(upper.len() as u32);
    for mut code in 0..total {
        for &(a, b) in &upper {
            let v = code % k;
            code /= k;
            table[a * k + b] = v;
            table[b * k + a] = v;
        }
        let j = |x: usize, y: usize| table[x * k + y];
        let assoc = (0..k).all(|x| (0..k).all(|y| (0..k).all(|z| j(j(x, y), z) == j(x, j(y, z)))));
        if assoc {
            let canon = perms.iter().map(|p| permute_table(k, &table, p)).min().expect("nonempty");
            found.insert(canon);
        }
    }
    Ok(found
        .into_iter()
        .map(|t| Semilattice {
            order: k,
            join: t.into_iter().map(usize::from).collect(),
        })
        .collect())
}

/// Row-major multiplication backtracker over a fixed join table.
struct MulSearch<'a> {
    k: usize,
    add: &'a [usize],
    mul: Vec<usize>,
}

impl MulSearch<'_> {
    fn m(&self, a: usize, b: usize) -> Option<usize> {
        match self.mul[a * self.k + b] {
            UNSET => None,
            v => Some(v),
        }
    }

    /// Every fully determined instance of the multiplicative axioms holds.
    fn consistent(&self) -> bool {
        let k = self.k;
        let add = |a: usize, b: usize| self.add[a * k + b];
        for x in 0..k {
            for y in 0..k {
                let xy = self.m(x, y);
                for z in 0..k {
                    // (xy)z = x(yz)
                    if let (Some(xy), Some(yz)) = (xy, self.m(y, z)) {
                        if let (Some(l), Some(r)) = (self.m(xy, z), self.m(x, yz)) {
                            if l != r {
                                return false;
                            }
                        }
                    }
                    // x(y+z) = xy + xz
                    if let (Some(l), Some(xy), Some(xz)) = (self.m(x, add(y, z)), xy, self.m(x, z)) {
                        if l != add(xy, xz) {
                            return false;
                        }
                    }
                    // (y+z)x = yx + zx
                    if let (Some(l), Some(yx), Some(zx)) = (self.m(add(y, z), x), self.m(y, x), self.m(z, x)) {
                        if l != add(yx, zx) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn fill(&mut self, cell: usize, emit: &mut impl FnMut(&[usize])) {
        if cell == self.k * self.k {
            emit(&self.mul);
            return;
        }
        for v in 0..self.k {
            self.mul[cell] = v;
            if self.consistent() {
                self.fill(cell + 1, emit);
            }
        }
        self.mul[cell] = UNSET;
    }
}

/// Every multiplication table making `add` an ai-semiring whose first cell
/// is `first`, in the order the backtracker finds them.
fn multiplications(k: usize, add: &[usize], first: usize, emit: &mut impl FnMut(&[usize])) {
    let mut search = MulSearch {
        k,
        add,
        mul: vec![UNSET; k * k],
    };
    search.mul[0] = first;
    if search.consistent() {
        search.fill(1, emit);
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EnumerationOptions {
    /// Abort once the dedup set would hold more than this many classes.
    pub dedup_cap: Option<usize>,
}

pub fn enumerate_ai_semirings(k: usize) -> Result<Vec<FiniteAiSemiring>, EnumerationError> {
    enumerate_ai_semirings_with(k, EnumerationOptions::default())
}

/// Canonical representatives sorted by canonical form, named `A<k>_<i>`.
pub fn enumerate_ai_semirings_with(k: usize, opts: EnumerationOptions) -> Result<Vec<FiniteAiSemiring>, EnumerationError> {
    Ok(enumerate_canonical_forms(k, opts)?
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.to_algebra(format!("A{k}_{}", i + 1)))
        .collect())
}

pub fn enumerate_canonical_forms(k: usize, opts: EnumerationOptions) -> Result<Vec<CanonicalForm>, EnumerationError> {
    let semilattices = enumerate_semilattices(k)?;
    let perms = permutations(k);
    let tasks: Vec<(&Semilattice, usize)> = semilattices
        .iter()
        .flat_map(|s| (0..k).map(move |v| (s, v)))
        .collect();
    let partial: Vec<BTreeSet<CanonicalForm>> = tasks
        .par_iter()
        .map(|&(s, first)| {
            let mut seen = BTreeSet::new();
            multiplications(k, &s.join, first, &mut |mul| {
                seen.insert(canonical_flat(k, &s.join, mul, &perms));
            });
            seen
        })
        .collect();
    let mut all = BTreeSet::new();
    for set in partial {
        for c in set {
            all.insert(c);
            if let Some(cap) = opts.dedup_cap {
                if all.len() > cap {
                    return Err(EnumerationError::DedupCapExceeded { cap });
                }
            }
        }
    }
    Ok(all.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveType {
    /// Canonical join table, flattened.
    pub key: Vec<u8>,
    pub minimals: usize,
    pub coatoms: usize,
    pub count: usize,
}

/// Groups algebras by the isomorphism type of their additive reduct.
pub fn classify_additive_type(list: &[FiniteAiSemiring]) -> Vec<AdditiveType> {
    let mut types: BTreeMap<Vec<u8>, AdditiveType> = BTreeMap::new();
    for s in list {
        let key = additive_key(s);
        types
            .entry(key.clone())
            .or_insert_with(|| {
                let profile = natural_order(s);
                AdditiveType {
                    key,
                    minimals: profile.minimals.len(),
                    coatoms: profile.coatoms.len(),
                    count: 0,
                }
            })
            .count += 1;
    }
    types.into_values().collect()
}

/// Indices into `list` of the algebras satisfying every family inequality
/// with `n <= n_max`.
pub fn screen_family(list: &[FiniteAiSemiring], n_max: usize) -> Result<Vec<usize>, EnumerationError> {
    let opts = MembershipOptions {
        sequential: true,
        stop_on_failure: true,
        ..Default::default()
    };
    let verdicts: Vec<Result<bool, FamilyError>> = list
        .par_iter()
        .map(|s| in_w_with(s, n_max, opts).map(|r| r.all_hold()))
        .collect();
    let mut out = Vec::new();
    for (i, v) in verdicts.into_iter().enumerate() {
        if v? {
            out.push(i);
        }
    }
    Ok(out)
}

/// Census document: one algebra record per entry separated by `---`, then a
/// commented summary of the additive types.
pub fn census_document(list: &[FiniteAiSemiring]) -> String {
    let mut out = String::new();
    for (i, s) in list.iter().enumerate() {
        if i > 0 {
            out.push_str("---\n");
        }
        out.push_str(&serialize_algebra(s));
    }
    out.push_str("---\n");
    let types = classify_additive_type(list);
    let _ = writeln!(out, "# total {}", list.len());
    let _ = writeln!(out, "# additive types {}", types.len());
    for t in &types {
        let key: Vec<String> = t.key.iter().map(|x| (x + 1).to_string()).collect();
        let _ = writeln!(
            out,
            "# type join={} minimals={} coatoms={} count={}",
            key.join(""),
            t.minimals,
            t.coatoms,
            t.count
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_algebras, registry, validate};
    use crate::structure::is_isomorphic;

    #[test]
    fn semilattice_counts() {
        let counts: Vec<usize> = (1..=4).map(|k| enumerate_semilattices(k).unwrap().len()).collect();
        assert_eq!(counts, [1, 1, 2, 5]);
        assert!(enumerate_semilattices(0).is_err());
        assert!(enumerate_semilattices(5).is_err());
    }

    #[test]
    fn order_four_semilattice_shapes() {
        let mut shapes: Vec<(usize, usize)> = enumerate_semilattices(4)
            .unwrap()
            .iter()
            .map(|l| {
                let p = natural_order(&l.as_algebra());
                (p.minimals.len(), p.coatoms.len())
            })
            .collect();
        shapes.sort();
        assert_eq!(shapes, [(1, 1), (1, 2), (2, 1), (2, 2), (3, 3)]);
    }

    #[test]
    fn small_orders() {
        assert_eq!(enumerate_ai_semirings(1).unwrap().len(), 1);
        let three = enumerate_ai_semirings(3).unwrap();
        assert_eq!(three.len(), 61);
        let forms: BTreeSet<CanonicalForm> = three.iter().map(canonical_form).collect();
        assert_eq!(forms.len(), 61);
        for s in &three {
            assert!(validate(&s.add_table(), &s.mul_table()).unwrap().passed());
        }
    }

    fn naive(k: usize, add: &[usize]) -> BTreeSet<CanonicalForm> {
        let perms = permutations(k);
        let add_rows: Vec<Vec<usize>> = add.chunks(k).map(<[usize]>::to_vec).collect();
        let mut out = BTreeSet::new();
        for mut code in 0..k.pow((k * k) as u32) {
            let mut mul = vec![0; k * k];
            for cell in mul.iter_mut() {
                *cell = code % k;
                code /= k;
            }
            let rows: Vec<Vec<usize>> = mul.chunks(k).map(<[usize]>::to_vec).collect();
            if validate(&add_rows, &rows).unwrap().passed() {
                out.insert(canonical_flat(k, add, &mul, &perms));
            }
        }
        out
    }

    #[test]
    fn pruned_search_matches_naive_filter() {
        for k in [2, 3] {
            let all = enumerate_canonical_forms(k, Default::default()).unwrap();
            let lattices = enumerate_semilattices(k).unwrap();
            // k = 3 fixes one semilattice; k = 2 has only one anyway
            let l = &lattices[0];
            let expected = naive(k, &l.join);
            let key: Vec<u8> = l.join.iter().map(|&x| x as u8).collect();
            let got: BTreeSet<CanonicalForm> = all.into_iter().filter(|c| c.add == key).collect();
            assert_eq!(got, expected, "order {k}");
        }
        // the full space of order-2 tables
        let mut everything = BTreeSet::new();
        for mut code in 0..16usize {
            let mut add = vec![0; 4];
            for cell in add.iter_mut() {
                *cell = code % 2;
                code /= 2;
            }
            let rows: Vec<Vec<usize>> = add.chunks(2).map(<[usize]>::to_vec).collect();
            let report = validate(&rows, &rows).unwrap();
            let additive_ok = !report.violations.iter().any(|v| {
                use crate::algebra::Axiom::*;
                matches!(v.axiom, AddIdempotent | AddCommutative | AddAssociative)
            });
            if additive_ok {
                everything.extend(naive(2, &add));
            }
        }
        let two: BTreeSet<CanonicalForm> = enumerate_canonical_forms(2, Default::default()).unwrap().into_iter().collect();
        assert_eq!(two, everything);
    }

    #[test]
    fn canonical_form_is_relabelling_invariant() {
        for name in ["S2", "S7", "S53", "S4_124", "S4_359", "R6"] {
            let s = registry(name).unwrap();
            let c = canonical_form(&s);
            for p in permutations(s.order()).iter().step_by(5) {
                let t = relabel(&s, p);
                assert!(validate(&t.add_table(), &t.mul_table()).unwrap().passed());
                assert_eq!(canonical_form(&t), c);
            }
        }
    }

    #[test]
    fn canonical_forms_agree_with_isomorphism_search() {
        let three = enumerate_ai_semirings(3).unwrap();
        for (i, a) in three.iter().enumerate().step_by(4) {
            for (j, b) in three.iter().enumerate().step_by(3) {
                assert_eq!(is_isomorphic(a, b), i == j);
            }
        }
    }

    #[test]
    fn registry_classes_appear_once() {
        let three = enumerate_ai_semirings(3).unwrap();
        for name in ["S2", "S7", "S53"] {
            let s = registry(name).unwrap();
            assert_eq!(three.iter().filter(|t| is_isomorphic(&s, t)).count(), 1, "{name}");
        }
    }

    #[test]
    fn order_four_census() {
        let four = enumerate_ai_semirings(4).unwrap();
        assert_eq!(four.len(), 866);
        let types = classify_additive_type(&four);
        assert_eq!(types.len(), 5);
        let two_two: Vec<&AdditiveType> = types.iter().filter(|t| (t.minimals, t.coatoms) == (2, 2)).collect();
        assert_eq!(two_two.len(), 1);
        assert_eq!(two_two[0].count, 217);
        for name in ["S4_124", "S4_359"] {
            let s = registry(name).unwrap();
            assert_eq!(four.iter().filter(|t| is_isomorphic(&s, t)).count(), 1, "{name}");
        }
    }

    #[test]
    fn order_three_types_partition_the_census() {
        let three = enumerate_ai_semirings(3).unwrap();
        let types = classify_additive_type(&three);
        assert_eq!(types.len(), 2);
        assert_eq!(types.iter().map(|t| t.count).sum::<usize>(), 61);
    }

    #[test]
    fn dedup_cap() {
        let opts = EnumerationOptions { dedup_cap: Some(10) };
        assert_eq!(
            enumerate_ai_semirings_with(3, opts).unwrap_err(),
            EnumerationError::DedupCapExceeded { cap: 10 }
        );
        let opts = EnumerationOptions { dedup_cap: Some(61) };
        assert_eq!(enumerate_ai_semirings_with(3, opts).unwrap().len(), 61);
    }

    #[test]
    fn screening_order_three() {
        let three = enumerate_ai_semirings(3).unwrap();
        let passed = screen_family(&three, 2).unwrap();
        assert!(passed.len() >= 32, "{}", passed.len());
        let s7 = registry("S7").unwrap();
        assert!(passed.iter().any(|&i| is_isomorphic(&three[i], &s7)));
        let trivial = enumerate_ai_semirings(1).unwrap();
        assert_eq!(screen_family(&trivial, 2).unwrap(), [0]);
    }

    #[test]
    fn census_document_parses_back() {
        let three = enumerate_ai_semirings(3).unwrap();
        let doc = census_document(&three);
        assert_eq!(parse_algebras(&doc).unwrap(), three);
        assert!(doc.contains("# total 61"));
    }
}
