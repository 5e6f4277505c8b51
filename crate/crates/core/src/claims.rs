//! The catalogue of reproducible claims, numbered as in the acceptance
//! suite, plus the statements this crate deliberately does not check.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// Checked by computation.
    Checked,
    /// Only run when the full census is requested.
    FullOnly,
    /// Statements about infinite sets of identities; listed, never run.
    OutOfScope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub id: u8,
    pub title: &'static str,
    pub scope: Scope,
}

pub const OUT_OF_SCOPE_NOTE: &str = "out of scope: not machine-checkable";

pub const CLAIMS: &[Claim] = &[
    Claim { id: 1, title: "registry algebras satisfy the ai-semiring axioms", scope: Scope::Checked },
    Claim { id: 2, title: "additive profile of S4_124: top 1, minimals {3,4}, coatoms {2,4}", scope: Scope::Checked },
    Claim { id: 3, title: "S4_124 has subalgebras S2 and S53 and quotient S7", scope: Scope::Checked },
    Claim { id: 4, title: "R6 and S4_359 are subdirect products of the stated factors", scope: Scope::Checked },
    Claim { id: 5, title: "S2, S7, S53, S4_124 satisfy the family inequalities for n <= 3", scope: Scope::Checked },
    Claim { id: 6, title: "syntactic deciders agree with brute force on random inequalities", scope: Scope::Checked },
    Claim { id: 7, title: "delta of every family term is empty; delta matches subset enumeration", scope: Scope::Checked },
    Claim { id: 8, title: "family graphs carry odd cycles; constrained bipartitions and their failures", scope: Scope::Checked },
    Claim { id: 9, title: "61 ai-semirings of order 3", scope: Scope::Checked },
    Claim { id: 10, title: "866 ai-semirings of order 4 in 5 additive types, 217 with two minimals and two coatoms", scope: Scope::FullOnly },
    Claim { id: 11, title: "at least 32 order-3 classes satisfy the family for n <= 2, including S2, S7, S53", scope: Scope::Checked },
    Claim { id: 12, title: "found derivations check and are sound in small models", scope: Scope::Checked },
    Claim { id: 13, title: "the sufficient condition for having no finite basis, and the conclusion that S4_124 and the other examples are nonfinitely based", scope: Scope::OutOfScope },
];

pub fn claim(id: u8) -> Option<&'static Claim> {
    CLAIMS.iter().find(|c| c.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbered_in_order() {
        let ids: Vec<u8> = CLAIMS.iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=13).collect::<Vec<_>>());
        assert_eq!(claim(13).unwrap().scope, Scope::OutOfScope);
        assert_eq!(claim(10).unwrap().scope, Scope::FullOnly);
    }
}
