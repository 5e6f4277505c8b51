//! A workbench for finite additively idempotent semirings (ai-semirings).
//!
//! Algebras are given by Cayley tables ([`algebra`]). Identities are written
//! in the term language of the free ai-semiring ([`terms`]) and decided in a
//! finite algebra either by exhaustive evaluation or, for three small
//! algebras, by syntactic criteria ([`satisfaction`]). The remaining modules
//! cover quotients and subdirect decompositions ([`structure`]), the graph of
//! two-letter summands ([`graphs`]), the `u(n)`/`q(n)` inequality family
//! ([`family`]), equational derivations ([`derivation`]) and the census of
//! small ai-semirings up to isomorphism ([`enumeration`]).

pub mod algebra;
pub mod claims;
pub mod derivation;
pub mod enumeration;
pub mod family;
pub mod graphs;
pub mod satisfaction;
pub mod structure;
pub mod terms;

pub use algebra::{natural_order, AdditiveProfile, FiniteAiSemiring};
pub use terms::{Substitution, Term, Variable, Word};
