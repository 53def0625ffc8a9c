//! First-order syntax, substitutions and unification.

mod subst;
mod syntax;
mod unify;

use thiserror::Error;

pub use subst::Substitution;
pub use syntax::{literal_variant, rename_apart, variant_renaming, Clause, FreshVars, Literal, Term, Var, BOTTOM, TOP};
pub use unify::{
    is_instance, match_literal, match_strict, mgu, unify_atoms, unify_literals_into, unify_terms_into, NotUnifiable,
    UnifyFailure,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("`{0}` has no dual")]
    NoDual(String),
}
