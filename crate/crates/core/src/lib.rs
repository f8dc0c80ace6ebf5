//! Datatype-generic nominal syntax.
//!
//! Datatypes are described by [`universe::FunctorCode`]s: regular trees
//! extended with variable occurrences and binders of named sorts. Over any
//! code the library provides a generic fold, name swapping, free variables,
//! decidable alpha-equivalence, canonical binder freshening and an
//! alpha-fold. Capture-avoiding substitution for the lambda calculus and
//! System F is obtained by folding a single non-recursive step function.

pub mod alpha;
pub mod error;
pub mod gen;
pub mod lambda;
pub mod nominal;
pub mod props;
pub mod syntax;
pub mod systemf;
pub mod universe;

pub mod cli;

pub use alpha::{alpha_eq, binders_free_elem, bvc_check, fold_ctx_alpha, to_canonical, CanonicalTerm};
pub use error::{Error, Result};
pub use nominal::{fresh_name, fv, swap, swap_name, Name, SortId, SortedName};
pub use universe::{fold, fold_ctx, forall_rec, well_formed, FunctorCode, Layer, Term, Val};
