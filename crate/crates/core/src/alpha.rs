//! Alpha-equivalence, canonical binder freshening and the alpha-fold.
//!
//! Equivalence is decided with name swapping: two binders agree when their
//! scopes agree after both binder names are swapped with one name fresh for
//! everything in sight. [`CanonicalTerm`] is an independent nameless
//! translation used to cross-check that decision.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::nominal::{all_names, binders_of, fresh_name, fv, names_of, swap_val, Name, SortId, SortedName};
use crate::universe::{fold_ctx, FunctorCode, Layer, PrimValue, Term, Val};

/// Decides alpha-equivalence. Terms over different codes are never
/// equivalent; use [`check_alpha_eq`] to treat that as an error instead.
pub fn alpha_eq(t1: &Term, t2: &Term) -> bool {
    t1.code() == t2.code() && alpha_eq_val(t1.top(), t2.top())
}

pub fn check_alpha_eq(t1: &Term, t2: &Term) -> Result<bool> {
    if t1.code() != t2.code() {
        return Err(Error::CodeMismatch);
    }
    Ok(alpha_eq_val(t1.top(), t2.top()))
}

fn alpha_eq_val(v1: &Val, v2: &Val) -> bool {
    match (v1, v2) {
        (Val::Unit, Val::Unit) => true,
        (Val::Prim(p), Val::Prim(q)) => p == q,
        (Val::Rec(a), Val::Rec(b)) | (Val::Emb(a), Val::Emb(b)) => alpha_eq(a, b),
        (Val::InL(a), Val::InL(b)) | (Val::InR(a), Val::InR(b)) => alpha_eq_val(a, b),
        (Val::Pair(a1, b1), Val::Pair(a2, b2)) => alpha_eq_val(a1, a2) && alpha_eq_val(b1, b2),
        (Val::Var(s1, n1), Val::Var(s2, n2)) => s1 == s2 && n1 == n2,
        (Val::Bind(s1, b1, scope1), Val::Bind(s2, b2, scope2)) => {
            if s1 != s2 {
                return false;
            }
            if b1 == b2 {
                return alpha_eq_val(scope1, scope2);
            }
            let mut seen = BTreeSet::new();
            all_names(scope1, &mut seen);
            all_names(scope2, &mut seen);
            seen.insert(b1.clone());
            seen.insert(b2.clone());
            let z = fresh_name(&seen);
            alpha_eq_val(&swap_val(s1, b1, &z, scope1), &swap_val(s1, b2, &z, scope2))
        }
        _ => false,
    }
}

/// Returns an alpha-equivalent term none of whose binders is in `xs`.
///
/// The result depends only on the alpha-class of `t` and on `xs`: the k-th
/// binder in pre-order is named by the k-th smallest name outside
/// `xs ∪ fv(t)`. Runs in two passes so that the final renaming never has
/// to step around a name it is about to introduce.
pub fn binders_free_elem(xs: &[Name], t: &Term) -> Term {
    let mut avoid: BTreeSet<Name> = xs.iter().cloned().collect();
    avoid.extend(names_of(&fv(t)));

    let mut everything = BTreeSet::new();
    all_names(t.top(), &mut everything);
    let highest = everything.iter().chain(xs).map(Name::index).max();
    // Targets never exceed highest + binder count, so scratch names start above that.
    let binder_count = binders_of(t).len() as u64;
    let mut scratch = highest.map_or(0, |h| h + 1) + binder_count;

    let distinct = rename_binders(t, &mut || {
        let name = Name::new(scratch);
        scratch += 1;
        name
    });

    let mut targets = (0u64..).map(Name::new).filter(|n| !avoid.contains(n));
    rename_binders(&distinct, &mut || targets.next().expect("name supply is infinite"))
}

/// Renames each binder, in pre-order, to the next name from `supply`.
fn rename_binders(t: &Term, supply: &mut dyn FnMut() -> Name) -> Term {
    Term::new(t.code().clone(), rename_binders_val(t.top(), supply))
}

fn rename_binders_val(val: &Val, supply: &mut dyn FnMut() -> Name) -> Val {
    match val {
        Val::Unit => Val::Unit,
        Val::Prim(p) => Val::Prim(p.clone()),
        Val::Var(s, n) => Val::Var(s.clone(), n.clone()),
        Val::Rec(t) => Val::rec(rename_binders(t, supply)),
        Val::Emb(t) => Val::emb(rename_binders(t, supply)),
        Val::InL(v) => Val::inl(rename_binders_val(v, supply)),
        Val::InR(v) => Val::inr(rename_binders_val(v, supply)),
        Val::Pair(l, r) => {
            let l = rename_binders_val(l, supply);
            Val::pair(l, rename_binders_val(r, supply))
        }
        Val::Bind(s, b, scope) => {
            let z = supply();
            let scope = swap_val(s, b, &z, scope);
            Val::bind(s.clone(), z, rename_binders_val(&scope, supply))
        }
    }
}

/// The alpha-fold: freshens `t` against the free names of the context,
/// then folds.
pub fn fold_ctx_alpha<F>(target: &Arc<FunctorCode>, f: &F, ctx: &Term, t: &Term) -> Term
where
    F: Fn(&Term, Layer<Term>) -> Term,
{
    let avoid: Vec<Name> = names_of(&fv(ctx)).into_iter().collect();
    fold_ctx(target, f, ctx, &binders_free_elem(&avoid, t))
}

/// Evaluates an alpha-compatible predicate on a representative whose
/// binders avoid `xs` and the term's own free names.
pub fn bvc_check<P>(p: &P, xs: &[Name], t: &Term) -> bool
where
    P: Fn(&Term) -> bool,
{
    let mut avoid = xs.to_vec();
    avoid.extend(names_of(&fv(t)));
    p(&binders_free_elem(&avoid, t))
}

/// Nameless form of a term: bound occurrences become the number of
/// same-sort binders between the occurrence and its binder.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CanonicalTerm {
    Unit,
    Rec(Box<CanonicalTerm>),
    Prim(PrimValue),
    Emb(Box<CanonicalTerm>),
    InL(Box<CanonicalTerm>),
    InR(Box<CanonicalTerm>),
    Pair(Box<CanonicalTerm>, Box<CanonicalTerm>),
    Bound(SortId, usize),
    Free(SortedName),
    Bind(SortId, Box<CanonicalTerm>),
}

pub fn to_canonical(t: &Term) -> CanonicalTerm {
    CanonicalTerm::Rec(Box::new(canonical_val(t.top(), &mut Vec::new())))
}

fn canonical_val<'a>(val: &'a Val, scope: &mut Vec<(&'a SortId, &'a Name)>) -> CanonicalTerm {
    use CanonicalTerm as C;
    match val {
        Val::Unit => C::Unit,
        Val::Prim(p) => C::Prim(p.clone()),
        Val::Rec(t) => C::Rec(Box::new(canonical_val(t.top(), scope))),
        Val::Emb(t) => C::Emb(Box::new(canonical_val(t.top(), scope))),
        Val::InL(v) => C::InL(Box::new(canonical_val(v, scope))),
        Val::InR(v) => C::InR(Box::new(canonical_val(v, scope))),
        Val::Pair(l, r) => C::Pair(Box::new(canonical_val(l, scope)), Box::new(canonical_val(r, scope))),
        Val::Var(s, n) => {
            let mut distance = 0;
            for (bs, bn) in scope.iter().rev() {
                if *bs != s {
                    continue;
                }
                if *bn == n {
                    return C::Bound(s.clone(), distance);
                }
                distance += 1;
            }
            C::Free(SortedName::new(s.clone(), n.clone()))
        }
        Val::Bind(s, n, body) => {
            scope.push((s, n));
            let body = canonical_val(body, scope);
            scope.pop();
            C::Bind(s.clone(), Box::new(body))
        }
    }
}

impl fmt::Display for CanonicalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CanonicalTerm as C;
        match self {
            C::Unit => f.write_str("unit"),
            C::Rec(c) => write!(f, "(mu {})", c),
            C::Prim(p) => write!(f, "(prim {})", p),
            C::Emb(c) => write!(f, "(emb (mu {}))", c),
            C::InL(c) => write!(f, "(inl {})", c),
            C::InR(c) => write!(f, "(inr {})", c),
            C::Pair(l, r) => write!(f, "(pair {} {})", l, r),
            C::Bound(s, k) => write!(f, "(ref {} {})", s, k),
            C::Free(sn) => write!(f, "(free {} {})", sn.sort, sn.name),
            C::Bind(s, c) => write!(f, "(bind {} {})", s, c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{app, lam, lam_code, subst, subst_naive, tm_sort, v};
    use crate::nominal::list_not_occur_bind;

    fn n(i: u64) -> Name {
        Name::new(i)
    }

    fn lam_body(c: &CanonicalTerm) -> CanonicalTerm {
        // (mu (inr (inr (bind tm BODY))))
        match c {
            CanonicalTerm::Rec(inner) => match &**inner {
                CanonicalTerm::InR(i) => match &**i {
                    CanonicalTerm::InR(b) => (**b).clone(),
                    _ => panic!("not an abstraction"),
                },
                _ => panic!("not an abstraction"),
            },
            _ => panic!("not a term"),
        }
    }

    #[test]
    fn alpha_eq_examples() {
        let (x, y) = (n(0), n(1));
        assert!(alpha_eq(&lam(x.clone(), v(x.clone())), &lam(y.clone(), v(y.clone()))));
        assert!(!alpha_eq(&v(x.clone()), &v(y.clone())));
        let k = lam(x.clone(), lam(y.clone(), v(x.clone())));
        let k2 = lam(x.clone(), lam(y.clone(), v(y.clone())));
        assert!(!alpha_eq(&k, &k2));
        assert_ne!(to_canonical(&k), to_canonical(&k2));
    }

    #[test]
    fn alpha_eq_rejects_capture() {
        // \x. \y. x  vs  \y. \y. y
        let (x, y) = (n(0), n(1));
        let a = lam(x.clone(), lam(y.clone(), v(x.clone())));
        let b = lam(y.clone(), lam(y.clone(), v(y.clone())));
        assert!(!alpha_eq(&a, &b));
        let c = lam(y.clone(), lam(x.clone(), v(y.clone())));
        assert!(alpha_eq(&a, &c));
    }

    #[test]
    fn code_mismatch_is_an_error() {
        let ty = crate::systemf::tvar(n(0));
        assert_eq!(check_alpha_eq(&v(n(0)), &ty), Err(Error::CodeMismatch));
        assert!(!alpha_eq(&v(n(0)), &ty));
    }

    #[test]
    fn canonical_examples() {
        let (x, y) = (n(0), n(1));
        let tm = tm_sort();
        let bound = |k| {
            CanonicalTerm::Rec(Box::new(CanonicalTerm::InL(Box::new(CanonicalTerm::Bound(
                tm.clone(),
                k,
            )))))
        };
        assert_eq!(
            lam_body(&to_canonical(&lam(x.clone(), v(x.clone())))),
            CanonicalTerm::Bind(tm.clone(), Box::new(bound(0)))
        );
        let free = CanonicalTerm::Rec(Box::new(CanonicalTerm::InL(Box::new(CanonicalTerm::Free(
            SortedName::new(tm.clone(), y.clone()),
        )))));
        assert_eq!(
            lam_body(&to_canonical(&lam(x.clone(), v(y.clone())))),
            CanonicalTerm::Bind(tm.clone(), Box::new(free))
        );
        // innermost binder wins
        let shadow = to_canonical(&lam(x.clone(), lam(x.clone(), v(x.clone()))));
        let inner = lam_body(&shadow);
        let CanonicalTerm::Bind(_, body) = inner else { panic!() };
        assert_eq!(lam_body(&body), CanonicalTerm::Bind(tm.clone(), Box::new(bound(0))));
        assert_eq!(
            to_canonical(&lam(x.clone(), v(x.clone()))).to_string(),
            "(mu (inr (inr (bind tm (mu (inl (ref tm 0)))))))"
        );
    }

    #[test]
    fn binders_free_elem_examples() {
        let (x, y) = (n(0), n(1));
        assert_eq!(binders_free_elem(&[], &v(x.clone())), v(x.clone()));
        // [y], \y. y  ->  \z. z with z the first supply name outside {y}
        let out = binders_free_elem(std::slice::from_ref(&y), &lam(y.clone(), v(y.clone())));
        assert_eq!(out, lam(x.clone(), v(x.clone())));
        let out = binders_free_elem(std::slice::from_ref(&x), &lam(y.clone(), v(y.clone())));
        assert_eq!(out, lam(y.clone(), v(y.clone())));
        // strong compatibility on a single renaming
        let a = binders_free_elem(&[], &lam(x.clone(), v(x.clone())));
        let b = binders_free_elem(&[], &lam(y.clone(), v(y.clone())));
        assert_eq!(a, b);
    }

    #[test]
    fn binders_free_elem_separates_binders_from_free_names() {
        // \x. x y x' with free y: binders become distinct and avoid y
        let (x, y) = (n(0), n(1));
        let t = lam(
            x.clone(),
            app(lam(x.clone(), v(y.clone())), lam(y.clone(), v(x.clone()))),
        );
        let out = binders_free_elem(&[n(2)], &t);
        assert!(alpha_eq(&t, &out));
        assert!(list_not_occur_bind(&[y, n(2)], &out));
        let binders = crate::nominal::binders_of(&out);
        let distinct: BTreeSet<_> = binders.iter().collect();
        assert_eq!(distinct.len(), binders.len());
    }

    #[test]
    fn fold_ctx_alpha_avoids_capture() {
        let (x, y, z) = (n(0), n(1), n(2));
        // (\y. x)[x := y] is \v2. y when the free names are {x, y}
        let out = subst(&lam(y.clone(), v(x.clone())), &x, &v(y.clone()));
        assert_eq!(out, lam(z.clone(), v(y.clone())));
        assert_eq!(subst(&v(x.clone()), &x, &v(z.clone())), v(z.clone()));
        let out = subst(&lam(y.clone(), v(x.clone())), &x, &v(z.clone()));
        assert!(alpha_eq(&out, &lam(y.clone(), v(z.clone()))));
        assert!(alpha_eq(&out, &subst_naive(&lam(y.clone(), v(x.clone())), &x, &v(z))));
        let _ = lam_code();
    }

    #[test]
    fn bvc_check_examples() {
        let (a, x) = (n(5), n(0));
        let target = lam(a.clone(), v(a));
        let p = |t: &Term| alpha_eq(t, &target);
        assert!(bvc_check(&p, std::slice::from_ref(&x), &lam(x.clone(), v(x.clone()))));
        assert!(!bvc_check(
            &|_: &Term| false,
            std::slice::from_ref(&x),
            &lam(x.clone(), v(x.clone()))
        ));
    }
}
