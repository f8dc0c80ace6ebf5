//! The untyped lambda calculus as an instance of the universe.
//!
//! Code: `var tm | rec × rec | bind tm rec`. Substitution is one folded
//! function, [`subst_aux`], run either through the plain context fold
//! (naive, capturing) or through the alpha-fold (capture-avoiding).

use std::sync::{Arc, OnceLock};

use crate::alpha::fold_ctx_alpha;
use crate::nominal::{Name, SortId};
use crate::universe::{fold, fold_ctx, FunctorCode, Layer, Term, Val};

pub fn tm_sort() -> SortId {
    static SORT: OnceLock<SortId> = OnceLock::new();
    SORT.get_or_init(|| SortId::new("tm")).clone()
}

pub fn lam_code() -> Arc<FunctorCode> {
    static CODE: OnceLock<Arc<FunctorCode>> = OnceLock::new();
    CODE.get_or_init(|| {
        Arc::new(FunctorCode::sum(
            FunctorCode::VarOcc(tm_sort()),
            FunctorCode::sum(
                FunctorCode::prod(FunctorCode::Rec, FunctorCode::Rec),
                FunctorCode::bind(tm_sort(), FunctorCode::Rec),
            ),
        ))
    })
    .clone()
}

/// Context for substitution: the variable being replaced and an embedded
/// replacement term.
pub fn subst_ctx_code() -> Arc<FunctorCode> {
    static CODE: OnceLock<Arc<FunctorCode>> = OnceLock::new();
    CODE.get_or_init(|| {
        Arc::new(FunctorCode::prod(
            FunctorCode::VarOcc(tm_sort()),
            FunctorCode::emb(&lam_code()),
        ))
    })
    .clone()
}

pub fn v(x: Name) -> Term {
    Term::new(lam_code(), Val::inl(Val::Var(tm_sort(), x)))
}

pub fn app(m: Term, n: Term) -> Term {
    Term::new(lam_code(), Val::inr(Val::inl(Val::pair(Val::rec(m), Val::rec(n)))))
}

pub fn lam(x: Name, body: Term) -> Term {
    Term::new(lam_code(), Val::inr(Val::inr(Val::bind(tm_sort(), x, Val::rec(body)))))
}

/// One constructor of a lambda term, borrowed.
#[derive(Debug, Clone, Copy)]
pub enum LamView<'a> {
    Var(&'a Name),
    App(&'a Term, &'a Term),
    Lam(&'a Name, &'a Term),
}

/// Panics if `t` is not a lambda term.
pub fn view(t: &Term) -> LamView<'_> {
    match t.top() {
        Val::InL(v) => match &**v {
            Val::Var(_, x) => LamView::Var(x),
            other => panic!("malformed variable layer {:?}", other),
        },
        Val::InR(rest) => match &**rest {
            Val::InL(pair) => match &**pair {
                Val::Pair(m, n) => match (&**m, &**n) {
                    (Val::Rec(m), Val::Rec(n)) => LamView::App(m, n),
                    other => panic!("malformed application layer {:?}", other),
                },
                other => panic!("malformed application layer {:?}", other),
            },
            Val::InR(bind) => match &**bind {
                Val::Bind(_, x, body) => match &**body {
                    Val::Rec(body) => LamView::Lam(x, body),
                    other => panic!("malformed abstraction layer {:?}", other),
                },
                other => panic!("malformed abstraction layer {:?}", other),
            },
            other => panic!("malformed lambda layer {:?}", other),
        },
        other => panic!("malformed lambda layer {:?}", other),
    }
}

enum LayerView<A> {
    Var(Name),
    App(A, A),
    Lam(Name, A),
}

fn layer_view<A>(layer: Layer<A>) -> LayerView<A> {
    match layer {
        Layer::InL(v) => match *v {
            Layer::Var(_, x) => LayerView::Var(x),
            _ => unreachable!("variable layer"),
        },
        Layer::InR(rest) => match *rest {
            Layer::InL(pair) => match *pair {
                Layer::Pair(m, n) => match (*m, *n) {
                    (Layer::Rec(m), Layer::Rec(n)) => LayerView::App(m, n),
                    _ => unreachable!("application layer"),
                },
                _ => unreachable!("application layer"),
            },
            Layer::InR(bind) => match *bind {
                Layer::Bind(_, x, body) => match *body {
                    Layer::Rec(body) => LayerView::Lam(x, body),
                    _ => unreachable!("abstraction layer"),
                },
                _ => unreachable!("abstraction layer"),
            },
            _ => unreachable!("lambda layer"),
        },
        _ => unreachable!("lambda layer"),
    }
}

/// Number of variable occurrences.
pub fn vars_count(m: &Term) -> u64 {
    fold(m, &|layer| match layer_view(layer) {
        LayerView::Var(_) => 1,
        LayerView::App(a, b) => a + b,
        LayerView::Lam(_, body) => body,
    })
}

pub fn subst_ctx(x: Name, n: Term) -> Term {
    Term::new(subst_ctx_code(), Val::pair(Val::Var(tm_sort(), x), Val::emb(n)))
}

fn ctx_parts(ctx: &Term) -> (&Name, &Term) {
    match ctx.top() {
        Val::Pair(x, n) => match (&**x, &**n) {
            (Val::Var(_, x), Val::Emb(n)) => (x, n),
            _ => panic!("malformed substitution context"),
        },
        _ => panic!("malformed substitution context"),
    }
}

/// The folded substitution step. Abstractions are rebuilt as they are,
/// without comparing the binder to the substituted variable.
pub fn subst_aux(ctx: &Term, layer: Layer<Term>) -> Term {
    let (x, n) = ctx_parts(ctx);
    match layer_view(layer) {
        LayerView::Var(y) if &y == x => n.clone(),
        LayerView::Var(y) => v(y),
        LayerView::App(a, b) => app(a, b),
        LayerView::Lam(y, body) => lam(y, body),
    }
}

/// `m[x := n]` with no capture avoidance.
pub fn subst_naive(m: &Term, x: &Name, n: &Term) -> Term {
    fold_ctx(&lam_code(), &subst_aux, &subst_ctx(x.clone(), n.clone()), m)
}

/// Capture-avoiding `m[x := n]`.
pub fn subst(m: &Term, x: &Name, n: &Term) -> Term {
    fold_ctx_alpha(&lam_code(), &subst_aux, &subst_ctx(x.clone(), n.clone()), m)
}

/// Contracts the leftmost-outermost redex, if any.
pub fn beta_step(m: &Term) -> Option<Term> {
    match view(m) {
        LamView::Var(_) => None,
        LamView::App(f, a) => {
            if let LamView::Lam(x, body) = view(f) {
                return Some(subst(body, x, a));
            }
            if let Some(f2) = beta_step(f) {
                return Some(app(f2, a.clone()));
            }
            beta_step(a).map(|a2| app(f.clone(), a2))
        }
        LamView::Lam(x, body) => beta_step(body).map(|b| lam(x.clone(), b)),
    }
}

/// Reduces to normal form in at most `fuel` steps; `None` when fuel runs out.
pub fn normalize(m: &Term, fuel: u64) -> Option<Term> {
    let mut current = m.clone();
    for _ in 0..fuel {
        match beta_step(&current) {
            Some(next) => current = next,
            None => return Some(current),
        }
    }
    beta_step(&current).is_none().then_some(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::alpha_eq;

    fn n(i: u64) -> Name {
        Name::new(i)
    }

    #[test]
    fn constructors_are_injections() {
        let x = n(0);
        assert!(matches!(v(x.clone()).top(), Val::InL(_)));
        let a = app(v(x.clone()), v(n(1)));
        assert!(matches!(a.top(), Val::InR(inner) if matches!(**inner, Val::InL(_))));
        let l = lam(x.clone(), v(x));
        assert!(matches!(l.top(), Val::InR(inner) if matches!(**inner, Val::InR(_))));
    }

    #[test]
    fn vars_count_examples() {
        let (x, y) = (n(0), n(1));
        assert_eq!(vars_count(&v(x.clone())), 1);
        assert_eq!(vars_count(&lam(x.clone(), app(v(x.clone()), v(x.clone())))), 2);
        let t = lam(x.clone(), lam(y.clone(), app(v(x.clone()), app(v(y), v(x)))));
        assert_eq!(vars_count(&t), 3);
    }

    #[test]
    fn naive_substitution_examples() {
        let (x, y) = (n(0), n(1));
        let big = app(v(y.clone()), v(y.clone()));
        assert_eq!(subst_naive(&v(x.clone()), &x, &big), big);
        assert_eq!(subst_naive(&v(y.clone()), &x, &big), v(y.clone()));
        // captures
        assert_eq!(
            subst_naive(&lam(y.clone(), v(x.clone())), &x, &v(y.clone())),
            lam(y.clone(), v(y.clone()))
        );
        // substitutes under a binder of the same name
        assert_eq!(
            subst_naive(&lam(x.clone(), v(x.clone())), &x, &big),
            lam(x.clone(), big.clone())
        );
    }

    #[test]
    fn capture_avoiding_substitution_examples() {
        let (x, y, z) = (n(0), n(1), n(2));
        let big = app(v(z.clone()), v(z.clone()));
        assert_eq!(subst(&v(x.clone()), &x, &big), big);
        let out = subst(&lam(y.clone(), v(x.clone())), &x, &v(y.clone()));
        assert!(alpha_eq(&out, &lam(z.clone(), v(y.clone()))));
        assert!(!alpha_eq(&out, &lam(y.clone(), v(y.clone()))));
        let id = lam(y.clone(), v(y.clone()));
        assert!(alpha_eq(&subst(&id, &x, &big), &id));
    }

    #[test]
    fn beta_examples() {
        let (x, y, a, b) = (n(0), n(1), n(2), n(3));
        let id = lam(x.clone(), v(x.clone()));
        assert_eq!(beta_step(&app(id, v(y.clone()))), Some(v(y.clone())));

        let delta = lam(x.clone(), app(v(x.clone()), v(x.clone())));
        let omega = app(delta.clone(), delta);
        assert_eq!(normalize(&omega, 10), None);

        let k = lam(x.clone(), lam(y.clone(), v(x.clone())));
        let t = app(app(k, v(a.clone())), v(b));
        assert_eq!(normalize(&t, 10), Some(v(a)));
        assert_eq!(beta_step(&v(x)), None);
    }

    #[test]
    fn normalize_with_zero_fuel_accepts_normal_forms() {
        let x = n(0);
        assert_eq!(normalize(&v(x.clone()), 0), Some(v(x.clone())));
        let redex = app(lam(x.clone(), v(x.clone())), v(x));
        assert_eq!(normalize(&redex, 0), None);
    }
}
