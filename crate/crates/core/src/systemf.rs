//! System F as a two-sorted instance: types bind `ty` names, terms bind
//! both `tm` names (typed abstraction) and `ty` names (type abstraction).
//!
//! Types appear inside terms as embedded values, so term-level folds leave
//! annotations alone; substituting a type into a term is a separate
//! traversal.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use crate::alpha::fold_ctx_alpha;
use crate::lambda::tm_sort;
use crate::nominal::{all_names, fresh_name, fv, names_of, swap, Name, SortId};
use crate::universe::{fold_ctx, var_layer, FunctorCode, Layer, Term, Val};

pub fn ty_sort() -> SortId {
    static SORT: OnceLock<SortId> = OnceLock::new();
    SORT.get_or_init(|| SortId::new("ty")).clone()
}

/// `tyvar | ty → ty | ∀ty. ty`
pub fn type_code() -> Arc<FunctorCode> {
    static CODE: OnceLock<Arc<FunctorCode>> = OnceLock::new();
    CODE.get_or_init(|| {
        Arc::new(FunctorCode::sum(
            FunctorCode::VarOcc(ty_sort()),
            FunctorCode::sum(
                FunctorCode::prod(FunctorCode::Rec, FunctorCode::Rec),
                FunctorCode::bind(ty_sort(), FunctorCode::Rec),
            ),
        ))
    })
    .clone()
}

/// `var | app | λ(x:T). e | e [T] | Λa. e`
pub fn term_code() -> Arc<FunctorCode> {
    static CODE: OnceLock<Arc<FunctorCode>> = OnceLock::new();
    CODE.get_or_init(|| {
        let ty = FunctorCode::emb(&type_code());
        Arc::new(FunctorCode::sum(
            FunctorCode::VarOcc(tm_sort()),
            FunctorCode::sum(
                FunctorCode::prod(FunctorCode::Rec, FunctorCode::Rec),
                FunctorCode::sum(
                    FunctorCode::bind(tm_sort(), FunctorCode::prod(ty.clone(), FunctorCode::Rec)),
                    FunctorCode::sum(
                        FunctorCode::prod(FunctorCode::Rec, ty),
                        FunctorCode::bind(ty_sort(), FunctorCode::Rec),
                    ),
                ),
            ),
        ))
    })
    .clone()
}

/// A triple of terms, so that freshness can be stated over all three at once.
pub fn triple_code() -> Arc<FunctorCode> {
    static CODE: OnceLock<Arc<FunctorCode>> = OnceLock::new();
    CODE.get_or_init(|| {
        let tm = FunctorCode::emb(&term_code());
        Arc::new(FunctorCode::prod(tm.clone(), FunctorCode::prod(tm.clone(), tm)))
    })
    .clone()
}

fn term_ctx_code() -> Arc<FunctorCode> {
    static CODE: OnceLock<Arc<FunctorCode>> = OnceLock::new();
    CODE.get_or_init(|| {
        Arc::new(FunctorCode::prod(
            FunctorCode::VarOcc(tm_sort()),
            FunctorCode::emb(&term_code()),
        ))
    })
    .clone()
}

fn type_ctx_code() -> Arc<FunctorCode> {
    static CODE: OnceLock<Arc<FunctorCode>> = OnceLock::new();
    CODE.get_or_init(|| {
        Arc::new(FunctorCode::prod(
            FunctorCode::VarOcc(ty_sort()),
            FunctorCode::emb(&type_code()),
        ))
    })
    .clone()
}

pub fn tvar(a: Name) -> Term {
    Term::new(type_code(), Val::inl(Val::Var(ty_sort(), a)))
}

pub fn arrow(s: Term, t: Term) -> Term {
    Term::new(type_code(), Val::inr(Val::inl(Val::pair(Val::rec(s), Val::rec(t)))))
}

pub fn forall(a: Name, t: Term) -> Term {
    Term::new(type_code(), Val::inr(Val::inr(Val::bind(ty_sort(), a, Val::rec(t)))))
}

pub fn var(x: Name) -> Term {
    Term::new(term_code(), Val::inl(Val::Var(tm_sort(), x)))
}

pub fn app(m: Term, n: Term) -> Term {
    Term::new(term_code(), Val::inr(Val::inl(Val::pair(Val::rec(m), Val::rec(n)))))
}

/// `λ(x:ty). body`
pub fn abs_t(x: Name, ty: Term, body: Term) -> Term {
    Term::new(
        term_code(),
        Val::inr(Val::inr(Val::inl(Val::bind(
            tm_sort(),
            x,
            Val::pair(Val::emb(ty), Val::rec(body)),
        )))),
    )
}

/// `m [ty]`
pub fn tapp(m: Term, ty: Term) -> Term {
    Term::new(
        term_code(),
        Val::inr(Val::inr(Val::inr(Val::inl(Val::pair(Val::rec(m), Val::emb(ty)))))),
    )
}

/// `Λa. body`
pub fn tabs(a: Name, body: Term) -> Term {
    Term::new(
        term_code(),
        Val::inr(Val::inr(Val::inr(Val::inr(Val::bind(ty_sort(), a, Val::rec(body)))))),
    )
}

pub fn triple(m: Term, n: Term, l: Term) -> Term {
    Term::new(
        triple_code(),
        Val::pair(Val::emb(m), Val::pair(Val::emb(n), Val::emb(l))),
    )
}

pub fn triple_parts(t: &Term) -> (&Term, &Term, &Term) {
    match t.top() {
        Val::Pair(m, rest) => match (&**m, &**rest) {
            (Val::Emb(m), Val::Pair(n, l)) => match (&**n, &**l) {
                (Val::Emb(n), Val::Emb(l)) => (m, n, l),
                _ => panic!("malformed triple"),
            },
            _ => panic!("malformed triple"),
        },
        _ => panic!("malformed triple"),
    }
}

#[derive(Debug, Clone, Copy)]
pub enum TypeView<'a> {
    Var(&'a Name),
    Arrow(&'a Term, &'a Term),
    Forall(&'a Name, &'a Term),
}

#[derive(Debug, Clone, Copy)]
pub enum TermView<'a> {
    Var(&'a Name),
    App(&'a Term, &'a Term),
    Abs(&'a Name, &'a Term, &'a Term),
    TApp(&'a Term, &'a Term),
    TAbs(&'a Name, &'a Term),
}

fn malformed(what: &str, val: &Val) -> ! {
    panic!("malformed {} layer {:?}", what, val)
}

fn rec_pair(val: &Val) -> Option<(&Term, &Term)> {
    match val {
        Val::Pair(a, b) => match (&**a, &**b) {
            (Val::Rec(a), Val::Rec(b)) => Some((a, b)),
            _ => None,
        },
        _ => None,
    }
}

fn rec_bind(val: &Val) -> Option<(&Name, &Term)> {
    match val {
        Val::Bind(_, x, body) => match &**body {
            Val::Rec(body) => Some((x, body)),
            _ => None,
        },
        _ => None,
    }
}

/// Panics if `t` is not a type.
pub fn type_view(t: &Term) -> TypeView<'_> {
    let top = t.top();
    let view = match top {
        Val::InL(v) => match &**v {
            Val::Var(_, a) => Some(TypeView::Var(a)),
            _ => None,
        },
        Val::InR(rest) => match &**rest {
            Val::InL(p) => rec_pair(p).map(|(s, t)| TypeView::Arrow(s, t)),
            Val::InR(b) => rec_bind(b).map(|(a, t)| TypeView::Forall(a, t)),
            _ => None,
        },
        _ => None,
    };
    view.unwrap_or_else(|| malformed("type", top))
}

/// Panics if `t` is not a term.
pub fn term_view(t: &Term) -> TermView<'_> {
    let top = t.top();
    let view = match top {
        Val::InL(v) => match &**v {
            Val::Var(_, x) => Some(TermView::Var(x)),
            _ => None,
        },
        Val::InR(rest) => match &**rest {
            Val::InL(p) => rec_pair(p).map(|(m, n)| TermView::App(m, n)),
            Val::InR(rest) => match &**rest {
                Val::InL(b) => match &**b {
                    Val::Bind(_, x, scope) => match &**scope {
                        Val::Pair(ty, body) => match (&**ty, &**body) {
                            (Val::Emb(ty), Val::Rec(body)) => Some(TermView::Abs(x, ty, body)),
                            _ => None,
                        },
                        _ => None,
                    },
                    _ => None,
                },
                Val::InR(rest) => match &**rest {
                    Val::InL(p) => match &**p {
                        Val::Pair(m, ty) => match (&**m, &**ty) {
                            (Val::Rec(m), Val::Emb(ty)) => Some(TermView::TApp(m, ty)),
                            _ => None,
                        },
                        _ => None,
                    },
                    Val::InR(b) => rec_bind(b).map(|(a, body)| TermView::TAbs(a, body)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        },
        _ => None,
    };
    view.unwrap_or_else(|| malformed("term", top))
}

fn replace_var(sort: &SortId, ctx: &Term, target: &Arc<FunctorCode>, layer: Layer<Term>) -> Term {
    let (x, replacement) = match ctx.top() {
        Val::Pair(x, n) => match (&**x, &**n) {
            (Val::Var(_, x), Val::Emb(n)) => (x, n),
            _ => panic!("malformed substitution context"),
        },
        _ => panic!("malformed substitution context"),
    };
    match var_layer(&layer) {
        Some((s, y)) if s == sort && y == x => (**replacement).clone(),
        _ => Term::new(target.clone(), layer.into_val()),
    }
}

/// The folded step of term substitution: variables are replaced, every
/// other layer rebuilt as is (annotations included).
pub fn subst_aux(ctx: &Term, layer: Layer<Term>) -> Term {
    replace_var(&tm_sort(), ctx, &term_code(), layer)
}

fn type_subst_aux(ctx: &Term, layer: Layer<Term>) -> Term {
    replace_var(&ty_sort(), ctx, &type_code(), layer)
}

fn term_ctx(x: &Name, n: &Term) -> Term {
    Term::new(
        term_ctx_code(),
        Val::pair(Val::Var(tm_sort(), x.clone()), Val::emb(n.clone())),
    )
}

fn type_ctx(a: &Name, t: &Term) -> Term {
    Term::new(
        type_ctx_code(),
        Val::pair(Val::Var(ty_sort(), a.clone()), Val::emb(t.clone())),
    )
}

pub fn subst_term_naive(m: &Term, x: &Name, n: &Term) -> Term {
    fold_ctx(&term_code(), &subst_aux, &term_ctx(x, n), m)
}

pub fn subst_term(m: &Term, x: &Name, n: &Term) -> Term {
    fold_ctx_alpha(&term_code(), &subst_aux, &term_ctx(x, n), m)
}

/// Capture-avoiding `s[a := t]` on types.
pub fn subst_type_in_type(s: &Term, a: &Name, t: &Term) -> Term {
    fold_ctx_alpha(&type_code(), &type_subst_aux, &type_ctx(a, t), s)
}

/// Capture-avoiding `m[a := t]` for a type variable `a` in a term. Only
/// type abstractions that would capture a free name of `t` are renamed.
pub fn subst_type_in_term(m: &Term, a: &Name, t: &Term) -> Term {
    let t_fv = fv(t);
    let t_names = names_of(&t_fv);
    type_in_term(m, a, t, &t_names)
}

fn type_in_term(m: &Term, a: &Name, t: &Term, t_names: &BTreeSet<Name>) -> Term {
    let on_type = |ty: &Term| subst_type_in_type(ty, a, t);
    match term_view(m) {
        TermView::Var(x) => var(x.clone()),
        TermView::App(p, q) => app(type_in_term(p, a, t, t_names), type_in_term(q, a, t, t_names)),
        TermView::Abs(x, ty, body) => abs_t(x.clone(), on_type(ty), type_in_term(body, a, t, t_names)),
        TermView::TApp(p, ty) => tapp(type_in_term(p, a, t, t_names), on_type(ty)),
        TermView::TAbs(b, _) if b == a => m.clone(),
        TermView::TAbs(b, body) if t_names.contains(b) => {
            let mut avoid = t_names.clone();
            avoid.insert(a.clone());
            all_names(body.top(), &mut avoid);
            let z = fresh_name(&avoid);
            let body = swap(&ty_sort(), b, &z, body);
            tabs(z, type_in_term(&body, a, t, t_names))
        }
        TermView::TAbs(b, body) => tabs(b.clone(), type_in_term(body, a, t, t_names)),
    }
}
