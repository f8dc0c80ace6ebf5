//! Codes for regular tree datatypes with variables and binders, the generic
//! values they decode to, and the fold family.
//!
//! A [`FunctorCode`] describes one layer of a datatype; [`Term`] ties the
//! recursive positions of that layer back to the same code (the least fixed
//! point). Embedded codes are closed separately and nest via [`Val::Emb`].

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::nominal::{Name, SortId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimKind {
    Nat,
    Text,
    Bool,
}

impl PrimKind {
    pub fn keyword(self) -> &'static str {
        match self {
            PrimKind::Nat => "nat",
            PrimKind::Text => "text",
            PrimKind::Bool => "bool",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimValue {
    Nat(u64),
    Text(String),
    Bool(bool),
}

impl PrimValue {
    pub fn kind(&self) -> PrimKind {
        match self {
            PrimValue::Nat(_) => PrimKind::Nat,
            PrimValue::Text(_) => PrimKind::Text,
            PrimValue::Bool(_) => PrimKind::Bool,
        }
    }
}

impl fmt::Display for PrimValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimValue::Nat(n) => write!(f, "{}", n),
            PrimValue::Text(s) => write!(f, "{:?}", s),
            PrimValue::Bool(b) => write!(f, "{}", b),
        }
    }
}

/// The description of one layer of a datatype.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FunctorCode {
    Unit,
    /// A recursive position, tied back to the enclosing fixed point.
    Rec,
    Prim(PrimKind),
    /// A value of a separately closed datatype.
    Emb(Arc<FunctorCode>),
    Sum(Box<FunctorCode>, Box<FunctorCode>),
    Prod(Box<FunctorCode>, Box<FunctorCode>),
    VarOcc(SortId),
    /// Binds one name of the given sort over the scope.
    Bind(SortId, Box<FunctorCode>),
}

impl FunctorCode {
    pub fn sum(l: FunctorCode, r: FunctorCode) -> FunctorCode {
        FunctorCode::Sum(Box::new(l), Box::new(r))
    }

    pub fn prod(l: FunctorCode, r: FunctorCode) -> FunctorCode {
        FunctorCode::Prod(Box::new(l), Box::new(r))
    }

    pub fn bind(sort: SortId, scope: FunctorCode) -> FunctorCode {
        FunctorCode::Bind(sort, Box::new(scope))
    }

    pub fn emb(code: &Arc<FunctorCode>) -> FunctorCode {
        FunctorCode::Emb(code.clone())
    }
}

/// A decoded layer. Only meaningful relative to a code; see [`well_formed`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Val {
    Unit,
    Rec(Box<Term>),
    Prim(PrimValue),
    Emb(Box<Term>),
    InL(Box<Val>),
    InR(Box<Val>),
    Pair(Box<Val>, Box<Val>),
    Var(SortId, Name),
    Bind(SortId, Name, Box<Val>),
}

impl Val {
    pub fn rec(t: Term) -> Val {
        Val::Rec(Box::new(t))
    }

    pub fn emb(t: Term) -> Val {
        Val::Emb(Box::new(t))
    }

    pub fn inl(v: Val) -> Val {
        Val::InL(Box::new(v))
    }

    pub fn inr(v: Val) -> Val {
        Val::InR(Box::new(v))
    }

    pub fn pair(l: Val, r: Val) -> Val {
        Val::Pair(Box::new(l), Box::new(r))
    }

    pub fn bind(sort: SortId, name: Name, scope: Val) -> Val {
        Val::Bind(sort, name, Box::new(scope))
    }
}

/// An element of the fixed point of `code`.
#[derive(Clone, Eq)]
pub struct Term {
    code: Arc<FunctorCode>,
    top: Val,
}

impl Term {
    /// Wraps a layer. Well-formedness is a precondition, validated in debug
    /// builds only.
    pub fn new(code: Arc<FunctorCode>, top: Val) -> Term {
        // Subterms were checked when they were built, so one layer suffices.
        debug_assert!(
            layer_matches(&code, &code, &top, false),
            "layer does not match its code"
        );
        Term { code, top }
    }

    pub fn code(&self) -> &Arc<FunctorCode> {
        &self.code
    }

    pub fn top(&self) -> &Val {
        &self.top
    }

    pub fn into_top(self) -> Val {
        self.top
    }

    pub fn is_well_formed(&self) -> bool {
        well_formed_layer(&self.code, &self.code, &self.top)
    }

    /// Number of fixed-point layers, counting embedded terms.
    pub fn size(&self) -> usize {
        1 + val_size(&self.top)
    }
}

fn val_size(val: &Val) -> usize {
    match val {
        Val::Unit | Val::Prim(_) | Val::Var(..) => 0,
        Val::Rec(t) | Val::Emb(t) => t.size(),
        Val::InL(v) | Val::InR(v) | Val::Bind(_, _, v) => val_size(v),
        Val::Pair(l, r) => val_size(l) + val_size(r),
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        (Arc::ptr_eq(&self.code, &other.code) || self.code == other.code) && self.top == other.top
    }
}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.code.hash(state);
        self.top.hash(state);
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}>", self.top)
    }
}

/// True iff `val` decodes against `code` taken as the fixed-point code:
/// shapes and sorts agree, and every recursive or embedded subterm is
/// itself well-formed against its code.
pub fn well_formed(code: &Arc<FunctorCode>, val: &Val) -> bool {
    well_formed_layer(code, code, val)
}

/// `mu` is the code recursive positions refer to; `at` the code for the
/// current position inside the layer.
fn well_formed_layer(mu: &Arc<FunctorCode>, at: &FunctorCode, val: &Val) -> bool {
    layer_matches(mu, at, val, true)
}

fn layer_matches(mu: &Arc<FunctorCode>, at: &FunctorCode, val: &Val, deep: bool) -> bool {
    match (at, val) {
        (FunctorCode::Unit, Val::Unit) => true,
        (FunctorCode::Rec, Val::Rec(t)) => same_code(&t.code, mu) && (!deep || t.is_well_formed()),
        (FunctorCode::Prim(kind), Val::Prim(p)) => p.kind() == *kind,
        (FunctorCode::Emb(code), Val::Emb(t)) => same_code(&t.code, code) && (!deep || t.is_well_formed()),
        (FunctorCode::Sum(l, _), Val::InL(v)) => layer_matches(mu, l, v, deep),
        (FunctorCode::Sum(_, r), Val::InR(v)) => layer_matches(mu, r, v, deep),
        (FunctorCode::Prod(l, r), Val::Pair(a, b)) => layer_matches(mu, l, a, deep) && layer_matches(mu, r, b, deep),
        (FunctorCode::VarOcc(s), Val::Var(vs, _)) => s == vs,
        (FunctorCode::Bind(s, scope), Val::Bind(bs, _, body)) => s == bs && layer_matches(mu, scope, body, deep),
        _ => false,
    }
}

fn same_code(a: &Arc<FunctorCode>, b: &Arc<FunctorCode>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// One layer with its recursive positions replaced by results of type `A`.
/// Embedded terms stay terms: the fold treats them as constants.
#[derive(Clone, Debug, PartialEq)]
pub enum Layer<A> {
    Unit,
    Rec(A),
    Prim(PrimValue),
    Emb(Term),
    InL(Box<Layer<A>>),
    InR(Box<Layer<A>>),
    Pair(Box<Layer<A>>, Box<Layer<A>>),
    Var(SortId, Name),
    Bind(SortId, Name, Box<Layer<A>>),
}

impl Layer<Term> {
    /// Rebuilds a value from a layer whose recursive results are terms.
    pub fn into_val(self) -> Val {
        match self {
            Layer::Unit => Val::Unit,
            Layer::Rec(t) => Val::rec(t),
            Layer::Prim(p) => Val::Prim(p),
            Layer::Emb(t) => Val::emb(t),
            Layer::InL(l) => Val::inl(l.into_val()),
            Layer::InR(l) => Val::inr(l.into_val()),
            Layer::Pair(l, r) => Val::pair(l.into_val(), r.into_val()),
            Layer::Var(s, n) => Val::Var(s, n),
            Layer::Bind(s, n, l) => Val::bind(s, n, l.into_val()),
        }
    }
}

/// The variable carried by a layer that is nothing but injections around a
/// variable occurrence.
pub fn var_layer<A>(layer: &Layer<A>) -> Option<(&SortId, &Name)> {
    match layer {
        Layer::Var(s, n) => Some((s, n)),
        Layer::InL(l) | Layer::InR(l) => var_layer(l),
        _ => None,
    }
}

/// Generic fold: recursive positions are folded bottom-up and `alg` is
/// applied at every fixed-point layer. Embedded terms are passed through.
pub fn fold<A, F>(t: &Term, alg: &F) -> A
where
    F: Fn(Layer<A>) -> A,
{
    debug_assert!(t.is_well_formed());
    fold_unchecked(t, alg)
}

fn fold_unchecked<A, F>(t: &Term, alg: &F) -> A
where
    F: Fn(Layer<A>) -> A,
{
    let layer = fold_map(&t.top, alg);
    alg(layer)
}

/// Maps over the current layer, restarting the fold at recursive positions.
fn fold_map<A, F>(val: &Val, alg: &F) -> Layer<A>
where
    F: Fn(Layer<A>) -> A,
{
    match val {
        Val::Unit => Layer::Unit,
        Val::Rec(t) => Layer::Rec(fold_unchecked(t, alg)),
        Val::Prim(p) => Layer::Prim(p.clone()),
        Val::Emb(t) => Layer::Emb((**t).clone()),
        Val::InL(v) => Layer::InL(Box::new(fold_map(v, alg))),
        Val::InR(v) => Layer::InR(Box::new(fold_map(v, alg))),
        Val::Pair(l, r) => Layer::Pair(Box::new(fold_map(l, alg)), Box::new(fold_map(r, alg))),
        Val::Var(s, n) => Layer::Var(s.clone(), n.clone()),
        Val::Bind(s, n, scope) => Layer::Bind(s.clone(), n.clone(), Box::new(fold_map(scope, alg))),
    }
}

/// Fold whose algebra receives a fixed context term at every layer and
/// produces terms of `target`.
pub fn fold_ctx<F>(target: &Arc<FunctorCode>, f: &F, ctx: &Term, t: &Term) -> Term
where
    F: Fn(&Term, Layer<Term>) -> Term,
{
    debug_assert!(ctx.is_well_formed());
    let out = fold(t, &|layer| f(ctx, layer));
    debug_assert!(same_code(out.code(), target) && out.is_well_formed());
    out
}

/// True iff `p` holds at `t` and at every recursive subterm of `t`.
/// Embedded subterms are not visited, as in the fold.
pub fn forall_rec<P>(p: &P, t: &Term) -> bool
where
    P: Fn(&Term) -> bool,
{
    p(t) && forall_rec_positions(p, &t.top)
}

/// The predicate lifted to a layer: holds at every recursive position.
pub fn forall_rec_positions<P>(p: &P, val: &Val) -> bool
where
    P: Fn(&Term) -> bool,
{
    match val {
        Val::Unit | Val::Prim(_) | Val::Var(..) | Val::Emb(_) => true,
        Val::Rec(t) => forall_rec(p, t),
        Val::InL(v) | Val::InR(v) | Val::Bind(_, _, v) => forall_rec_positions(p, v),
        Val::Pair(l, r) => forall_rec_positions(p, l) && forall_rec_positions(p, r),
    }
}
