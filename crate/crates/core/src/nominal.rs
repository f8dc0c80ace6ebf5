//! Names, sorts and the nominal operations over generic terms: fresh-name
//! choice, sorted transpositions, free variables and binder occurrence.
//!
//! Swapping and free-variable computation descend into embedded terms; only
//! the fold family treats embeddings as opaque constants.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::universe::{Term, Val};

/// A name drawn from a countably infinite, totally ordered supply.
///
/// Identity is the index alone. The alias is a display hint carried along
/// from the surface syntax and never takes part in comparisons.
#[derive(Clone)]
pub struct Name {
    index: u64,
    alias: Option<Arc<str>>,
}

impl Name {
    pub fn new(index: u64) -> Name {
        Name { index, alias: None }
    }

    pub fn with_alias(index: u64, alias: impl Into<Arc<str>>) -> Name {
        Name {
            index,
            alias: Some(alias.into()),
        }
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn alias(&self) -> Option<&str> {
        self.alias.as_deref()
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Name) -> bool {
        self.index == other.index
    }
}

impl Eq for Name {}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Name) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Name) -> Ordering {
        self.index.cmp(&other.index)
    }
}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.index.hash(state)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.alias {
            Some(alias) => write!(f, "{}#{}", alias, self.index),
            None => write!(f, "v{}", self.index),
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.alias {
            Some(alias) => f.write_str(alias),
            None => write!(f, "v{}", self.index),
        }
    }
}

/// Identifies a namespace of variables. Binders only capture names of
/// their own sort.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortId(Arc<str>);

impl SortId {
    pub fn new(name: impl Into<Arc<str>>) -> SortId {
        SortId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for SortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for SortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A name tagged with its sort. Ordered by sort, then by index.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SortedName {
    pub sort: SortId,
    pub name: Name,
}

impl SortedName {
    pub fn new(sort: SortId, name: Name) -> SortedName {
        SortedName { sort, name }
    }
}

impl fmt::Display for SortedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.sort, self.name)
    }
}

/// The smallest name not contained in `avoid`.
pub fn fresh_name(avoid: &BTreeSet<Name>) -> Name {
    let mut candidate = 0;
    // `avoid` iterates in index order, so the first gap is the answer.
    for name in avoid {
        match name.index.cmp(&candidate) {
            Ordering::Less => {}
            Ordering::Equal => candidate += 1,
            Ordering::Greater => break,
        }
    }
    Name::new(candidate)
}

/// The transposition `(a b)` applied to a single name.
pub fn swap_name(a: &Name, b: &Name, n: &Name) -> Name {
    if n == b {
        a.clone()
    } else if n == a {
        b.clone()
    } else {
        n.clone()
    }
}

/// Swaps `a` and `b` at every variable, bound and binding position of the
/// given sort, including inside embedded terms.
pub fn swap(sort: &SortId, a: &Name, b: &Name, t: &Term) -> Term {
    if a == b {
        return t.clone();
    }
    Term::new(t.code().clone(), swap_val(sort, a, b, t.top()))
}

pub(crate) fn swap_val(sort: &SortId, a: &Name, b: &Name, val: &Val) -> Val {
    match val {
        Val::Unit => Val::Unit,
        Val::Prim(p) => Val::Prim(p.clone()),
        Val::Rec(t) => Val::Rec(Box::new(swap(sort, a, b, t))),
        Val::Emb(t) => Val::Emb(Box::new(swap(sort, a, b, t))),
        Val::InL(v) => Val::InL(Box::new(swap_val(sort, a, b, v))),
        Val::InR(v) => Val::InR(Box::new(swap_val(sort, a, b, v))),
        Val::Pair(l, r) => Val::Pair(Box::new(swap_val(sort, a, b, l)), Box::new(swap_val(sort, a, b, r))),
        Val::Var(s, n) => {
            let n = if s == sort { swap_name(a, b, n) } else { n.clone() };
            Val::Var(s.clone(), n)
        }
        Val::Bind(s, n, scope) => {
            let n = if s == sort { swap_name(a, b, n) } else { n.clone() };
            Val::Bind(s.clone(), n, Box::new(swap_val(sort, a, b, scope)))
        }
    }
}

/// Free variables, sorted by `(sort, index)`.
pub fn fv(t: &Term) -> BTreeSet<SortedName> {
    fv_val(t.top())
}

pub(crate) fn fv_val(val: &Val) -> BTreeSet<SortedName> {
    let mut out = BTreeSet::new();
    collect_fv(val, &mut Vec::new(), &mut out);
    out
}

fn collect_fv<'a>(val: &'a Val, bound: &mut Vec<(&'a SortId, &'a Name)>, out: &mut BTreeSet<SortedName>) {
    match val {
        Val::Unit | Val::Prim(_) => {}
        Val::Rec(t) | Val::Emb(t) => collect_fv(t.top(), bound, out),
        Val::InL(v) | Val::InR(v) => collect_fv(v, bound, out),
        Val::Pair(l, r) => {
            collect_fv(l, bound, out);
            collect_fv(r, bound, out);
        }
        Val::Var(s, n) => {
            if !bound.iter().any(|(bs, bn)| *bs == s && *bn == n) {
                out.insert(SortedName::new(s.clone(), n.clone()));
            }
        }
        Val::Bind(s, n, scope) => {
            bound.push((s, n));
            collect_fv(scope, bound, out);
            bound.pop();
        }
    }
}

/// Drops the sorts of a set of sorted names.
pub fn names_of<'a>(names: impl IntoIterator<Item = &'a SortedName>) -> BTreeSet<Name> {
    names.into_iter().map(|sn| sn.name.clone()).collect()
}

/// Names of all binder nodes in pre-order, sorts discarded, duplicates kept.
pub fn binders_of(t: &Term) -> Vec<Name> {
    let mut out = Vec::new();
    collect_binders(t.top(), &mut out);
    out
}

fn collect_binders(val: &Val, out: &mut Vec<Name>) {
    match val {
        Val::Unit | Val::Prim(_) | Val::Var(..) => {}
        Val::Rec(t) | Val::Emb(t) => collect_binders(t.top(), out),
        Val::InL(v) | Val::InR(v) => collect_binders(v, out),
        Val::Pair(l, r) => {
            collect_binders(l, out);
            collect_binders(r, out);
        }
        Val::Bind(_, n, scope) => {
            out.push(n.clone());
            collect_binders(scope, out);
        }
    }
}

/// True iff `n` is not the name of any binder in `t`, whatever its sort.
pub fn not_occur_bind(n: &Name, t: &Term) -> bool {
    !binders_of(t).contains(n)
}

pub fn list_not_occur_bind<'a>(ns: impl IntoIterator<Item = &'a Name>, t: &Term) -> bool {
    let binders: BTreeSet<Name> = binders_of(t).into_iter().collect();
    ns.into_iter().all(|n| !binders.contains(n))
}

/// Every name occurring anywhere in a value: free, bound or binding.
pub(crate) fn all_names(val: &Val, out: &mut BTreeSet<Name>) {
    match val {
        Val::Unit | Val::Prim(_) => {}
        Val::Rec(t) | Val::Emb(t) => all_names(t.top(), out),
        Val::InL(v) | Val::InR(v) => all_names(v, out),
        Val::Pair(l, r) => {
            all_names(l, out);
            all_names(r, out);
        }
        Val::Var(_, n) => {
            out.insert(n.clone());
        }
        Val::Bind(_, n, scope) => {
            out.insert(n.clone());
            all_names(scope, out);
        }
    }
}
