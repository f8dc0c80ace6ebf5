//! Random and exhaustive term generation over arbitrary codes.
//!
//! Used by the property suites and the `selftest` subcommand. Generation is
//! driven entirely by the caller's RNG, so a seed reproduces a corpus.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::lambda::{app, lam, v};
use crate::nominal::{fv_val, swap_val, Name, SortId, SortedName};
use crate::universe::{FunctorCode, PrimKind, PrimValue, Term, Val};

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    /// Upper bound on the number of fixed-point layers, embedded ones included.
    pub max_size: usize,
    /// Free variable occurrences draw from names `0..free_names`, per sort.
    pub free_names: u64,
    /// Binders draw from names `0..binder_names`; overlapping the free
    /// range on purpose so that shadowing and capture situations arise.
    pub binder_names: u64,
    /// Probability that a variable refers to an enclosing binder when one
    /// of its sort is in scope.
    pub bound_bias: f64,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            max_size: 30,
            free_names: 4,
            binder_names: 6,
            bound_bias: 0.7,
        }
    }
}

const INF: u64 = u64::MAX / 4;

/// Minimum number of layers of a finite term of `mu`, or `None` when every
/// alternative recurses.
pub fn min_size(mu: &Arc<FunctorCode>) -> Option<u64> {
    let mut estimate = INF;
    loop {
        let next = (1 + min_cost(mu, estimate)).min(INF);
        if next == estimate {
            break;
        }
        estimate = next;
    }
    (estimate < INF).then_some(estimate)
}

fn min_cost(at: &FunctorCode, rec: u64) -> u64 {
    match at {
        FunctorCode::Unit | FunctorCode::Prim(_) | FunctorCode::VarOcc(_) => 0,
        FunctorCode::Rec => rec,
        FunctorCode::Emb(code) => min_size(code).unwrap_or(INF),
        FunctorCode::Sum(l, r) => min_cost(l, rec).min(min_cost(r, rec)),
        FunctorCode::Prod(l, r) => min_cost(l, rec).saturating_add(min_cost(r, rec)).min(INF),
        FunctorCode::Bind(_, scope) => min_cost(scope, rec),
    }
}

fn can_grow(at: &FunctorCode) -> bool {
    match at {
        FunctorCode::Rec | FunctorCode::Emb(_) => true,
        FunctorCode::Unit | FunctorCode::Prim(_) | FunctorCode::VarOcc(_) => false,
        FunctorCode::Sum(l, r) | FunctorCode::Prod(l, r) => can_grow(l) || can_grow(r),
        FunctorCode::Bind(_, scope) => can_grow(scope),
    }
}

/// A layer whose recursive and embedded positions are still to be filled.
enum Shape {
    Unit,
    Prim(PrimValue),
    Hole(usize),
    InL(Box<Shape>),
    InR(Box<Shape>),
    Pair(Box<Shape>, Box<Shape>),
    Var(SortId, Name),
    Bind(SortId, Name, Box<Shape>),
}

struct Hole {
    code: Arc<FunctorCode>,
    recursive: bool,
    min: u64,
    scope: Vec<(SortId, Name)>,
}

struct Generator<'a, R> {
    cfg: &'a GenConfig,
    rng: &'a mut R,
}

impl<R: Rng> Generator<'_, R> {
    fn term(&mut self, code: &Arc<FunctorCode>, budget: u64, scope: &mut Vec<(SortId, Name)>) -> Term {
        let rec_min = min_size(code).expect("code has no finite terms");
        let mut holes = Vec::new();
        let mut spare = budget.saturating_sub(1);
        let shape = self.shape(code, code, rec_min, &mut spare, scope, &mut holes);
        // Distribute what is left of the budget over the holes at random.
        let mut extra = vec![0u64; holes.len()];
        if !holes.is_empty() {
            for _ in 0..spare {
                if self.rng.gen_bool(0.85) {
                    let i = self.rng.gen_range(0..holes.len());
                    extra[i] += 1;
                }
            }
        }
        let mut filled: Vec<Option<Val>> = holes
            .into_iter()
            .zip(extra)
            .map(|(mut hole, extra)| {
                let t = self.term(&hole.code, hole.min + extra, &mut hole.scope);
                Some(if hole.recursive { Val::rec(t) } else { Val::emb(t) })
            })
            .collect();
        Term::new(code.clone(), fill(shape, &mut filled))
    }

    fn shape(
        &mut self,
        mu: &Arc<FunctorCode>,
        at: &FunctorCode,
        rec_min: u64,
        spare: &mut u64,
        scope: &mut Vec<(SortId, Name)>,
        holes: &mut Vec<Hole>,
    ) -> Shape {
        match at {
            FunctorCode::Unit => Shape::Unit,
            FunctorCode::Prim(kind) => Shape::Prim(self.prim(*kind)),
            FunctorCode::Rec => self.hole(mu.clone(), true, rec_min, spare, scope, holes),
            FunctorCode::Emb(code) => {
                let min = min_size(code).expect("embedded code has no finite terms");
                self.hole(code.clone(), false, min, spare, scope, holes)
            }
            FunctorCode::Sum(l, r) => {
                let costs = [min_cost(l, rec_min), min_cost(r, rec_min)];
                let affordable: Vec<usize> = (0..2).filter(|&i| costs[i] <= *spare).collect();
                let sides = [&**l, &**r];
                let side = if affordable.len() == 2 {
                    let growing: Vec<usize> = (0..2).filter(|&i| can_grow(sides[i])).collect();
                    if *spare > 0 && growing.len() == 1 && self.rng.gen_bool(0.75) {
                        growing[0]
                    } else {
                        self.rng.gen_range(0..2)
                    }
                } else if affordable.len() == 1 {
                    affordable[0]
                } else if costs[0] <= costs[1] {
                    0
                } else {
                    1
                };
                let inner = self.shape(mu, sides[side], rec_min, spare, scope, holes);
                if side == 0 {
                    Shape::InL(Box::new(inner))
                } else {
                    Shape::InR(Box::new(inner))
                }
            }
            FunctorCode::Prod(l, r) => {
                // Keep enough budget for the right component's minimum.
                let reserve = min_cost(r, rec_min).min(*spare);
                *spare -= reserve;
                let left = self.shape(mu, l, rec_min, spare, scope, holes);
                *spare += reserve;
                let right = self.shape(mu, r, rec_min, spare, scope, holes);
                Shape::Pair(Box::new(left), Box::new(right))
            }
            FunctorCode::VarOcc(sort) => Shape::Var(sort.clone(), self.occurrence(sort, scope)),
            FunctorCode::Bind(sort, body) => {
                let name = Name::new(self.rng.gen_range(0..self.cfg.binder_names.max(1)));
                scope.push((sort.clone(), name.clone()));
                let body = self.shape(mu, body, rec_min, spare, scope, holes);
                scope.pop();
                Shape::Bind(sort.clone(), name, Box::new(body))
            }
        }
    }

    fn hole(
        &mut self,
        code: Arc<FunctorCode>,
        recursive: bool,
        min: u64,
        spare: &mut u64,
        scope: &[(SortId, Name)],
        holes: &mut Vec<Hole>,
    ) -> Shape {
        *spare = spare.saturating_sub(min);
        holes.push(Hole {
            code,
            recursive,
            min,
            scope: scope.to_vec(),
        });
        Shape::Hole(holes.len() - 1)
    }

    fn occurrence(&mut self, sort: &SortId, scope: &[(SortId, Name)]) -> Name {
        let bound: Vec<&Name> = scope.iter().filter(|(s, _)| s == sort).map(|(_, n)| n).collect();
        if !bound.is_empty() && self.rng.gen_bool(self.cfg.bound_bias) {
            return (*bound.choose(self.rng).expect("non-empty")).clone();
        }
        Name::new(self.rng.gen_range(0..self.cfg.free_names.max(1)))
    }

    fn prim(&mut self, kind: PrimKind) -> PrimValue {
        match kind {
            PrimKind::Nat => PrimValue::Nat(self.rng.gen_range(0..10)),
            PrimKind::Bool => PrimValue::Bool(self.rng.gen()),
            PrimKind::Text => {
                let words = ["a", "b", "foo", "bar baz", ""];
                PrimValue::Text(words.choose(self.rng).expect("non-empty").to_string())
            }
        }
    }
}

fn fill(shape: Shape, filled: &mut [Option<Val>]) -> Val {
    match shape {
        Shape::Unit => Val::Unit,
        Shape::Prim(p) => Val::Prim(p),
        Shape::Hole(i) => filled[i].take().expect("each hole is filled once"),
        Shape::InL(s) => Val::inl(fill(*s, filled)),
        Shape::InR(s) => Val::inr(fill(*s, filled)),
        Shape::Pair(l, r) => {
            let l = fill(*l, filled);
            Val::pair(l, fill(*r, filled))
        }
        Shape::Var(s, n) => Val::Var(s, n),
        Shape::Bind(s, n, body) => Val::bind(s, n, fill(*body, filled)),
    }
}

/// A random well-formed term of `code` with at most `cfg.max_size` layers
/// (or the code's minimum size, if larger).
pub fn random_term<R: Rng>(code: &Arc<FunctorCode>, cfg: &GenConfig, rng: &mut R) -> Term {
    let min = min_size(code).expect("code has no finite terms");
    let target = rng.gen_range(min..=(cfg.max_size as u64).max(min));
    let mut generator = Generator { cfg, rng };
    generator.term(code, target, &mut Vec::new())
}

/// Renames binders at random, keeping the term alpha-equivalent: a binder
/// is only renamed to a name not free in its abstraction.
pub fn alpha_variant<R: Rng>(t: &Term, pool: u64, rng: &mut R) -> Term {
    alpha_variant_avoiding(t, pool, &BTreeSet::new(), rng)
}

/// As [`alpha_variant`], but never introduces a binder named in `avoid`.
pub fn alpha_variant_avoiding<R: Rng>(t: &Term, pool: u64, avoid: &BTreeSet<Name>, rng: &mut R) -> Term {
    Term::new(t.code().clone(), variant_val(t.top(), pool, avoid, rng))
}

fn variant_val<R: Rng>(val: &Val, pool: u64, avoid: &BTreeSet<Name>, rng: &mut R) -> Val {
    match val {
        Val::Unit => Val::Unit,
        Val::Prim(p) => Val::Prim(p.clone()),
        Val::Var(s, n) => Val::Var(s.clone(), n.clone()),
        Val::Rec(t) => Val::rec(alpha_variant_avoiding(t, pool, avoid, rng)),
        Val::Emb(t) => Val::emb(alpha_variant_avoiding(t, pool, avoid, rng)),
        Val::InL(v) => Val::inl(variant_val(v, pool, avoid, rng)),
        Val::InR(v) => Val::inr(variant_val(v, pool, avoid, rng)),
        Val::Pair(l, r) => {
            let l = variant_val(l, pool, avoid, rng);
            Val::pair(l, variant_val(r, pool, avoid, rng))
        }
        Val::Bind(s, b, scope) => {
            let z = Name::new(rng.gen_range(0..pool.max(1)));
            let free: BTreeSet<SortedName> = fv_val(scope);
            let clash = z != *b && (avoid.contains(&z) || free.contains(&SortedName::new(s.clone(), z.clone())));
            let (name, scope) = if clash {
                (b.clone(), (**scope).clone())
            } else {
                (z.clone(), swap_val(s, b, &z, scope))
            };
            Val::bind(s.clone(), name, variant_val(&scope, pool, avoid, rng))
        }
    }
}

/// Every lambda term with at most `max_nodes` nodes whose binders come from
/// `binders` and whose free variables come from `free`.
pub fn enumerate_lambda(max_nodes: usize, free: &[Name], binders: &[Name]) -> Vec<Term> {
    let mut out = Vec::new();
    for size in 1..=max_nodes {
        out.extend(lambda_of_size(size, free, binders, &mut Vec::new()));
    }
    out
}

fn lambda_of_size(size: usize, free: &[Name], binders: &[Name], scope: &mut Vec<Name>) -> Vec<Term> {
    if size == 0 {
        return Vec::new();
    }
    if size == 1 {
        let names: BTreeSet<&Name> = free.iter().chain(scope.iter()).collect();
        return names.into_iter().map(|x| v(x.clone())).collect();
    }
    let mut out = Vec::new();
    for left in 1..size - 1 {
        let lhs = lambda_of_size(left, free, binders, scope);
        let rhs = lambda_of_size(size - 1 - left, free, binders, scope);
        for a in &lhs {
            for b in &rhs {
                out.push(app(a.clone(), b.clone()));
            }
        }
    }
    for b in binders {
        scope.push(b.clone());
        for body in lambda_of_size(size - 1, free, binders, scope) {
            out.push(lam(b.clone(), body));
        }
        scope.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{lambda, systemf};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn min_sizes() {
        assert_eq!(min_size(&lambda::lam_code()), Some(1));
        assert_eq!(min_size(&systemf::term_code()), Some(1));
        assert_eq!(min_size(&systemf::triple_code()), Some(4));
        let loops = Arc::new(FunctorCode::prod(FunctorCode::Unit, FunctorCode::Rec));
        assert_eq!(min_size(&loops), None);
    }

    #[test]
    fn random_terms_are_well_formed_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = GenConfig::default();
        for code in [
            lambda::lam_code(),
            systemf::term_code(),
            systemf::type_code(),
            systemf::triple_code(),
        ] {
            let mut sizes = BTreeSet::new();
            for _ in 0..200 {
                let t = random_term(&code, &cfg, &mut rng);
                assert!(t.is_well_formed());
                assert!(t.size() <= cfg.max_size.max(4), "size {}", t.size());
                sizes.insert(t.size());
            }
            assert!(sizes.len() > 5, "too little variety: {:?}", sizes);
        }
    }

    #[test]
    fn same_seed_same_term() {
        let cfg = GenConfig::default();
        let a = random_term(&systemf::term_code(), &cfg, &mut ChaCha8Rng::seed_from_u64(3));
        let b = random_term(&systemf::term_code(), &cfg, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn enumeration_counts() {
        let free = [Name::new(0), Name::new(1)];
        let binders = [Name::new(0), Name::new(1), Name::new(2)];
        let counts: Vec<usize> = (1..=5)
            .map(|n| lambda_of_size(n, &free, &binders, &mut Vec::new()).len())
            .collect();
        // counted independently by a brute-force script
        assert_eq!(counts, vec![2, 7, 27, 118, 555]);
    }
}
