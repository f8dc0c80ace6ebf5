//! Randomized and exhaustive property suites, shared by the `selftest`
//! subcommand and the acceptance tests.
//!
//! Each suite checks one group of laws and returns a [`Report`] with one
//! [`Check`] per law. Every suite draws from its own RNG stream derived
//! from the configured seed, so suites can run alone or together with
//! identical results.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alpha::{alpha_eq, binders_free_elem, bvc_check, to_canonical};
use crate::gen::{alpha_variant, alpha_variant_avoiding, enumerate_lambda, random_term, GenConfig};
use crate::lambda::{self, tm_sort, LamView};
use crate::nominal::{binders_of, fv, list_not_occur_bind, names_of, swap, swap_name, Name, SortId, SortedName};
use crate::syntax::{print_generic, SymbolTable};
use crate::systemf::{self, ty_sort};
use crate::universe::{fold, fold_ctx, forall_rec, FunctorCode, Layer, Term, Val};

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random cases per property; a few properties run at half volume.
    pub count: usize,
    /// Upper bound on the layers of each generated term.
    pub max_size: usize,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            seed: 42,
            count: 1000,
            max_size: 30,
        }
    }
}

impl SuiteConfig {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn gen(&self) -> GenConfig {
        GenConfig {
            max_size: self.max_size,
            ..GenConfig::default()
        }
    }

    fn half(&self) -> usize {
        (self.count / 2).max(1)
    }
}

/// Outcome of one law over a corpus.
#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub note: Option<String>,
}

impl Check {
    fn new(label: impl Into<String>) -> Check {
        Check {
            label: label.into(),
            cases: 0,
            failures: 0,
            first_failure: None,
            note: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(witness());
            }
        }
    }

    fn require_cases(mut self, min: usize) -> Check {
        if self.cases < min {
            self.failures += 1;
            self.first_failure
                .get_or_insert_with(|| format!("only {} cases, at least {} required", self.cases, min));
        }
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Check {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub criterion: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "criterion {}: {}: {}", self.criterion, self.title, verdict)?;
        for c in &self.checks {
            write!(f, "  {}: {} cases, {} failures", c.label, c.cases, c.failures)?;
            if let Some(note) = &c.note {
                write!(f, " ({})", note)?;
            }
            writeln!(f)?;
            if let Some(w) = &c.first_failure {
                writeln!(f, "    first failure: {}", w)?;
            }
        }
        Ok(())
    }
}

pub const CRITERIA: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

pub fn run(criterion: u8, cfg: &SuiteConfig) -> Option<Report> {
    Some(match criterion {
        1 => oracle_agreement(cfg),
        2 => equivalence_and_equivariance(cfg),
        3 => swap_algebra(cfg),
        4 => freshening_contract(cfg),
        5 => fold_lemmas(cfg),
        6 => naive_agrees_when_fresh(cfg),
        7 => vars_positive(cfg),
        8 => systemf_composition(cfg),
        _ => return None,
    })
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<Report> {
    CRITERIA.iter().filter_map(|&c| run(c, cfg)).collect()
}

// ---------------------------------------------------------------------------
// helpers

fn show(t: &Term) -> String {
    print_generic(t, &SymbolTable::new())
}

fn show_pair(a: &Term, b: &Term) -> String {
    format!("{} vs {}", show(a), show(b))
}

fn rate(hits: usize, total: usize) -> String {
    format!("{}/{} syntactically equal", hits, total)
}

/// The two object languages that share the substitution suites.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Lang {
    Lambda,
    SystemF,
}

impl Lang {
    fn alternate(i: usize) -> Lang {
        if i.is_multiple_of(2) {
            Lang::Lambda
        } else {
            Lang::SystemF
        }
    }

    fn code(self) -> Arc<FunctorCode> {
        match self {
            Lang::Lambda => lambda::lam_code(),
            Lang::SystemF => systemf::term_code(),
        }
    }

    fn sorts(self) -> Vec<SortId> {
        match self {
            Lang::Lambda => vec![tm_sort()],
            Lang::SystemF => vec![tm_sort(), ty_sort()],
        }
    }

    fn naive(self, m: &Term, x: &Name, n: &Term) -> Term {
        match self {
            Lang::Lambda => lambda::subst_naive(m, x, n),
            Lang::SystemF => systemf::subst_term_naive(m, x, n),
        }
    }

    fn subst(self, m: &Term, x: &Name, n: &Term) -> Term {
        match self {
            Lang::Lambda => lambda::subst(m, x, n),
            Lang::SystemF => systemf::subst_term(m, x, n),
        }
    }
}

struct Corpus {
    rng: ChaCha8Rng,
    gen: GenConfig,
}

impl Corpus {
    fn new(cfg: &SuiteConfig, stream: u64) -> Corpus {
        Corpus {
            rng: cfg.rng(stream),
            gen: cfg.gen(),
        }
    }

    fn term(&mut self, lang: Lang) -> Term {
        random_term(&lang.code(), &self.gen, &mut self.rng)
    }

    /// A name from the range free variables are drawn from.
    fn free_name(&mut self) -> Name {
        Name::new(self.rng.gen_range(0..self.gen.free_names.max(1)))
    }

    /// A name from the wider range binders are drawn from.
    fn any_name(&mut self) -> Name {
        Name::new(self.rng.gen_range(0..self.gen.binder_names.max(1) + 1))
    }

    fn sort(&mut self, lang: Lang) -> SortId {
        let sorts = lang.sorts();
        sorts[self.rng.gen_range(0..sorts.len())].clone()
    }

    fn variant(&mut self, t: &Term) -> Term {
        let pool = self.gen.binder_names + 2;
        alpha_variant(t, pool, &mut self.rng)
    }

    fn variant_avoiding(&mut self, t: &Term, avoid: &BTreeSet<Name>) -> Term {
        let pool = self.gen.binder_names + 2 + avoid.len() as u64;
        alpha_variant_avoiding(t, pool, avoid, &mut self.rng)
    }

    /// A second term for `t`: an alpha-variant, an alpha-variant with two
    /// free names exchanged, or an unrelated term.
    fn partner(&mut self, lang: Lang, t: &Term, i: usize) -> Term {
        match i % 3 {
            0 => self.variant(t),
            1 => {
                let (a, b) = (self.free_name(), self.free_name());
                let s = self.sort(lang);
                swap(&s, &a, &b, &self.variant(t))
            }
            _ => self.term(lang),
        }
    }
}

fn fv_names(t: &Term) -> BTreeSet<Name> {
    names_of(&fv(t))
}

// ---------------------------------------------------------------------------
// 1. alpha-equivalence against the locally-nameless oracle

fn skeleton(t: &Term) -> String {
    match lambda::view(t) {
        LamView::Var(_) => "v".into(),
        LamView::App(f, a) => format!("({} {})", skeleton(f), skeleton(a)),
        LamView::Lam(_, b) => format!("(\\ {})", skeleton(b)),
    }
}

fn oracle_agreement(cfg: &SuiteConfig) -> Report {
    let mut corpus = Corpus::new(cfg, 1);

    // Pairs are only interesting between terms of the same shape, since the
    // oracle and alphaEq trivially agree on shape mismatches.
    let free = [Name::new(0), Name::new(1)];
    let binders = [Name::new(0), Name::new(1), Name::new(2)];
    let terms = enumerate_lambda(7, &free, &binders);
    let canon: Vec<_> = terms.iter().map(to_canonical).collect();
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, t) in terms.iter().enumerate() {
        groups.entry(skeleton(t)).or_default().push(i);
    }
    let mut exhaustive = Check::new("enumerated lambda pairs, <= 7 nodes");
    let mut positives = 0;
    let mut compare = |check: &mut Check, a: &Term, b: &Term, same: bool| {
        let decided = alpha_eq(a, b);
        positives += decided as usize;
        check.record(decided == same, || show_pair(a, b));
    };
    for members in groups.values() {
        let small = terms[members[0]].size() <= 5;
        for (k, &i) in members.iter().enumerate() {
            if small {
                for &j in members {
                    compare(&mut exhaustive, &terms[i], &terms[j], canon[i] == canon[j]);
                }
            } else {
                for step in 1..=4 {
                    let j = members[(k + step) % members.len()];
                    compare(&mut exhaustive, &terms[i], &terms[j], canon[i] == canon[j]);
                }
                let v = corpus.variant(&terms[i]);
                let same = canon[i] == to_canonical(&v);
                compare(&mut exhaustive, &terms[i], &v, same);
            }
        }
    }
    let exhaustive = exhaustive.require_cases(5000).with_note(format!(
        "{} terms, {} alpha-equivalent pairs",
        terms.len(),
        positives
    ));

    let mut random = Check::new("random System F pairs");
    let mut random_positives = 0;
    for i in 0..cfg.count {
        let a = corpus.term(Lang::SystemF);
        let b = corpus.partner(Lang::SystemF, &a, i);
        let decided = alpha_eq(&a, &b);
        random_positives += decided as usize;
        random.record(decided == (to_canonical(&a) == to_canonical(&b)), || show_pair(&a, &b));
    }
    let random = random.with_note(format!("{} alpha-equivalent pairs", random_positives));

    Report {
        criterion: 1,
        title: "alpha-equivalence agrees with the canonical oracle",
        checks: vec![exhaustive, random],
    }
}

// ---------------------------------------------------------------------------
// 2. equivalence relation and equivariance

fn equivalence_and_equivariance(cfg: &SuiteConfig) -> Report {
    let mut corpus = Corpus::new(cfg, 2);
    let mut refl = Check::new("reflexivity");
    let mut sym = Check::new("symmetry");
    let mut trans = Check::new("transitivity");
    let mut equi = Check::new("preservation under swap");
    let mut fv_inv = Check::new("fv is alpha-invariant");
    for i in 0..cfg.count {
        let lang = Lang::alternate(i);
        let t = corpus.term(lang);
        refl.record(alpha_eq(&t, &t), || show(&t));

        let u = corpus.partner(lang, &t, i);
        sym.record(alpha_eq(&t, &u) == alpha_eq(&u, &t), || show_pair(&t, &u));

        let t1 = corpus.variant(&t);
        let t2 = corpus.variant(&t1);
        let ok = !(alpha_eq(&t, &t1) && alpha_eq(&t1, &t2)) || alpha_eq(&t, &t2);
        trans.record(ok, || format!("{} / {} / {}", show(&t), show(&t1), show(&t2)));

        let (s, a, b) = (corpus.sort(lang), corpus.any_name(), corpus.any_name());
        let before = alpha_eq(&t, &u);
        let after = alpha_eq(&swap(&s, &a, &b, &t), &swap(&s, &a, &b, &u));
        equi.record(before == after, || {
            format!("({} {} {}) on {}", s, a, b, show_pair(&t, &u))
        });

        fv_inv.record(fv(&t) == fv(&t1), || show_pair(&t, &t1));
    }
    Report {
        criterion: 2,
        title: "alpha-equivalence is an equivariant equivalence relation",
        checks: vec![refl, sym, trans, equi, fv_inv],
    }
}

// ---------------------------------------------------------------------------
// 3. swap algebra

fn swap_algebra(cfg: &SuiteConfig) -> Report {
    let mut corpus = Corpus::new(cfg, 3);
    let mut involution = Check::new("involution");
    let mut symmetry = Check::new("symmetry");
    let mut degenerate = Check::new("degenerate swap is the identity");
    let mut well_formed = Check::new("well-formedness preserved");
    let mut fv_equi = Check::new("fv equivariance");
    for i in 0..cfg.count {
        let lang = Lang::alternate(i);
        let t = corpus.term(lang);
        let (s, a, b) = (corpus.sort(lang), corpus.any_name(), corpus.any_name());
        let swapped = swap(&s, &a, &b, &t);
        let witness = || format!("({} {} {}) on {}", s, a, b, show(&t));
        involution.record(swap(&s, &a, &b, &swapped) == t, witness);
        symmetry.record(swap(&s, &b, &a, &t) == swapped, witness);
        degenerate.record(swap(&s, &a, &a, &t) == t, witness);
        well_formed.record(swapped.is_well_formed(), witness);
        let expected: BTreeSet<SortedName> = fv(&t)
            .into_iter()
            .map(|sn| {
                if sn.sort == s {
                    SortedName::new(sn.sort.clone(), swap_name(&a, &b, &sn.name))
                } else {
                    sn
                }
            })
            .collect();
        fv_equi.record(fv(&swapped) == expected, witness);
    }
    Report {
        criterion: 3,
        title: "swap algebra",
        checks: vec![involution, symmetry, degenerate, well_formed, fv_equi],
    }
}

// ---------------------------------------------------------------------------
// 4. bindersFreeElem

fn freshening_contract(cfg: &SuiteConfig) -> Report {
    let mut corpus = Corpus::new(cfg, 4);
    let mut equivalent = Check::new("output alpha-equivalent to input (oracle)");
    let mut avoids = Check::new("no avoided name among output binders");
    let mut strong = Check::new("identical output on 5 alpha-variants");
    let mut idempotent = Check::new("idempotence");
    for i in 0..cfg.count {
        let lang = Lang::alternate(i);
        let t = corpus.term(lang);
        let len = corpus.rng.gen_range(0..=4);
        let xs: Vec<Name> = (0..len).map(|_| corpus.any_name()).collect();
        let out = binders_free_elem(&xs, &t);
        let witness = || format!("{:?} {}", xs.iter().map(Name::index).collect::<Vec<_>>(), show(&t));
        equivalent.record(to_canonical(&out) == to_canonical(&t), witness);
        avoids.record(binders_of(&out).iter().all(|b| !xs.contains(b)), witness);
        let mut same = true;
        for _ in 0..5 {
            let v = corpus.variant(&t);
            same &= binders_free_elem(&xs, &v) == out;
        }
        strong.record(same, witness);
        idempotent.record(binders_free_elem(&xs, &out) == out, witness);
    }
    Report {
        criterion: 4,
        title: "bindersFreeElem contract",
        checks: vec![equivalent, avoids, strong, idempotent],
    }
}

// ---------------------------------------------------------------------------
// 5. fold lemmas

fn fold_lemmas(cfg: &SuiteConfig) -> Report {
    let mut corpus = Corpus::new(cfg, 5);
    let mut swap_fold = Check::new("swap commutes with foldCtx substaux");
    let mut swap_fold_syntactic = 0;
    let mut swap_subst = Check::new("swap commutes with capture-avoiding substitution");
    let mut swap_subst_syntactic = 0;
    let mut definitional = Check::new("foldCtx is fold of the partially applied step");
    let mut fold_compat = Check::new("fold alpha-compatible in the term, fresh context names");
    let mut ctx_compat = Check::new("foldCtx alpha-compatible in the context");
    let mut alpha_fold_compat = Check::new("alpha-fold alpha-compatible in both arguments");
    let mut both_compat = Check::new("foldCtx alpha-compatible in both arguments, freshened");

    for i in 0..cfg.count {
        let lang = Lang::alternate(i);
        let m = corpus.term(lang);
        let n = corpus.term(lang);
        let x = corpus.free_name();
        let (s, a, b) = (corpus.sort(lang), corpus.any_name(), corpus.any_name());
        let sx = if s == tm_sort() {
            swap_name(&a, &b, &x)
        } else {
            x.clone()
        };
        let witness = || format!("{}[{} := {}] with ({} {} {})", show(&m), x, show(&n), s, a, b);

        let lhs = swap(&s, &a, &b, &lang.naive(&m, &x, &n));
        let rhs = lang.naive(&swap(&s, &a, &b, &m), &sx, &swap(&s, &a, &b, &n));
        swap_fold.record(alpha_eq(&lhs, &rhs), witness);
        swap_fold_syntactic += (lhs == rhs) as usize;

        let lhs = swap(&s, &a, &b, &lang.subst(&m, &x, &n));
        let rhs = lang.subst(&swap(&s, &a, &b, &m), &sx, &swap(&s, &a, &b, &n));
        swap_subst.record(alpha_eq(&lhs, &rhs), witness);
        swap_subst_syntactic += (lhs == rhs) as usize;

        if lang == Lang::Lambda {
            let ctx = lambda::subst_ctx(x.clone(), n.clone());
            let via_ctx = fold_ctx(&lambda::lam_code(), &lambda::subst_aux, &ctx, &m);
            let via_fold = fold(&m, &|layer: Layer<Term>| lambda::subst_aux(&ctx, layer));
            definitional.record(via_ctx == via_fold, witness);
        }

        // The context's free names must not occur bound in either term.
        let mut avoid = fv_names(&n);
        avoid.insert(x.clone());
        let avoid_list: Vec<Name> = avoid.iter().cloned().collect();
        let m1 = binders_free_elem(&avoid_list, &m);
        let m2 = corpus.variant_avoiding(&m1, &avoid);
        fold_compat.record(
            list_not_occur_bind(&avoid, &m2) && alpha_eq(&lang.naive(&m1, &x, &n), &lang.naive(&m2, &x, &n)),
            witness,
        );

        let n2 = corpus.variant(&n);
        ctx_compat.record(alpha_eq(&lang.naive(&m, &x, &n), &lang.naive(&m, &x, &n2)), witness);

        let m3 = corpus.variant(&m);
        alpha_fold_compat.record(alpha_eq(&lang.subst(&m, &x, &n), &lang.subst(&m3, &x, &n2)), witness);

        if i < cfg.half() {
            both_compat.record(
                list_not_occur_bind(&avoid, &m1)
                    && list_not_occur_bind(&avoid, &m2)
                    && alpha_eq(&lang.naive(&m1, &x, &n), &lang.naive(&m2, &x, &n2)),
                witness,
            );
        }
    }
    let swap_fold = swap_fold.with_note(rate(swap_fold_syntactic, cfg.count));
    let swap_subst = swap_subst.with_note(rate(swap_subst_syntactic, cfg.count));
    Report {
        criterion: 5,
        title: "fold lemmas",
        checks: vec![
            swap_fold,
            swap_subst,
            definitional,
            fold_compat,
            ctx_compat,
            alpha_fold_compat,
            both_compat,
        ],
    }
}

// ---------------------------------------------------------------------------
// 6. naive and capture-avoiding substitution agree on freshened terms

fn naive_agrees_when_fresh(cfg: &SuiteConfig) -> Report {
    let mut corpus = Corpus::new(cfg, 6);
    let mut agree = Check::new("naive and capture-avoiding agree after freshening");
    let mut via_bvc = Check::new("the same property through bvcCheck");
    let mut raw_disagreements = 0;
    for i in 0..cfg.count {
        let lang = Lang::alternate(i);
        let m = corpus.term(lang);
        let n = corpus.term(lang);
        let x = corpus.free_name();
        let mut xs = vec![x.clone()];
        xs.extend(fv_names(&n));
        let fresh = binders_free_elem(&xs, &m);
        let witness = || format!("{}[{} := {}]", show(&m), x, show(&n));
        agree.record(
            list_not_occur_bind(&xs, &fresh) && alpha_eq(&lang.naive(&fresh, &x, &n), &lang.subst(&fresh, &x, &n)),
            witness,
        );
        let p = |t: &Term| alpha_eq(&lang.naive(t, &x, &n), &lang.subst(t, &x, &n));
        via_bvc.record(bvc_check(&p, &xs, &m), witness);
        raw_disagreements += !p(&m) as usize;
    }

    let mut capture = Check::new("capture counterexample (\\y. x)[x := y]");
    let (x, y) = (Name::new(0), Name::new(1));
    let m = lambda::lam(y.clone(), lambda::v(x.clone()));
    let n = lambda::v(y);
    let naive = lambda::subst_naive(&m, &x, &n);
    let avoiding = lambda::subst(&m, &x, &n);
    capture.record(!alpha_eq(&naive, &avoiding), || show_pair(&naive, &avoiding));
    let capture = capture.with_note(format!(
        "{} of {} unfreshened random cases also disagree",
        raw_disagreements, cfg.count
    ));

    Report {
        criterion: 6,
        title: "free context names not bound implies naive = capture-avoiding",
        checks: vec![agree, via_bvc, capture],
    }
}

// ---------------------------------------------------------------------------
// 7. every lambda term has a variable occurrence

/// Every recursive subterm, collected independently of the fold machinery.
fn subterms(t: &Term) -> Vec<&Term> {
    fn walk<'a>(val: &'a Val, out: &mut Vec<&'a Term>) {
        match val {
            Val::Rec(t) => {
                out.push(t);
                walk(t.top(), out);
            }
            Val::InL(v) | Val::InR(v) | Val::Bind(_, _, v) => walk(v, out),
            Val::Pair(l, r) => {
                walk(l, out);
                walk(r, out);
            }
            Val::Unit | Val::Prim(_) | Val::Var(..) | Val::Emb(_) => {}
        }
    }
    let mut out = vec![t];
    walk(t.top(), &mut out);
    out
}

/// Variable occurrences counted by direct recursion.
fn occurrences(t: &Term) -> u64 {
    match lambda::view(t) {
        LamView::Var(_) => 1,
        LamView::App(f, a) => occurrences(f) + occurrences(a),
        LamView::Lam(_, b) => occurrences(b),
    }
}

fn vars_positive(cfg: &SuiteConfig) -> Report {
    let mut corpus = Corpus::new(cfg, 7);
    let positive = |t: &Term| lambda::vars_count(t) >= 1;

    let mut exhaustive = Check::new("varsCount >= 1 on enumerated terms, <= 7 nodes");
    let free = [Name::new(0), Name::new(1)];
    let binders = [Name::new(0), Name::new(1), Name::new(2)];
    for t in enumerate_lambda(7, &free, &binders) {
        exhaustive.record(forall_rec(&positive, &t), || show(&t));
    }

    let mut random = Check::new("varsCount >= 1 on random terms, at every subterm");
    let mut agrees = Check::new("varsCount matches direct counting");
    let mut forall = Check::new("forallRec matches subterm enumeration");
    for _ in 0..cfg.count {
        let t = corpus.term(Lang::Lambda);
        random.record(forall_rec(&positive, &t), || show(&t));
        agrees.record(lambda::vars_count(&t) == occurrences(&t), || show(&t));
        // a predicate that fails somewhere in most terms
        let shallow = |u: &Term| u.size() <= 8 || !matches!(lambda::view(u), LamView::App(..));
        let expected = subterms(&t).into_iter().all(shallow);
        forall.record(forall_rec(&shallow, &t) == expected, || show(&t));
    }

    let mut example = Check::new("varsCount(\\x. x x) = 2");
    let x = Name::new(0);
    let t = lambda::lam(x.clone(), lambda::app(lambda::v(x.clone()), lambda::v(x)));
    example.record(lambda::vars_count(&t) == 2, || show(&t));

    Report {
        criterion: 7,
        title: "every lambda term contains a variable",
        checks: vec![exhaustive, random, agrees, forall, example],
    }
}

// ---------------------------------------------------------------------------
// 8. System F substitution composition

struct Triple {
    m: Term,
    n: Term,
    l: Term,
    x: Name,
    y: Name,
}

impl Triple {
    fn show(&self) -> String {
        format!(
            "M = {}, N = {}, L = {}, x = {}, y = {}",
            show(&self.m),
            show(&self.n),
            show(&self.l),
            self.x,
            self.y
        )
    }
}

fn composition<F>(subst: F, m: &Term, n: &Term, l: &Term, x: &Name, y: &Name) -> bool
where
    F: Fn(&Term, &Name, &Term) -> Term,
{
    let lhs = subst(&subst(m, x, n), y, l);
    let rhs = subst(&subst(m, y, l), x, &subst(n, y, l));
    alpha_eq(&lhs, &rhs)
}

fn ps_comp(triple: &Term, x: &Name, y: &Name) -> bool {
    let (m, n, l) = systemf::triple_parts(triple);
    composition(systemf::subst_term, m, n, l, x, y)
}

fn ps_comp_naive(triple: &Term, x: &Name, y: &Name) -> bool {
    let (m, n, l) = systemf::triple_parts(triple);
    composition(systemf::subst_term_naive, m, n, l, x, y)
}

fn random_triple(corpus: &mut Corpus) -> Triple {
    let x = corpus.free_name();
    let y = loop {
        let y = corpus.free_name();
        if y != x {
            break y;
        }
    };
    let m = corpus.term(Lang::SystemF);
    let n = corpus.term(Lang::SystemF);
    // x must not be free in L; resample, and fall back to renaming x away.
    let mut l = corpus.term(Lang::SystemF);
    for _ in 0..20 {
        if !fv(&l).contains(&SortedName::new(tm_sort(), x.clone())) {
            break;
        }
        l = corpus.term(Lang::SystemF);
    }
    if fv(&l).contains(&SortedName::new(tm_sort(), x.clone())) {
        let mut avoid = fv_names(&l);
        avoid.extend([x.clone(), y.clone()]);
        let z = crate::nominal::fresh_name(&avoid);
        l = swap(&tm_sort(), &x, &z, &l);
    }
    Triple { m, n, l, x, y }
}

fn systemf_composition(cfg: &SuiteConfig) -> Report {
    let mut corpus = Corpus::new(cfg, 8);
    let mut direct = Check::new("capture-avoiding composition, x != y, x not free in L");
    let mut via_bvc = Check::new("capture-avoiding composition through bvcCheck");
    let mut naive = Check::new("naive composition on triples freshened over the triple code");
    let mut raw_naive_failures = 0;
    let mut weak_cases = 0;
    let mut weak_naive_failures = 0;
    let mut invariant = Check::new("composition predicate invariant under joint binder renaming");

    for i in 0..cfg.count {
        let tr = random_triple(&mut corpus);
        let whole = systemf::triple(tr.m.clone(), tr.n.clone(), tr.l.clone());
        let xs = [tr.x.clone(), tr.y.clone()];
        let x_free_in_l = fv(&tr.l).contains(&SortedName::new(tm_sort(), tr.x.clone()));
        let premise = tr.x != tr.y && !x_free_in_l;

        direct.record(
            premise && composition(systemf::subst_term, &tr.m, &tr.n, &tr.l, &tr.x, &tr.y),
            || tr.show(),
        );
        via_bvc.record(bvc_check(&|t: &Term| ps_comp(t, &tr.x, &tr.y), &xs, &whole), || {
            tr.show()
        });

        // The naive lemma's premises, established the way the proof does it:
        // freshen the whole triple against x, y and its free names.
        let mut avoid: Vec<Name> = xs.to_vec();
        avoid.extend(fv_names(&whole));
        let fresh = binders_free_elem(&avoid, &whole);
        let (fm, fn_, fl) = systemf::triple_parts(&fresh);
        let premises = [fm, fn_, fl].iter().all(|t| list_not_occur_bind(&avoid, t))
            && !fv(fl).contains(&SortedName::new(tm_sort(), tr.x.clone()));
        naive.record(premises && ps_comp_naive(&fresh, &tr.x, &tr.y), || tr.show());
        raw_naive_failures += !ps_comp_naive(&whole, &tr.x, &tr.y) as usize;
        // Weaker premise set: x and y merely not bound anywhere in the triple.
        if [&tr.m, &tr.n, &tr.l].iter().all(|t| list_not_occur_bind(&xs, t)) {
            weak_cases += 1;
            weak_naive_failures += !ps_comp_naive(&whole, &tr.x, &tr.y) as usize;
        }

        if i < cfg.half() {
            let perturbed = corpus.variant(&whole);
            let (p0, p1) = (ps_comp(&whole, &tr.x, &tr.y), ps_comp(&perturbed, &tr.x, &tr.y));
            let b0 = bvc_check(&|t: &Term| ps_comp_naive(t, &tr.x, &tr.y), &xs, &whole);
            let b1 = bvc_check(&|t: &Term| ps_comp_naive(t, &tr.x, &tr.y), &xs, &perturbed);
            invariant.record(p0 && p1 && b0 == b1 && alpha_eq(&whole, &perturbed), || tr.show());
        }
    }
    let naive = naive.with_note(format!(
        "unfreshened: {} of {} triples fail; of {} with x, y not bound, {} fail",
        raw_naive_failures, cfg.count, weak_cases, weak_naive_failures
    ));
    Report {
        criterion: 8,
        title: "System F substitution composition",
        checks: vec![direct, via_bvc, naive, invariant],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            seed: 1,
            count: 40,
            max_size: 15,
        }
    }

    #[test]
    fn suites_pass_on_a_small_corpus() {
        for c in [2, 3, 4, 5, 6, 8] {
            let report = run(c, &small()).unwrap();
            assert!(report.passed(), "{}", report);
        }
    }

    #[test]
    fn unknown_criterion() {
        assert!(run(9, &small()).is_none());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run(4, &small()).unwrap().to_string();
        let b = run(4, &small()).unwrap().to_string();
        assert_eq!(a, b);
    }

    #[test]
    fn failing_checks_keep_a_witness() {
        let mut c = Check::new("x");
        c.record(true, || unreachable!());
        c.record(false, || "w".into());
        c.record(false, || "second".into());
        assert_eq!((c.cases, c.failures, c.first_failure.as_deref()), (3, 2, Some("w")));
        assert!(!c.passed());
        let thin = Check::new("y").require_cases(1);
        assert!(!thin.passed());
    }
}
