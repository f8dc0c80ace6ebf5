//! Invariants as proptest properties. Lambda terms come from a structural
//! strategy so failures shrink; System F terms come from seeded generation.

use std::collections::BTreeSet;

use genbind::alpha::{alpha_eq, binders_free_elem, to_canonical};
use genbind::gen::{alpha_variant, random_term, GenConfig};
use genbind::lambda::{self, app, lam, tm_sort, v};
use genbind::nominal::{binders_of, fv, names_of, swap, Name, SortedName};
use genbind::syntax::{self, SymbolTable};
use genbind::systemf::{self, ty_sort};
use genbind::Term;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn name() -> impl Strategy<Value = Name> {
    (0u64..5).prop_map(Name::new)
}

fn lambda_term() -> impl Strategy<Value = Term> {
    name().prop_map(v).prop_recursive(6, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(m, n)| app(m, n)),
            (name(), inner).prop_map(|(x, b)| lam(x, b)),
        ]
    })
}

fn systemf_term() -> impl Strategy<Value = Term> {
    any::<u64>().prop_map(|seed| {
        let cfg = GenConfig {
            max_size: 20,
            ..GenConfig::default()
        };
        random_term(&systemf::term_code(), &cfg, &mut ChaCha8Rng::seed_from_u64(seed))
    })
}

fn variant(t: &Term, seed: u64) -> Term {
    alpha_variant(t, 8, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn alpha_eq_matches_canonical_forms(m in lambda_term(), n in lambda_term()) {
        prop_assert_eq!(alpha_eq(&m, &n), to_canonical(&m) == to_canonical(&n));
    }

    #[test]
    fn variants_are_alpha_equivalent(t in systemf_term(), seed in any::<u64>()) {
        let u = variant(&t, seed);
        prop_assert!(alpha_eq(&t, &u));
        prop_assert_eq!(to_canonical(&t), to_canonical(&u));
        prop_assert_eq!(fv(&t), fv(&u));
    }

    #[test]
    fn swap_is_an_involution(t in systemf_term(), a in name(), b in name(), ty in any::<bool>()) {
        let s = if ty { ty_sort() } else { tm_sort() };
        let once = swap(&s, &a, &b, &t);
        prop_assert_eq!(swap(&s, &a, &b, &once), t.clone());
        prop_assert_eq!(swap(&s, &b, &a, &t), once.clone());
        prop_assert!(once.is_well_formed());
    }

    #[test]
    fn alpha_eq_is_equivariant(m in lambda_term(), seed in any::<u64>(), a in name(), b in name()) {
        let n = variant(&m, seed);
        let s = tm_sort();
        prop_assert!(alpha_eq(&swap(&s, &a, &b, &m), &swap(&s, &a, &b, &n)));
    }

    #[test]
    fn freshening_contract(t in systemf_term(), xs in proptest::collection::vec(name(), 0..4), seed in any::<u64>()) {
        let out = binders_free_elem(&xs, &t);
        prop_assert!(alpha_eq(&out, &t));
        prop_assert!(binders_of(&out).iter().all(|b| !xs.contains(b)));
        prop_assert_eq!(binders_free_elem(&xs, &variant(&t, seed)), out.clone());
        prop_assert_eq!(binders_free_elem(&xs, &out), out);
    }

    #[test]
    fn substitution_is_alpha_compatible(m in lambda_term(), n in lambda_term(), x in name(), seed in any::<u64>()) {
        let (m2, n2) = (variant(&m, seed), variant(&n, seed ^ 1));
        prop_assert!(alpha_eq(&lambda::subst(&m, &x, &n), &lambda::subst(&m2, &x, &n2)));
    }

    #[test]
    fn substituting_an_absent_variable_is_the_identity(m in lambda_term(), n in lambda_term(), x in name()) {
        prop_assume!(!names_of(&fv(&m)).contains(&x));
        prop_assert!(alpha_eq(&lambda::subst(&m, &x, &n), &m));
    }

    #[test]
    fn substitution_removes_the_variable(m in lambda_term(), n in lambda_term(), x in name()) {
        prop_assume!(!names_of(&fv(&n)).contains(&x));
        let out = lambda::subst(&m, &x, &n);
        prop_assert!(!fv(&out).contains(&SortedName::new(tm_sort(), x)));
    }

    #[test]
    fn naive_agrees_on_freshened_terms(m in lambda_term(), n in lambda_term(), x in name()) {
        let mut xs: BTreeSet<Name> = names_of(&fv(&n));
        xs.insert(x.clone());
        let xs: Vec<Name> = xs.into_iter().collect();
        let fresh = binders_free_elem(&xs, &m);
        prop_assert!(alpha_eq(&lambda::subst_naive(&fresh, &x, &n), &lambda::subst(&fresh, &x, &n)));
    }

    #[test]
    fn lambda_print_parse_round_trip(t in lambda_term()) {
        let text = syntax::print_lambda(&t, &SymbolTable::new());
        let mut st = SymbolTable::new();
        st.reserve_explicit(&text);
        prop_assert_eq!(syntax::parse_lambda(&text, &mut st).unwrap(), t);
    }

    #[test]
    fn systemf_print_parse_round_trip(t in systemf_term()) {
        let text = syntax::print_systemf(&t, &SymbolTable::new());
        let mut st = SymbolTable::new();
        st.reserve_explicit(&text);
        prop_assert_eq!(syntax::parse_systemf(&text, &mut st).unwrap(), t);
    }

    #[test]
    fn vars_count_is_positive(t in lambda_term()) {
        prop_assert!(lambda::vars_count(&t) >= 1);
    }
}
