//! The `genbind` command line.
//!
//! Identifiers are numbered in order of first occurrence, reading the
//! positional arguments left to right and then option values; `v<k>`
//! always denotes name `k`. Exit status: 0 for success or a true
//! predicate, 1 for a false predicate or exhausted fuel, 2 for usage and
//! input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::alpha::{alpha_eq, binders_free_elem, fold_ctx_alpha, to_canonical};
use crate::error::{Error, Result};
use crate::lambda::{self, tm_sort};
use crate::nominal::{binders_of, fv, swap, Name, SortId};
use crate::props::{self, SuiteConfig};
use crate::syntax::{self, Signature, SymbolTable};
use crate::systemf::{self, ty_sort};
use crate::universe::{fold, fold_ctx, var_layer, FunctorCode, Layer, Term, Val};

#[derive(Debug, Parser)]
#[command(name = "genbind", version, about = "Generic nominal syntax toolkit")]
pub struct Cli {
    /// Object language of term arguments.
    #[arg(long, global = true, value_enum, default_value_t = Lang::Lambda)]
    pub lang: Lang,
    /// Signature file, required with `--lang generic`.
    #[arg(long, global = true, value_name = "FILE")]
    pub sig: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lang {
    Lambda,
    Systemf,
    Generic,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse surface syntax and print the generic s-expression.
    Parse { term: String },
    /// Read a generic s-expression and print it in surface syntax.
    Print { term: String },
    /// Free variables, one `(sort,name)` per line.
    Fv { term: String },
    /// Binder names in pre-order, one per line.
    Binders { term: String },
    /// Decide alpha-equivalence; exit 0 if equivalent, 1 otherwise.
    Alphaeq { left: String, right: String },
    /// Swap two names of one sort everywhere.
    Swap {
        #[arg(long)]
        sort: Option<String>,
        a: String,
        b: String,
        term: String,
    },
    /// Rename binders canonically, avoiding the given names.
    Freshen {
        #[arg(long, value_delimiter = ',')]
        avoid: Vec<String>,
        term: String,
    },
    /// Print the locally-nameless canonical form.
    Canon { term: String },
    /// Substitute REPLACEMENT for VAR in TERM.
    Subst {
        /// Skip binder freshening (may capture).
        #[arg(long)]
        naive: bool,
        /// Sort of VAR; with System F, `ty` substitutes a type.
        #[arg(long)]
        sort: Option<String>,
        term: String,
        var: String,
        replacement: String,
    },
    /// Count variable occurrences outside embedded terms.
    Vars { term: String },
    /// Reduce a lambda term to normal form, leftmost-outermost.
    Normalize {
        #[arg(long, default_value_t = 1000)]
        fuel: u64,
        term: String,
    },
    /// Run the property suites.
    Selftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 30)]
        size: usize,
        /// Run a single criterion (1 to 8).
        #[arg(long)]
        criterion: Option<u8>,
    },
}

impl Command {
    fn texts(&self) -> Vec<&str> {
        match self {
            Command::Parse { term }
            | Command::Print { term }
            | Command::Fv { term }
            | Command::Binders { term }
            | Command::Canon { term }
            | Command::Vars { term }
            | Command::Normalize { term, .. } => vec![term],
            Command::Alphaeq { left, right } => vec![left, right],
            Command::Swap { a, b, term, .. } => vec![a, b, term],
            Command::Freshen { avoid, term } => {
                let mut v: Vec<&str> = vec![term];
                v.extend(avoid.iter().map(String::as_str));
                v
            }
            Command::Subst {
                term, var, replacement, ..
            } => vec![term, var, replacement],
            Command::Selftest { .. } => Vec::new(),
        }
    }
}

struct Session {
    lang: Lang,
    sig: Option<Signature>,
    symbols: SymbolTable,
}

impl Session {
    fn code(&self) -> Arc<FunctorCode> {
        match (self.lang, &self.sig) {
            (Lang::Lambda, _) => lambda::lam_code(),
            (Lang::Systemf, _) => systemf::term_code(),
            (Lang::Generic, Some(sig)) => sig.entry_code().clone(),
            (Lang::Generic, None) => unreachable!("checked when the session is created"),
        }
    }

    fn sorts(&self) -> Vec<SortId> {
        match (self.lang, &self.sig) {
            (Lang::Lambda, _) => vec![tm_sort()],
            (Lang::Systemf, _) => vec![tm_sort(), ty_sort()],
            (Lang::Generic, Some(sig)) => sig.sorts.clone(),
            (Lang::Generic, None) => Vec::new(),
        }
    }

    fn sort(&self, requested: Option<&str>) -> Result<SortId> {
        let sorts = self.sorts();
        match requested {
            Some(s) => sorts
                .iter()
                .find(|k| k.as_str() == s)
                .cloned()
                .ok_or_else(|| Error::Usage(format!("unknown sort `{}`", s))),
            None if self.lang == Lang::Generic && sorts.len() != 1 => {
                Err(Error::Usage("--sort is required for this signature".into()))
            }
            None => Ok(sorts[0].clone()),
        }
    }

    /// Reads a term in the session's surface syntax.
    fn term(&mut self, text: &str) -> Result<Term> {
        match self.lang {
            Lang::Lambda => syntax::parse_lambda(text, &mut self.symbols),
            Lang::Systemf => syntax::parse_systemf(text, &mut self.symbols),
            Lang::Generic => self.generic(text),
        }
    }

    fn generic(&mut self, text: &str) -> Result<Term> {
        let code = self.code();
        syntax::parse_generic_term(&code, text, &mut self.symbols)
    }

    fn name(&mut self, text: &str) -> Result<Name> {
        let mut chars = text.chars();
        let valid = chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
            && !matches!(text, "λ" | "Λ");
        if !valid {
            return Err(Error::Usage(format!("`{}` is not an identifier", text)));
        }
        Ok(self.symbols.intern(text))
    }

    fn show(&self, t: &Term) -> String {
        match self.lang {
            Lang::Lambda => syntax::print_lambda(t, &self.symbols),
            Lang::Systemf => syntax::print_systemf(t, &self.symbols),
            Lang::Generic => syntax::print_generic(t, &self.symbols),
        }
    }
}

/// Replaces occurrences of `sort`-sorted `x` at whole layers of `code`.
fn generic_subst(code: &Arc<FunctorCode>, sort: &SortId, m: &Term, x: &Name, n: &Term, naive: bool) -> Term {
    let ctx_code = Arc::new(FunctorCode::prod(
        FunctorCode::VarOcc(sort.clone()),
        FunctorCode::emb(code),
    ));
    let ctx = Term::new(
        ctx_code,
        Val::pair(Val::Var(sort.clone(), x.clone()), Val::emb(n.clone())),
    );
    let step = |_: &Term, layer: Layer<Term>| match var_layer(&layer) {
        Some((s, y)) if s == sort && y == x => n.clone(),
        _ => Term::new(code.clone(), layer.into_val()),
    };
    if naive {
        fold_ctx(code, &step, &ctx, m)
    } else {
        fold_ctx_alpha(code, &step, &ctx, m)
    }
}

fn count_vars(t: &Term) -> u64 {
    fn layer(l: &Layer<u64>) -> u64 {
        match l {
            Layer::Rec(k) => *k,
            Layer::Var(..) => 1,
            Layer::Unit | Layer::Prim(_) | Layer::Emb(_) => 0,
            Layer::InL(l) | Layer::InR(l) | Layer::Bind(_, _, l) => layer(l),
            Layer::Pair(a, b) => layer(a) + layer(b),
        }
    }
    fold(t, &|l: Layer<u64>| layer(&l))
}

/// Runs one invocation, writing to the given streams, and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{}", text);
                2
            } else {
                let _ = write!(out, "{}", text);
                0
            };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            2
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let sig = match (&cli.sig, cli.lang) {
        (Some(path), Lang::Generic) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Usage(format!("cannot read {}: {}", path.display(), e)))?;
            Some(syntax::parse_signature(&text)?)
        }
        (None, Lang::Generic) if !matches!(cli.command, Command::Selftest { .. }) => {
            return Err(Error::Usage("--sig is required with --lang generic".into()))
        }
        (Some(_), _) => return Err(Error::Usage("--sig only applies to --lang generic".into())),
        _ => None,
    };
    let mut symbols = SymbolTable::new();
    for text in cli.command.texts() {
        symbols.reserve_explicit(text);
    }
    let mut s = Session {
        lang: cli.lang,
        sig,
        symbols,
    };
    let mut lines: Vec<String> = Vec::new();
    let status = match &cli.command {
        Command::Parse { term } => {
            let t = s.term(term)?;
            lines.push(syntax::print_generic(&t, &s.symbols));
            0
        }
        Command::Print { term } => {
            let t = s.generic(term)?;
            lines.push(s.show(&t));
            0
        }
        Command::Fv { term } => {
            let t = s.term(term)?;
            lines.extend(fv(&t).iter().map(|sn| s.symbols.display_sorted(sn)));
            0
        }
        Command::Binders { term } => {
            let t = s.term(term)?;
            lines.extend(binders_of(&t).iter().map(|n| s.symbols.display(n)));
            0
        }
        Command::Alphaeq { left, right } => {
            let (a, b) = (s.term(left)?, s.term(right)?);
            let eq = alpha_eq(&a, &b);
            lines.push(eq.to_string());
            if eq {
                0
            } else {
                1
            }
        }
        Command::Swap { sort, a, b, term } => {
            let sort = s.sort(sort.as_deref())?;
            let t = s.term(term)?;
            let (a, b) = (s.name(a)?, s.name(b)?);
            lines.push(s.show(&swap(&sort, &a, &b, &t)));
            0
        }
        Command::Freshen { avoid, term } => {
            let t = s.term(term)?;
            let xs = avoid.iter().map(|a| s.name(a)).collect::<Result<Vec<_>>>()?;
            lines.push(s.show(&binders_free_elem(&xs, &t)));
            0
        }
        Command::Canon { term } => {
            let t = s.term(term)?;
            lines.push(syntax::print_canonical(&to_canonical(&t), &s.symbols));
            0
        }
        Command::Subst {
            naive,
            sort,
            term,
            var,
            replacement,
        } => {
            let sort = s.sort(sort.as_deref())?;
            let m = s.term(term)?;
            let x = s.name(var)?;
            let result = match s.lang {
                Lang::Systemf if sort == ty_sort() => {
                    if *naive {
                        return Err(Error::Usage("--naive is not available for type substitution".into()));
                    }
                    let ty = syntax::parse_systemf_type(replacement, &mut s.symbols)?;
                    systemf::subst_type_in_term(&m, &x, &ty)
                }
                Lang::Lambda | Lang::Systemf => {
                    let n = s.term(replacement)?;
                    match (s.lang, naive) {
                        (Lang::Lambda, false) => lambda::subst(&m, &x, &n),
                        (Lang::Lambda, true) => lambda::subst_naive(&m, &x, &n),
                        (_, false) => systemf::subst_term(&m, &x, &n),
                        (_, true) => systemf::subst_term_naive(&m, &x, &n),
                    }
                }
                Lang::Generic => {
                    let n = s.term(replacement)?;
                    generic_subst(&s.code(), &sort, &m, &x, &n, *naive)
                }
            };
            lines.push(s.show(&result));
            0
        }
        Command::Vars { term } => {
            let t = s.term(term)?;
            lines.push(count_vars(&t).to_string());
            0
        }
        Command::Normalize { fuel, term } => {
            if s.lang != Lang::Lambda {
                return Err(Error::Usage("normalize is only defined for --lang lambda".into()));
            }
            let t = s.term(term)?;
            match lambda::normalize(&t, *fuel) {
                Some(nf) => {
                    lines.push(s.show(&nf));
                    0
                }
                None => {
                    lines.push(format!("fuel exhausted after {} steps", fuel));
                    1
                }
            }
        }
        Command::Selftest {
            seed,
            count,
            size,
            criterion,
        } => {
            let cfg = SuiteConfig {
                seed: *seed,
                count: *count,
                max_size: *size,
            };
            let reports = match criterion {
                Some(c) => vec![props::run(*c, &cfg).ok_or_else(|| Error::Usage(format!("no criterion {}", c)))?],
                None => props::run_all(&cfg),
            };
            let passed = reports.iter().all(|r| r.passed());
            for r in &reports {
                write!(out, "{}", r).map_err(|e| Error::Usage(e.to_string()))?;
            }
            lines.push(if passed { "selftest passed" } else { "selftest FAILED" }.to_string());
            if passed {
                0
            } else {
                1
            }
        }
    };
    for line in lines {
        writeln!(out, "{}", line).map_err(|e| Error::Usage(e.to_string()))?;
    }
    Ok(status)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("genbind").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn alphaeq_exit_codes() {
        assert_eq!(invoke(&["alphaeq", "\\x. x", "\\y. y"]).0, 0);
        assert_eq!(invoke(&["alphaeq", "x", "y"]).0, 1);
        assert_eq!(invoke(&["alphaeq", "\\x. x", "(y"]).0, 2);
    }

    #[test]
    fn capture_avoiding_subst_example() {
        let (code, out, _) = invoke(&["subst", "--lang", "lambda", "\\y. x", "x", "y"]);
        assert_eq!((code, out.as_str()), (0, "\\v2. y\n"));
        let (_, out, _) = invoke(&["subst", "--naive", "\\y. x", "x", "y"]);
        assert_eq!(out, "\\y. y\n");
    }

    #[test]
    fn systemf_free_variables() {
        let (code, out, _) = invoke(&["fv", "--lang", "systemf", "/\\a. \\(x:a). x y"]);
        assert_eq!((code, out.as_str()), (0, "(tm,y)\n"));
    }

    #[test]
    fn generic_requires_a_signature() {
        let (code, _, err) = invoke(&["fv", "--lang", "generic", "(mu unit)"]);
        assert_eq!(code, 2);
        assert!(err.contains("--sig"));
    }

    #[test]
    fn normalize_reports_exhausted_fuel() {
        let (code, out, _) = invoke(&["normalize", "--fuel", "5", "(\\x. x x) (\\x. x x)"]);
        assert_eq!((code, out.as_str()), (1, "fuel exhausted after 5 steps\n"));
        let (code, out, _) = invoke(&["normalize", "(\\x y. x) a b"]);
        assert_eq!((code, out.as_str()), (0, "a\n"));
    }

    #[test]
    fn generic_substitution_matches_the_instance() {
        let dir = std::env::temp_dir().join(format!("genbind-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let sig = dir.join("lam.sig");
        std::fs::write(
            &sig,
            "(sorts tm)(code Lam (sum (var tm) (sum (prod rec rec) (bind tm rec))))",
        )
        .unwrap();
        let sig = sig.to_str().unwrap();
        let term = "(mu (inr (inr (bind tm y (mu (inl (var tm x)))))))";
        let (code, out, _) = invoke(&[
            "subst",
            "--lang",
            "generic",
            "--sig",
            sig,
            term,
            "x",
            "(mu (inl (var tm y)))",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "(mu (inr (inr (bind tm v2 (mu (inl (var tm y)))))))\n");
    }
}
