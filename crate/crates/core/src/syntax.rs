//! Concrete syntax: lambda calculus, System F, and s-expressions for
//! signatures and generic terms.
//!
//! Identifiers are mapped to names by a [`SymbolTable`] shared across one
//! invocation. `v<k>` always denotes the name with index `k`; any other
//! identifier receives the smallest index not yet taken, in order of first
//! occurrence.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::alpha::CanonicalTerm;
use crate::error::{Error, Result};
use crate::nominal::{Name, SortId, SortedName};
use crate::universe::{FunctorCode, PrimKind, PrimValue, Term, Val};
use crate::{lambda, systemf};

#[derive(Debug, Default, Clone)]
pub struct SymbolTable {
    by_alias: HashMap<String, u64>,
    by_index: BTreeMap<u64, String>,
    explicit: BTreeSet<u64>,
}

fn explicit_index(ident: &str) -> Option<u64> {
    let digits = ident.strip_prefix('v')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() && c != 'λ' && c != 'Λ' || c == '_'
}

fn is_ident_char(c: char) -> bool {
    is_ident_start(c) || c.is_ascii_digit() || c == '\''
}

impl SymbolTable {
    pub fn new() -> SymbolTable {
        SymbolTable::default()
    }

    /// Marks every `v<k>` identifier in `text` as taken, so that aliases
    /// seen earlier are never assigned one of those indices.
    pub fn reserve_explicit(&mut self, text: &str) {
        let mut chars = text.char_indices().peekable();
        while let Some((start, c)) = chars.next() {
            if !is_ident_start(c) {
                continue;
            }
            let mut end = start + c.len_utf8();
            while let Some(&(i, c)) = chars.peek() {
                if !is_ident_char(c) {
                    break;
                }
                end = i + c.len_utf8();
                chars.next();
            }
            if let Some(k) = explicit_index(&text[start..end]) {
                self.explicit.insert(k);
            }
        }
    }

    pub fn intern(&mut self, ident: &str) -> Name {
        if let Some(k) = explicit_index(ident) {
            self.explicit.insert(k);
            return match self.by_index.get(&k) {
                Some(alias) => Name::with_alias(k, alias.as_str()),
                None => Name::new(k),
            };
        }
        if let Some(&k) = self.by_alias.get(ident) {
            return Name::with_alias(k, ident);
        }
        let k = (0u64..)
            .find(|k| !self.explicit.contains(k) && !self.by_index.contains_key(k))
            .expect("name supply is infinite");
        self.by_alias.insert(ident.to_string(), k);
        self.by_index.insert(k, ident.to_string());
        Name::with_alias(k, ident)
    }

    /// Looks up an identifier without assigning a new index.
    pub fn lookup(&self, ident: &str) -> Option<Name> {
        if let Some(k) = explicit_index(ident) {
            return Some(Name::new(k));
        }
        self.by_alias.get(ident).map(|&k| Name::with_alias(k, ident))
    }

    pub fn display(&self, n: &Name) -> String {
        match self.by_index.get(&n.index()) {
            Some(alias) => alias.clone(),
            None => match n.alias() {
                Some(alias) => alias.to_string(),
                None => format!("v{}", n.index()),
            },
        }
    }

    pub fn display_sorted(&self, sn: &SortedName) -> String {
        format!("({},{})", sn.sort, self.display(&sn.name))
    }
}

// ---------------------------------------------------------------------------
// Tokens for the calculi

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Lambda,
    BigLambda,
    Forall,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Arrow,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, column);
        let mut advance = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => None,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '\\' | 'λ' => Some(Tok::Lambda),
            'Λ' => Some(Tok::BigLambda),
            '/' if chars.get(i + 1) == Some(&'\\') => {
                advance = 2;
                Some(Tok::BigLambda)
            }
            '∀' => Some(Tok::Forall),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ':' => Some(Tok::Colon),
            '→' => Some(Tok::Arrow),
            '-' if chars.get(i + 1) == Some(&'>') => {
                advance = 2;
                Some(Tok::Arrow)
            }
            c if is_ident_start(c) => {
                let start = i;
                let mut j = i + 1;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                advance = j - start;
                Some(Tok::Ident(chars[start..j].iter().collect()))
            }
            other => {
                return Err(Error::Syntax {
                    line: tl,
                    column: tc,
                    message: format!("unexpected character `{}`", other),
                })
            }
        };
        if let Some(tok) = tok {
            out.push(Token {
                tok,
                line: tl,
                column: tc,
            });
        }
        i += advance;
        column += advance;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    symbols: &'a mut SymbolTable,
    keywords: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn new(text: &str, symbols: &'a mut SymbolTable, keywords: &'a [&'a str]) -> Result<Parser<'a>> {
        Ok(Parser {
            tokens: lex(text)?,
            pos: 0,
            symbols,
            keywords,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn is_keyword(&self, tok: &Tok) -> bool {
        matches!(tok, Tok::Ident(s) if self.keywords.contains(&s.as_str()))
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.tokens[self.pos];
        Err(Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if tok != Tok::Eof {
            self.pos += 1;
        }
        tok
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {}", what))
        }
    }

    fn ident(&mut self) -> Result<Name> {
        match self.peek().clone() {
            Tok::Ident(s) if !self.keywords.contains(&s.as_str()) => {
                self.bump();
                Ok(self.symbols.intern(&s))
            }
            _ => self.error("expected an identifier"),
        }
    }

    fn finish(&self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen) && !self.is_keyword(self.peek())
    }

    // lambda calculus ------------------------------------------------------

    fn lam_term(&mut self) -> Result<Term> {
        if *self.peek() == Tok::Lambda {
            self.bump();
            let mut binders = vec![self.ident()?];
            while matches!(self.peek(), Tok::Ident(_)) {
                binders.push(self.ident()?);
            }
            self.expect(Tok::Dot, "`.` after binder")?;
            let body = self.lam_term()?;
            return Ok(binders.into_iter().rev().fold(body, |b, x| lambda::lam(x, b)));
        }
        let mut head = self.lam_atom()?;
        loop {
            if self.starts_atom() {
                let arg = self.lam_atom()?;
                head = lambda::app(head, arg);
            } else if *self.peek() == Tok::Lambda {
                let arg = self.lam_term()?;
                head = lambda::app(head, arg);
            } else {
                return Ok(head);
            }
        }
    }

    fn lam_atom(&mut self) -> Result<Term> {
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let t = self.lam_term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(_) => Ok(lambda::v(self.ident()?)),
            _ => self.error("expected a term"),
        }
    }

    // System F -------------------------------------------------------------

    fn sf_type(&mut self) -> Result<Term> {
        let is_forall = *self.peek() == Tok::Forall || matches!(self.peek(), Tok::Ident(s) if s == "forall");
        if is_forall {
            self.bump();
            let mut binders = vec![self.ident()?];
            while matches!(self.peek(), Tok::Ident(_)) && !self.is_keyword(self.peek()) {
                binders.push(self.ident()?);
            }
            self.expect(Tok::Dot, "`.` after type binder")?;
            let body = self.sf_type()?;
            return Ok(binders.into_iter().rev().fold(body, |b, a| systemf::forall(a, b)));
        }
        let lhs = self.sf_type_atom()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.sf_type()?;
            return Ok(systemf::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn sf_type_atom(&mut self) -> Result<Term> {
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let t = self.sf_type()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(_) => Ok(systemf::tvar(self.ident()?)),
            _ => self.error("expected a type"),
        }
    }

    fn sf_binder_form(&mut self) -> Result<Option<Term>> {
        match self.peek() {
            Tok::Lambda => {
                self.bump();
                self.expect(Tok::LParen, "`(` before annotated binder")?;
                let x = self.ident()?;
                self.expect(Tok::Colon, "`:` in binder annotation")?;
                let ty = self.sf_type()?;
                self.expect(Tok::RParen, "`)` after binder annotation")?;
                self.expect(Tok::Dot, "`.` after binder")?;
                let body = self.sf_term()?;
                Ok(Some(systemf::abs_t(x, ty, body)))
            }
            Tok::BigLambda => {
                self.bump();
                let a = self.ident()?;
                self.expect(Tok::Dot, "`.` after type binder")?;
                let body = self.sf_term()?;
                Ok(Some(systemf::tabs(a, body)))
            }
            _ => Ok(None),
        }
    }

    fn sf_term(&mut self) -> Result<Term> {
        if let Some(t) = self.sf_binder_form()? {
            return Ok(t);
        }
        let mut head = self.sf_atom()?;
        loop {
            if self.starts_atom() {
                let arg = self.sf_atom()?;
                head = systemf::app(head, arg);
            } else if *self.peek() == Tok::LBracket {
                self.bump();
                let ty = self.sf_type()?;
                self.expect(Tok::RBracket, "`]`")?;
                head = systemf::tapp(head, ty);
            } else if let Some(arg) = self.sf_binder_form()? {
                head = systemf::app(head, arg);
            } else {
                return Ok(head);
            }
        }
    }

    fn sf_atom(&mut self) -> Result<Term> {
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let t = self.sf_term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(_) => Ok(systemf::var(self.ident()?)),
            _ => self.error("expected a term"),
        }
    }
}

const SF_KEYWORDS: &[&str] = &["forall"];

pub fn parse_lambda(text: &str, symbols: &mut SymbolTable) -> Result<Term> {
    let mut p = Parser::new(text, symbols, &[])?;
    let t = p.lam_term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_systemf(text: &str, symbols: &mut SymbolTable) -> Result<Term> {
    let mut p = Parser::new(text, symbols, SF_KEYWORDS)?;
    let t = p.sf_term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_systemf_type(text: &str, symbols: &mut SymbolTable) -> Result<Term> {
    let mut p = Parser::new(text, symbols, SF_KEYWORDS)?;
    let t = p.sf_type()?;
    p.finish()?;
    Ok(t)
}

pub fn print_lambda(t: &Term, symbols: &SymbolTable) -> String {
    use lambda::LamView;
    match lambda::view(t) {
        LamView::Var(x) => symbols.display(x),
        LamView::Lam(x, body) => format!("\\{}. {}", symbols.display(x), print_lambda(body, symbols)),
        LamView::App(f, a) => {
            let f_text = match lambda::view(f) {
                LamView::Lam(..) => format!("({})", print_lambda(f, symbols)),
                _ => print_lambda(f, symbols),
            };
            let a_text = match lambda::view(a) {
                LamView::Var(_) => print_lambda(a, symbols),
                _ => format!("({})", print_lambda(a, symbols)),
            };
            format!("{} {}", f_text, a_text)
        }
    }
}

pub fn print_systemf_type(t: &Term, symbols: &SymbolTable) -> String {
    use systemf::TypeView;
    match systemf::type_view(t) {
        TypeView::Var(a) => symbols.display(a),
        TypeView::Forall(a, body) => {
            format!("forall {}. {}", symbols.display(a), print_systemf_type(body, symbols))
        }
        TypeView::Arrow(s, r) => {
            let s_text = match systemf::type_view(s) {
                TypeView::Var(_) => print_systemf_type(s, symbols),
                _ => format!("({})", print_systemf_type(s, symbols)),
            };
            format!("{} -> {}", s_text, print_systemf_type(r, symbols))
        }
    }
}

pub fn print_systemf(t: &Term, symbols: &SymbolTable) -> String {
    use systemf::TermView;
    let is_binder = |m: &Term| matches!(systemf::term_view(m), TermView::Abs(..) | TermView::TAbs(..));
    match systemf::term_view(t) {
        TermView::Var(x) => symbols.display(x),
        TermView::Abs(x, ty, body) => format!(
            "\\({}:{}). {}",
            symbols.display(x),
            print_systemf_type(ty, symbols),
            print_systemf(body, symbols)
        ),
        TermView::TAbs(a, body) => format!("/\\{}. {}", symbols.display(a), print_systemf(body, symbols)),
        TermView::App(f, a) => {
            let f_text = if is_binder(f) {
                format!("({})", print_systemf(f, symbols))
            } else {
                print_systemf(f, symbols)
            };
            let a_text = match systemf::term_view(a) {
                TermView::Var(_) => print_systemf(a, symbols),
                _ => format!("({})", print_systemf(a, symbols)),
            };
            format!("{} {}", f_text, a_text)
        }
        TermView::TApp(f, ty) => {
            let f_text = if is_binder(f) {
                format!("({})", print_systemf(f, symbols))
            } else {
                print_systemf(f, symbols)
            };
            format!("{} [{}]", f_text, print_systemf_type(ty, symbols))
        }
    }
}

// ---------------------------------------------------------------------------
// S-expressions

#[derive(Debug, Clone, PartialEq)]
pub enum SExp {
    Atom(String, usize, usize),
    Str(String, usize, usize),
    List(Vec<SExp>, usize, usize),
}

impl SExp {
    fn position(&self) -> (usize, usize) {
        match self {
            SExp::Atom(_, l, c) | SExp::Str(_, l, c) | SExp::List(_, l, c) => (*l, *c),
        }
    }

    fn syntax_error<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.position();
        Err(Error::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn atom(&self) -> Option<&str> {
        match self {
            SExp::Atom(s, ..) => Some(s),
            _ => None,
        }
    }
}

/// Reads a sequence of s-expressions. `;` starts a comment.
pub fn read_sexps(text: &str) -> Result<Vec<SExp>> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let (mut line, mut column) = (1usize, 1usize);
    let mut stack: Vec<(Vec<SExp>, usize, usize)> = vec![(Vec::new(), 1, 1)];
    let err = |line, column, message: &str| Error::Syntax {
        line,
        column,
        message: message.to_string(),
    };
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
            }
            ';' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                stack.push((Vec::new(), line, column));
                i += 1;
                column += 1;
            }
            ')' => {
                if stack.len() == 1 {
                    return Err(err(line, column, "unbalanced `)`"));
                }
                let (items, l, c) = stack.pop().expect("non-empty");
                stack.last_mut().expect("non-empty").0.push(SExp::List(items, l, c));
                i += 1;
                column += 1;
            }
            '"' => {
                let (l, c) = (line, column);
                let mut s = String::new();
                i += 1;
                column += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(err(l, c, "unterminated string")),
                        Some('"') => {
                            i += 1;
                            column += 1;
                            break;
                        }
                        Some('\\') => {
                            let escaped = match chars.get(i + 1) {
                                Some('n') => '\n',
                                Some('t') => '\t',
                                Some(&other) => other,
                                None => return Err(err(l, c, "unterminated string")),
                            };
                            s.push(escaped);
                            i += 2;
                            column += 2;
                        }
                        Some('\n') => return Err(err(l, c, "newline in string")),
                        Some(&other) => {
                            s.push(other);
                            i += 1;
                            column += 1;
                        }
                    }
                }
                stack.last_mut().expect("non-empty").0.push(SExp::Str(s, l, c));
            }
            _ => {
                let (l, c) = (line, column);
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !matches!(chars[i], '(' | ')' | '"' | ';') {
                    i += 1;
                    column += 1;
                }
                let atom: String = chars[start..i].iter().collect();
                stack.last_mut().expect("non-empty").0.push(SExp::Atom(atom, l, c));
            }
        }
    }
    if stack.len() > 1 {
        let (_, l, c) = stack.last().expect("non-empty");
        return Err(err(*l, *c, "unbalanced `(`"));
    }
    Ok(stack.pop().expect("non-empty").0)
}

fn head_and_args(sexp: &SExp) -> Option<(&str, &[SExp])> {
    match sexp {
        SExp::List(items, ..) => {
            let (head, rest) = items.split_first()?;
            Some((head.atom()?, rest))
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Signatures

/// A set of sorts and named codes, one of which is the entry point.
#[derive(Debug, Clone)]
pub struct Signature {
    pub sorts: Vec<SortId>,
    pub codes: BTreeMap<String, Arc<FunctorCode>>,
    pub order: Vec<String>,
    pub entry: String,
}

impl Signature {
    pub fn entry_code(&self) -> &Arc<FunctorCode> {
        &self.codes[&self.entry]
    }

    pub fn code(&self, name: &str) -> Option<&Arc<FunctorCode>> {
        self.codes.get(name)
    }
}

/// Parses and resolves a signature. Without an `entry` form the last
/// declared code is the entry. Without a `sorts` form, sorts are declared
/// implicitly by use.
pub fn parse_signature(text: &str) -> Result<Signature> {
    let forms = read_sexps(text)?;
    let mut sorts: Option<Vec<SortId>> = None;
    let mut raw: BTreeMap<String, &SExp> = BTreeMap::new();
    let mut order = Vec::new();
    let mut entry = None;
    for form in &forms {
        let Some((head, args)) = head_and_args(form) else {
            return form.syntax_error("expected `(sorts ...)`, `(code ...)` or `(entry ...)`");
        };
        match head {
            "sorts" => {
                let declared = sorts.get_or_insert_with(Vec::new);
                for a in args {
                    match a.atom() {
                        Some(s) => declared.push(SortId::new(s)),
                        None => return a.syntax_error("sort names are atoms"),
                    }
                }
            }
            "code" => {
                let [name, body] = args else {
                    return form.syntax_error("expected `(code NAME EXPR)`");
                };
                let Some(name) = name.atom() else {
                    return name.syntax_error("code names are atoms");
                };
                if raw.insert(name.to_string(), body).is_some() {
                    return Err(Error::Signature(format!("code `{}` defined twice", name)));
                }
                order.push(name.to_string());
            }
            "entry" => match args {
                [name] if name.atom().is_some() => entry = name.atom().map(str::to_string),
                _ => return form.syntax_error("expected `(entry NAME)`"),
            },
            other => return form.syntax_error(format!("unknown signature form `{}`", other)),
        }
    }
    let entry = match entry {
        Some(e) => e,
        None => order
            .last()
            .cloned()
            .ok_or_else(|| Error::Signature("no codes declared".into()))?,
    };
    if !raw.contains_key(&entry) {
        return Err(Error::UnresolvedCode(entry));
    }

    let mut resolver = Resolver {
        raw: &raw,
        done: BTreeMap::new(),
        visiting: Vec::new(),
        sorts: sorts.as_ref(),
        used_sorts: BTreeSet::new(),
    };
    for name in &order {
        resolver.resolve(name)?;
    }
    let Resolver { done, used_sorts, .. } = resolver;
    let sorts = match sorts {
        Some(s) => s,
        None => used_sorts.into_iter().collect(),
    };
    Ok(Signature {
        sorts,
        codes: done,
        order,
        entry,
    })
}

struct Resolver<'a> {
    raw: &'a BTreeMap<String, &'a SExp>,
    done: BTreeMap<String, Arc<FunctorCode>>,
    visiting: Vec<String>,
    sorts: Option<&'a Vec<SortId>>,
    used_sorts: BTreeSet<SortId>,
}

impl Resolver<'_> {
    fn resolve(&mut self, name: &str) -> Result<Arc<FunctorCode>> {
        if let Some(code) = self.done.get(name) {
            return Ok(code.clone());
        }
        if self.visiting.iter().any(|v| v == name) {
            return Err(Error::EmbeddingCycle(name.to_string()));
        }
        let body = *self
            .raw
            .get(name)
            .ok_or_else(|| Error::UnresolvedCode(name.to_string()))?;
        self.visiting.push(name.to_string());
        let code = Arc::new(self.expr(body)?);
        self.visiting.pop();
        self.done.insert(name.to_string(), code.clone());
        Ok(code)
    }

    fn sort(&mut self, sexp: &SExp) -> Result<SortId> {
        let Some(s) = sexp.atom() else {
            return sexp.syntax_error("sort names are atoms");
        };
        let sort = SortId::new(s);
        if let Some(declared) = self.sorts {
            if !declared.contains(&sort) {
                return Err(Error::Signature(format!("undeclared sort `{}`", s)));
            }
        }
        self.used_sorts.insert(sort.clone());
        Ok(sort)
    }

    fn expr(&mut self, sexp: &SExp) -> Result<FunctorCode> {
        match sexp {
            SExp::Atom(a, ..) => match a.as_str() {
                "unit" => Ok(FunctorCode::Unit),
                "rec" => Ok(FunctorCode::Rec),
                other => sexp.syntax_error(format!("unknown code `{}`", other)),
            },
            SExp::Str(..) => sexp.syntax_error("unexpected string in code"),
            SExp::List(..) => {
                let Some((head, args)) = head_and_args(sexp) else {
                    return sexp.syntax_error("malformed code expression");
                };
                match (head, args) {
                    ("prim", [kind]) => match kind.atom() {
                        Some("nat") => Ok(FunctorCode::Prim(PrimKind::Nat)),
                        Some("text") => Ok(FunctorCode::Prim(PrimKind::Text)),
                        Some("bool") => Ok(FunctorCode::Prim(PrimKind::Bool)),
                        _ => kind.syntax_error("primitive kinds are nat, text and bool"),
                    },
                    ("emb", [name]) => match name.atom() {
                        Some(n) => Ok(FunctorCode::Emb(self.resolve(n)?)),
                        None => name.syntax_error("expected a code name"),
                    },
                    ("sum", [l, r]) => Ok(FunctorCode::sum(self.expr(l)?, self.expr(r)?)),
                    ("prod", [l, r]) => Ok(FunctorCode::prod(self.expr(l)?, self.expr(r)?)),
                    ("var", [s]) => Ok(FunctorCode::VarOcc(self.sort(s)?)),
                    ("bind", [s, scope]) => {
                        let sort = self.sort(s)?;
                        Ok(FunctorCode::bind(sort, self.expr(scope)?))
                    }
                    (other, _) => sexp.syntax_error(format!("malformed `{}` code expression", other)),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Generic terms

/// Parses `(mu ...)` against `code`, reporting shape errors with a path.
pub fn parse_generic_term(code: &Arc<FunctorCode>, text: &str, symbols: &mut SymbolTable) -> Result<Term> {
    let forms = read_sexps(text)?;
    match forms.as_slice() {
        [one] => decode_term(code, one, &mut vec!["$".to_string()], symbols),
        [] => Err(Error::Syntax {
            line: 1,
            column: 1,
            message: "expected a term".into(),
        }),
        [_, extra, ..] => extra.syntax_error("unexpected trailing input"),
    }
}

fn shape_error<T>(path: &[String], message: impl Into<String>) -> Result<T> {
    Err(Error::Shape {
        path: path.join("/"),
        message: message.into(),
    })
}

fn decode_term(
    code: &Arc<FunctorCode>,
    sexp: &SExp,
    path: &mut Vec<String>,
    symbols: &mut SymbolTable,
) -> Result<Term> {
    match head_and_args(sexp) {
        Some(("mu", [body])) => {
            path.push("mu".into());
            let val = decode_val(code, code, body, path, symbols)?;
            path.pop();
            Ok(Term::new(code.clone(), val))
        }
        _ => shape_error(path, "expected `(mu ...)`"),
    }
}

fn describe(code: &FunctorCode) -> &'static str {
    match code {
        FunctorCode::Unit => "`unit`",
        FunctorCode::Rec => "a recursive `(mu ...)`",
        FunctorCode::Prim(_) => "`(prim LITERAL)`",
        FunctorCode::Emb(_) => "`(emb (mu ...))`",
        FunctorCode::Sum(..) => "`(inl ...)` or `(inr ...)`",
        FunctorCode::Prod(..) => "`(pair ... ...)`",
        FunctorCode::VarOcc(_) => "`(var SORT NAME)`",
        FunctorCode::Bind(..) => "`(bind SORT NAME ...)`",
    }
}

fn decode_val(
    mu: &Arc<FunctorCode>,
    at: &FunctorCode,
    sexp: &SExp,
    path: &mut Vec<String>,
    symbols: &mut SymbolTable,
) -> Result<Val> {
    let mismatch = |path: &[String]| shape_error(path, format!("expected {}", describe(at)));
    match at {
        FunctorCode::Unit => match sexp.atom() {
            Some("unit") => Ok(Val::Unit),
            _ => mismatch(path),
        },
        FunctorCode::Rec => Ok(Val::rec(decode_term(mu, sexp, path, symbols)?)),
        FunctorCode::Prim(kind) => match head_and_args(sexp) {
            Some(("prim", [lit])) => {
                let value = match (kind, lit) {
                    (PrimKind::Text, SExp::Str(s, ..)) => Some(PrimValue::Text(s.clone())),
                    (PrimKind::Nat, SExp::Atom(a, ..)) => a.parse().ok().map(PrimValue::Nat),
                    (PrimKind::Bool, SExp::Atom(a, ..)) => match a.as_str() {
                        "true" => Some(PrimValue::Bool(true)),
                        "false" => Some(PrimValue::Bool(false)),
                        _ => None,
                    },
                    _ => None,
                };
                match value {
                    Some(v) => Ok(Val::Prim(v)),
                    None => shape_error(path, format!("expected a {} literal", kind.keyword())),
                }
            }
            _ => mismatch(path),
        },
        FunctorCode::Emb(code) => match head_and_args(sexp) {
            Some(("emb", [inner])) => {
                path.push("emb".into());
                let t = decode_term(code, inner, path, symbols)?;
                path.pop();
                Ok(Val::emb(t))
            }
            _ => mismatch(path),
        },
        FunctorCode::Sum(l, r) => match head_and_args(sexp) {
            Some(("inl", [inner])) => {
                path.push("inl".into());
                let v = decode_val(mu, l, inner, path, symbols)?;
                path.pop();
                Ok(Val::inl(v))
            }
            Some(("inr", [inner])) => {
                path.push("inr".into());
                let v = decode_val(mu, r, inner, path, symbols)?;
                path.pop();
                Ok(Val::inr(v))
            }
            _ => mismatch(path),
        },
        FunctorCode::Prod(l, r) => match head_and_args(sexp) {
            Some(("pair", [a, b])) => {
                path.push("pair.0".into());
                let a = decode_val(mu, l, a, path, symbols)?;
                path.pop();
                path.push("pair.1".into());
                let b = decode_val(mu, r, b, path, symbols)?;
                path.pop();
                Ok(Val::pair(a, b))
            }
            _ => mismatch(path),
        },
        FunctorCode::VarOcc(sort) => match head_and_args(sexp) {
            Some(("var", [s, n])) => {
                check_sort(sort, s, path)?;
                Ok(Val::Var(sort.clone(), generic_name(n, path, symbols)?))
            }
            _ => mismatch(path),
        },
        FunctorCode::Bind(sort, scope) => match head_and_args(sexp) {
            Some(("bind", [s, n, body])) => {
                check_sort(sort, s, path)?;
                let name = generic_name(n, path, symbols)?;
                path.push("bind".into());
                let body = decode_val(mu, scope, body, path, symbols)?;
                path.pop();
                Ok(Val::bind(sort.clone(), name, body))
            }
            _ => mismatch(path),
        },
    }
}

fn check_sort(expected: &SortId, sexp: &SExp, path: &[String]) -> Result<()> {
    match sexp.atom() {
        Some(s) if s == expected.as_str() => Ok(()),
        Some(s) => shape_error(path, format!("expected sort `{}`, found `{}`", expected, s)),
        None => shape_error(path, "expected a sort name"),
    }
}

fn generic_name(sexp: &SExp, path: &[String], symbols: &mut SymbolTable) -> Result<Name> {
    match sexp.atom() {
        Some(ident) if ident.chars().next().is_some_and(is_ident_start) && ident.chars().all(is_ident_char) => {
            Ok(symbols.intern(ident))
        }
        _ => shape_error(path, "expected an identifier"),
    }
}

pub fn print_generic(t: &Term, symbols: &SymbolTable) -> String {
    let mut out = String::new();
    write_term(&mut out, t, symbols);
    out
}

fn write_term(out: &mut String, t: &Term, symbols: &SymbolTable) {
    out.push_str("(mu ");
    write_val(out, t.top(), symbols);
    out.push(')');
}

fn write_val(out: &mut String, val: &Val, symbols: &SymbolTable) {
    match val {
        Val::Unit => out.push_str("unit"),
        Val::Prim(p) => {
            let _ = write!(out, "(prim {})", p);
        }
        Val::Rec(t) => write_term(out, t, symbols),
        Val::Emb(t) => {
            out.push_str("(emb ");
            write_term(out, t, symbols);
            out.push(')');
        }
        Val::InL(v) => {
            out.push_str("(inl ");
            write_val(out, v, symbols);
            out.push(')');
        }
        Val::InR(v) => {
            out.push_str("(inr ");
            write_val(out, v, symbols);
            out.push(')');
        }
        Val::Pair(l, r) => {
            out.push_str("(pair ");
            write_val(out, l, symbols);
            out.push(' ');
            write_val(out, r, symbols);
            out.push(')');
        }
        Val::Var(s, n) => {
            let _ = write!(out, "(var {} {})", s, symbols.display(n));
        }
        Val::Bind(s, n, body) => {
            let _ = write!(out, "(bind {} {} ", s, symbols.display(n));
            write_val(out, body, symbols);
            out.push(')');
        }
    }
}

pub fn print_canonical(c: &CanonicalTerm, symbols: &SymbolTable) -> String {
    use CanonicalTerm as C;
    match c {
        C::Unit => "unit".into(),
        C::Rec(c) => format!("(mu {})", print_canonical(c, symbols)),
        C::Prim(p) => format!("(prim {})", p),
        C::Emb(c) => format!("(emb (mu {}))", print_canonical(c, symbols)),
        C::InL(c) => format!("(inl {})", print_canonical(c, symbols)),
        C::InR(c) => format!("(inr {})", print_canonical(c, symbols)),
        C::Pair(l, r) => format!("(pair {} {})", print_canonical(l, symbols), print_canonical(r, symbols)),
        C::Bound(s, k) => format!("(ref {} {})", s, k),
        C::Free(sn) => format!("(free {} {})", sn.sort, symbols.display(&sn.name)),
        C::Bind(s, c) => format!("(bind {} {})", s, print_canonical(c, symbols)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{app, lam, v};
    use crate::systemf::{abs_t, tabs, tapp, tvar, var};

    fn n(i: u64) -> Name {
        Name::new(i)
    }

    #[test]
    fn lambda_examples() {
        let mut st = SymbolTable::new();
        let t = parse_lambda("\\x. x x", &mut st).unwrap();
        assert_eq!(t, lam(n(0), app(v(n(0)), v(n(0)))));
        let mut st = SymbolTable::new();
        let t = parse_lambda("(\\x. x) y", &mut st).unwrap();
        assert_eq!(t, app(lam(n(0), v(n(0))), v(n(1))));
        assert_eq!(print_lambda(&t, &st), "(\\x. x) y");
    }

    #[test]
    fn lambda_application_is_left_associative() {
        let mut st = SymbolTable::new();
        let t = parse_lambda("a b c", &mut st).unwrap();
        assert_eq!(t, app(app(v(n(0)), v(n(1))), v(n(2))));
        let t = parse_lambda("a (b c)", &mut st).unwrap();
        assert_eq!(print_lambda(&t, &st), "a (b c)");
        let t = parse_lambda("f \\x. x", &mut st).unwrap();
        assert_eq!(print_lambda(&t, &st), "f (\\x. x)");
        let t = parse_lambda("λx y. x", &mut st).unwrap();
        assert_eq!(print_lambda(&t, &st), "\\x. \\y. x");
    }

    #[test]
    fn explicit_indices_are_reserved() {
        let mut st = SymbolTable::new();
        st.reserve_explicit("x v0");
        let t = parse_lambda("x v0", &mut st).unwrap();
        assert_eq!(t, app(v(n(1)), v(n(0))));
        assert_eq!(print_lambda(&t, &st), "x v0");
        // not explicit: leading zero, or no digits
        assert_eq!(explicit_index("v01"), None);
        assert_eq!(explicit_index("v"), None);
        assert_eq!(explicit_index("v12"), Some(12));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let mut st = SymbolTable::new();
        match parse_lambda("\\x x", &mut st) {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 5)),
            other => panic!("{:?}", other),
        }
        match parse_lambda("(a\n  b", &mut st) {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 4)),
            other => panic!("{:?}", other),
        }
        assert!(matches!(
            parse_lambda("a $", &mut st),
            Err(Error::Syntax { column: 3, .. })
        ));
        assert!(parse_lambda("", &mut st).is_err());
        assert!(parse_lambda("a )", &mut st).is_err());
    }

    #[test]
    fn systemf_examples() {
        let mut st = SymbolTable::new();
        let t = parse_systemf("/\\a. \\(x:a). x", &mut st).unwrap();
        assert_eq!(t, tabs(n(0), abs_t(n(1), tvar(n(0)), var(n(1)))));
        let mut st = SymbolTable::new();
        let t = parse_systemf("(/\\a. \\(x:a). x) [b]", &mut st).unwrap();
        assert_eq!(t, tapp(tabs(n(0), abs_t(n(1), tvar(n(0)), var(n(1)))), tvar(n(2))));
        assert_eq!(print_systemf(&t, &st), "(/\\a. \\(x:a). x) [b]");
    }

    #[test]
    fn systemf_types() {
        let mut st = SymbolTable::new();
        let t = parse_systemf_type("forall a. a -> a", &mut st).unwrap();
        assert_eq!(print_systemf_type(&t, &st), "forall a. a -> a");
        let t = parse_systemf_type("(a -> b) -> c", &mut st).unwrap();
        assert_eq!(print_systemf_type(&t, &st), "(a -> b) -> c");
        let t = parse_systemf_type("∀a b. a → b", &mut st).unwrap();
        assert_eq!(print_systemf_type(&t, &st), "forall a. forall b. a -> b");
        assert!(parse_systemf_type("forall", &mut st).is_err());
    }

    #[test]
    fn signature_examples() {
        let sig = parse_signature("(sorts tm)(code Lam (sum (var tm) (sum (prod rec rec) (bind tm rec))))(entry Lam)")
            .unwrap();
        assert_eq!(**sig.entry_code(), *lambda::lam_code());

        let sig = parse_signature("(code Nat (sum unit rec))").unwrap();
        let mut st = SymbolTable::new();
        let one = parse_generic_term(sig.entry_code(), "(mu (inr (mu (inl unit))))", &mut st).unwrap();
        assert_eq!(one.size(), 2);
        assert_eq!(print_generic(&one, &st), "(mu (inr (mu (inl unit))))");

        assert_eq!(
            parse_signature("(code A (emb B))(code B (emb A))").unwrap_err(),
            Error::EmbeddingCycle("A".into())
        );
        assert_eq!(
            parse_signature("(code A (emb C))").unwrap_err(),
            Error::UnresolvedCode("C".into())
        );
        assert!(matches!(
            parse_signature("(sorts tm)(code A (var ty))"),
            Err(Error::Signature(_))
        ));
    }

    #[test]
    fn generic_shape_errors_report_paths() {
        let sig = parse_signature("(code Nat (sum unit rec))").unwrap();
        let mut st = SymbolTable::new();
        let err = parse_generic_term(sig.entry_code(), "(mu (inr (mu (pair unit unit))))", &mut st).unwrap_err();
        assert_eq!(
            err,
            Error::Shape {
                path: "$/mu/inr/mu".into(),
                message: "expected `(inl ...)` or `(inr ...)`".into()
            }
        );
    }

    #[test]
    fn generic_terms_with_embeddings_and_prims() {
        let sig = parse_signature(
            "(code Nat (sum unit rec))
             (code NatList (sum unit (prod (emb Nat) rec)))
             (code Tagged (prod (prim text) (prod (prim nat) (prim bool))))",
        )
        .unwrap();
        let mut st = SymbolTable::new();
        let list = sig.code("NatList").unwrap();
        let text = "(mu (inr (pair (emb (mu (inl unit))) (mu (inl unit)))))";
        let t = parse_generic_term(list, text, &mut st).unwrap();
        assert_eq!(print_generic(&t, &st), text);
        let tagged = sig.code("Tagged").unwrap();
        let text = "(mu (pair (prim \"a b\") (pair (prim 3) (prim true))))";
        let t = parse_generic_term(tagged, text, &mut st).unwrap();
        assert_eq!(print_generic(&t, &st), text);
        assert!(parse_generic_term(tagged, "(mu (pair (prim 3) (pair (prim 3) (prim true))))", &mut st).is_err());
    }

    #[test]
    fn generic_variables_check_sorts() {
        let mut st = SymbolTable::new();
        let t = parse_generic_term(
            &lambda::lam_code(),
            "(mu (inr (inr (bind tm x (mu (inl (var tm x)))))))",
            &mut st,
        )
        .unwrap();
        assert_eq!(t, lam(n(0), v(n(0))));
        let err = parse_generic_term(&lambda::lam_code(), "(mu (inl (var ty x)))", &mut st).unwrap_err();
        assert!(matches!(err, Error::Shape { .. }));
    }
}
