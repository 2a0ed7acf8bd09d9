//! Parser for the plain-text form notation.
//!
//! Grammar (whitespace-insensitive):
//! ```text
//! sum     := ['+'|'-'] product (('+'|'-') product)*
//! product := factor (['*' | '/\'] factor)*        juxtaposition also multiplies
//! factor  := rational | 'i' | '(' sum ')' | '[' sum ']'
//!          | 'e^{' exparg '}' | 'Phi^' idx | 'dx^' idx
//!          | name ['_{' ('|' index)+ '}']
//! ```
//! Products of forms are wedges. A lowercase index letter (`i j k l m n`) is
//! summed over `1..=3` at the outermost product that contains it; terms of an
//! inner sum that mentions the letter elsewhere but not in the term itself are
//! counted once.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::{Basis, Form};
use crate::scalar::{imag_unit, rat, ExpArg, ScalarExpr, SymbolTable};

const INDEX_LETTERS: &str = "ijklmn";

#[derive(Clone, Debug, PartialEq)]
enum Idx {
    Fixed(u8),
    Var(char),
}

#[derive(Clone, Debug)]
enum Ast {
    Num(Rational64),
    Imag,
    Sym { name: String, index: Vec<Idx> },
    Exp(Vec<(Rational64, String)>),
    Basis { basis: Basis, index: Vec<Idx> },
    Sum(Vec<(bool, Ast)>),
    Prod(Vec<Ast>),
}

impl Ast {
    fn vars(&self, out: &mut BTreeSet<char>) {
        let mut push = |ix: &[Idx]| {
            for i in ix {
                if let Idx::Var(c) = i {
                    out.insert(*c);
                }
            }
        };
        match self {
            Ast::Sym { index, .. } | Ast::Basis { index, .. } => push(index),
            Ast::Sum(items) => items.iter().for_each(|(_, a)| a.vars(out)),
            Ast::Prod(items) => items.iter().for_each(|a| a.vars(out)),
            _ => {}
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse().or_else(|_| self.err("expected an integer"))
    }

    fn rational(&mut self) -> Result<Rational64> {
        let n = self.integer()?;
        // `/\` is a wedge, not a fraction
        if self.peek() == Some(b'/') && self.src.get(self.pos + 1) != Some(&b'\\') {
            self.pos += 1;
            let d = self.integer()?;
            if d == 0 {
                return self.err("zero denominator");
            }
            return Ok(rat(n, d));
        }
        Ok(Rational64::from_integer(n))
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn index_char(&mut self) -> Result<Idx> {
        let Some(c) = self.src.get(self.pos).copied() else { return self.err("expected an index") };
        self.pos += 1;
        match c {
            b'0'..=b'3' => Ok(Idx::Fixed(c - b'0')),
            c if INDEX_LETTERS.contains(c as char) => Ok(Idx::Var(c as char)),
            _ => {
                self.pos -= 1;
                self.err(format!("invalid index `{}`", c as char))
            }
        }
    }

    /// `0`, `j` or `{0123}`.
    fn basis_index(&mut self) -> Result<Vec<Idx>> {
        self.skip_ws();
        if self.eat("{") {
            let mut out = Vec::new();
            while self.peek() != Some(b'}') {
                self.skip_ws();
                out.push(self.index_char()?);
            }
            self.expect("}")?;
            Ok(out)
        } else {
            Ok(vec![self.index_char()?])
        }
    }

    /// `_{|1|2}` after a symbol name; absent means a bare symbol.
    fn deriv_index(&mut self) -> Result<Vec<Idx>> {
        if !self.src[self.pos..].starts_with(b"_{") {
            return Ok(Vec::new());
        }
        self.pos += 2;
        let mut out = Vec::new();
        while self.eat("|") {
            self.skip_ws();
            out.push(self.index_char()?);
        }
        self.expect("}")?;
        if out.is_empty() {
            return self.err("empty derivative index");
        }
        Ok(out)
    }

    fn exparg(&mut self) -> Result<Vec<(Rational64, String)>> {
        let mut out = Vec::new();
        let mut first = true;
        while self.peek() != Some(b'}') {
            let mut sign = Rational64::from_integer(1);
            if self.eat("-") {
                sign = -sign;
            } else if !self.eat("+") && !first {
                return self.err("expected `+` or `-` in exponent");
            }
            let c = if self.peek().is_some_and(|c| c.is_ascii_digit()) { self.rational()? } else { rat(1, 1) };
            let name = self.ident();
            if name.is_empty() {
                return self.err("expected a symbol in exponent");
            }
            out.push((sign * c, name));
            first = false;
        }
        Ok(out)
    }

    fn starts_factor(&mut self) -> bool {
        match self.peek() {
            Some(c) => c.is_ascii_alphanumeric() || c == b'(' || c == b'[',
            None => false,
        }
    }

    fn factor(&mut self) -> Result<Ast> {
        let c = match self.peek() {
            Some(c) => c,
            None => return self.err("unexpected end of input"),
        };
        if c.is_ascii_digit() {
            return Ok(Ast::Num(self.rational()?));
        }
        if self.eat("(") {
            let s = self.sum()?;
            self.expect(")")?;
            return Ok(s);
        }
        if self.eat("[") {
            let s = self.sum()?;
            self.expect("]")?;
            return Ok(s);
        }
        if self.eat("e^{") {
            let arg = self.exparg()?;
            self.expect("}")?;
            return Ok(Ast::Exp(arg));
        }
        let save = self.pos;
        let name = self.ident();
        if name.is_empty() {
            return self.err(format!("unexpected `{}`", c as char));
        }
        match name.as_str() {
            "Phi" | "dx" if self.src.get(self.pos) == Some(&b'^') => {
                self.pos += 1;
                let basis = if name == "Phi" { Basis::Frame } else { Basis::Coordinate };
                Ok(Ast::Basis { basis, index: self.basis_index()? })
            }
            "i" => Ok(Ast::Imag),
            _ => {
                if name.as_bytes()[0].is_ascii_digit() {
                    self.pos = save;
                    return self.err("identifier cannot start with a digit");
                }
                Ok(Ast::Sym { index: self.deriv_index()?, name })
            }
        }
    }

    fn product(&mut self) -> Result<Ast> {
        let mut items = vec![self.factor()?];
        loop {
            if self.eat("/\\") || self.eat("*") || self.starts_factor() {
                items.push(self.factor()?);
            } else {
                return Ok(Ast::Prod(items));
            }
        }
    }

    fn sum(&mut self) -> Result<Ast> {
        let mut items = Vec::new();
        let mut neg = self.eat("-");
        if !neg {
            self.eat("+");
        }
        loop {
            items.push((neg, self.product()?));
            if self.eat("+") {
                neg = false;
            } else if self.eat("-") {
                neg = true;
            } else {
                return Ok(Ast::Sum(items));
            }
        }
    }
}

fn resolve(ix: &[Idx], env: &BTreeMap<char, u8>) -> Result<Vec<u8>> {
    ix.iter()
        .map(|i| match i {
            Idx::Fixed(v) => Ok(*v),
            Idx::Var(c) => {
                env.get(c).copied().ok_or_else(|| Error::Parse { pos: 0, msg: format!("unbound index `{c}`") })
            }
        })
        .collect()
}

struct Evaluator<'a> {
    table: &'a SymbolTable,
}

impl Evaluator<'_> {
    fn symbol(&self, name: &str) -> Result<crate::scalar::SmallSymbol> {
        self.table.get(name).cloned().ok_or_else(|| Error::Parse { pos: 0, msg: format!("undeclared symbol `{name}`") })
    }

    fn eval(&self, ast: &Ast, env: &BTreeMap<char, u8>) -> Result<Form> {
        match ast {
            Ast::Num(r) => Ok(Form::scalar(ScalarExpr::constant(num_complex::Complex::new(*r, Rational64::zero())))),
            Ast::Imag => Ok(Form::scalar(ScalarExpr::constant(imag_unit()))),
            Ast::Sym { name, index } => {
                let s = self.symbol(name)?;
                let idx = resolve(index, env)?;
                Ok(Form::scalar(ScalarExpr::deriv(&s, &idx)))
            }
            Ast::Exp(terms) => {
                let mut arg = ExpArg::one();
                for (c, name) in terms {
                    arg.add_term(&self.symbol(name)?, *c);
                }
                Ok(Form::scalar(ScalarExpr::exp(arg)))
            }
            Ast::Basis { basis, index } => Ok(Form::basis_element(*basis, &resolve(index, env)?)),
            Ast::Sum(items) => {
                let mut here = BTreeSet::new();
                ast.vars(&mut here);
                let mut acc: Option<Form> = None;
                for (neg, a) in items {
                    let mut vars = BTreeSet::new();
                    a.vars(&mut vars);
                    if env.iter().any(|(c, v)| *v != 1 && here.contains(c) && !vars.contains(c)) {
                        continue;
                    }
                    let mut v = self.eval(a, env)?;
                    if *neg {
                        v = -v;
                    }
                    acc = Some(match acc {
                        None => v,
                        Some(prev) => prev.try_add(&v)?,
                    });
                }
                Ok(acc.unwrap_or_else(|| Form::scalar(ScalarExpr::zero())))
            }
            Ast::Prod(items) => {
                let mut free = BTreeSet::new();
                ast.vars(&mut free);
                let free: Vec<char> = free.into_iter().filter(|c| !env.contains_key(c)).collect();
                let mut total: Option<Form> = None;
                let combos = 3usize.pow(free.len() as u32);
                for n in 0..combos {
                    let mut local = env.clone();
                    let mut k = n;
                    for c in &free {
                        local.insert(*c, (k % 3) as u8 + 1);
                        k /= 3;
                    }
                    let mut acc = Form::scalar(ScalarExpr::one());
                    for a in items {
                        acc = acc.wedge(&self.eval(a, &local)?)?;
                    }
                    total = Some(match total {
                        None => acc,
                        Some(prev) => prev.try_add(&acc)?,
                    });
                }
                Ok(total.expect("at least one assignment"))
            }
        }
    }
}

/// Parses a form (a 0-form for plain scalar expressions).
pub fn parse_form(text: &str, table: &SymbolTable) -> Result<Form> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let ast = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("trailing input");
    }
    Evaluator { table }.eval(&ast, &BTreeMap::new())
}

/// Parses a scalar expression; rejects forms of positive degree.
pub fn parse_scalar(text: &str, table: &SymbolTable) -> Result<ScalarExpr> {
    let f = parse_form(text, table)?;
    if f.degree() != 0 {
        return Err(Error::Parse { pos: 0, msg: format!("expected a scalar, found a {}-form", f.degree()) });
    }
    Ok(f.coefficient(&[]))
}
