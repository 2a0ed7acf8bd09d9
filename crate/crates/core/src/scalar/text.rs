//! Plain-text and LaTeX rendering in bar-index notation (`f_{|1|2}`).

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use super::{Coeff, DerivFactor, ExpArg, Monomial, ScalarExpr, SmallSymbol, SymbolKind};
use crate::error::{Error, Result};

/// Symbols known to the parser, keyed by name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymbolTable {
    symbols: BTreeMap<String, SmallSymbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, s: SmallSymbol) -> Self {
        self.insert(s);
        self
    }

    pub fn insert(&mut self, s: SmallSymbol) {
        self.symbols.insert(s.name().to_string(), s);
    }

    pub fn get(&self, name: &str) -> Option<&SmallSymbol> {
        self.symbols.get(name)
    }

    /// Parse declarations like `f:real:static g:imaginary A0:imaginary:dynamic`.
    pub fn from_decl(decl: &str) -> Result<Self> {
        let mut table = Self::new();
        for item in decl.split_whitespace() {
            let mut parts = item.split(':');
            let name = parts.next().unwrap_or_default();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric()) {
                return Err(Error::Config(format!("bad symbol name in `{item}`")));
            }
            let kind = match parts.next().unwrap_or("real") {
                "real" => SymbolKind::Real,
                "imaginary" => SymbolKind::Imaginary,
                "complex" => SymbolKind::Complex,
                other => return Err(Error::Config(format!("unknown symbol kind `{other}`"))),
            };
            let stationary = match parts.next().unwrap_or("dynamic") {
                "static" => true,
                "dynamic" => false,
                other => return Err(Error::Config(format!("unknown dependence `{other}`"))),
            };
            table.insert(SmallSymbol::new(name, kind, stationary));
        }
        Ok(table)
    }
}

fn fmt_rational(r: &Rational64, latex: bool) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else if latex {
        let sign = if r.is_negative() { "-" } else { "" };
        format!("{sign}\\frac{{{}}}{{{}}}", r.numer().abs(), r.denom())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders the magnitude part of a coefficient and reports whether a leading minus was split off.
fn fmt_coeff(c: &Coeff, latex: bool) -> (bool, String) {
    if c.im.is_zero() {
        (c.re.is_negative(), fmt_rational(&c.re.abs(), latex))
    } else if c.re.is_zero() {
        let mag = c.im.abs();
        let body = if mag.is_one() { "i".to_string() } else { format!("{}i", fmt_rational(&mag, latex)) };
        (c.im.is_negative(), body)
    } else {
        let im_sign = if c.im.is_negative() { "-" } else { "+" };
        let im = c.im.abs();
        let im_txt = if im.is_one() { "i".to_string() } else { format!("{}i", fmt_rational(&im, latex)) };
        (false, format!("({}{}{})", fmt_rational(&c.re, latex), im_sign, im_txt))
    }
}

fn fmt_factor(f: &DerivFactor, latex: bool) -> String {
    let name = if latex { latex_name(f.symbol.name()) } else { f.symbol.name().to_string() };
    if f.is_bare() {
        return name;
    }
    let idx: String = f.index().iter().map(|i| format!("|{i}")).collect();
    format!("{name}_{{{idx}}}")
}

fn latex_name(name: &str) -> String {
    // A0 -> A^0 style superscripts for trailing digits
    let split = name.find(|c: char| c.is_ascii_digit());
    match split {
        Some(p) if p > 0 => format!("{}^{{{}}}", &name[..p], &name[p..]),
        _ => name.to_string(),
    }
}

fn fmt_exp(arg: &ExpArg, latex: bool) -> String {
    let mut s = String::new();
    for (i, (sym, a)) in arg.terms().enumerate() {
        let neg = a.is_negative();
        if neg {
            s.push('-');
        } else if i > 0 {
            s.push('+');
        }
        let mag = a.abs();
        if !mag.is_one() {
            s.push_str(&fmt_rational(&mag, latex));
        }
        s.push_str(&if latex { latex_name(sym.name()) } else { sym.name().to_string() });
    }
    format!("e^{{{s}}}")
}

/// One monomial without its sign; returns (negative, body).
pub(crate) fn fmt_monomial(m: &Monomial, latex: bool) -> (bool, String) {
    let (neg, c) = fmt_coeff(&m.coeff, latex);
    let mut parts: Vec<String> = m.key.factors().iter().map(|f| fmt_factor(f, latex)).collect();
    if !m.key.exp().is_trivial() {
        parts.push(fmt_exp(m.key.exp(), latex));
    }
    let sep = if latex { "" } else { " " };
    let body = parts.join(sep);
    let unit = m.coeff.im.is_zero() && m.coeff.re.abs().is_one();
    let text = match (body.is_empty(), unit) {
        (true, _) => c,
        (false, true) => body,
        (false, false) => format!("{c}{sep}{body}"),
    };
    (neg, text)
}

pub(crate) fn render_scalar(e: &ScalarExpr, latex: bool) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, m) in e.monomials().enumerate() {
        let (neg, body) = fmt_monomial(&m, latex);
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn renders_bar_index_notation() {
        let f = SmallSymbol::stationary("f");
        let g = SmallSymbol::stationary("g");
        let e = (ScalarExpr::deriv(&g, &[2, 1]).scale_rat(rat(-1, 1))
            + ScalarExpr::deriv(&g, &[2]) * ScalarExpr::deriv(&f, &[1]))
            * ScalarExpr::exp_of(&g, rat(-2, 1));
        assert_eq!(e.render(), "f_{|1} g_{|2} e^{-2g} - g_{|1|2} e^{-2g}");
        assert_eq!(e.render_latex(), "f_{|1}g_{|2}e^{-2g} - g_{|1|2}e^{-2g}");
    }

    #[test]
    fn renders_complex_coefficients() {
        let c = Coeff::new(rat(1, 2), rat(-3, 1));
        assert_eq!(ScalarExpr::constant(c).render(), "(1/2-3i)");
        assert_eq!(ScalarExpr::ratio(-1, 3).render_latex(), "-\\frac{1}{3}");
    }

    #[test]
    fn symbol_declarations() {
        let t = SymbolTable::from_decl("f:real:static A0:imaginary").unwrap();
        assert!(t.get("f").unwrap().is_stationary());
        assert_eq!(t.get("A0").unwrap().kind(), SymbolKind::Imaginary);
        assert!(SymbolTable::from_decl("x:weird").is_err());
    }
}
