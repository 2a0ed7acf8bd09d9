//! Exact coefficient algebra.
//!
//! A [`ScalarExpr`] is a finite sum of monomials
//! `c * (product of derivative factors) * exp(sum a_s s)` where `c` is a
//! complex number with rational parts and the factors are partial derivatives
//! of formal "small" functions. The representation is kept in a unique normal
//! form, so structural equality decides equality inside this fragment.

mod eval;
mod rewrite;
mod text;

pub use eval::{Backend, Family, FunctionBackend, Trajectory};
pub use rewrite::Rewrite;
pub(crate) use text::fmt_monomial;
pub use text::SymbolTable;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact complex rational.
pub type Coeff = Complex<Rational64>;

pub fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

pub fn coeff(n: i64, d: i64) -> Coeff {
    Complex::new(rat(n, d), Rational64::zero())
}

pub fn imag_unit() -> Coeff {
    Complex::new(Rational64::zero(), Rational64::one())
}

/// Whether a small function takes real, purely imaginary or general complex values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Real,
    Imaginary,
    Complex,
}

/// A formal small function of the four coordinates.
///
/// Stationary symbols do not depend on `x^0`; their time derivatives vanish.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SmallSymbol {
    name: Arc<str>,
    kind: SymbolKind,
    stationary: bool,
}

impl SmallSymbol {
    pub fn new(name: &str, kind: SymbolKind, stationary: bool) -> Self {
        Self { name: Arc::from(name), kind, stationary }
    }

    pub fn real(name: &str) -> Self {
        Self::new(name, SymbolKind::Real, false)
    }

    pub fn stationary(name: &str) -> Self {
        Self::new(name, SymbolKind::Real, true)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    pub fn with_kind(&self, kind: SymbolKind) -> Self {
        Self { kind, ..self.clone() }
    }
}

impl fmt::Display for SmallSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// `symbol_{|i|j|...}`; an empty index list is the bare symbol itself.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DerivFactor {
    pub symbol: SmallSymbol,
    index: Vec<u8>,
}

impl DerivFactor {
    pub fn new(symbol: SmallSymbol, mut index: Vec<u8>) -> Self {
        index.sort_unstable();
        Self { symbol, index }
    }

    pub fn index(&self) -> &[u8] {
        &self.index
    }

    pub fn is_bare(&self) -> bool {
        self.index.is_empty()
    }

    /// Derivative along `dir`, or `None` when it vanishes identically.
    fn differentiate(&self, dir: u8) -> Option<DerivFactor> {
        if dir == 0 && self.symbol.stationary {
            return None;
        }
        let mut index = self.index.clone();
        index.push(dir);
        Some(DerivFactor::new(self.symbol.clone(), index))
    }
}

/// Argument of the exponential factor: a rational combination of bare symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpArg {
    terms: BTreeMap<SmallSymbol, Rational64>,
}

impl ExpArg {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn of(symbol: &SmallSymbol, a: Rational64) -> Self {
        let mut e = Self::default();
        e.add_term(symbol, a);
        e
    }

    pub fn add_term(&mut self, symbol: &SmallSymbol, a: Rational64) {
        let entry = self.terms.entry(symbol.clone()).or_insert_with(Rational64::zero);
        *entry += a;
        if entry.is_zero() {
            self.terms.remove(symbol);
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SmallSymbol, &Rational64)> {
        self.terms.iter()
    }

    fn plus(&self, other: &ExpArg) -> ExpArg {
        let mut out = self.clone();
        for (s, a) in &other.terms {
            out.add_term(s, *a);
        }
        out
    }
}

/// Canonical key of a monomial: sorted factor multiset and exponential argument.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonoKey {
    factors: Vec<DerivFactor>,
    exp: ExpArg,
}

impl MonoKey {
    pub fn new(mut factors: Vec<DerivFactor>, exp: ExpArg) -> Self {
        factors.sort();
        Self { factors, exp }
    }

    pub fn factors(&self) -> &[DerivFactor] {
        &self.factors
    }

    pub fn exp(&self) -> &ExpArg {
        &self.exp
    }

    fn times(&self, other: &MonoKey) -> MonoKey {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        MonoKey::new(factors, self.exp.plus(&other.exp))
    }
}

/// A single term `coeff * key`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: Coeff,
    pub key: MonoKey,
}

impl Monomial {
    /// Smallness grade: number of derivative factors counted with
    /// multiplicity. Bare symbols do not count here.
    pub fn grade(&self) -> usize {
        self.key.factors.iter().filter(|f| !f.is_bare()).count()
    }

    /// Grade used by the linearization operator, where bare symbols are small too.
    pub fn linear_grade(&self) -> usize {
        self.key.factors.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial { coeff: self.coeff * other.coeff, key: self.key.times(&other.key) }
    }
}

/// Exact sum of monomials in normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ScalarExpr {
    terms: BTreeMap<MonoKey, Coeff>,
}

impl ScalarExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Self::from_monomial(c, MonoKey::default())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(coeff(n, 1))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::constant(coeff(n, d))
    }

    pub fn from_monomial(c: Coeff, key: MonoKey) -> Self {
        let mut e = Self::zero();
        e.add_monomial(c, key);
        e
    }

    /// The bare symbol `s`.
    pub fn symbol(s: &SmallSymbol) -> Self {
        Self::deriv(s, &[])
    }

    /// `s_{|i|j|...}`. Time derivatives of stationary symbols are zero.
    pub fn deriv(s: &SmallSymbol, index: &[u8]) -> Self {
        if s.stationary && index.contains(&0) {
            return Self::zero();
        }
        let f = DerivFactor::new(s.clone(), index.to_vec());
        Self::from_monomial(Coeff::one(), MonoKey::new(vec![f], ExpArg::one()))
    }

    /// `exp(a * s)`.
    pub fn exp_of(s: &SmallSymbol, a: Rational64) -> Self {
        Self::exp(ExpArg::of(s, a))
    }

    pub fn exp(arg: ExpArg) -> Self {
        Self::from_monomial(Coeff::one(), MonoKey::new(vec![], arg))
    }

    pub fn add_monomial(&mut self, c: Coeff, key: MonoKey) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(k, c)| Monomial { coeff: *c, key: k.clone() })
    }

    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(iter: I) -> Self {
        let mut e = Self::zero();
        for m in iter {
            e.add_monomial(m.coeff, m.key);
        }
        e
    }

    /// Constant value when the expression has no symbolic content.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (k, c) = self.terms.iter().next()?;
                (k.factors.is_empty() && k.exp.is_trivial()).then_some(*c)
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: Coeff) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn scale_rat(&self, r: Rational64) -> Self {
        self.scale(Complex::new(r, Rational64::zero()))
    }

    pub fn times(&self, other: &ScalarExpr) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_monomial(ca * cb, ka.times(kb));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> ScalarExpr {
        (0..n).fold(ScalarExpr::one(), |acc, _| acc.times(self))
    }

    /// Partial derivative along coordinate direction `dir` (0..=3), by the Leibniz rule.
    pub fn partial(&self, dir: u8) -> Result<ScalarExpr> {
        if dir > 3 {
            return Err(Error::Domain(format!("direction {dir} outside 0..3")));
        }
        let mut out = ScalarExpr::zero();
        for (key, c) in &self.terms {
            for (i, factor) in key.factors.iter().enumerate() {
                if let Some(df) = factor.differentiate(dir) {
                    let mut factors = key.factors.clone();
                    factors[i] = df;
                    out.add_monomial(*c, MonoKey::new(factors, key.exp.clone()));
                }
            }
            for (s, a) in key.exp.terms() {
                if let Some(df) = DerivFactor::new(s.clone(), vec![]).differentiate(dir) {
                    let mut factors = key.factors.clone();
                    factors.push(df);
                    let ca = c * Complex::new(*a, Rational64::zero());
                    out.add_monomial(ca, MonoKey::new(factors, key.exp.clone()));
                }
            }
        }
        Ok(out)
    }

    /// First-order truncation: every exponential becomes `1 + argument`, bare
    /// symbols count as small, and all monomials of total grade >= 2 are dropped.
    pub fn linearize(&self) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for (key, c) in &self.terms {
            let base = key.factors.len();
            if base >= 2 {
                continue;
            }
            out.add_monomial(*c, MonoKey::new(key.factors.clone(), ExpArg::one()));
            if base == 0 {
                for (s, a) in key.exp.terms() {
                    let f = DerivFactor::new(s.clone(), vec![]);
                    out.add_monomial(c * Complex::new(*a, Rational64::zero()), MonoKey::new(vec![f], ExpArg::one()));
                }
            }
        }
        out
    }

    /// Rename `from` to `to` everywhere (identifying the two functions).
    pub fn substitute_equal(&self, from: &SmallSymbol, to: &SmallSymbol) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for (key, c) in &self.terms {
            let mut factors = Vec::with_capacity(key.factors.len());
            let mut vanished = false;
            for f in &key.factors {
                if &f.symbol == from {
                    if to.stationary && f.index.contains(&0) {
                        vanished = true;
                        break;
                    }
                    factors.push(DerivFactor::new(to.clone(), f.index.clone()));
                } else {
                    factors.push(f.clone());
                }
            }
            if vanished {
                continue;
            }
            let mut exp = ExpArg::one();
            for (s, a) in key.exp.terms() {
                exp.add_term(if s == from { to } else { s }, *a);
            }
            out.add_monomial(*c, MonoKey::new(factors, exp));
        }
        out
    }

    /// Replace the bare symbol `from` by an arbitrary expression `to`
    /// (with derivatives and exponentials following). The replacement must be
    /// a rational combination of bare symbols when `from` occurs inside an
    /// exponential.
    pub fn substitute_sum(&self, from: &SmallSymbol, to: &[(SmallSymbol, Rational64)]) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for (key, c) in &self.terms {
            let mut acc = ScalarExpr::one();
            for f in &key.factors {
                let piece = if &f.symbol == from {
                    let mut p = ScalarExpr::zero();
                    for (s, a) in to {
                        p += ScalarExpr::deriv(s, &f.index).scale_rat(*a);
                    }
                    p
                } else {
                    ScalarExpr::from_monomial(Coeff::one(), MonoKey::new(vec![f.clone()], ExpArg::one()))
                };
                acc = acc.times(&piece);
            }
            let mut exp = ExpArg::one();
            for (s, a) in key.exp.terms() {
                if s == from {
                    for (t, b) in to {
                        exp.add_term(t, a * b);
                    }
                } else {
                    exp.add_term(s, *a);
                }
            }
            out += acc.times(&ScalarExpr::exp(exp)).scale(*c);
        }
        out
    }

    /// Drop every exponential factor (replace it by 1).
    pub fn strip_exponentials(&self) -> ScalarExpr {
        ScalarExpr::from_monomials(
            self.monomials().map(|m| Monomial { coeff: m.coeff, key: MonoKey::new(m.key.factors, ExpArg::one()) }),
        )
    }

    /// Keep only monomials accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> ScalarExpr {
        ScalarExpr::from_monomials(self.monomials().filter(|m| keep(m)))
    }

    /// Symbolic real part, available when every symbol is real or imaginary
    /// and no exponential carries a non-real argument.
    pub fn real_part(&self) -> Option<ScalarExpr> {
        let mut out = ScalarExpr::zero();
        for (key, c) in &self.terms {
            let mut imag_count = 0usize;
            for f in &key.factors {
                match f.symbol.kind {
                    SymbolKind::Real => {}
                    SymbolKind::Imaginary => imag_count += 1,
                    SymbolKind::Complex => return None,
                }
            }
            if key.exp.terms().any(|(s, _)| s.kind != SymbolKind::Real) {
                return None;
            }
            // monomial = c * i^k * (real part of factors); Re = Re(c i^k) * i^-k * factors
            let phase = ipow(imag_count);
            let re = Complex::new((c * phase).re, Rational64::zero());
            let back = ipow((4 - imag_count % 4) % 4);
            out.add_monomial(re * back, key.clone());
        }
        Some(out)
    }

    /// Maximal derivative order over all factors.
    pub fn max_order(&self) -> usize {
        self.terms.keys().flat_map(|k| k.factors.iter().map(|f| f.index.len())).max().unwrap_or(0)
    }

    /// All symbols occurring in the expression.
    pub fn symbols(&self) -> Vec<SmallSymbol> {
        let mut out: Vec<SmallSymbol> = Vec::new();
        for k in self.terms.keys() {
            for f in &k.factors {
                if !out.contains(&f.symbol) {
                    out.push(f.symbol.clone());
                }
            }
            for (s, _) in k.exp.terms() {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
        }
        out.sort();
        out
    }

    pub fn render(&self) -> String {
        text::render_scalar(self, false)
    }

    pub fn render_latex(&self) -> String {
        text::render_scalar(self, true)
    }
}

fn ipow(k: usize) -> Coeff {
    match k % 4 {
        0 => Coeff::one(),
        1 => imag_unit(),
        2 => -Coeff::one(),
        _ => -imag_unit(),
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for ScalarExpr {
    type Output = ScalarExpr;
    fn add(mut self, rhs: ScalarExpr) -> ScalarExpr {
        self += rhs;
        self
    }
}

impl Add<&ScalarExpr> for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &ScalarExpr) -> ScalarExpr {
        self.clone() + rhs.clone()
    }
}

impl AddAssign for ScalarExpr {
    fn add_assign(&mut self, rhs: ScalarExpr) {
        for (k, c) in rhs.terms {
            self.add_monomial(c, k);
        }
    }
}

impl Sub for ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: ScalarExpr) -> ScalarExpr {
        self + (-rhs)
    }
}

impl Sub<&ScalarExpr> for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &ScalarExpr) -> ScalarExpr {
        self.clone() - rhs.clone()
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        Self { terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect() }
    }
}

impl Mul for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::times(&self, &rhs)
    }
}

impl Mul<&ScalarExpr> for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &ScalarExpr) -> ScalarExpr {
        ScalarExpr::times(self, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> SmallSymbol {
        SmallSymbol::real("f")
    }
    fn g() -> SmallSymbol {
        SmallSymbol::real("g")
    }
    fn d(s: &SmallSymbol, idx: &[u8]) -> ScalarExpr {
        ScalarExpr::deriv(s, idx)
    }

    #[test]
    fn product_of_first_derivatives_has_grade_two() {
        let p = d(&g(), &[1]) * d(&g(), &[1]);
        let m: Vec<_> = p.monomials().collect();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].grade(), 2);
    }

    #[test]
    fn exponentials_add_arguments() {
        let e = ScalarExpr::exp_of(&g(), rat(-1, 1));
        assert_eq!(&e * &e, ScalarExpr::exp_of(&g(), rat(-2, 1)));
    }

    #[test]
    fn a16_to_a17_product() {
        let lhs = (d(&f(), &[1]) - d(&g(), &[1]).scale_rat(rat(2, 1))) * ScalarExpr::exp_of(&g(), rat(-1, 1));
        let out = &lhs * &ScalarExpr::exp_of(&g(), rat(-1, 1));
        let expected = (d(&f(), &[1]) - d(&g(), &[1]).scale_rat(rat(2, 1))) * ScalarExpr::exp_of(&g(), rat(-2, 1));
        assert_eq!(out, expected);
    }

    #[test]
    fn partial_of_exponential() {
        let e = ScalarExpr::exp_of(&f(), rat(-1, 1));
        let once = e.partial(1).unwrap();
        assert_eq!(once, -(d(&f(), &[1]) * e.clone()));
        let twice = once.partial(1).unwrap();
        assert_eq!(twice, (-d(&f(), &[1, 1]) + d(&f(), &[1]) * d(&f(), &[1])) * e);
    }

    #[test]
    fn partial_of_time_derivative_term() {
        let e = d(&g(), &[0]) * ScalarExpr::exp_of(&g(), rat(3, 1));
        let out = e.partial(0).unwrap();
        let expected = (d(&g(), &[0, 0]) + (d(&g(), &[0]) * d(&g(), &[0])).scale_rat(rat(3, 1)))
            * ScalarExpr::exp_of(&g(), rat(3, 1));
        assert_eq!(out, expected);
    }

    #[test]
    fn partial_rejects_bad_direction() {
        assert!(matches!(ScalarExpr::one().partial(4), Err(Error::Domain(_))));
    }

    #[test]
    fn stationary_symbols_have_no_time_derivative() {
        let s = SmallSymbol::stationary("f");
        assert!(ScalarExpr::symbol(&s).partial(0).unwrap().is_zero());
        assert!(ScalarExpr::deriv(&s, &[1, 0]).is_zero());
    }

    #[test]
    fn grades() {
        let e2g = ScalarExpr::exp_of(&g(), rat(-2, 1));
        let g_of = |e: ScalarExpr| e.monomials().next().unwrap().grade();
        assert_eq!(g_of(d(&g(), &[1, 1]) * e2g.clone()), 1);
        assert_eq!(g_of(d(&g(), &[1]) * d(&g(), &[1]) * e2g.clone()), 2);
        assert_eq!(g_of(e2g), 0);
    }

    #[test]
    fn linearize_examples() {
        let lin = ScalarExpr::exp_of(&f(), rat(-1, 1)).linearize();
        assert_eq!(lin, ScalarExpr::one() - ScalarExpr::symbol(&f()));
        let lin = ScalarExpr::exp_of(&g(), rat(3, 1)).linearize();
        assert_eq!(lin, ScalarExpr::one() + ScalarExpr::symbol(&g()).scale_rat(rat(3, 1)));
        let quad = d(&g(), &[2]) * d(&f(), &[1]) * ScalarExpr::exp_of(&g(), rat(-2, 1));
        assert!(quad.linearize().is_zero());
        // a first-order factor times an exponential keeps only the factor
        let lin1 = (d(&g(), &[1]) * ScalarExpr::exp_of(&g(), rat(-2, 1))).linearize();
        assert_eq!(lin1, d(&g(), &[1]));
    }

    #[test]
    fn substitute_equal_examples() {
        let e = d(&f(), &[1, 2]) - d(&g(), &[1, 2]);
        assert!(e.substitute_equal(&f(), &g()).is_zero());
        let e = d(&g(), &[1]) * d(&g(), &[2]) - d(&f(), &[1]) * d(&g(), &[2]);
        assert!(e.substitute_equal(&f(), &g()).is_zero());
        assert_eq!(d(&f(), &[1]).substitute_equal(&f(), &g()), d(&g(), &[1]));
    }

    #[test]
    fn substitute_sum_expands_products_and_exponentials() {
        let a = SmallSymbol::real("a");
        let b = SmallSymbol::real("b");
        let e = d(&g(), &[1]) * d(&g(), &[1]) * ScalarExpr::exp_of(&g(), rat(-2, 1));
        let out = e.substitute_sum(&g(), &[(a.clone(), rat(1, 1)), (b.clone(), rat(1, 1))]);
        let mut arg = ExpArg::of(&a, rat(-2, 1));
        arg.add_term(&b, rat(-2, 1));
        let s = d(&a, &[1]) + d(&b, &[1]);
        assert_eq!(out, &(&s * &s) * &ScalarExpr::exp(arg));
    }

    #[test]
    fn real_part_of_imaginary_symbols() {
        let a = SmallSymbol::new("A0", SymbolKind::Imaginary, false);
        let e = ScalarExpr::one() + ScalarExpr::symbol(&a).scale_rat(rat(2, 1));
        assert_eq!(e.real_part().unwrap(), ScalarExpr::one());
        // i*A is real
        let ia = ScalarExpr::symbol(&a).scale(imag_unit());
        assert_eq!(ia.real_part().unwrap(), ia);
        let c = SmallSymbol::new("z", SymbolKind::Complex, false);
        assert!(ScalarExpr::symbol(&c).real_part().is_none());
    }

    #[test]
    fn cancellation_drops_monomials() {
        let e = d(&f(), &[1]) - d(&f(), &[1]);
        assert!(e.is_zero());
        assert_eq!(e.len(), 0);
    }
}
