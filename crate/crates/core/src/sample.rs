//! Seeded random coefficient expressions and forms over the symbols `f`, `g`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::exterior::{Basis, Form};
use crate::scalar::{rat, ExpArg, ScalarExpr, SmallSymbol, SymbolTable};

/// Symbols used by the generators, both time-dependent and real.
pub fn symbols() -> [SmallSymbol; 2] {
    [SmallSymbol::real("f"), SmallSymbol::real("g")]
}

pub fn symbol_table() -> SymbolTable {
    let [f, g] = symbols();
    SymbolTable::new().with(f).with(g)
}

/// Shape limits for generated expressions.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_terms: usize,
    /// Upper bound on derivative factors per monomial (the star grade).
    pub max_factors: usize,
    pub max_order: usize,
    pub max_exp: i64,
}

impl Default for Shape {
    fn default() -> Self {
        Self { max_terms: 3, max_factors: 2, max_order: 2, max_exp: 2 }
    }
}

impl Shape {
    /// Coefficients whose monomials carry at most one derivative factor.
    pub fn low_grade() -> Self {
        Self { max_factors: 1, ..Self::default() }
    }
}

fn monomial<R: Rng>(rng: &mut R, shape: &Shape) -> ScalarExpr {
    let syms = symbols();
    let num = rng.gen_range(-4i64..=4);
    let den = rng.gen_range(1i64..=3);
    let mut out = ScalarExpr::ratio(if num == 0 { 1 } else { num }, den);
    for _ in 0..rng.gen_range(0..=shape.max_factors) {
        let s = syms.choose(rng).expect("nonempty");
        let order = rng.gen_range(0..=shape.max_order);
        let idx: Vec<u8> = (0..order).map(|_| rng.gen_range(0u8..4)).collect();
        out = out.times(&ScalarExpr::deriv(s, &idx));
    }
    let mut arg = ExpArg::one();
    for s in &syms {
        let a = rng.gen_range(-shape.max_exp..=shape.max_exp);
        if a != 0 {
            arg.add_term(s, rat(a, 1));
        }
    }
    out.times(&ScalarExpr::exp(arg))
}

pub fn scalar<R: Rng>(rng: &mut R, shape: &Shape) -> ScalarExpr {
    (0..rng.gen_range(1..=shape.max_terms)).fold(ScalarExpr::zero(), |acc, _| acc + monomial(rng, shape))
}

/// Random form of the given degree: up to three basis monomials with random coefficients.
pub fn form<R: Rng>(rng: &mut R, basis: Basis, degree: usize, shape: &Shape) -> Form {
    let mut out = Form::zero(basis, degree);
    for _ in 0..rng.gen_range(1..=3) {
        let mut idx: Vec<u8> = vec![0, 1, 2, 3];
        idx.shuffle(rng);
        idx.truncate(degree);
        out = out + Form::monomial(basis, &idx, scalar(rng, shape));
    }
    out
}
