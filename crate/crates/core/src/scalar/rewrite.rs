//! Named rewrite steps. These encode physical assumptions (harmonicity,
//! gauge conditions, "momentarily at rest") and are never applied implicitly.

use super::{Coeff, DerivFactor, MonoKey, ScalarExpr, SmallSymbol};
use num_traits::One;

#[derive(Clone, Debug, PartialEq)]
pub enum Rewrite {
    /// `s_{|i|i} = 0` (spatial Laplacian). Reduces every derivative factor of
    /// `s` to at most one spatial index equal to 1, a unique representative.
    Harmonic(SmallSymbol),
    /// `s1_{|1} + s2_{|2} + s3_{|3} = 0`; eliminates every `s1` derivative along 1.
    DivergenceFree([SmallSymbol; 3]),
    /// First time derivative of `s` vanishes at the instant: every factor of
    /// `s` carrying exactly one time index is zero.
    AtRest(SmallSymbol),
    /// Every time derivative of `s` is zero.
    Static(SmallSymbol),
}

impl Rewrite {
    /// Replacement for one factor, or `None` if the rule does not touch it.
    fn replace(&self, factor: &DerivFactor) -> Option<ScalarExpr> {
        let idx = factor.index();
        match self {
            Rewrite::Harmonic(s) if &factor.symbol == s => {
                let ones = idx.iter().filter(|&&i| i == 1).count();
                if ones < 2 {
                    return None;
                }
                let mut rest: Vec<u8> = idx.to_vec();
                for _ in 0..2 {
                    let pos = rest.iter().position(|&i| i == 1).unwrap();
                    rest.remove(pos);
                }
                let mut out = ScalarExpr::zero();
                for k in [2u8, 3] {
                    let mut i = rest.clone();
                    i.extend([k, k]);
                    out = out - ScalarExpr::deriv(s, &i);
                }
                Some(out)
            }
            Rewrite::DivergenceFree(sym) if factor.symbol == sym[0] => {
                let pos = idx.iter().position(|&i| i == 1)?;
                let mut rest = idx.to_vec();
                rest.remove(pos);
                let mut out = ScalarExpr::zero();
                for (k, s) in [(2u8, &sym[1]), (3u8, &sym[2])] {
                    let mut i = rest.clone();
                    i.push(k);
                    out = out - ScalarExpr::deriv(s, &i);
                }
                Some(out)
            }
            Rewrite::AtRest(s) if &factor.symbol == s => {
                (idx.iter().filter(|&&i| i == 0).count() == 1).then(ScalarExpr::zero)
            }
            Rewrite::Static(s) if &factor.symbol == s => idx.contains(&0).then(ScalarExpr::zero),
            _ => None,
        }
    }

    fn step(&self, e: &ScalarExpr) -> (ScalarExpr, bool) {
        let mut out = ScalarExpr::zero();
        let mut changed = false;
        for m in e.monomials() {
            let factors = m.key.factors();
            let hit = factors.iter().enumerate().find_map(|(i, f)| self.replace(f).map(|r| (i, r)));
            match hit {
                Some((i, replacement)) => {
                    changed = true;
                    let mut others = factors.to_vec();
                    others.remove(i);
                    let rest = ScalarExpr::from_monomial(Coeff::one(), MonoKey::new(others, m.key.exp().clone()));
                    out += rest.times(&replacement).scale(m.coeff);
                }
                None => out.add_monomial(m.coeff, m.key),
            }
        }
        (out, changed)
    }

    pub fn apply(&self, e: &ScalarExpr) -> ScalarExpr {
        let mut cur = e.clone();
        loop {
            let (next, changed) = self.step(&cur);
            if !changed {
                return next;
            }
            cur = next;
        }
    }

    pub fn apply_all(rules: &[Rewrite], e: &ScalarExpr) -> ScalarExpr {
        let mut cur = e.clone();
        loop {
            let next = rules.iter().fold(cur.clone(), |acc, r| r.apply(&acc));
            if next == cur {
                return next;
            }
            cur = next;
        }
    }
}
