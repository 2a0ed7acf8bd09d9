//! Hyperbolic star, frame star with the grade exemption, Laplacians, codifferential
//! and Lagrangian, plus their first-order truncations.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exterior::{sort_sign, Basis, Form, Frame, ETA};
use crate::scalar::{rat, ScalarExpr};

/// Multipliers and sign rule for the frame star.
#[derive(Clone, Debug, PartialEq)]
pub struct StarConvention {
    /// Multiplier per source index set; missing entries are 1.
    pub mu: BTreeMap<Vec<u8>, Rational64>,
    /// Adds `*Phi^{123} = -3 Phi^0`.
    pub three_form_override: bool,
    /// Coefficient monomials of at least this grade skip the `(-1)^l` sign.
    pub grade_exemption_threshold: usize,
}

impl Default for StarConvention {
    fn default() -> Self {
        Self { mu: BTreeMap::from([(vec![0], rat(-1, 3))]), three_form_override: false, grade_exemption_threshold: 2 }
    }
}

impl StarConvention {
    /// All multipliers 1; the plain sign rule with the grade exemption.
    pub fn plain() -> Self {
        Self { mu: BTreeMap::new(), ..Self::default() }
    }

    pub fn with_three_form_override(mut self) -> Self {
        self.three_form_override = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu.values().any(|m| *m == Rational64::from_integer(0)) {
            return Err(Error::Config("star multipliers must be nonzero".into()));
        }
        Ok(())
    }

    pub fn multiplier(&self, idx: &[u8]) -> Rational64 {
        if self.three_form_override && idx == [1, 2, 3] {
            return rat(-3, 1);
        }
        self.mu.get(idx).copied().unwrap_or_else(Rational64::one)
    }
}

/// `(complement, parity sign, l-sign)` for a sorted index set.
fn star_signs(idx: &[u8]) -> (Vec<u8>, i64, i64) {
    let comp: Vec<u8> = (0..4).filter(|i| !idx.contains(i)).collect();
    let perm: Vec<u8> = idx.iter().chain(&comp).copied().collect();
    let (parity, _) = sort_sign(&perm).expect("permutation of 0..4");
    let l = if comp.contains(&0) { -1 } else { 1 };
    (comp, parity, l)
}

/// Hyperbolic star on a coordinate-basis form.
pub fn star(a: &Form) -> Result<Form> {
    if a.degree() > 0 && a.basis() != Basis::Coordinate {
        return Err(Error::MixedBasis);
    }
    let mut out = Form::zero(Basis::Coordinate, 4usize.saturating_sub(a.degree()));
    for (k, c) in a.terms() {
        let (comp, parity, l) = star_signs(k.indices());
        out = out.try_add(&Form::monomial(Basis::Coordinate, &comp, c.scale_rat(rat(parity * l, 1))))?;
    }
    Ok(out)
}

/// Frame star: parity sign on every coefficient monomial, `(-1)^l` only below the grade threshold.
pub fn star_frame(a: &Form, conv: &StarConvention) -> Result<Form> {
    if a.degree() > 0 && a.basis() != Basis::Frame {
        return Err(Error::MixedBasis);
    }
    let mut out = Form::zero(Basis::Frame, 4usize.saturating_sub(a.degree()));
    for (k, c) in a.terms() {
        let (comp, parity, l) = star_signs(k.indices());
        let mu = conv.multiplier(k.indices());
        let coeff = ScalarExpr::from_monomials(c.monomials().map(|mut m| {
            let sign = if m.grade() < conv.grade_exemption_threshold { parity * l } else { parity };
            m.coeff *= num_complex::Complex::new(mu * Rational64::from_integer(sign), Rational64::from_integer(0));
            m
        }));
        out = out.try_add(&Form::monomial(Basis::Frame, &comp, coeff))?;
    }
    Ok(out)
}

/// `d * d * + * d * d` in coordinates.
pub fn box_op(a: &Form) -> Result<Form> {
    let first = star(&star(a)?.d()?)?.d()?;
    let second = star(&star(&a.d()?)?.d()?)?;
    first.try_add(&second)
}

/// `d *_Phi d *_Phi + *_Phi d *_Phi d` with `d` taken through the frame.
pub fn box_frame(a: &Form, fr: &Frame, conv: &StarConvention) -> Result<Form> {
    let s = |x: &Form| star_frame(x, conv);
    let first = fr.d(&s(&fr.d(&s(a)?)?)?)?;
    let second = s(&fr.d(&s(&fr.d(a)?)?)?)?;
    first.try_add(&second)
}

/// `*_Phi d *_Phi`.
pub fn delta_frame(a: &Form, fr: &Frame, conv: &StarConvention) -> Result<Form> {
    star_frame(&fr.d(&star_frame(a, conv)?)?, conv)
}

/// `eta_ab (dPhi^a ^ dPhi^b + deltaPhi^a deltaPhi^b Phi^{0123})`, in the frame basis.
pub fn lagrangian(fr: &Frame, conv: &StarConvention) -> Result<Form> {
    let volume = Form::phi(&[0, 1, 2, 3]);
    let mut out = Form::zero(Basis::Frame, 4);
    for a in 0..4u8 {
        let leg = Form::phi(&[a]);
        let d_leg = fr.d(&leg)?;
        let delta = delta_frame(&leg, fr, conv)?.coefficient(&[]);
        let term = d_leg.wedge(&d_leg)?.try_add(&volume.scale(&delta.times(&delta)))?;
        out = out.try_add(&term.scale(&ScalarExpr::int(ETA[a as usize])))?;
    }
    Ok(out)
}

/// Frame star followed by first-order truncation.
pub fn linear_star(a: &Form, conv: &StarConvention) -> Result<Form> {
    Ok(star_frame(&a.linearize(), conv)?.linearize())
}

/// Frame Laplacian with every star and `d` stage truncated to first order.
pub fn linear_box_frame(a: &Form, fr: &Frame, conv: &StarConvention) -> Result<Form> {
    let s = |x: &Form| linear_star(x, conv);
    let d = |x: &Form| fr.d_linear(x);
    let first = d(&s(&d(&s(a)?)?)?)?;
    let second = s(&d(&s(&d(a)?)?)?)?;
    Ok(first.try_add(&second)?.linearize())
}
