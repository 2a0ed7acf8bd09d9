//! Exterior algebra over [`ScalarExpr`] coefficients in the coordinate basis
//! `dx^a` or a frame basis `Phi^a`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{fmt_monomial, ExpArg, FunctionBackend, Rewrite, ScalarExpr, SmallSymbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    Coordinate,
    Frame,
}

impl Basis {
    fn token(self, latex: bool) -> &'static str {
        match (self, latex) {
            (Basis::Coordinate, false) => "dx",
            (Basis::Coordinate, true) => "dx",
            (Basis::Frame, false) => "Phi",
            (Basis::Frame, true) => "\\Phi",
        }
    }
}

/// Sorts `idx`, returning the permutation sign, or `None` on a repeated index.
pub fn sort_sign(idx: &[u8]) -> Option<(i64, Vec<u8>)> {
    let mut inversions = 0;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            match idx[i].cmp(&idx[j]) {
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    let mut sorted = idx.to_vec();
    sorted.sort_unstable();
    Some((if inversions % 2 == 0 { 1 } else { -1 }, sorted))
}

/// Strictly increasing list of basis indices in `0..=3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WedgeMonomial {
    indices: Vec<u8>,
}

impl WedgeMonomial {
    /// Canonical monomial and sign for an arbitrary index list; `None` if it vanishes.
    pub fn new(idx: &[u8]) -> Option<(i64, Self)> {
        if idx.iter().any(|&i| i > 3) {
            return None;
        }
        sort_sign(idx).map(|(s, indices)| (s, Self { indices }))
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    /// Indices of `0..=3` not in this monomial.
    pub fn complement(&self) -> Vec<u8> {
        (0..4).filter(|i| !self.indices.contains(i)).collect()
    }
}

/// Homogeneous form: every monomial shares `degree` and `basis`; zero coefficients are dropped.
#[derive(Clone, Debug)]
pub struct Form {
    basis: Basis,
    degree: usize,
    terms: BTreeMap<WedgeMonomial, ScalarExpr>,
}

impl PartialEq for Form {
    fn eq(&self, other: &Self) -> bool {
        let basis_ok = self.basis == other.basis || self.degree == 0 || self.is_zero() && other.is_zero();
        basis_ok && self.degree == other.degree && self.terms == other.terms
    }
}

impl Form {
    pub fn zero(basis: Basis, degree: usize) -> Self {
        Self { basis, degree, terms: BTreeMap::new() }
    }

    /// A 0-form. Its basis tag is irrelevant to every operation.
    pub fn scalar(e: ScalarExpr) -> Self {
        Self::zero(Basis::Coordinate, 0).with_term(&[], e)
    }

    /// `coeff * e^{idx[0]} ^ e^{idx[1]} ^ ...`, with the sorting sign applied.
    pub fn monomial(basis: Basis, idx: &[u8], coeff: ScalarExpr) -> Self {
        Self::zero(basis, idx.len()).with_term(idx, coeff)
    }

    pub fn basis_element(basis: Basis, idx: &[u8]) -> Self {
        Self::monomial(basis, idx, ScalarExpr::one())
    }

    pub fn dx(idx: &[u8]) -> Self {
        Self::basis_element(Basis::Coordinate, idx)
    }

    pub fn phi(idx: &[u8]) -> Self {
        Self::basis_element(Basis::Frame, idx)
    }

    fn with_term(mut self, idx: &[u8], coeff: ScalarExpr) -> Self {
        self.add_term(idx, coeff);
        self
    }

    fn add_term(&mut self, idx: &[u8], coeff: ScalarExpr) {
        debug_assert_eq!(idx.len(), self.degree);
        let Some((sign, key)) = WedgeMonomial::new(idx) else { return };
        let c = if sign < 0 { -coeff } else { coeff };
        let slot = self.terms.entry(key).or_insert_with(ScalarExpr::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WedgeMonomial, &ScalarExpr)> {
        self.terms.iter()
    }

    /// Coefficient of the basis monomial `idx` (sign-adjusted for unsorted input).
    pub fn coefficient(&self, idx: &[u8]) -> ScalarExpr {
        match WedgeMonomial::new(idx) {
            Some((s, key)) => {
                let c = self.terms.get(&key).cloned().unwrap_or_else(ScalarExpr::zero);
                if s < 0 {
                    -c
                } else {
                    c
                }
            }
            None => ScalarExpr::zero(),
        }
    }

    /// Relabels the basis without touching coefficients.
    pub fn retag(&self, basis: Basis) -> Form {
        Form { basis, ..self.clone() }
    }

    pub fn map_coeffs(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Form {
        let mut out = Form::zero(self.basis, self.degree);
        for (k, c) in &self.terms {
            out.add_term(&k.indices, f(c));
        }
        out
    }

    pub fn scale(&self, s: &ScalarExpr) -> Form {
        self.map_coeffs(|c| c.times(s))
    }

    pub fn linearize(&self) -> Form {
        self.map_coeffs(ScalarExpr::linearize)
    }

    pub fn rewrite(&self, rules: &[Rewrite]) -> Form {
        self.map_coeffs(|c| Rewrite::apply_all(rules, c))
    }

    pub fn strip_exponentials(&self) -> Form {
        self.map_coeffs(ScalarExpr::strip_exponentials)
    }

    pub fn substitute_equal(&self, from: &SmallSymbol, to: &SmallSymbol) -> Form {
        self.map_coeffs(|c| c.substitute_equal(from, to))
    }

    fn check_compatible(&self, other: &Form) -> Result<Basis> {
        match (self.degree, other.degree) {
            (0, _) => Ok(other.basis),
            (_, 0) => Ok(self.basis),
            _ if self.basis == other.basis => Ok(self.basis),
            _ => Err(Error::MixedBasis),
        }
    }

    pub fn try_add(&self, other: &Form) -> Result<Form> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.degree != other.degree {
            return Err(Error::InvalidArgument(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let basis = self.check_compatible(other)?;
        let mut out = self.clone();
        out.basis = basis;
        for (k, c) in &other.terms {
            out.add_term(&k.indices, c.clone());
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        let basis = self.check_compatible(other)?;
        let degree = self.degree + other.degree;
        let mut out = Form::zero(basis, degree);
        if degree > 4 {
            return Ok(out);
        }
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let idx: Vec<u8> = ka.indices.iter().chain(&kb.indices).copied().collect();
                out.add_term(&idx, ca.times(cb));
            }
        }
        Ok(out)
    }

    /// Exterior derivative in the coordinate basis. A 4-form maps to the empty 5-form.
    pub fn d(&self) -> Result<Form> {
        if self.degree > 0 && self.basis != Basis::Coordinate {
            return Err(Error::MixedBasis);
        }
        let mut out = Form::zero(Basis::Coordinate, self.degree + 1);
        if self.degree >= 4 {
            return Ok(out);
        }
        for (k, c) in &self.terms {
            for a in 0..4u8 {
                let da = c.partial(a)?;
                if da.is_zero() {
                    continue;
                }
                let mut idx = vec![a];
                idx.extend_from_slice(&k.indices);
                out.add_term(&idx, da);
            }
        }
        Ok(out)
    }

    /// Numeric coefficient values at a point, keyed by basis monomial.
    pub fn eval<B: FunctionBackend>(&self, backend: &B, point: &[f64; 4]) -> Result<Vec<(Vec<u8>, Complex64)>> {
        self.terms.iter().map(|(k, c)| Ok((k.indices.clone(), c.eval(backend, point)?))).collect()
    }

    pub fn render(&self) -> String {
        self.render_with(false)
    }

    pub fn render_latex(&self) -> String {
        self.render_with(true)
    }

    fn render_with(&self, latex: bool) -> String {
        if self.is_zero() {
            return "0".into();
        }
        if self.degree == 0 {
            let c = &self.terms.values().next().expect("nonzero");
            return if latex { c.render_latex() } else { c.render() };
        }
        let sep = if latex { "" } else { " " };
        let mut out = String::new();
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let basis = basis_token(self.basis, &k.indices, latex);
            let monos: Vec<_> = c.monomials().collect();
            let (neg, body) = if monos.len() == 1 {
                let (neg, body) = fmt_monomial(&monos[0], latex);
                let unit = monos[0].key.factors().is_empty()
                    && monos[0].key.exp().is_trivial()
                    && monos[0].coeff.im == num_rational::Rational64::from_integer(0)
                    && (monos[0].coeff.re == num_rational::Rational64::from_integer(1)
                        || monos[0].coeff.re == num_rational::Rational64::from_integer(-1));
                if unit {
                    (neg, basis)
                } else {
                    (neg, format!("{body}{sep}{basis}"))
                }
            } else {
                let inner = if latex { c.render_latex() } else { c.render() };
                (false, format!("({inner}){sep}{basis}"))
            };
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
}

fn basis_token(basis: Basis, idx: &[u8], latex: bool) -> String {
    let t = basis.token(latex);
    if latex {
        idx.iter().map(|i| format!("{t}^{i}")).collect::<Vec<_>>().join("\\wedge ")
    } else {
        let s: String = idx.iter().map(|i| i.to_string()).collect();
        format!("{t}^{{{s}}}")
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for Form {
    type Output = Form;
    /// Panics on mismatched degree or basis; use [`Form::try_add`] to handle those.
    fn add(self, rhs: Form) -> Form {
        self.try_add(&rhs).expect("form addition")
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.map_coeffs(|c| -c.clone())
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        self + (-rhs)
    }
}

/// How the stored inverse relates to the frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseQuality {
    Exact,
    /// `Psi = I - f` for `Phi = I + f`; valid only after linearization.
    FirstOrder,
}

pub type Matrix4 = [[ScalarExpr; 4]; 4];

fn identity_matrix() -> Matrix4 {
    std::array::from_fn(|a| std::array::from_fn(|b| if a == b { ScalarExpr::one() } else { ScalarExpr::zero() }))
}

fn matmul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..4).fold(ScalarExpr::zero(), |acc, k| acc + a[i][k].times(&b[k][j])))
    })
}

/// Coframe `Phi^a = phi[a][b] dx^b` with inverse `dx^b = psi[b][a] Phi^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    phi: Matrix4,
    psi: Matrix4,
    inverse: InverseQuality,
}

pub const ETA: [i64; 4] = [-1, 1, 1, 1];

fn negate_arg(a: &ExpArg) -> ExpArg {
    let mut out = ExpArg::one();
    for (s, c) in a.terms() {
        out.add_term(s, -*c);
    }
    out
}

impl Frame {
    pub fn identity() -> Self {
        Self { phi: identity_matrix(), psi: identity_matrix(), inverse: InverseQuality::Exact }
    }

    /// `Phi^a = e^{args[a]} dx^a`, inverted exactly.
    pub fn diagonal_exp(args: [ExpArg; 4]) -> Self {
        let mut phi = identity_matrix();
        let mut psi = identity_matrix();
        for (a, arg) in args.iter().enumerate() {
            phi[a][a] = ScalarExpr::exp(arg.clone());
            psi[a][a] = ScalarExpr::exp(negate_arg(arg));
        }
        Self { phi, psi, inverse: InverseQuality::Exact }
    }

    /// `Phi^0 = e^{-f} dx^0`, `Phi^j = e^{g} dx^j`.
    pub fn stationary(f: &SmallSymbol, g: &SmallSymbol) -> Self {
        let neg_f = ExpArg::of(f, crate::scalar::rat(-1, 1));
        let pos_g = ExpArg::of(g, crate::scalar::rat(1, 1));
        Self::diagonal_exp([neg_f, pos_g.clone(), pos_g.clone(), pos_g])
    }

    /// `Phi = I + f` with first-order inverse `I - f`.
    pub fn near_identity(f: Matrix4) -> Self {
        let mut phi = identity_matrix();
        let mut psi = identity_matrix();
        for a in 0..4 {
            for b in 0..4 {
                phi[a][b] = phi[a][b].clone() + f[a][b].clone();
                psi[a][b] = psi[a][b].clone() - f[a][b].clone();
            }
        }
        Self { phi, psi, inverse: InverseQuality::FirstOrder }
    }

    /// General frame with a supplied inverse; `phi * psi` must reduce to the identity exactly.
    pub fn with_inverse(phi: Matrix4, psi: Matrix4) -> Result<Self> {
        if matmul(&phi, &psi) != identity_matrix() {
            return Err(Error::InvalidArgument("psi is not an exact inverse of phi".into()));
        }
        Ok(Self { phi, psi, inverse: InverseQuality::Exact })
    }

    pub fn phi(&self, a: usize, b: usize) -> &ScalarExpr {
        &self.phi[a][b]
    }

    pub fn psi(&self, a: usize, b: usize) -> &ScalarExpr {
        &self.psi[a][b]
    }

    pub fn inverse_quality(&self) -> InverseQuality {
        self.inverse
    }

    /// Frame with the real part of every component. Exact frames must already be real.
    pub fn real_part(&self) -> Result<Frame> {
        let mut re: Matrix4 = Default::default();
        for a in 0..4 {
            for b in 0..4 {
                re[a][b] = self.phi[a][b].real_part().ok_or_else(|| {
                    Error::InvalidArgument(format!("real part of component ({a},{b}) is not polynomial"))
                })?;
            }
        }
        if re == self.phi {
            return Ok(self.clone());
        }
        if re == identity_matrix() {
            return Ok(Frame::identity());
        }
        match self.inverse {
            InverseQuality::FirstOrder => {
                let id = identity_matrix();
                Ok(Frame::near_identity(std::array::from_fn(|a| {
                    std::array::from_fn(|b| re[a][b].clone() - id[a][b].clone())
                })))
            }
            InverseQuality::Exact => {
                Err(Error::InvalidArgument("real part of a complex exact frame has no closed-form inverse".into()))
            }
        }
    }

    /// `Phi^a` as a coordinate 1-form.
    pub fn leg(&self, a: usize) -> Form {
        let mut out = Form::zero(Basis::Coordinate, 1);
        for b in 0..4 {
            out.add_term(&[b as u8], self.phi[a][b].clone());
        }
        out
    }

    fn convert(&self, a: &Form, target: Basis, linear: bool) -> Result<Form> {
        if a.degree == 0 {
            return Ok(if linear { a.linearize() } else { a.clone() });
        }
        let (source, m) = match target {
            Basis::Frame => (Basis::Coordinate, &self.psi),
            Basis::Coordinate => (Basis::Frame, &self.phi),
        };
        if a.basis != source {
            return Err(Error::MixedBasis);
        }
        if self.inverse == InverseQuality::FirstOrder && !linear {
            return Err(Error::InexactInverse);
        }
        let images: Vec<Form> = (0..4)
            .map(|i| {
                let mut f = Form::zero(target, 1);
                for j in 0..4 {
                    f.add_term(&[j as u8], m[i][j].clone());
                }
                f
            })
            .collect();
        let mut out = Form::zero(target, a.degree);
        for (k, c) in &a.terms {
            let mut piece = Form::scalar(c.clone());
            for &i in &k.indices {
                piece = piece.wedge(&images[i as usize])?;
                if linear {
                    piece = piece.linearize();
                }
            }
            out = out.try_add(&piece)?;
        }
        Ok(out)
    }

    /// Substitutes `dx^b = Psi^b_a Phi^a`.
    pub fn to_frame(&self, a: &Form) -> Result<Form> {
        self.convert(a, Basis::Frame, false)
    }

    /// Substitutes `Phi^a = Phi^a_b dx^b`.
    pub fn to_coordinate(&self, a: &Form) -> Result<Form> {
        self.convert(a, Basis::Coordinate, false)
    }

    /// First-order conversions: coefficients are linearized after every leg.
    pub fn to_frame_linear(&self, a: &Form) -> Result<Form> {
        self.convert(a, Basis::Frame, true)
    }

    pub fn to_coordinate_linear(&self, a: &Form) -> Result<Form> {
        self.convert(a, Basis::Coordinate, true)
    }

    /// Exterior derivative of a frame-basis form, via coordinates.
    pub fn d(&self, a: &Form) -> Result<Form> {
        self.to_frame(&self.to_coordinate(a)?.d()?)
    }

    pub fn d_linear(&self, a: &Form) -> Result<Form> {
        self.to_frame_linear(&self.to_coordinate_linear(a)?.d()?.linearize())
    }

    /// `dPhi^a = sum_{l<m} 2 chi^a_{lm} Phi^l ^ Phi^m`, computed by `d` and `to_frame`.
    pub fn structural_coeffs(&self) -> Result<StructuralCoeffs> {
        let mut chi = StructuralCoeffs::zero();
        for a in 0..4 {
            let d_leg = self.to_frame(&self.leg(a).d()?)?;
            for (k, c) in d_leg.terms() {
                let (l, m) = (k.indices[0] as usize, k.indices[1] as usize);
                chi.set(a, l, m, c.scale_rat(crate::scalar::rat(1, 2)));
            }
        }
        Ok(chi)
    }

    /// Same coefficients from `Phi^a_{b|c} Psi^c_l Psi^b_m`, antisymmetrized.
    pub fn structural_coeffs_by_components(&self) -> Result<StructuralCoeffs> {
        if self.inverse != InverseQuality::Exact {
            return Err(Error::InexactInverse);
        }
        let mut chi = StructuralCoeffs::zero();
        for a in 0..4 {
            let mut t: [[ScalarExpr; 4]; 4] = Default::default();
            for b in 0..4 {
                for c in 0..4 {
                    let dphi = self.phi[a][b].partial(c as u8)?;
                    if dphi.is_zero() {
                        continue;
                    }
                    for l in 0..4 {
                        for m in 0..4 {
                            let term = dphi.times(&self.psi[c][l]).times(&self.psi[b][m]);
                            t[l][m] += term;
                        }
                    }
                }
            }
            for l in 0..4 {
                for m in l + 1..4 {
                    let v = (t[l][m].clone() - t[m][l].clone()).scale_rat(crate::scalar::rat(1, 2));
                    chi.set(a, l, m, v);
                }
            }
        }
        Ok(chi)
    }

    /// `g_{mn} = eta_{ab} Phi^a_m Phi^b_n`.
    pub fn metric(&self, complex_mode: bool) -> MetricTensor {
        let g = std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                (0..4).fold(ScalarExpr::zero(), |acc, a| {
                    acc + self.phi[a][m].times(&self.phi[a][n]).scale_rat(crate::scalar::rat(ETA[a], 1))
                })
            })
        });
        MetricTensor { g, complex_mode }
    }
}

/// `chi^a_{lm}`, stored antisymmetric in `(l, m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuralCoeffs {
    chi: [[[ScalarExpr; 4]; 4]; 4],
}

impl StructuralCoeffs {
    fn zero() -> Self {
        Self { chi: Default::default() }
    }

    fn set(&mut self, a: usize, l: usize, m: usize, v: ScalarExpr) {
        self.chi[a][m][l] = -v.clone();
        self.chi[a][l][m] = v;
    }

    pub fn get(&self, a: usize, l: usize, m: usize) -> &ScalarExpr {
        &self.chi[a][l][m]
    }

    /// Rebuilds `dPhi^a` as a frame 2-form.
    pub fn d_leg(&self, a: usize) -> Form {
        let mut out = Form::zero(Basis::Frame, 2);
        for l in 0..4 {
            for m in 0..4 {
                out.add_term(&[l as u8, m as u8], self.chi[a][l][m].clone());
            }
        }
        out
    }
}

/// Symmetric metric components. With `complex_mode`, numeric values take the real part.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor {
    pub g: Matrix4,
    pub complex_mode: bool,
}

impl MetricTensor {
    pub fn eval<B: FunctionBackend>(&self, backend: &B, point: &[f64; 4]) -> Result<[[f64; 4]; 4]> {
        let mut out = [[0.0; 4]; 4];
        for m in 0..4 {
            for n in 0..4 {
                let v = self.g[m][n].eval(backend, point)?;
                if !self.complex_mode && v.im.abs() > 1e-12 * v.norm().max(1.0) {
                    return Err(Error::Eval(format!("metric component g{m}{n} is complex; enable complex mode")));
                }
                out[m][n] = v.re;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Backend, Family};

    fn fg() -> (SmallSymbol, SmallSymbol) {
        (SmallSymbol::stationary("f"), SmallSymbol::stationary("g"))
    }

    #[test]
    fn wedge_signs() {
        assert_eq!(Form::dx(&[1]).wedge(&Form::dx(&[0])).unwrap(), -Form::dx(&[0, 1]));
        assert_eq!(Form::phi(&[2, 3]).wedge(&Form::phi(&[0])).unwrap(), Form::phi(&[0, 2, 3]));
        assert!(Form::dx(&[1]).wedge(&Form::dx(&[1])).unwrap().is_zero());
        assert!(matches!(Form::dx(&[1]).wedge(&Form::phi(&[2])), Err(Error::MixedBasis)));
    }

    #[test]
    fn bubble_sort_oracle_agrees_with_inversion_count() {
        fn bubble(mut v: Vec<u8>) -> i64 {
            let mut sign = 1;
            for i in 0..v.len() {
                for j in 0..v.len() - 1 - i {
                    if v[j] > v[j + 1] {
                        v.swap(j, j + 1);
                        sign = -sign;
                    }
                }
            }
            sign
        }
        for p in [[0u8, 1, 2, 3], [2, 3, 0, 1], [3, 2, 1, 0], [1, 0, 3, 2], [2, 0, 3, 1]] {
            assert_eq!(sort_sign(&p).unwrap().0, bubble(p.to_vec()), "{p:?}");
        }
    }

    #[test]
    fn d_of_exponential_leg() {
        let (f, _) = fg();
        let w = Form::monomial(Basis::Coordinate, &[0], ScalarExpr::exp_of(&f, rat(-1, 1)));
        let dw = w.d().unwrap();
        for k in 1..=3u8 {
            let expect = ScalarExpr::deriv(&f, &[k]) * ScalarExpr::exp_of(&f, rat(-1, 1));
            assert_eq!(dw.coefficient(&[0, k]), expect);
        }
        let top = Form::monomial(Basis::Coordinate, &[0, 1, 2, 3], ScalarExpr::int(7));
        assert!(top.d().unwrap().is_zero());
    }

    #[test]
    fn conversions() {
        let (f, g) = fg();
        let fr = Frame::stationary(&f, &g);
        assert_eq!(
            fr.to_frame(&Form::dx(&[0])).unwrap(),
            Form::monomial(Basis::Frame, &[0], ScalarExpr::exp_of(&f, rat(1, 1)))
        );
        let gt = SmallSymbol::real("g");
        let b1 = Frame::diagonal_exp([
            ExpArg::of(&gt, rat(-1, 1)),
            ExpArg::of(&gt, rat(1, 1)),
            ExpArg::of(&gt, rat(1, 1)),
            ExpArg::of(&gt, rat(1, 1)),
        ]);
        let a = Form::monomial(
            Basis::Coordinate,
            &[2, 3],
            ScalarExpr::deriv(&gt, &[0]) * ScalarExpr::exp_of(&gt, rat(3, 1)),
        );
        let expect =
            Form::monomial(Basis::Frame, &[2, 3], ScalarExpr::deriv(&gt, &[0]) * ScalarExpr::exp_of(&gt, rat(1, 1)));
        assert_eq!(b1.to_frame(&a).unwrap(), expect);
        assert_eq!(b1.to_coordinate(&expect).unwrap(), a);
    }

    #[test]
    fn structural_coefficients_two_ways() {
        let (f, g) = fg();
        let fr = Frame::stationary(&f, &g);
        let chi = fr.structural_coeffs().unwrap();
        assert_eq!(chi, fr.structural_coeffs_by_components().unwrap());
        let half = ScalarExpr::deriv(&f, &[2]).scale_rat(rat(1, 2)) * ScalarExpr::exp_of(&g, rat(-1, 1));
        assert_eq!(chi.get(0, 0, 2), &half);
        assert_eq!(chi.get(0, 2, 0), &-half);
        for a in 0..4 {
            assert_eq!(chi.d_leg(a), fr.d(&Form::phi(&[a as u8])).unwrap());
        }
        let id = Frame::identity().structural_coeffs().unwrap();
        assert!((0..4).all(|a| id.d_leg(a).is_zero()));
    }

    #[test]
    fn first_order_frames_refuse_exact_conversion() {
        let a0 = SmallSymbol::real("A0");
        let mut f: Matrix4 = Default::default();
        f[0][0] = ScalarExpr::symbol(&a0);
        let fr = Frame::near_identity(f);
        assert!(matches!(fr.to_frame(&Form::dx(&[0])), Err(Error::InexactInverse)));
        let lin = fr.to_frame_linear(&Form::dx(&[0])).unwrap();
        assert_eq!(lin.coefficient(&[0]), ScalarExpr::one() - ScalarExpr::symbol(&a0));
    }

    #[test]
    fn rosen_metric_and_complex_mode() {
        let f = SmallSymbol::new("f", crate::scalar::SymbolKind::Complex, true);
        let fr = Frame::stationary(&f, &f);
        let (m, q, r) = (1.0, 0.3, 2.0);
        let be = Backend::new().with("f", Family::Coulomb { coeff: Complex64::new(m, q), center: [0.0; 3] });
        let g = fr.metric(true).eval(&be, &[0.0, r, 0.0, 0.0]).unwrap();
        let expect = -(-2.0 * m / r).exp() * (2.0 * q / r).cos();
        assert!((g[0][0] - expect).abs() < 1e-14);
        assert!(fr.metric(false).eval(&be, &[0.0, r, 0.0, 0.0]).is_err());
        let real = Backend::new().with("f", Family::Coulomb { coeff: Complex64::new(m, 0.0), center: [0.0; 3] });
        let g = fr.metric(false).eval(&real, &[0.0, r, 0.0, 0.0]).unwrap();
        assert!((g[0][0] + (-2.0 * m / r).exp()).abs() < 1e-14);
        assert!((g[1][1] - (2.0 * m / r).exp()).abs() < 1e-14);
        assert_eq!(g[0][1], 0.0);
    }

    #[test]
    fn rendering() {
        let (f, _) = fg();
        let w = Form::monomial(Basis::Frame, &[0, 1], ScalarExpr::deriv(&f, &[1]).scale_rat(rat(-3, 1)))
            + Form::phi(&[2, 3]);
        assert_eq!(w.render(), "-3 f_{|1} Phi^{01} + Phi^{23}");
        assert_eq!(Form::dx(&[0, 1]).render_latex(), "dx^0\\wedge dx^1");
    }
}
