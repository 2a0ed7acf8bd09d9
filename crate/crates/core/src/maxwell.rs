//! Electromagnetic 1-form `W = A^a Phi^a`, its field strengths, both Maxwell
//! pairs, and the near-identity electromagnetic frame.

use num_complex::Complex64;

use crate::error::Result;
use crate::exterior::{Basis, Form, Frame, Matrix4};
use crate::hodge::{box_op, linear_box_frame, linear_star, star, star_frame, StarConvention};
use crate::report::{lookup_typo, DerivationReport, Status};
use crate::scalar::{Backend, Family, Rewrite, ScalarExpr, SmallSymbol, SymbolKind};

/// Cyclic `(j, k, l)` triples: `H^j` sits on `Phi^k ^ Phi^l`.
pub const CYCLIC: [(u8, u8, u8); 3] = [(1, 2, 3), (2, 3, 1), (3, 1, 2)];

/// Four potential components `A^a` with concrete function families.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    pub symbols: [SmallSymbol; 4],
    pub backend: Backend,
}

impl Potential {
    pub fn symbols(kind: SymbolKind) -> [SmallSymbol; 4] {
        std::array::from_fn(|a| SmallSymbol::new(&format!("A{a}"), kind, false))
    }

    /// Missing components are identically zero.
    pub fn new(families: [Option<Family>; 4]) -> Self {
        let symbols = Self::symbols(SymbolKind::Real);
        let mut backend = Backend::new();
        for (s, f) in symbols.iter().zip(families) {
            backend.insert(s.name(), f.unwrap_or(Family::Constant(Complex64::new(0.0, 0.0))));
        }
        Self { symbols, backend }
    }

    pub fn zero() -> Self {
        Self::new([None, None, None, None])
    }

    /// `A = (c / |x - center|, 0, 0, 0)`.
    pub fn coulomb(c: f64, center: [f64; 3]) -> Self {
        Self::new([Some(Family::Coulomb { coeff: Complex64::new(c, 0.0), center }), None, None, None])
    }

    /// `A^component = amplitude * sin(wave . x + phase)`.
    pub fn plane_wave(component: usize, amplitude: f64, wave: [f64; 4], phase: f64) -> Self {
        let mut fams: [Option<Family>; 4] = Default::default();
        fams[component] = Some(Family::PlaneWave { amplitude: Complex64::new(amplitude, 0.0), wave, phase });
        Self::new(fams)
    }

    /// Each component a polynomial `sum c x0^a x1^b x2^c x3^d`.
    pub fn polynomial(components: [Vec<(f64, [u32; 4])>; 4]) -> Self {
        Self::new(components.map(|terms| {
            Some(Family::Polynomial(terms.into_iter().map(|(c, e)| (Complex64::new(c, 0.0), e)).collect()))
        }))
    }

    /// `W = A^a e^a` in the given basis.
    pub fn one_form(&self, basis: Basis) -> Form {
        (0..4).fold(Form::zero(basis, 1), |acc, a| {
            acc + Form::monomial(basis, &[a as u8], ScalarExpr::symbol(&self.symbols[a]))
        })
    }
}

/// `E^j` and `H^j` as coefficient expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct EMFields {
    pub e: [ScalarExpr; 3],
    pub h: [ScalarExpr; 3],
}

impl EMFields {
    pub fn eval(&self, backend: &Backend, point: &[f64; 4]) -> Result<([f64; 3], [f64; 3])> {
        let mut e = [0.0; 3];
        let mut h = [0.0; 3];
        for j in 0..3 {
            e[j] = self.e[j].eval(backend, point)?.re;
            h[j] = self.h[j].eval(backend, point)?.re;
        }
        Ok((e, h))
    }
}

/// Components of the source 3-form `J`.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceTerms {
    pub j: [ScalarExpr; 3],
    pub rho: ScalarExpr,
}

impl SourceTerms {
    pub fn eval(&self, backend: &Backend, point: &[f64; 4]) -> Result<([f64; 3], f64)> {
        let mut j = [0.0; 3];
        for k in 0..3 {
            j[k] = self.j[k].eval(backend, point)?.re;
        }
        Ok((j, self.rho.eval(backend, point)?.re))
    }

    pub fn is_zero(&self) -> bool {
        self.rho.is_zero() && self.j.iter().all(ScalarExpr::is_zero)
    }
}

fn in_frame_basis(w: &Form, fr: &Frame) -> Result<Form> {
    match w.basis() {
        Basis::Frame => Ok(w.clone()),
        Basis::Coordinate => fr.to_frame(w),
    }
}

/// `E^j` = coefficient of `Phi^j ^ Phi^0` and `H^j` = coefficient of `Phi^k ^ Phi^l` in `dW`.
pub fn em_decompose(w: &Form, fr: &Frame) -> Result<EMFields> {
    let dw = fr.d(&in_frame_basis(w, fr)?)?;
    Ok(EMFields {
        e: std::array::from_fn(|j| dw.coefficient(&[j as u8 + 1, 0])),
        h: CYCLIC.map(|(_, k, l)| dw.coefficient(&[k, l])),
    })
}

/// `(curl E + dH/dt, div H)` read off `d(dW)`; identically zero.
pub fn first_pair_residual(w: &Form, fr: &Frame) -> Result<([ScalarExpr; 3], ScalarExpr)> {
    let dw = fr.d(&in_frame_basis(w, fr)?)?;
    let ddw = fr.d(&dw)?;
    Ok((CYCLIC.map(|(_, k, l)| ddw.coefficient(&[0, k, l])), ddw.coefficient(&[1, 2, 3])))
}

/// `J = d *_Phi dW` with the star taken in the real part of the frame.
/// `j^j` = coefficient of `Phi^0 ^ Phi^k ^ Phi^l`, `rho` = minus the coefficient of `Phi^{123}`.
pub fn second_pair_source(w: &Form, fr: &Frame, conv: &StarConvention) -> Result<SourceTerms> {
    let re = fr.real_part()?;
    let dw = re.d(&in_frame_basis(w, &re)?)?;
    let j3 = re.d(&star_frame(&dw, conv)?)?;
    Ok(SourceTerms { j: CYCLIC.map(|(_, k, l)| j3.coefficient(&[0, k, l])), rho: -j3.coefficient(&[1, 2, 3]) })
}

/// `(curl H - dE/dt, div E)` by direct differentiation of the field expressions.
pub fn classical_source(f: &EMFields) -> Result<SourceTerms> {
    let mut j: [ScalarExpr; 3] = Default::default();
    for (n, &(_, k, l)) in CYCLIC.iter().enumerate() {
        let curl = f.h[l as usize - 1].partial(k)? - f.h[k as usize - 1].partial(l)?;
        j[n] = curl - f.e[n].partial(0)?;
    }
    let mut rho = ScalarExpr::zero();
    for n in 0..3 {
        rho += f.e[n].partial(n as u8 + 1)?;
    }
    Ok(SourceTerms { j, rho })
}

fn central_diff(g: impl Fn(&[f64; 4]) -> Result<f64>, x: &[f64; 4], dir: usize, h: f64) -> Result<f64> {
    let at = |s: f64| {
        let mut y = *x;
        y[dir] += s * h;
        g(&y)
    };
    Ok((8.0 * (at(1.0)? - at(-1.0)?) - (at(2.0)? - at(-2.0)?)) / (12.0 * h))
}

/// `(curl H - dE/dt, div E)` by fourth-order central differences of the evaluated fields.
pub fn fd_classical_source(f: &EMFields, backend: &Backend, x: &[f64; 4], h: f64) -> Result<([f64; 3], f64)> {
    let e = |n: usize| move |y: &[f64; 4]| Ok(f.e[n].eval(backend, y)?.re);
    let hh = |n: usize| move |y: &[f64; 4]| Ok(f.h[n].eval(backend, y)?.re);
    let mut j = [0.0; 3];
    for (n, &(_, k, l)) in CYCLIC.iter().enumerate() {
        let (k, l) = (k as usize, l as usize);
        j[n] = central_diff(hh(l - 1), x, k, h)? - central_diff(hh(k - 1), x, l, h)? - central_diff(e(n), x, 0, h)?;
    }
    let mut rho = 0.0;
    for n in 0..3 {
        rho += central_diff(e(n), x, n + 1, h)?;
    }
    Ok((j, rho))
}

/// `(curl E + dH/dt, div H)` by central differences of the evaluated fields.
pub fn fd_first_pair(f: &EMFields, backend: &Backend, x: &[f64; 4], h: f64) -> Result<([f64; 3], f64)> {
    let e = |n: usize| move |y: &[f64; 4]| Ok(f.e[n].eval(backend, y)?.re);
    let hh = |n: usize| move |y: &[f64; 4]| Ok(f.h[n].eval(backend, y)?.re);
    let mut r = [0.0; 3];
    for (n, &(_, k, l)) in CYCLIC.iter().enumerate() {
        let (k, l) = (k as usize, l as usize);
        r[n] = central_diff(e(l - 1), x, k, h)? - central_diff(e(k - 1), x, l, h)? + central_diff(hh(n), x, 0, h)?;
    }
    let mut div = 0.0;
    for n in 0..3 {
        div += central_diff(hh(n), x, n + 1, h)?;
    }
    Ok((r, div))
}

/// Adding `d chi` to `W` leaves `E` and `H` unchanged.
pub fn gauge_invariant(w: &Form, chi: &ScalarExpr, fr: &Frame) -> Result<bool> {
    let wf = in_frame_basis(w, fr)?;
    let shifted = wf.try_add(&fr.d(&Form::scalar(chi.clone()))?)?;
    Ok(em_decompose(&wf, fr)? == em_decompose(&shifted, fr)?)
}

/// Near-identity frame `Psi^0 = (1 + A^0) dx^0 + A^j dx^j`, `Psi^j = (1 - A^0) dx^j`, with imaginary `A`.
pub fn em_frame(p: &Potential) -> Frame {
    let a: [ScalarExpr; 4] = p.symbols.clone().map(|s| ScalarExpr::symbol(&s.with_kind(SymbolKind::Imaginary)));
    let mut f: Matrix4 = Default::default();
    f[0] = a.clone();
    for j in 1..4 {
        f[j][j] = -a[0].clone();
    }
    Frame::near_identity(f)
}

/// Maximum residuals of a numeric sweep.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SweepReport {
    pub points: usize,
    /// `max |curl E + dH/dt|, |div H|` by finite differences.
    pub first_pair: f64,
    /// `max |J - (curl H - dE/dt, div E)|` with the classical side by finite differences.
    pub source_mismatch: f64,
    pub max_j: f64,
    pub max_rho: f64,
}

/// Evaluates both pairs on an `n^3` spatial grid over `[0.5, 1.5]^3` at `x^0 = 0.3`.
pub fn sweep(p: &Potential, n: usize, h: f64) -> Result<SweepReport> {
    let fr = Frame::identity();
    let w = p.one_form(Basis::Frame);
    let fields = em_decompose(&w, &fr)?;
    let src = second_pair_source(&w, &fr, &StarConvention::default())?;
    let n = n.max(1);
    let coord = |i: usize| if n == 1 { 1.0 } else { 0.5 + i as f64 / (n - 1) as f64 };
    let mut out = SweepReport { points: 0, first_pair: 0.0, source_mismatch: 0.0, max_j: 0.0, max_rho: 0.0 };
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let x = [0.3, coord(a), coord(b), coord(c)];
                let (r1, div_h) = fd_first_pair(&fields, &p.backend, &x, h)?;
                let (jc, rc) = fd_classical_source(&fields, &p.backend, &x, h)?;
                let (j, rho) = src.eval(&p.backend, &x)?;
                out.first_pair = r1.iter().fold(out.first_pair.max(div_h.abs()), |m, v| m.max(v.abs()));
                out.source_mismatch =
                    (0..3).fold(out.source_mismatch.max((rho - rc).abs()), |m, k| m.max((j[k] - jc[k]).abs()));
                out.max_j = j.iter().fold(out.max_j, |m, v| m.max(v.abs()));
                out.max_rho = out.max_rho.max(rho.abs());
                out.points += 1;
            }
        }
    }
    Ok(out)
}

fn chain_report(
    id: &str,
    description: &str,
    engine: &Form,
    printed: &Form,
    corrected: Option<&Form>,
) -> DerivationReport {
    let r = DerivationReport::new(id, description);
    if engine == printed {
        return r.compare(true, printed.render(), engine.render());
    }
    let known = corrected.is_some_and(|c| c == engine) && lookup_typo(id).is_some();
    let r = r.compare(false, printed.render(), engine.render());
    if known {
        r.against_registry()
    } else {
        r
    }
}

/// Exact match passes; a match only under `rules` is a registered discrepancy.
fn conditional_report(
    r: DerivationReport,
    lhs: &Form,
    rhs: &Form,
    rules: &[Rewrite],
    condition: &str,
) -> DerivationReport {
    if lhs == rhs {
        return r.compare(true, rhs.render(), lhs.render());
    }
    let ok = lhs.rewrite(rules) == rhs.rewrite(rules);
    let r = r.compare(false, rhs.render(), lhs.render());
    if ok {
        r.note(condition).against_registry()
    } else {
        r
    }
}

/// Linearized identities relating frame and coordinate stars and boxes for the EM frame.
pub fn em_linear_box_check(p: &Potential, conv: &StarConvention) -> Result<Vec<DerivationReport>> {
    let fr = em_frame(p);
    let a: [ScalarExpr; 4] = p.symbols.clone().map(|s| ScalarExpr::symbol(&s.with_kind(SymbolKind::Imaginary)));
    let spatial: [SmallSymbol; 3] = std::array::from_fn(|j| p.symbols[j + 1].with_kind(SymbolKind::Imaginary));
    let coulomb_gauge = [Rewrite::DivergenceFree(spatial.clone())];
    let mut box_conditions = coulomb_gauge.to_vec();
    box_conditions.extend(spatial.iter().map(|s| Rewrite::Static(s.clone())));
    let one = ScalarExpr::one();
    let mut out = Vec::new();

    let lin_star_psi0 = fr.to_coordinate_linear(&linear_star(&Form::phi(&[0]), conv)?)?;
    let expected = Form::monomial(
        Basis::Coordinate,
        &[1, 2, 3],
        (one.clone() - a[0].scale_rat(crate::scalar::rat(3, 1))).scale_rat(crate::scalar::rat(-1, 3)),
    );
    out.push(chain_report("6.11", "linearized frame star of Psi^0", &lin_star_psi0, &expected, None));

    let star_psi0 = star(&fr.leg(0))?.linearize();
    let printed = Form::monomial(Basis::Coordinate, &[1, 2, 3], one.clone() + a[0].clone());
    let mut corrected = printed.clone();
    for j in 1..4u8 {
        corrected = corrected + star(&Form::monomial(Basis::Coordinate, &[j], a[j as usize].clone()))?;
    }
    out.push(chain_report("6.12", "linearized coordinate star of Psi^0", &star_psi0, &printed, Some(&corrected)));

    let lhs = lin_star_psi0.d()?.linearize();
    let rhs = star_psi0.d()?.linearize();
    let r = DerivationReport::new("6.13", "d of the frame star of Psi^0 equals d of its coordinate star");
    out.push(conditional_report(r, &lhs, &rhs, &coulomb_gauge, "holds for divergence-free spatial potential"));

    let lin_star_psi1 = fr.to_coordinate_linear(&linear_star(&Form::phi(&[1]), conv)?)?;
    let printed = Form::monomial(Basis::Coordinate, &[0, 2, 3], one.clone() + a[0].clone());
    let corrected = Form::monomial(Basis::Coordinate, &[0, 2, 3], one.clone() - a[0].clone())
        + Form::monomial(Basis::Coordinate, &[1, 2, 3], a[1].clone());
    out.push(chain_report("6.14", "linearized frame star of Psi^1", &lin_star_psi1, &printed, Some(&corrected)));

    for leg in 0..4u8 {
        let lhs = fr.to_coordinate_linear(&linear_box_frame(&Form::phi(&[leg]), &fr, conv)?)?;
        let rhs = box_op(&fr.leg(leg as usize))?.linearize();
        let r = DerivationReport::new("6.15", format!("linearized frame box of Psi^{leg} equals the coordinate box"));
        out.push(conditional_report(
            r,
            &lhs,
            &rhs,
            &box_conditions,
            "holds for divergence-free, time-independent spatial potential",
        ));
    }
    Ok(out)
}

/// Status of the whole chain: `Pass` unless some identity fails outright.
pub fn chain_status(reports: &[DerivationReport]) -> Status {
    if reports.iter().any(|r| r.status == Status::Fail) {
        Status::Fail
    } else {
        Status::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn coulomb_fields() {
        let p = Potential::coulomb(0.7, [0.0; 3]);
        let f = em_decompose(&p.one_form(Basis::Frame), &Frame::identity()).unwrap();
        let x = [0.2, 0.6, -0.9, 1.3];
        let (e, h) = f.eval(&p.backend, &x).unwrap();
        let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
        for j in 0..3 {
            assert!(close(e[j], -0.7 * x[j + 1] / r.powi(3), 1e-14));
            assert_eq!(h[j], 0.0);
        }
        // finite-difference oracle: E^j = A^0_{|j}
        let a0 = |y: &[f64; 4]| {
            let r = (y[1] * y[1] + y[2] * y[2] + y[3] * y[3]).sqrt();
            Ok(0.7 / r)
        };
        for j in 0..3 {
            assert!(close(e[j], central_diff(a0, &x, j + 1, 1e-4).unwrap(), 1e-10));
        }
    }

    #[test]
    fn plane_wave_fields_and_vacuum() {
        let p = Potential::plane_wave(1, 1.0, [1.0, 0.0, 0.0, -1.0], 0.0);
        let w = p.one_form(Basis::Frame);
        let fr = Frame::identity();
        let f = em_decompose(&w, &fr).unwrap();
        let x = [0.4, 0.1, 0.2, 0.15];
        let (e, h) = f.eval(&p.backend, &x).unwrap();
        let c = (x[0] - x[3]).cos();
        assert!(close(e[0], -c, 1e-15) && e[1] == 0.0 && e[2] == 0.0);
        assert!(close(h[1], -c, 1e-15) && h[0] == 0.0 && h[2] == 0.0);
        let src = second_pair_source(&w, &fr, &StarConvention::default()).unwrap();
        let (j, rho) = src.eval(&p.backend, &x).unwrap();
        assert!(j.iter().all(|v| v.abs() < 1e-14) && rho.abs() < 1e-14);
    }

    #[test]
    fn zero_potential() {
        let p = Potential::zero();
        let w = p.one_form(Basis::Frame);
        let f = em_decompose(&w, &Frame::identity()).unwrap();
        let (e, h) = f.eval(&p.backend, &[0.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!((e, h), ([0.0; 3], [0.0; 3]));
    }

    #[test]
    fn first_pair_vanishes_symbolically() {
        let p = Potential::zero();
        for basis in [Basis::Frame, Basis::Coordinate] {
            let (r, div) = first_pair_residual(&p.one_form(basis), &Frame::identity()).unwrap();
            assert!(r.iter().all(ScalarExpr::is_zero) && div.is_zero());
        }
        let g = SmallSymbol::real("g");
        let f = SmallSymbol::real("f");
        let fr = Frame::stationary(&f, &g);
        let (r, div) = first_pair_residual(&p.one_form(Basis::Frame), &fr).unwrap();
        assert!(r.iter().all(ScalarExpr::is_zero) && div.is_zero());
    }

    #[test]
    fn identity_frame_source_is_classical() {
        let p = Potential::zero();
        let w = p.one_form(Basis::Frame);
        let fr = Frame::identity();
        let f = em_decompose(&w, &fr).unwrap();
        let src = second_pair_source(&w, &fr, &StarConvention::default()).unwrap();
        assert_eq!(src, classical_source(&f).unwrap());
    }

    #[test]
    fn test_fields_by_hand() {
        // A^2 = x^1 x^0: E^2 = -x^1, H^3 = x^0; curl H - dE/dt = 0, curl E + dH/dt = 0.
        let p = Potential::polynomial([vec![], vec![], vec![(1.0, [1, 1, 0, 0])], vec![]]);
        let w = p.one_form(Basis::Frame);
        let fr = Frame::identity();
        let x = [0.3, 0.7, -0.2, 0.5];
        let (e, h) = em_decompose(&w, &fr).unwrap().eval(&p.backend, &x).unwrap();
        assert_eq!(e, [0.0, -0.7, 0.0]);
        assert_eq!(h, [0.0, 0.0, 0.3]);
        let (j, rho) = second_pair_source(&w, &fr, &StarConvention::default()).unwrap().eval(&p.backend, &x).unwrap();
        assert_eq!((j, rho), ([0.0; 3], 0.0));
        // A^2 = (x^0)^2: E^2 = -2 x^0 so -dE/dt contributes +2 to j^2.
        let p = Potential::polynomial([vec![], vec![], vec![(1.0, [2, 0, 0, 0])], vec![]]);
        let (j, rho) = second_pair_source(&p.one_form(Basis::Frame), &fr, &StarConvention::default())
            .unwrap()
            .eval(&p.backend, &x)
            .unwrap();
        assert_eq!((j, rho), ([0.0, 2.0, 0.0], 0.0));
    }

    #[test]
    fn sweeps_agree_with_oracle() {
        for p in [Potential::coulomb(1.3, [0.0; 3]), Potential::plane_wave(1, 1.0, [1.0, 0.0, 0.0, -1.0], 0.0)] {
            let s = sweep(&p, 3, 1e-4).unwrap();
            assert_eq!(s.points, 27);
            assert!(s.first_pair < 1e-8, "{s:?}");
            assert!(s.source_mismatch < 1e-8, "{s:?}");
            assert!(s.max_rho < 1e-12 && s.max_j < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn gauge_probe() {
        let p = Potential::zero();
        let chi = ScalarExpr::symbol(&SmallSymbol::real("chi"));
        assert!(gauge_invariant(&p.one_form(Basis::Frame), &chi, &Frame::identity()).unwrap());
        assert!(gauge_invariant(&p.one_form(Basis::Coordinate), &chi, &Frame::identity()).unwrap());
    }

    #[test]
    fn em_frame_shape_and_reality() {
        let p = Potential::zero();
        let fr = em_frame(&p);
        assert_eq!(fr.real_part().unwrap(), Frame::identity());
        let g = fr.metric(true);
        for mu in 0..4 {
            for nu in 0..4 {
                let re = g.g[mu][nu].linearize().real_part().unwrap();
                let eta = if mu == nu { ScalarExpr::int(crate::exterior::ETA[mu]) } else { ScalarExpr::zero() };
                assert_eq!(re, eta, "({mu},{nu})");
            }
        }
    }

    #[test]
    fn linear_chain() {
        let reports = em_linear_box_check(&Potential::zero(), &StarConvention::default()).unwrap();
        assert_eq!(reports[0].status, Status::Pass);
        assert_eq!(reports[1].status, Status::Discrepancy);
        assert_eq!(reports[2].status, Status::Discrepancy);
        assert_eq!(reports[3].status, Status::Discrepancy);
        assert!(reports[4..].iter().all(|r| r.status == Status::Discrepancy));
        assert_eq!(chain_status(&reports), Status::Pass);
    }
}
