//! Two point sources in one frame: the interaction equation, the force law it
//! implies, unit conversion, and the exponential smallness bound.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exterior::{Form, Frame};
use crate::hodge::{box_frame, StarConvention};
use crate::report::DerivationReport;
use crate::scalar::{rat, Backend, ExpArg, Family, Rewrite, ScalarExpr, SmallSymbol, SymbolKind, Trajectory};

/// A point source in geometric units moving on a uniformly accelerated trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Body {
    pub m: f64,
    pub q: f64,
    pub trajectory: Trajectory,
}

impl Body {
    pub fn at_rest(m: f64, q: f64, position: [f64; 3]) -> Self {
        Self { m, q, trajectory: Trajectory::at_rest(position) }
    }

    pub fn with_acceleration(mut self, a: [f64; 3]) -> Self {
        self.trajectory.acceleration = a;
        self
    }

    fn is_static(&self) -> bool {
        self.trajectory.velocity == [0.0; 3] && self.trajectory.acceleration == [0.0; 3]
    }

    fn strength(&self) -> Complex64 {
        Complex64::new(self.m, self.q)
    }

    fn family(&self) -> Family {
        if self.is_static() {
            Family::Coulomb { coeff: self.strength(), center: self.trajectory.position }
        } else {
            Family::MovingCenter { coeff: self.strength(), trajectory: self.trajectory, omit_quadratic: true }
        }
    }
}

fn body_symbol(name: &str, b: &Body) -> SmallSymbol {
    SmallSymbol::new(name, SymbolKind::Complex, b.is_static())
}

/// `Phi^0 = e^{-(f1+f2)} dx^0`, `Phi^j = e^{f1+f2} dx^j`, with the backend binding `f1`, `f2`.
pub fn combined_frame(b1: &Body, b2: &Body) -> (Frame, Backend) {
    let (s1, s2) = (body_symbol("f1", b1), body_symbol("f2", b2));
    let mut minus = ExpArg::of(&s1, rat(-1, 1));
    minus.add_term(&s2, rat(-1, 1));
    let mut plus = ExpArg::of(&s1, rat(1, 1));
    plus.add_term(&s2, rat(1, 1));
    let fr = Frame::diagonal_exp([minus, plus.clone(), plus.clone(), plus]);
    let be = Backend::new().with("f1", b1.family()).with("f2", b2.family());
    (fr, be)
}

/// Symbolic reduction of "box of the combined frame = sum of the individual boxes".
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzReduction {
    /// Combined minus individual, per leg, with exponentials set to 1 and the rewrites applied.
    pub difference: [ScalarExpr; 2],
    /// `f1_{|0|0} + 2 f1_{|j} f2_{|j}`.
    pub interaction: ScalarExpr,
}

/// Reduces the additivity ansatz for a moving `f1` (at rest at the instant) and a static `f2`.
pub fn ansatz_reduction(conv: &StarConvention) -> Result<AnsatzReduction> {
    let f1 = SmallSymbol::new("f1", SymbolKind::Complex, false);
    let f2 = SmallSymbol::new("f2", SymbolKind::Complex, true);
    let mut minus = ExpArg::of(&f1, rat(-1, 1));
    minus.add_term(&f2, rat(-1, 1));
    let mut plus = ExpArg::of(&f1, rat(1, 1));
    plus.add_term(&f2, rat(1, 1));
    let combined = Frame::diagonal_exp([minus, plus.clone(), plus.clone(), plus]);

    let rules = [Rewrite::AtRest(f1.clone()), Rewrite::Harmonic(f1.clone()), Rewrite::Harmonic(f2.clone())];
    let mut difference: [ScalarExpr; 2] = Default::default();
    for (slot, leg) in [0u8, 1].into_iter().enumerate() {
        let whole = box_frame(&Form::phi(&[leg]), &combined, conv)?.coefficient(&[leg]);
        let mut parts = ScalarExpr::zero();
        for f in [&f1, &f2] {
            let frozen = SmallSymbol::new("s", SymbolKind::Complex, true);
            let single = Frame::stationary(&frozen, &frozen);
            let c = box_frame(&Form::phi(&[leg]), &single, conv)?.coefficient(&[leg]);
            parts += c.substitute_equal(&frozen, f);
        }
        let diff = (whole - parts).strip_exponentials();
        difference[slot] = Rewrite::apply_all(&rules, &diff);
    }
    let interaction = ScalarExpr::deriv(&f1, &[0, 0])
        + (1..=3u8).fold(ScalarExpr::zero(), |a, j| {
            a + ScalarExpr::deriv(&f1, &[j]).times(&ScalarExpr::deriv(&f2, &[j])).scale_rat(rat(2, 1))
        });
    Ok(AnsatzReduction { difference, interaction })
}

pub fn ansatz_report(conv: &StarConvention) -> Result<DerivationReport> {
    let red = ansatz_reduction(conv)?;
    let ok = red.difference[0] == -red.interaction.clone() && red.difference[1] == red.interaction;
    Ok(DerivationReport::new("4.6x", "combined minus individual boxes reduces to the interaction equation").compare(
        ok,
        format!("-({0}) Phi^0, ({0}) Phi^j", red.interaction),
        format!("({}) Phi^0, ({}) Phi^j", red.difference[0], red.difference[1]),
    ))
}

/// `f1_{|0|0} + 2 f1_{|j} f2_{|j}` at a point; the first body must be at rest at that instant.
pub fn interaction_residual(b1: &Body, b2: &Body, point: &[f64; 4]) -> Result<Complex64> {
    let (_, v, _) = b1.trajectory.state(point[0]);
    if v != [0.0; 3] {
        return Err(Error::InvalidArgument("first body must be momentarily at rest".into()));
    }
    let red = ansatz_reduction(&StarConvention::default())?;
    let (_, be) = combined_frame(b1, b2);
    red.interaction.eval(&be, point)
}

/// `alpha'' = -(2/m)(mM - qQ) alpha / |alpha|^3`, relative to the second body.
pub fn force_law(b1: &Body, b2: &Body) -> Result<[f64; 3]> {
    if b1.m == 0.0 {
        return Err(Error::InvalidArgument("force law needs nonzero inertial mass m".into()));
    }
    let a: [f64; 3] = std::array::from_fn(|i| b1.trajectory.position[i] - b2.trajectory.position[i]);
    let r = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if r == 0.0 {
        return Err(Error::Domain("coincident bodies".into()));
    }
    let k = -2.0 / b1.m * (b1.m * b2.m - b1.q * b2.q) / r.powi(3);
    Ok(a.map(|x| k * x))
}

/// Limit of a sequence sampled at `hs` as `h -> 0`, by Neville polynomial extrapolation.
fn neville_at_zero(hs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = hs.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (hs[i + k] * p[i] - hs[i] * p[i + 1]) / (hs[i + k] - hs[i]);
        }
    }
    p[0]
}

/// Real part of the leading `eps^-2` coefficient of the interaction equation along
/// `alpha + eps e_j`, normalized so the force law is its root.
pub fn matched_residual(b1: &Body, b2: &Body) -> Result<[f64; 3]> {
    let red = ansatz_reduction(&StarConvention::default())?;
    let (_, be) = combined_frame(b1, b2);
    let t = b1.trajectory.t0;
    let (alpha, _, _) = b1.trajectory.state(t);
    let eps: Vec<f64> = (0..6).map(|k| 1e-2 * 0.5f64.powi(k)).collect();
    let mut out = [0.0; 3];
    for (j, slot) in out.iter_mut().enumerate() {
        let samples: Vec<f64> = eps
            .iter()
            .map(|&e| {
                let mut x = [t, alpha[0], alpha[1], alpha[2]];
                x[j + 1] += e;
                red.interaction.eval(&be, &x).map(|v| (v * -(e * e)).re)
            })
            .collect::<Result<_>>()?;
        *slot = neville_at_zero(&eps, &samples);
    }
    Ok(out)
}

/// Physical constants used for the geometric conversion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitSystem {
    pub c: f64,
    pub k: f64,
    pub big_k: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self { c: 299_792_458.0, k: 6.67e-8, big_k: 9e9 }
    }
}

impl UnitSystem {
    /// `m = k m_hat / (2 c^2)`.
    pub fn mass(&self, m_hat: f64) -> f64 {
        0.5 * self.k * m_hat / (self.c * self.c)
    }

    /// `q = sqrt(k K) q_hat / (2 c^2)`.
    pub fn charge(&self, q_hat: f64) -> f64 {
        0.5 * (self.k * self.big_k).sqrt() * q_hat / (self.c * self.c)
    }

    pub fn mass_inverse(&self, m: f64) -> f64 {
        2.0 * m * self.c * self.c / self.k
    }

    pub fn charge_inverse(&self, q: f64) -> f64 {
        2.0 * q * self.c * self.c / (self.k * self.big_k).sqrt()
    }

    /// Second derivatives in `x^0 = c t` times `c^2` are second derivatives in `t`.
    pub fn per_time_squared(&self, accel_x0: f64) -> f64 {
        accel_x0 * self.c * self.c
    }
}

/// A body given in MKS units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MksBody {
    pub m: f64,
    pub q: f64,
    pub position: [f64; 3],
}

/// `m_hat alpha''(t)` obtained by converting to geometric units and applying [`force_law`].
pub fn mks_force(b1: &MksBody, b2: &MksBody, units: &UnitSystem) -> Result<[f64; 3]> {
    let g1 = Body::at_rest(units.mass(b1.m), units.charge(b1.q), b1.position);
    let g2 = Body::at_rest(units.mass(b2.m), units.charge(b2.q), b2.position);
    let acc = force_law(&g1, &g2)?;
    Ok(acc.map(|a| b1.m * units.per_time_squared(a)))
}

/// `-(k m M - K q Q) x / r^3` evaluated directly.
pub fn mks_force_direct(b1: &MksBody, b2: &MksBody, units: &UnitSystem) -> [f64; 3] {
    let x: [f64; 3] = std::array::from_fn(|i| b1.position[i] - b2.position[i]);
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let s = -(units.k * b1.m * b2.m - units.big_k * b1.q * b2.q) / r.powi(3);
    x.map(|v| s * v)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallnessReport {
    /// `max |e^{+-2f} - 1|` with `f = (M + iQ)/r` in geometric units.
    pub deviation: f64,
    pub in_regime: bool,
    pub bound_holds: bool,
}

pub const SMALLNESS_BOUND: f64 = 1e-8;

/// Checks that the exponentials are 1 to `O(1e-8)` for MKS mass, charge and distance.
pub fn smallness_check(m_hat: f64, q_hat: f64, r: f64, units: &UnitSystem) -> Result<SmallnessReport> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("distance must be positive, got {r}")));
    }
    let f = Complex64::new(units.mass(m_hat), units.charge(q_hat)) / r;
    let deviation = [(f * 2.0).exp_m1(), (f * -2.0).exp_m1()].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let in_regime = m_hat / r < 1e16 && q_hat / r < 1e-7;
    Ok(SmallnessReport { deviation, in_regime, bound_holds: deviation <= SMALLNESS_BOUND })
}

trait ExpM1 {
    fn exp_m1(self) -> Self;
}

impl ExpM1 for Complex64 {
    /// `e^z - 1` without cancellation for small `|z|`.
    fn exp_m1(self) -> Self {
        let (re, im) = (self.re, self.im);
        // e^{re}(cos im + i sin im) - 1 = expm1(re) cos im - 2 sin^2(im/2) + i e^{re} sin im
        let s = (0.5 * im).sin();
        Complex64::new(re.exp_m1() * im.cos() - 2.0 * s * s, re.exp() * im.sin())
    }
}

/// Fixed-step leapfrog of the first body in the static field of the second.
pub fn leapfrog(b1: &Body, b2: &Body, dt: f64, steps: usize) -> Result<Vec<[f64; 3]>> {
    let mut body = *b1;
    let mut v = body.trajectory.velocity;
    let mut path = vec![body.trajectory.position];
    let mut a = force_law(&body, b2)?;
    for _ in 0..steps {
        for i in 0..3 {
            v[i] += 0.5 * dt * a[i];
            body.trajectory.position[i] += dt * v[i];
        }
        a = force_law(&body, b2)?;
        for i in 0..3 {
            v[i] += 0.5 * dt * a[i];
        }
        path.push(body.trajectory.position);
    }
    Ok(path)
}
