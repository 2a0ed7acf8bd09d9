//! Numeric evaluation of coefficient expressions against concrete functions.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::{Coeff, ScalarExpr, SmallSymbol};
use crate::error::{Error, Result};

/// Supplies values and partial derivatives of small functions at a point.
pub trait FunctionBackend {
    fn partial(&self, symbol: &SmallSymbol, index: &[u8], point: &[f64; 4]) -> Result<Complex64>;
}

/// Uniformly accelerated center `alpha(t) = p + v (t - t0) + a (t - t0)^2 / 2`,
/// with `t = x^0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub acceleration: [f64; 3],
}

impl Trajectory {
    pub fn at_rest(position: [f64; 3]) -> Self {
        Self { t0: 0.0, position, velocity: [0.0; 3], acceleration: [0.0; 3] }
    }

    pub fn state(&self, t: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
        let dt = t - self.t0;
        let mut p = [0.0; 3];
        let mut v = [0.0; 3];
        for i in 0..3 {
            p[i] = self.position[i] + self.velocity[i] * dt + 0.5 * self.acceleration[i] * dt * dt;
            v[i] = self.velocity[i] + self.acceleration[i] * dt;
        }
        (p, v, self.acceleration)
    }
}

/// Concrete function families with closed-form partials.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Constant(Complex64),
    /// `c / |x - center|`, stationary; partials up to order 3.
    Coulomb {
        coeff: Complex64,
        center: [f64; 3],
    },
    /// `c / |x - alpha(x^0)|`; time partials up to `f_{|0|0}` and `f_{|0|j}`.
    /// `omit_quadratic` drops terms quadratic in the center velocity.
    MovingCenter {
        coeff: Complex64,
        trajectory: Trajectory,
        omit_quadratic: bool,
    },
    /// Sum of `c * x0^a x1^b x2^c x3^d`.
    Polynomial(Vec<(Complex64, [u32; 4])>),
    /// `amplitude * sin(wave . x + phase)`.
    PlaneWave {
        amplitude: Complex64,
        wave: [f64; 4],
        phase: f64,
    },
}

const SINGULAR_RADIUS: f64 = 1e-300;

fn spatial(point: &[f64; 4], center: &[f64; 3]) -> ([f64; 3], f64) {
    let d = [point[1] - center[0], point[2] - center[1], point[3] - center[2]];
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    (d, r)
}

fn delta(a: u8, b: u8) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Spatial partials of `1/r` at displacement `d`; indices in 1..=3.
fn inverse_r_partial(index: &[u8], d: &[f64; 3], r: f64) -> Result<f64> {
    let x = |i: u8| d[(i - 1) as usize];
    match index {
        [] => Ok(1.0 / r),
        [i] => Ok(-x(*i) / r.powi(3)),
        [i, j] => Ok(3.0 * x(*i) * x(*j) / r.powi(5) - delta(*i, *j) / r.powi(3)),
        [i, j, k] => Ok(-15.0 * x(*i) * x(*j) * x(*k) / r.powi(7)
            + 3.0 * (delta(*i, *j) * x(*k) + delta(*i, *k) * x(*j) + delta(*j, *k) * x(*i)) / r.powi(5)),
        _ => Err(Error::Eval(format!("inverse-radius family supports order <= 3, got {}", index.len()))),
    }
}

impl Family {
    pub fn partial(&self, index: &[u8], point: &[f64; 4]) -> Result<Complex64> {
        match self {
            Family::Constant(c) => Ok(if index.is_empty() { *c } else { Complex64::new(0.0, 0.0) }),
            Family::Coulomb { coeff, center } => {
                if index.contains(&0) {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let (d, r) = spatial(point, center);
                if r < SINGULAR_RADIUS {
                    return Err(Error::Domain("evaluation at the singular center r = 0".into()));
                }
                Ok(coeff * inverse_r_partial(index, &d, r)?)
            }
            Family::MovingCenter { coeff, trajectory, omit_quadratic } => {
                let (alpha, vel, acc) = trajectory.state(point[0]);
                let (d, rho) = spatial(point, &alpha);
                if rho < SINGULAR_RADIUS {
                    return Err(Error::Domain("evaluation at the moving center rho = 0".into()));
                }
                let times = index.iter().filter(|&&i| i == 0).count();
                let space: Vec<u8> = index.iter().copied().filter(|&i| i != 0).collect();
                let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                let value = match (times, space.as_slice()) {
                    (0, s) => inverse_r_partial(s, &d, rho)?,
                    (1, []) => dot(&d, &vel) / rho.powi(3),
                    (1, [j]) => {
                        let j = (*j - 1) as usize;
                        vel[j] / rho.powi(3) - 3.0 * dot(&d, &vel) * d[j] / rho.powi(5)
                    }
                    (2, []) => {
                        let mut v = dot(&d, &acc) / rho.powi(3);
                        if !omit_quadratic {
                            v += -dot(&vel, &vel) / rho.powi(3) + 3.0 * dot(&d, &vel).powi(2) / rho.powi(5);
                        }
                        v
                    }
                    _ => return Err(Error::Eval(format!("moving-center family does not provide partial {index:?}"))),
                };
                Ok(coeff * value)
            }
            Family::Polynomial(terms) => {
                let mut total = Complex64::new(0.0, 0.0);
                'term: for (c, exps) in terms {
                    let mut e = *exps;
                    let mut factor = 1.0;
                    for &i in index {
                        let k = &mut e[i as usize];
                        if *k == 0 {
                            continue 'term;
                        }
                        factor *= *k as f64;
                        *k -= 1;
                    }
                    let mono: f64 = (0..4).map(|i| point[i].powi(e[i] as i32)).product();
                    total += c * factor * mono;
                }
                Ok(total)
            }
            Family::PlaneWave { amplitude, wave, phase } => {
                let theta: f64 = (0..4).map(|i| wave[i] * point[i]).sum::<f64>() + phase;
                let n = index.len();
                let scale: f64 = index.iter().map(|&i| wave[i as usize]).product();
                let shifted = theta + n as f64 * std::f64::consts::FRAC_PI_2;
                Ok(amplitude * scale * shifted.sin())
            }
        }
    }
}

/// Name-keyed collection of function families.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Backend {
    families: BTreeMap<String, Family>,
}

impl Backend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, family: Family) -> Self {
        self.families.insert(name.to_string(), family);
        self
    }

    pub fn insert(&mut self, name: &str, family: Family) {
        self.families.insert(name.to_string(), family);
    }

    pub fn get(&self, name: &str) -> Option<&Family> {
        self.families.get(name)
    }

    /// Merge another backend; entries of `other` win on name clashes.
    pub fn merged(mut self, other: &Backend) -> Self {
        for (k, v) in &other.families {
            self.families.insert(k.clone(), v.clone());
        }
        self
    }
}

impl FunctionBackend for Backend {
    fn partial(&self, symbol: &SmallSymbol, index: &[u8], point: &[f64; 4]) -> Result<Complex64> {
        let family = self
            .families
            .get(symbol.name())
            .ok_or_else(|| Error::Eval(format!("backend has no function for `{}`", symbol.name())))?;
        family.partial(index, point)
    }
}

pub(crate) fn coeff_to_f64(c: &Coeff) -> Complex64 {
    Complex64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))
}

impl ScalarExpr {
    /// Numeric value at `point` with every small function supplied by `backend`.
    pub fn eval<B: FunctionBackend + ?Sized>(&self, backend: &B, point: &[f64; 4]) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for m in self.monomials() {
            let mut v = coeff_to_f64(&m.coeff);
            for f in m.key.factors() {
                v *= backend.partial(&f.symbol, f.index(), point)?;
            }
            let mut arg = Complex64::new(0.0, 0.0);
            for (s, a) in m.key.exp().terms() {
                arg += backend.partial(s, &[], point)? * a.to_f64().unwrap_or(f64::NAN);
            }
            total += v * arg.exp();
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn inv_r() -> Backend {
        Backend::new().with("f", Family::Coulomb { coeff: Complex64::new(1.0, 0.0), center: [0.0; 3] })
    }

    #[test]
    fn gradient_squared_of_inverse_radius() {
        let f = SmallSymbol::stationary("f");
        let e = (1..=3u8)
            .fold(ScalarExpr::zero(), |acc, j| acc + ScalarExpr::deriv(&f, &[j]) * ScalarExpr::deriv(&f, &[j]));
        let v = e.eval(&inv_r(), &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn inverse_radius_is_harmonic() {
        let f = SmallSymbol::stationary("f");
        let e = (1..=3u8).fold(ScalarExpr::zero(), |acc, j| acc + ScalarExpr::deriv(&f, &[j, j]));
        let v = e.eval(&inv_r(), &[0.0, 2.0, 0.0, 0.0]).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn exponential_of_zero_function() {
        let g = SmallSymbol::real("g");
        let b = Backend::new().with("g", Family::Constant(Complex64::new(0.0, 0.0)));
        let v = ScalarExpr::exp_of(&g, rat(-2, 1)).eval(&b, &[0.3, 1.0, -2.0, 5.0]).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn singular_point_and_missing_symbol_are_errors() {
        let f = SmallSymbol::stationary("f");
        assert!(matches!(ScalarExpr::symbol(&f).eval(&inv_r(), &[0.0; 4]), Err(Error::Domain(_))));
        let h = SmallSymbol::real("h");
        assert!(matches!(ScalarExpr::symbol(&h).eval(&inv_r(), &[0.0, 1.0, 0.0, 0.0]), Err(Error::Eval(_))));
        let deep = ScalarExpr::deriv(&f, &[1, 1, 1, 1]);
        assert!(matches!(deep.eval(&inv_r(), &[0.0, 1.0, 0.0, 0.0]), Err(Error::Eval(_))));
    }

    #[test]
    fn third_partials_match_finite_differences() {
        let fam = Family::Coulomb { coeff: Complex64::new(1.0, 0.0), center: [0.1, -0.2, 0.3] };
        let x = [0.0, 1.1, 0.7, -0.9];
        let h = 1e-5;
        for idx in [[1u8, 2], [2, 2], [1, 3]] {
            for k in 1..=3u8 {
                let mut xp = x;
                let mut xm = x;
                xp[k as usize] += h;
                xm[k as usize] -= h;
                let fd = (fam.partial(&idx, &xp).unwrap() - fam.partial(&idx, &xm).unwrap()) / (2.0 * h);
                let mut full = idx.to_vec();
                full.push(k);
                full.sort();
                let exact = fam.partial(&full, &x).unwrap();
                assert!((fd - exact).norm() < 1e-6 * (1.0 + exact.norm()), "{idx:?} {k}");
            }
        }
    }

    #[test]
    fn moving_center_time_partials_match_finite_differences() {
        let traj = Trajectory {
            t0: 0.0,
            position: [0.5, 0.0, -0.25],
            velocity: [0.1, -0.2, 0.05],
            acceleration: [0.3, 0.1, -0.4],
        };
        let fam = Family::MovingCenter { coeff: Complex64::new(2.0, 1.0), trajectory: traj, omit_quadratic: false };
        let x = [0.2, 1.3, 0.4, 0.8];
        let h = 1e-5;
        let shift = |k: usize, s: f64| {
            let mut y = x;
            y[k] += s;
            y
        };
        let f0 = (fam.partial(&[], &shift(0, h)).unwrap() - fam.partial(&[], &shift(0, -h)).unwrap()) / (2.0 * h);
        assert!((f0 - fam.partial(&[0], &x).unwrap()).norm() < 1e-8);
        let f00 = (fam.partial(&[0], &shift(0, h)).unwrap() - fam.partial(&[0], &shift(0, -h)).unwrap()) / (2.0 * h);
        assert!((f00 - fam.partial(&[0, 0], &x).unwrap()).norm() < 1e-8);
        let f02 = (fam.partial(&[0], &shift(2, h)).unwrap() - fam.partial(&[0], &shift(2, -h)).unwrap()) / (2.0 * h);
        assert!((f02 - fam.partial(&[0, 2], &x).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn polynomial_and_plane_wave_partials() {
        let p = Family::Polynomial(vec![(Complex64::new(1.0, 0.0), [1, 2, 0, 0])]);
        let x = [2.0, 3.0, 0.0, 0.0];
        assert_eq!(p.partial(&[0, 1], &x).unwrap(), Complex64::new(6.0, 0.0));
        assert_eq!(p.partial(&[0, 0], &x).unwrap(), Complex64::new(0.0, 0.0));
        let w = Family::PlaneWave { amplitude: Complex64::new(1.0, 0.0), wave: [1.0, 0.0, 0.0, -1.0], phase: 0.0 };
        let y = [0.4, 0.0, 0.0, 0.1];
        let v = w.partial(&[0], &y).unwrap();
        assert!((v.re - (0.3f64).cos()).abs() < 1e-15);
        let v = w.partial(&[3, 3], &y).unwrap();
        assert!((v.re + (0.3f64).sin()).abs() < 1e-15);
    }
}
