//! Hydrogen-like energy levels: Bohr, relativistic Schrodinger, decoupled Dirac,
//! and the spin-corrected coupling, with a shooting solver as an independent oracle.
//!
//! Energies are in eV and include the rest energy except for the Bohr levels.
//! Quantum numbers follow `n = n' + |k| + 1`, so `n' = -1` for `n = |k|`.

pub mod shooting;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::Frame;
use crate::scalar::SmallSymbol;

pub use shooting::{radial_shooting, Angular, ShootingConfig, ShootingResult};

pub const FINE_STRUCTURE: f64 = 7.2973525693e-3;
pub const ELECTRON_REST_ENERGY_EV: f64 = 510_998.95;
pub const RYDBERG_EV: f64 = 13.605693;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AtomParams {
    pub z: u32,
    /// `Z` times the fine-structure constant; `0 <= gamma < 1`.
    pub gamma: f64,
    /// `m c^2` in eV.
    pub mass_energy: f64,
    /// Reduced mass over the electron mass.
    pub reduced_mass: f64,
}

impl AtomParams {
    pub fn hydrogen_like(z: u32) -> Result<Self> {
        Self::new(z, z as f64 * FINE_STRUCTURE, ELECTRON_REST_ENERGY_EV, 1.0)
    }

    pub fn new(z: u32, gamma: f64, mass_energy: f64, reduced_mass: f64) -> Result<Self> {
        if z == 0 || !(0.0..1.0).contains(&gamma) {
            return Err(Error::Domain(format!("need Z >= 1 and 0 <= gamma < 1, got Z = {z}, gamma = {gamma}")));
        }
        Ok(Self { z, gamma, mass_energy, reduced_mass })
    }

    /// Same atom with a different coupling, used for sweeps in `gamma`.
    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Self::new(self.z, gamma, self.mass_energy, self.reduced_mass)
    }
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("principal quantum number must be >= 1".into()));
    }
    Ok(())
}

/// `-mu c^2 gamma^2 / (2 n^2)`.
pub fn bohr_energy(p: &AtomParams, n: u32) -> Result<f64> {
    check_n(n)?;
    Ok(-p.reduced_mass * p.mass_energy * p.gamma * p.gamma / (2.0 * (n * n) as f64))
}

/// `(E - mc^2)/mc^2 = -g^2/2n^2 - (g^4/2n^4)(n/j - 3/4)`.
fn series_binding(gamma: f64, n: u32, j: f64) -> f64 {
    let (g2, n) = (gamma * gamma, n as f64);
    -g2 / (2.0 * n * n) - g2 * g2 / (2.0 * n.powi(4)) * (n / j - 0.75)
}

/// Fine-structure expansion with `j = l + 1/2`.
pub fn rel_schrodinger_energy(p: &AtomParams, n: u32, l: u32) -> Result<f64> {
    check_n(n)?;
    if l >= n {
        return Err(Error::Domain(format!("need 0 <= l < n, got n = {n}, l = {l}")));
    }
    Ok(p.mass_energy * (1.0 + series_binding(p.gamma, n, l as f64 + 0.5)))
}

/// Eigen-decomposition of `T = [[-k, -gamma], [gamma, k]]` for the positive root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiracDecoupling {
    pub s: f64,
    /// Unit eigenvector `(a, b)` with `H = a G + b F`.
    pub a: f64,
    pub b: f64,
}

impl DiracDecoupling {
    pub fn residual(&self, k: i32, gamma: f64) -> f64 {
        let k = k as f64;
        let r0 = -k * self.a - gamma * self.b - self.s * self.a;
        let r1 = gamma * self.a + k * self.b - self.s * self.b;
        r0.hypot(r1)
    }
}

fn dirac_s(k: i32, gamma: f64) -> Result<f64> {
    let ak = k.unsigned_abs() as f64;
    if k == 0 || gamma < 0.0 || gamma >= ak {
        return Err(Error::Domain(format!("need k != 0 and 0 <= gamma < |k|, got k = {k}, gamma = {gamma}")));
    }
    Ok(((ak - gamma) * (ak + gamma)).sqrt())
}

pub fn dirac_decouple(k: i32, gamma: f64) -> Result<DiracDecoupling> {
    let s = dirac_s(k, gamma)?;
    let kf = k as f64;
    // pick the row of T - s whose diagonal entry is bounded away from zero
    let (a, b) = if k > 0 { (-gamma, kf + s) } else { (s - kf, gamma) };
    let norm = a.hypot(b);
    Ok(DiracDecoupling { s, a: a / norm, b: b / norm })
}

/// Series level with `j = |k|`.
pub fn dirac_series(p: &AtomParams, n: u32, k: i32) -> Result<f64> {
    check_dirac(n, k)?;
    Ok(p.mass_energy * (1.0 + series_binding(p.gamma, n, k.unsigned_abs() as f64)))
}

/// `lambda = n' + s + 1`.
pub fn dirac_lambda(nprime: i64, k: i32, gamma: f64) -> Result<f64> {
    if nprime < -1 {
        return Err(Error::Domain(format!("n' must be >= -1, got {nprime}")));
    }
    Ok(nprime as f64 + 1.0 + dirac_s(k, gamma)?)
}

/// `(E - mc^2)/mc^2` for `E = mc^2 (1 + gamma^2/lambda^2)^(-1/2)`, free of cancellation.
fn closed_binding(gamma: f64, lambda: f64) -> f64 {
    let x = (gamma / lambda).powi(2);
    (-0.5 * x.ln_1p()).exp_m1()
}

/// `lambda - (n' + |k| + 1)`, computed without cancellation.
fn lambda_shift(k: i32, gamma: f64) -> Result<f64> {
    let ak = k.unsigned_abs() as f64;
    Ok(-gamma * gamma / (ak + dirac_s(k, gamma)?))
}

pub fn dirac_closed(p: &AtomParams, nprime: i64, k: i32) -> Result<f64> {
    Ok(p.mass_energy * (1.0 + closed_binding(p.gamma, dirac_lambda(nprime, k, p.gamma)?)))
}

fn check_dirac(n: u32, k: i32) -> Result<()> {
    check_n(n)?;
    if k == 0 || k.unsigned_abs() > n {
        return Err(Error::Domain(format!("need 1 <= |k| <= n, got n = {n}, k = {k}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiracLevel {
    pub n: u32,
    pub k: i32,
    pub nprime: i64,
    pub lambda: f64,
    pub series: f64,
    pub closed: f64,
}

pub fn dirac_energy(p: &AtomParams, n: u32, k: i32) -> Result<DiracLevel> {
    check_dirac(n, k)?;
    let nprime = n as i64 - k.unsigned_abs() as i64 - 1;
    Ok(DiracLevel {
        n,
        k,
        nprime,
        lambda: dirac_lambda(nprime, k, p.gamma)?,
        series: dirac_series(p, n, k)?,
        closed: dirac_closed(p, nprime, k)?,
    })
}

/// `|E_series - E_closed| / mc^2`, both sides taken relative to the rest energy.
pub fn series_closed_gap(n: u32, k: i32, gamma: f64) -> Result<f64> {
    check_dirac(n, k)?;
    let ak = k.unsigned_abs() as f64;
    let lambda = n as f64 + lambda_shift(k, gamma)?;
    Ok((series_binding(gamma, n, ak) - closed_binding(gamma, lambda)).abs())
}

/// `|1/lambda^2 - (1/n^2)(1 + gamma^2/(n|k|))|`.
pub fn inverse_lambda_gap(n: u32, k: i32, gamma: f64) -> Result<f64> {
    check_dirac(n, k)?;
    let (nf, ak) = (n as f64, k.unsigned_abs() as f64);
    let lambda = nf + lambda_shift(k, gamma)?;
    Ok((1.0 / (lambda * lambda) - (1.0 + gamma * gamma / (nf * ak)) / (nf * nf)).abs())
}

/// `1 / (2n l (l + 1/2))`.
pub fn spin_alpha_sq(n: u32, l: u32) -> Result<f64> {
    check_n(n)?;
    if l == 0 {
        return Err(Error::Domain("spin correction is singular at l = 0".into()));
    }
    let l = l as f64;
    Ok(1.0 / (2.0 * n as f64 * l * (l + 0.5)))
}

/// `gamma_hat = gamma sqrt(1 + gamma^2 alpha^2)`.
pub fn spin_corrected_gamma(n: u32, l: u32, gamma: f64) -> Result<f64> {
    Ok(gamma * (1.0 + gamma * gamma * spin_alpha_sq(n, l)?).sqrt())
}

/// `|E_rel(gamma_hat, n, l) - E_closed(gamma, n, k = l)| / mc^2`.
pub fn spin_dirac_gap(n: u32, l: u32, gamma: f64) -> Result<f64> {
    check_dirac(n, l as i32)?;
    let g_hat = spin_corrected_gamma(n, l, gamma)?;
    let lambda = n as f64 + lambda_shift(l as i32, gamma)?;
    Ok((series_binding(g_hat, n, l as f64 + 0.5) - closed_binding(gamma, lambda)).abs())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    sxy / sxx
}

/// `count` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// `R'' + 2R'/rho + (lambda/rho - 1/4 - L/rho^2) R` for given values of `R, R', R''`.
pub fn radial_residual(r: f64, dr: f64, d2r: f64, rho: f64, lambda: f64, coupling: f64) -> f64 {
    d2r + 2.0 * dr / rho + (lambda / rho - 0.25 - coupling / (rho * rho)) * r
}

/// Diagonal frame `e^{-R} dx^0`, `e^{R} dx^j` carrying the radial solution `R`.
pub fn radial_frame(r: &SmallSymbol) -> Frame {
    Frame::stationary(r, r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Bohr,
    RelSchrodinger,
    Dirac,
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bohr" => Ok(Model::Bohr),
            "relschrodinger" => Ok(Model::RelSchrodinger),
            "dirac" => Ok(Model::Dirac),
            other => Err(Error::InvalidArgument(format!("unknown model `{other}`"))),
        }
    }
}

/// One row of a level table; `angular` is `l` or `k` depending on the model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelRow {
    pub n: u32,
    pub angular: i32,
    pub energy: f64,
    pub series: Option<f64>,
    pub closed: Option<f64>,
    pub shooting_lambda: Option<f64>,
    pub algebraic_lambda: Option<f64>,
    pub diagnostic: Option<f64>,
}

fn shoot_row(guess: f64, angular: Angular) -> Result<ShootingResult> {
    radial_shooting(guess, angular, &ShootingConfig::default())
}

/// Levels for `n = 1..=n_max`; the shooting column solves the radial equation of the model.
pub fn level_table(p: &AtomParams, model: Model, n_max: u32) -> Result<Vec<LevelRow>> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        match model {
            Model::Bohr => {
                let sh = shoot_row(n as f64, Angular::Schrodinger { l: 0, gamma: 0.0 })?;
                rows.push(LevelRow {
                    n,
                    angular: 0,
                    energy: bohr_energy(p, n)?,
                    series: None,
                    closed: None,
                    shooting_lambda: Some(sh.lambda),
                    algebraic_lambda: Some(n as f64),
                    diagnostic: Some((sh.lambda - n as f64).abs()),
                });
            }
            Model::RelSchrodinger => {
                for l in 0..n {
                    let ang = Angular::Schrodinger { l, gamma: p.gamma };
                    let algebraic = (n - l - 1) as f64 + ang.ell()? + 1.0;
                    let sh = shoot_row(algebraic, ang)?;
                    rows.push(LevelRow {
                        n,
                        angular: l as i32,
                        energy: rel_schrodinger_energy(p, n, l)?,
                        series: Some(rel_schrodinger_energy(p, n, l)?),
                        closed: Some(p.mass_energy * (1.0 + closed_binding(p.gamma, algebraic))),
                        shooting_lambda: Some(sh.lambda),
                        algebraic_lambda: Some(algebraic),
                        diagnostic: Some((sh.lambda - algebraic).abs()),
                    });
                }
            }
            Model::Dirac => {
                for k in 1..=n as i32 {
                    let lvl = dirac_energy(p, n, k)?;
                    // the decoupled equation has no state below lambda = s + 1
                    let sh = if lvl.nprime >= 0 {
                        Some(shoot_row(lvl.lambda, Angular::Dirac { k, gamma: p.gamma })?)
                    } else {
                        None
                    };
                    rows.push(LevelRow {
                        n,
                        angular: k,
                        energy: lvl.closed,
                        series: Some(lvl.series),
                        closed: Some(lvl.closed),
                        shooting_lambda: sh.map(|s| s.lambda),
                        algebraic_lambda: Some(lvl.lambda),
                        diagnostic: sh.map(|s| (s.lambda - lvl.lambda).abs()),
                    });
                }
            }
        }
    }
    Ok(rows)
}
