//! Shooting eigen-solver for `u'' + (lambda/rho - 1/4 - ell(ell+1)/rho^2) u = 0`, `u = rho R`.

use crate::error::{Error, Result};

/// Angular term of the radial equation, `L = ell (ell + 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angular {
    /// `L = l(l+1) - gamma^2` (relativistic Schrodinger form).
    Schrodinger { l: u32, gamma: f64 },
    /// `L = k^2 - gamma^2 + sqrt(k^2 - gamma^2)` (decoupled Dirac form).
    Dirac { k: i32, gamma: f64 },
}

impl Angular {
    pub fn coupling(&self) -> f64 {
        match *self {
            Angular::Schrodinger { l, gamma } => (l * (l + 1)) as f64 - gamma * gamma,
            Angular::Dirac { k, gamma } => {
                let s2 = (k * k) as f64 - gamma * gamma;
                s2 + s2.sqrt()
            }
        }
    }

    /// Root `ell >= -1/2` of `ell (ell + 1) = L`; the small-rho behaviour is `u ~ rho^(ell+1)`.
    pub fn ell(&self) -> Result<f64> {
        let disc = 0.25 + self.coupling();
        if disc < 0.0 {
            return Err(Error::Domain(format!("coupling {} gives a complex indicial exponent", self.coupling())));
        }
        Ok(-0.5 + disc.sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootingConfig {
    pub rho_start: f64,
    pub rho_max: f64,
    pub rtol: f64,
    pub bracket_half_width: f64,
    pub max_iterations: usize,
    pub lambda_tol: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            rho_start: 1e-6,
            rho_max: 60.0,
            rtol: 1e-11,
            bracket_half_width: 0.45,
            max_iterations: 200,
            lambda_tol: 1e-11,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ShootingResult {
    pub lambda: f64,
    /// Nodes of `u` on `(rho_start, rho_max)` at the converged eigenvalue.
    pub nodes: usize,
    /// `nodes + ell + 1`, the algebraic eigenvalue for this node count.
    pub algebraic: f64,
    pub diagnostic: f64,
}

type State = [f64; 2];

/// Dormand-Prince 5(4) with relative error control; returns the end state and sign changes of `u`.
fn integrate(
    rhs: impl Fn(f64, &State) -> State,
    mut t: f64,
    mut y: State,
    t_end: f64,
    rtol: f64,
) -> Result<(State, usize)> {
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] =
        [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

    let mut h = (t * 1e-2).max(1e-12);
    let mut nodes = 0;
    let mut steps = 0usize;
    while t < t_end {
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::NoConvergence { iterations: steps, lo: t, hi: t_end });
        }
        h = h.min(t_end - t);
        let mut k = [[0.0; 2]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += h * A[s][j] * kj[0];
                ys[1] += h * A[s][j] * kj[1];
            }
            k[s] = rhs(t + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..2 {
            let (mut d5, mut d4) = (0.0, 0.0);
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let scale = rtol * y[i].abs().max(y5[i].abs()).max(1e-300);
            err = err.max((h * (d5 - d4)).abs() / scale);
        }
        if err <= 1.0 {
            if y5[0].signum() != y[0].signum() && y[0] != 0.0 {
                nodes += 1;
            }
            t += h;
            y = y5;
        }
        h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
    }
    Ok((y, nodes))
}

/// `u(rho_max)` (up to a positive factor) and the node count for trial `lambda`.
pub fn shoot(lambda: f64, ell: f64, coupling: f64, cfg: &ShootingConfig) -> Result<(f64, usize)> {
    let r0 = cfg.rho_start;
    // u = rho^(ell+1) (1 + c1 rho), divided through by rho0^(ell+1)
    let c1 = -lambda / (2.0 * (ell + 1.0));
    let y0 = [1.0 + c1 * r0, ((ell + 1.0) + c1 * (ell + 2.0) * r0) / r0];
    let rhs = |rho: f64, y: &State| [y[1], -(lambda / rho - 0.25 - coupling / (rho * rho)) * y[0]];
    let (y, nodes) = integrate(rhs, r0, y0, cfg.rho_max, cfg.rtol)?;
    Ok((y[0], nodes))
}

/// Eigenvalue nearest `lambda_guess`, bracketed by a sign change of `u(rho_max)`.
pub fn radial_shooting(lambda_guess: f64, angular: Angular, cfg: &ShootingConfig) -> Result<ShootingResult> {
    let ell = angular.ell()?;
    let coupling = angular.coupling();
    let (mut lo, mut hi) = (lambda_guess - cfg.bracket_half_width, lambda_guess + cfg.bracket_half_width);
    let (mut f_lo, _) = shoot(lo, ell, coupling, cfg)?;
    let (f_hi, _) = shoot(hi, ell, coupling, cfg)?;
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoConvergence { iterations: 0, lo, hi });
    }
    for _ in 0..cfg.max_iterations {
        let mid = 0.5 * (lo + hi);
        let (f_mid, _) = shoot(mid, ell, coupling, cfg)?;
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < cfg.lambda_tol {
            let lambda = 0.5 * (lo + hi);
            // nodes of the bound state are those of the trial just below it
            let (_, nodes) = shoot(lo, ell, coupling, cfg)?;
            let algebraic = nodes as f64 + ell + 1.0;
            return Ok(ShootingResult { lambda, nodes, algebraic, diagnostic: (lambda - algebraic).abs() });
        }
    }
    Err(Error::NoConvergence { iterations: cfg.max_iterations, lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hydrogenic_eigenvalues_are_integers() {
        let cfg = ShootingConfig::default();
        for n in 1..=3 {
            let r = radial_shooting(n as f64 + 0.2, Angular::Schrodinger { l: 0, gamma: 0.0 }, &cfg).unwrap();
            assert!((r.lambda - n as f64).abs() < 1e-7, "{r:?}");
            assert_eq!(r.nodes, n - 1);
        }
    }

    #[test]
    fn missing_bracket_is_reported() {
        let cfg = ShootingConfig { bracket_half_width: 0.1, ..Default::default() };
        let e = radial_shooting(1.5, Angular::Schrodinger { l: 0, gamma: 0.0 }, &cfg).unwrap_err();
        assert!(matches!(e, Error::NoConvergence { iterations: 0, .. }));
    }
}
