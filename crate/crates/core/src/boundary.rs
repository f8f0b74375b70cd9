//! The phase-transition boundary `h_MLE(beta0, gamma0)`.
//!
//! `h_MLE` is the minimum over `(t0, t1)` of `E (t0 Y + t1 V - Z)_+^2`. With
//! the `Z` expectation done in closed form this is `E psi(t0 Y + t1 V)`, a
//! smooth, strictly convex function of `t` whose gradient and Hessian are
//!
//! ```text
//! grad = E[(Y, V) psi'(t0 Y + t1 V)]
//! hess = E[(Y, V)(Y, V)' 2 Phi(t0 Y + t1 V)]
//! ```
//!
//! so damped Newton from the origin converges globally and quadratically.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::prob::{psi, psi_prime, psi_second, ModelParams, QuadratureRule, YvAtoms};

/// Gradient-norm tolerance used when callers have no preference.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest `gamma` reported on a boundary curve unless the caller opts out.
/// Past it `h` keeps decaying roughly like `1 / gamma` (about 0.034 at
/// `gamma = 30` and 0.001 at `gamma = 1000` when `beta0 = 0`) while the
/// minimizer drifts off to infinity.
pub const GAMMA_CAP: f64 = 30.0;

const MAX_ITERATIONS: usize = 500;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveEval {
    pub t: [f64; 2],
    pub value: f64,
    pub gradient: [f64; 2],
    pub hessian: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySolution {
    pub params: ModelParams,
    pub t_star: [f64; 2],
    pub h: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
}

/// Which coordinate the one-dimensional reductions keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reduction {
    /// `min_t E (t Y - Z)_+^2`, valid when `gamma0 = 0`.
    YOnly,
    /// `min_t E (t V - Z)_+^2`, valid when `beta0 = 0`.
    VOnly,
}

/// The population objective for fixed parameters, discretized once.
#[derive(Debug, Clone)]
pub struct BoundaryObjective {
    atoms: YvAtoms,
}

impl BoundaryObjective {
    pub fn new(params: &ModelParams, rule: &QuadratureRule) -> Self {
        Self {
            atoms: YvAtoms::new(params, rule),
        }
    }

    pub fn value(&self, t: [f64; 2]) -> f64 {
        self.atoms.expect(|y, v| psi(t[0] * y + t[1] * v))
    }

    pub fn eval(&self, t: [f64; 2]) -> ObjectiveEval {
        let a = &self.atoms;
        let mut value = 0.0;
        let mut g = [0.0; 2];
        let mut h = [[0.0; 2]; 2];
        for k in 0..a.len() {
            let (w, y, v) = (a.weight[k], a.y[k], a.v[k]);
            let s = t[0] * y + t[1] * v;
            value += w * psi(s);
            let d1 = w * psi_prime(s);
            g[0] += d1 * y;
            g[1] += d1 * v;
            let d2 = w * psi_second(s);
            h[0][0] += d2 * y * y;
            h[0][1] += d2 * y * v;
            h[1][1] += d2 * v * v;
        }
        h[1][0] = h[0][1];
        ObjectiveEval {
            t,
            value,
            gradient: g,
            hessian: h,
        }
    }
}

/// Value, gradient and Hessian of `t -> E psi(t0 Y + t1 V)`.
pub fn objective(params: &ModelParams, t: [f64; 2], rule: &QuadratureRule) -> Result<ObjectiveEval> {
    ensure_finite("t0", t[0])?;
    ensure_finite("t1", t[1])?;
    Ok(BoundaryObjective::new(params, rule).eval(t))
}

/// `h_MLE(beta0, gamma0)` by damped Newton from `t = (0, 0)`.
///
/// Returns [`Error::NotConverged`] with the last iterate if the gradient norm
/// does not reach `tol`.
pub fn solve_boundary(params: &ModelParams, rule: &QuadratureRule, tol: f64) -> Result<BoundarySolution> {
    check_tol(tol)?;
    let objective = BoundaryObjective::new(params, rule);
    let mut cur = objective.eval([0.0, 0.0]);
    let mut iterations = 0;
    loop {
        let grad_norm = norm2(cur.gradient);
        if grad_norm <= tol || iterations >= MAX_ITERATIONS {
            return finish(*params, cur, iterations, grad_norm, tol);
        }
        iterations += 1;
        match damped_step(&objective, &cur, newton_direction(&cur)) {
            Some(next) => cur = next,
            None => return finish(*params, cur, iterations, grad_norm, tol),
        }
    }
}

/// One-dimensional form of [`solve_boundary`] for the two special cases
/// where the optimal `(t0, t1)` has a zero coordinate.
pub fn solve_boundary_1d(
    params: &ModelParams,
    which: Reduction,
    rule: &QuadratureRule,
    tol: f64,
) -> Result<BoundarySolution> {
    check_tol(tol)?;
    match which {
        Reduction::YOnly if params.gamma0() != 0.0 => {
            return Err(Error::Precondition(format!(
                "the Y-only reduction needs gamma0 = 0, got {}",
                params.gamma0()
            )))
        }
        Reduction::VOnly if params.beta0() != 0.0 => {
            return Err(Error::Precondition(format!(
                "the V-only reduction needs beta0 = 0, got {}",
                params.beta0()
            )))
        }
        _ => {}
    }
    let objective = BoundaryObjective::new(params, rule);
    let embed = |s: f64| match which {
        Reduction::YOnly => [s, 0.0],
        Reduction::VOnly => [0.0, s],
    };
    let axis = match which {
        Reduction::YOnly => 0,
        Reduction::VOnly => 1,
    };
    let mut cur = objective.eval(embed(0.0));
    let mut iterations = 0;
    loop {
        let g = cur.gradient[axis];
        if g.abs() <= tol || iterations >= MAX_ITERATIONS {
            return finish(*params, cur, iterations, g.abs(), tol);
        }
        iterations += 1;
        let mut step = [0.0; 2];
        step[axis] = -g / cur.hessian[axis][axis];
        match damped_step(&objective, &cur, step) {
            Some(next) => cur = next,
            None => return finish(*params, cur, iterations, g.abs(), tol),
        }
    }
}

/// A ray through the `(beta0, gamma0)` quadrant and the `gamma` values to
/// evaluate along it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub rho: f64,
    pub gammas: Vec<f64>,
}

impl CurveSpec {
    /// `steps` equispaced values on `[0, gamma_max]`.
    pub fn equispaced(rho: f64, gamma_max: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        if !(gamma_max >= 0.0) || !gamma_max.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma_max must be finite and >= 0, got {gamma_max}")));
        }
        let gammas = if steps == 1 {
            vec![0.0]
        } else {
            (0..steps)
                .map(|k| gamma_max * k as f64 / (steps - 1) as f64)
                .collect()
        };
        Ok(Self { rho, gammas })
    }
}

#[derive(Debug)]
pub struct CurvePoint {
    pub gamma: f64,
    pub solution: Result<BoundarySolution>,
}

impl CurvePoint {
    /// The converged solution or, on solver failure, its last iterate.
    pub fn best_effort(&self) -> Option<&BoundarySolution> {
        match &self.solution {
            Ok(sol) => Some(sol),
            Err(Error::NotConverged(sol)) => Some(sol),
            Err(_) => None,
        }
    }
}

/// `gamma -> h_MLE(rho gamma, sqrt(1 - rho^2) gamma)` over `spec.gammas`.
pub fn boundary_curve(spec: &CurveSpec, rule: &QuadratureRule, tol: f64) -> Result<Vec<CurvePoint>> {
    check_tol(tol)?;
    if !(0.0..=1.0).contains(&spec.rho) {
        return Err(Error::InvalidParameter(format!("rho must lie in [0, 1], got {}", spec.rho)));
    }
    if let Some(bad) = spec.gammas.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
        return Err(Error::InvalidParameter(format!("gamma grid values must be finite and >= 0, got {bad}")));
    }
    Ok(spec
        .gammas
        .iter()
        .map(|&gamma| CurvePoint {
            gamma,
            solution: ModelParams::from_rho_gamma(spec.rho, gamma)
                .and_then(|params| solve_boundary(&params, rule, tol)),
        })
        .collect())
}

fn finish(
    params: ModelParams,
    at: ObjectiveEval,
    iterations: usize,
    grad_norm: f64,
    tol: f64,
) -> Result<BoundarySolution> {
    let sol = BoundarySolution {
        params,
        t_star: at.t,
        h: at.value,
        iterations,
        grad_norm,
        converged: grad_norm <= tol,
    };
    if sol.converged {
        Ok(sol)
    } else {
        Err(Error::NotConverged(Box::new(sol)))
    }
}

/// Backtracking (Armijo, halving) along `step`. The full step is also taken
/// when it leaves the value unchanged to rounding but shrinks the gradient,
/// which is the normal situation within a few ulps of the minimum.
fn damped_step(objective: &BoundaryObjective, cur: &ObjectiveEval, step: [f64; 2]) -> Option<ObjectiveEval> {
    let t = cur.t;
    let slope = cur.gradient[0] * step[0] + cur.gradient[1] * step[1];
    let full = objective.eval([t[0] + step[0], t[1] + step[1]]);
    let rounding = 64.0 * f64::EPSILON * cur.value.abs();
    if full.value <= cur.value + ARMIJO * slope
        || (full.value <= cur.value + rounding && norm2(full.gradient) < norm2(cur.gradient))
    {
        return Some(full);
    }
    let mut alpha = 0.5;
    for _ in 1..MAX_HALVINGS {
        let trial = [t[0] + alpha * step[0], t[1] + alpha * step[1]];
        if objective.value(trial) <= cur.value + ARMIJO * alpha * slope && alpha * slope < -rounding {
            return Some(objective.eval(trial));
        }
        alpha *= 0.5;
    }
    None
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")))
    }
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn newton_direction(at: &ObjectiveEval) -> [f64; 2] {
    let [[a, b], [_, d]] = at.hessian;
    let det = a * d - b * b;
    let [g0, g1] = at.gradient;
    if det > 0.0 && a > 0.0 {
        [-(d * g0 - b * g1) / det, -(a * g1 - b * g0) / det]
    } else {
        // Numerically singular Hessian (saturated Phi); fall back to steepest descent.
        [-g0, -g1]
    }
}
