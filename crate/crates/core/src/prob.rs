//! Probability primitives shared by every other module.
//!
//! The central object is the joint law of `(Y, V) = (Y, Y X)` where
//! `X ~ N(0, 1)` and `P(Y = 1 | X) = sigmoid(beta0 + gamma0 X)`. Expectations
//! over that law are evaluated with a Gauss-Hermite rule on `X`, and the
//! inner expectation over an independent standard normal `Z` of
//! `(s - Z)_+^2` is available in closed form as [`psi`].

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, SymmetricEigen};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// `1 / sqrt(2 pi)`.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Logistic function `e^t / (1 + e^t)`.
///
/// Evaluated as `1 / (1 + e^-t)` for `t >= 0` and `e^t / (1 + e^t)` otherwise,
/// so neither branch overflows. Saturates to exactly 0 or 1 only once the
/// result under- or overflows in `f64`; in particular `gamma0 = +inf` is not a
/// meaningful model parameter, use a large finite value instead.
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Standard normal density.
pub fn normal_pdf(t: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * t * t).exp()
}

/// Standard normal distribution function, accurate in relative terms in the
/// lower tail.
pub fn normal_cdf(t: f64) -> f64 {
    0.5 * libm::erfc(-t * FRAC_1_SQRT_2)
}

/// `E (s - Z)_+^2` for `Z ~ N(0, 1)`:
/// `psi(s) = (s^2 + 1) Phi(s) + s phi(s)`.
///
/// Nonnegative, convex, strictly increasing; `psi(s) -> 0` as `s -> -inf` and
/// `psi(s) - (s^2 + 1) -> 0` as `s -> +inf`.
pub fn psi(s: f64) -> f64 {
    if s >= 0.0 {
        // (s^2 + 1) - E (Z - s)_+^2 would cancel; the direct sum is all positive.
        (s * s + 1.0) * normal_cdf(s) + s * normal_pdf(s)
    } else {
        // Lower tail: both terms are tiny and of opposite sign. erfc keeps
        // relative accuracy there, so the difference is good to ~s^4 ulps.
        let v = (s * s + 1.0) * normal_cdf(s) + s * normal_pdf(s);
        v.max(0.0)
    }
}

/// `psi'(s) = 2 (s Phi(s) + phi(s))`.
pub fn psi_prime(s: f64) -> f64 {
    (2.0 * (s * normal_cdf(s) + normal_pdf(s))).max(0.0)
}

/// `psi''(s) = 2 Phi(s)`.
pub fn psi_second(s: f64) -> f64 {
    2.0 * normal_cdf(s)
}

/// `(beta0, gamma0)` with the derived overall signal strength
/// `gamma = sqrt(beta0^2 + gamma0^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    beta0: f64,
    gamma0: f64,
    gamma: f64,
}

impl ModelParams {
    pub fn new(beta0: f64, gamma0: f64) -> Result<Self> {
        ensure_finite("beta0", beta0)?;
        ensure_finite("gamma0", gamma0)?;
        if gamma0 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma0 must be nonnegative, got {gamma0}"
            )));
        }
        Ok(Self {
            beta0,
            gamma0,
            gamma: beta0.hypot(gamma0),
        })
    }

    /// Splits an overall strength `gamma` into `beta0 = rho gamma` and
    /// `gamma0 = sqrt(1 - rho^2) gamma`.
    pub fn from_rho_gamma(rho: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidParameter(format!("rho must lie in [0, 1], got {rho}")));
        }
        if !(gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be nonnegative, got {gamma}")));
        }
        Self::new(rho * gamma, (1.0 - rho * rho).max(0.0).sqrt() * gamma)
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same `gamma0`, intercept negated.
    pub fn mirrored(&self) -> Self {
        Self {
            beta0: -self.beta0,
            ..*self
        }
    }
}

/// Nodes and weights for `E f(X)`, `X ~ N(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Gauss-Hermite order used by [`QuadratureRule::default_hermite`].
pub const DEFAULT_HERMITE_ORDER: usize = 64;

impl QuadratureRule {
    /// Gauss-Hermite rule of the given order for the standard normal weight:
    /// `E f(X) ~ sum_k w_k f(x_k)` with `sum_k w_k = 1`. Exact for
    /// polynomials of degree below `2 order`.
    pub fn gauss_hermite(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("quadrature order must be positive".into()));
        }
        // Jacobi matrix of the probabilists' Hermite polynomials.
        let off: Vec<f64> = (1..order).map(|k| (k as f64).sqrt()).collect();
        let (nodes, weights) = golub_welsch(&vec![0.0; order], &off);
        Ok(Self::normalized(nodes, weights))
    }

    /// Composite Gauss-Legendre rule on `[-half_width, half_width]` against
    /// the standard normal density, with `panels` equal panels of
    /// `per_panel` nodes each.
    ///
    /// Unlike [`gauss_hermite`](Self::gauss_hermite) the node spacing is
    /// uniform and fine, which is what integrands containing
    /// `sigmoid(beta0 + gamma0 x)` with large `gamma0` need.
    pub fn composite_normal(half_width: f64, panels: usize, per_panel: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) || panels == 0 || per_panel == 0 {
            return Err(Error::InvalidParameter(format!(
                "composite rule needs a positive width and counts, got ({half_width}, {panels}, {per_panel})"
            )));
        }
        let off: Vec<f64> = (1..per_panel)
            .map(|k| {
                let k = k as f64;
                k / (4.0 * k * k - 1.0).sqrt()
            })
            .collect();
        let (ref_nodes, ref_weights) = golub_welsch(&vec![0.0; per_panel], &off);
        let width = 2.0 * half_width / panels as f64;
        let mut nodes = Vec::with_capacity(panels * per_panel);
        let mut weights = Vec::with_capacity(panels * per_panel);
        for j in 0..panels {
            let mid = -half_width + (j as f64 + 0.5) * width;
            for (&r, &w) in ref_nodes.iter().zip(&ref_weights) {
                let x = mid + 0.5 * width * r;
                nodes.push(x);
                weights.push(w * normal_pdf(x));
            }
        }
        Ok(Self::normalized(nodes, weights))
    }

    fn normalized(nodes: Vec<f64>, mut weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E f(X)` for `X ~ N(0, 1)`.
    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

impl QuadratureRule {
    pub fn default_hermite() -> Self {
        Self::gauss_hermite(DEFAULT_HERMITE_ORDER).expect("default order is valid")
    }
}

/// The default is a composite rule: 8-node Gauss-Legendre panels of width
/// 0.05 on `[-10, 10]` (3200 nodes). The mass outside is below `1e-22`.
impl Default for QuadratureRule {
    fn default() -> Self {
        Self::composite_normal(10.0, 400, 8).expect("default rule is valid")
    }
}

/// Nodes (ascending) and unnormalized weights of the Gauss rule whose Jacobi
/// matrix has the given diagonal and off-diagonal.
fn golub_welsch(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Symmetric weight functions give symmetric rules; enforce it exactly.
    for k in 0..n / 2 {
        let (lo, hi) = (pairs[k], pairs[n - 1 - k]);
        let x = 0.5 * (hi.0 - lo.0);
        let w = 0.5 * (lo.1 + hi.1);
        pairs[k] = (-x, w);
        pairs[n - 1 - k] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    pairs.into_iter().unzip()
}

/// Discrete approximation of `F_{beta0, gamma0}`: weighted atoms `(y, v)`.
///
/// Each quadrature node `x` contributes `(+1, x)` with weight
/// `w sigmoid(beta0 + gamma0 x)` and `(-1, -x)` with the complementary weight.
#[derive(Debug, Clone)]
pub struct YvAtoms {
    pub(crate) weight: Vec<f64>,
    pub(crate) y: Vec<f64>,
    pub(crate) v: Vec<f64>,
}

impl YvAtoms {
    pub fn new(params: &ModelParams, rule: &QuadratureRule) -> Self {
        let n = rule.order();
        let mut atoms = Self {
            weight: Vec::with_capacity(2 * n),
            y: Vec::with_capacity(2 * n),
            v: Vec::with_capacity(2 * n),
        };
        for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
            let p = sigmoid(params.beta0() + params.gamma0() * x);
            atoms.push(w * p, 1.0, x);
            atoms.push(w * (1.0 - p), -1.0, -x);
        }
        atoms
    }

    fn push(&mut self, weight: f64, y: f64, v: f64) {
        if weight > 0.0 {
            self.weight.push(weight);
            self.y.push(y);
            self.v.push(v);
        }
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }

    pub fn expect(&self, mut g: impl FnMut(f64, f64) -> f64) -> f64 {
        (0..self.len())
            .map(|k| self.weight[k] * g(self.y[k], self.v[k]))
            .sum()
    }
}

/// `E g(Y, V)` for `(Y, V) ~ F_{beta0, gamma0}`.
pub fn yv_quadrature(
    params: &ModelParams,
    rule: &QuadratureRule,
    g: impl FnMut(f64, f64) -> f64,
) -> f64 {
    YvAtoms::new(params, rule).expect(g)
}

/// Marginal `P(y = 1) = E sigmoid(beta0 + gamma0 X)`.
pub fn marginal_p_y1(params: &ModelParams, rule: &QuadratureRule) -> f64 {
    rule.expect(|x| sigmoid(params.beta0() + params.gamma0() * x))
}

/// A `(seed, stream)` pair naming an independent random stream.
///
/// Backed by ChaCha8 with the stream id mapped onto ChaCha's native stream
/// parameter, so streams never overlap and results do not depend on which
/// thread consumes which stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub const fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub const fn with_stream(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Child stream keyed by `keys`, a pure function of `(self, keys)`.
    pub fn substream(&self, keys: &[u64]) -> Self {
        let mut h = splitmix64(self.stream ^ 0x6a09_e667_f3bc_c908);
        for &k in keys {
            h = splitmix64(h ^ splitmix64(k));
        }
        Self {
            seed: self.seed,
            stream: h,
        }
    }
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One draw of `(Y, V)`.
pub fn draw_yv<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> (f64, f64) {
    let x: f64 = rng.sample(StandardNormal);
    let u: f64 = rng.random();
    let y = if u < sigmoid(params.beta0() + params.gamma0() * x) {
        1.0
    } else {
        -1.0
    };
    (y, y * x)
}

/// `n` i.i.d. draws of `(Y, V)`.
pub fn sample_yv(params: &ModelParams, seed: RngSeed, n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::Precondition("sample size must be at least 1".into()));
    }
    let mut rng = seed.rng();
    Ok((0..n).map(|_| draw_yv(params, &mut rng)).collect())
}
