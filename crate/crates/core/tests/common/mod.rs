//! Test-only oracles. Nothing here calls into the conjugate formulas of the
//! library; marginal densities are obtained by brute-force quadrature.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use heatbvm::SineCoefficients;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha20Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn uniform(rng: &mut ChaCha20Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// i.i.d. standard normal coefficients.
pub fn random_coeffs(rng: &mut ChaCha20Rng, m: usize) -> SineCoefficients {
    SineCoefficients::new((0..m).map(|_| normal(rng)).collect()).unwrap()
}

/// Trapezoid rule with `points` nodes on `[a, b]`. For integrands that are
/// smooth and negligible at both ends this converges geometrically in the
/// node count, so a few thousand nodes reach machine precision.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: usize) -> f64 {
    let h = (b - a) / (points - 1) as f64;
    let inner: f64 = (1..points - 1).map(|i| f(a + i as f64 * h)).sum();
    h * (inner + 0.5 * (f(a) + f(b)))
}

/// Maximizer of a unimodal function on `[a, b]` by golden-section search.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// `log of integral exp(log_f(x)) dx` for a unimodal, Gaussian-like `log_f`.
/// The peak is located numerically, its width taken from a finite-difference
/// curvature, and the integrand rescaled by its maximum before integrating.
pub fn log_integral(log_f: impl Fn(f64) -> f64, search_lo: f64, search_hi: f64) -> f64 {
    let peak = golden_max(&log_f, search_lo, search_hi);
    let top = log_f(peak);
    let h = 1e-4 * (search_hi - search_lo);
    let curv = (log_f(peak + h) - 2.0 * top + log_f(peak - h)) / (h * h);
    let width = if curv < 0.0 { (-1.0 / curv).sqrt() } else { h };
    let half = 40.0 * width;
    let integral = integrate(|x| (log_f(x) - top).exp(), peak - half, peak + half, 4001);
    top + integral.ln()
}

/// `log integral l(theta, f) N(f; 0, diag(sigma^2)) df` for the truncated
/// two-channel model, one coefficient at a time.
pub fn log_marginal_by_quadrature(
    x1: &[f64],
    x2: &[f64],
    n: f64,
    sigmas: &[f64],
    decays: &[f64],
) -> f64 {
    let mut total = 0.0;
    for k in 0..x1.len() {
        let (y1, y2, s, a) = (x1[k], x2[k], sigmas[k], decays[k]);
        let log_f = |f: f64| {
            (n / (2.0 * std::f64::consts::PI)).ln()
                - 0.5 * n * (y1 - f).powi(2)
                - 0.5 * n * (y2 - a * f).powi(2)
                - 0.5 * (2.0 * std::f64::consts::PI * s * s).ln()
                - f * f / (2.0 * s * s)
        };
        let span = 10.0 * (y1.abs() + y2.abs() + s + 1.0);
        total += log_integral(log_f, -span, span);
    }
    total
}

/// Right-hand sides of the operator bounds for the heat semigroup, with the
/// slack used throughout: `lhs <= rhs (1 + 1e-12) + 1e-12`.
pub mod bounds {
    use std::f64::consts::{E, PI};

    pub fn holds(lhs: f64, rhs: f64) -> bool {
        lhs <= rhs * (1.0 + 1e-12) + 1e-12
    }

    /// `||K_t1 - K_t2||_{L2 -> S^eta}` upper bound.
    pub fn diff(t1: f64, t2: f64, t: f64, eta: f64) -> f64 {
        let p = (2.0 + eta) / 2.0;
        (t1 - t2).abs() * PI.powf(-eta) * t.powf(-eta / 2.0) * ((2.0 + eta) / (2.0 * E * t1.min(t2))).powf(p)
    }

    /// First-order remainder bound with the curvature evaluated at `at`.
    /// As stated the bound uses `at = theta0`; the mean-value form needs
    /// `at = min(theta, theta0)`.
    pub fn taylor(theta: f64, theta0: f64, at: f64, t: f64, eta: f64) -> f64 {
        let p = (4.0 + eta) / 2.0;
        (theta - theta0).powi(2) / (2.0 * PI.powf(eta) * t.powf(eta / 2.0)) * ((4.0 + eta) / (2.0 * E * at)).powf(p)
    }

    /// `||K_t1 f1 - K_t2 f2||` upper bound.
    pub fn lipschitz(t1: f64, t2: f64, t: f64, df: f64, n1: f64, n2: f64) -> f64 {
        df + PI / 2.0 * (t / t1.min(t2)).sqrt() * (t1 - t2).abs() * n1.min(n2)
    }

    /// Per-mode lower bound on `||(K_theta - K_theta0) f0||`.
    pub fn identifiability(theta: f64, theta0: f64, t: f64, k: usize, f0k: f64) -> f64 {
        t * (-(theta.max(theta0)) * PI * PI * t * (k * k) as f64).exp() * f0k.abs() * (theta - theta0).abs()
    }
}

/// Small random problem for the quadrature oracle: random `theta0`, `f0_k ~ N(0,1)/k`,
/// and a random prior regularity in `(0.5, 3)`.
pub fn oracle_dataset(m: usize, n: f64, seed: u64) -> (heatbvm::Observations, f64) {
    use heatbvm::*;
    let mut r = rng(seed);
    let theta0 = uniform(&mut r, 0.005, 0.05);
    let alpha = uniform(&mut r, 0.5, 3.0);
    let f0 = SineCoefficients::new((1..=m).map(|k| normal(&mut r) / k as f64).collect()).unwrap();
    let truth = TruthSpec::new(Diffusivity::new(theta0).unwrap(), f0, 1.0).unwrap();
    (generate(&truth, 1.0, n, m, seed, 1.0).unwrap(), alpha)
}

pub fn oracle_target(obs: &heatbvm::Observations, alpha: f64) -> heatbvm::PosteriorTarget {
    use heatbvm::*;
    let model = ModelConfig::new(0.001, 0.1, 1.0, obs.n(), obs.m()).unwrap();
    PosteriorTarget::new(obs.clone(), SeriesPrior::new(alpha, obs.m()).unwrap(), &model).unwrap()
}

/// Log marginal likelihood of `theta` by quadrature, up to a `theta`-free constant.
pub fn quadrature_log_marginal(obs: &heatbvm::Observations, alpha: f64, theta: f64) -> f64 {
    use std::f64::consts::PI;
    let m = obs.m();
    let sigmas: Vec<f64> = (1..=m).map(|k| heatbvm::sigma_k(alpha, k)).collect();
    let decays: Vec<f64> = (1..=m).map(|k| (-theta * PI * PI * (k * k) as f64).exp()).collect();
    log_marginal_by_quadrature(obs.x1(), obs.x2(), obs.n(), &sigmas, &decays)
}
