//! Sine-basis representation of the heat semigroup on [0, 1] with Dirichlet
//! boundaries, its derivative in the diffusivity, and the information
//! quantities built from them.
//!
//! A function is stored by its first `m` coefficients against
//! `e_k(x) = sqrt(2) sin(k pi x)`. Every operator here is diagonal in that
//! basis, so all actions, norms and operator norms are exact at truncation `m`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, exp_or_zero};

/// Truncated sine coefficients `(f_1, ..., f_m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SineCoefficients {
    coeffs: Vec<f64>,
}

impl SineCoefficients {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "truncation level m must be at least 1".into(),
            ));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coefficient {} is not finite",
                k + 1
            )));
        }
        Ok(Self { coeffs })
    }

    /// Panics if `m == 0`.
    pub fn zeros(m: usize) -> Self {
        assert!(m >= 1, "truncation level m must be at least 1");
        Self {
            coeffs: vec![0.0; m],
        }
    }

    /// The basis element `e_k` (1-based) truncated at `m`.
    pub fn basis(k: usize, m: usize) -> Self {
        assert!(k >= 1 && k <= m, "basis index {k} outside 1..={m}");
        let mut out = Self::zeros(m);
        out.coeffs[k - 1] = 1.0;
        out
    }

    /// Builds coefficients from a function of the 1-based index.
    pub fn from_fn(m: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((1..=m).map(f).collect())
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    /// 1-based access.
    pub fn get(&self, k: usize) -> f64 {
        self.coeffs[k - 1]
    }

    /// `(k, f_k)` pairs with 1-based `k`.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, &c)| (i + 1, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        compensated_sum(self.coeffs.iter().map(|c| c * c))
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.check_same_m(other)?;
        Ok(compensated_sum(
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b),
        ))
    }

    pub fn check_same_m(&self, other: &Self) -> Result<()> {
        if self.m() != other.m() {
            return Err(Error::TruncationMismatch {
                expected: self.m(),
                actual: other.m(),
            });
        }
        Ok(())
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_same_m(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map_indexed(|_, c| a * c)
    }

    fn map_indexed(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        Self {
            coeffs: self.iter_indexed().map(|(k, c)| f(k, c)).collect(),
        }
    }
}

impl TryFrom<Vec<f64>> for SineCoefficients {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SineCoefficients> for Vec<f64> {
    fn from(s: SineCoefficients) -> Self {
        s.coeffs
    }
}

/// Thermal diffusivity. Always finite and strictly positive; use
/// [`ModelConfig::diffusivity`] to also enforce the parameter interval.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Diffusivity(f64);

impl Diffusivity {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "diffusivity must be finite and > 0, got {value}"
            )));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Parameter interval `(theta_lo, theta_hi)`, final time, signal-to-noise
/// ratio and truncation level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub t_final: f64,
    pub n: f64,
    pub m: usize,
}

impl ModelConfig {
    pub fn new(theta_lo: f64, theta_hi: f64, t_final: f64, n: f64, m: usize) -> Result<Self> {
        if !(theta_lo.is_finite() && theta_hi.is_finite() && 0.0 < theta_lo && theta_lo < theta_hi)
        {
            return Err(Error::InvalidArgument(format!(
                "need 0 < theta_lo < theta_hi, got ({theta_lo}, {theta_hi})"
            )));
        }
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "final time must be > 0, got {t_final}"
            )));
        }
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "signal-to-noise ratio must be > 0, got {n}"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        Ok(Self {
            theta_lo,
            theta_hi,
            t_final,
            n,
            m,
        })
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.theta_lo < theta && theta < self.theta_hi
    }

    /// A diffusivity strictly inside the parameter interval.
    pub fn diffusivity(&self, value: f64) -> Result<Diffusivity> {
        if !self.contains(value) {
            return Err(Error::Domain {
                name: "theta",
                value,
                lo: self.theta_lo,
                hi: self.theta_hi,
            });
        }
        Diffusivity::new(value)
    }
}

fn check_time(t_final: f64) {
    assert!(
        t_final.is_finite() && t_final > 0.0,
        "final time must be > 0, got {t_final}"
    );
}

/// `pi^2 T k^2`, the decay rate of mode `k` per unit diffusivity.
#[inline]
pub fn mode_rate(t_final: f64, k: usize) -> f64 {
    let k = k as f64;
    PI * PI * t_final * k * k
}

/// Multiplier `exp(-theta pi^2 T k^2)` of mode `k` under `K_theta`.
#[inline]
pub fn decay_factor(theta: f64, t_final: f64, k: usize) -> f64 {
    exp_or_zero(-theta * mode_rate(t_final, k))
}

/// Forward operator `K_theta`: coefficient `k` is damped by `exp(-theta pi^2 T k^2)`.
pub fn apply_k(f: &SineCoefficients, theta: Diffusivity, t_final: f64) -> SineCoefficients {
    check_time(t_final);
    f.map_indexed(|k, c| c * decay_factor(theta.value(), t_final, k))
}

/// Derivative of `K_theta` in `theta`.
pub fn apply_kdot(f: &SineCoefficients, theta: Diffusivity, t_final: f64) -> SineCoefficients {
    check_time(t_final);
    f.map_indexed(|k, c| {
        -mode_rate(t_final, k) * decay_factor(theta.value(), t_final, k) * c
    })
}

/// Truncated series solution `u(x, t)` of the heat equation started at `f`.
pub fn heat_solution(f: &SineCoefficients, theta: Diffusivity, x: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain {
            name: "t",
            value: t,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    let terms = f.iter_indexed().map(|(k, c)| {
        let damp = if t == 0.0 {
            1.0
        } else {
            decay_factor(theta.value(), t, k)
        };
        c * damp * (k as f64 * PI * x).sin()
    });
    Ok(std::f64::consts::SQRT_2 * compensated_sum(terms))
}

/// `sum_k k^(2 eta) f_k^2`.
pub fn sobolev_norm_sq(f: &SineCoefficients, eta: f64) -> f64 {
    assert!(eta >= 0.0, "eta must be >= 0, got {eta}");
    compensated_sum(
        f.iter_indexed()
            .map(|(k, c)| (k as f64).powf(2.0 * eta) * c * c),
    )
}

/// Inner product on `R x L^2` induced by the local expansion at `(theta0, f0)`:
/// `<g1, g2> + <K g1 + a1 Kdot f0, K g2 + a2 Kdot f0>`.
pub fn l_inner_product(
    a1: f64,
    g1: &SineCoefficients,
    a2: f64,
    g2: &SineCoefficients,
    theta0: Diffusivity,
    f0: &SineCoefficients,
    t_final: f64,
) -> Result<f64> {
    g1.check_same_m(g2)?;
    g1.check_same_m(f0)?;
    let score = apply_kdot(f0, theta0, t_final);
    let left = apply_k(g1, theta0, t_final).lin_comb(1.0, &score, a1)?;
    let right = apply_k(g2, theta0, t_final).lin_comb(1.0, &score, a2)?;
    Ok(g1.dot(g2)? + left.dot(&right)?)
}

/// `||(a, g)||_L^2`.
pub fn l_norm_sq(
    a: f64,
    g: &SineCoefficients,
    theta0: Diffusivity,
    f0: &SineCoefficients,
    t_final: f64,
) -> Result<f64> {
    l_inner_product(a, g, a, g, theta0, f0, t_final)
}

/// `w_k = e^{-2 theta pi^2 T k^2} / (1 + e^{-2 theta pi^2 T k^2})`.
fn projection_weight(theta: f64, t_final: f64, k: usize) -> f64 {
    let w = exp_or_zero(-2.0 * theta * mode_rate(t_final, k));
    w / (1.0 + w)
}

/// Least favourable direction `(I + K^2)^{-1} K Kdot f0`, evaluated in closed form.
pub fn least_favourable_direction(
    theta0: Diffusivity,
    f0: &SineCoefficients,
    t_final: f64,
) -> SineCoefficients {
    check_time(t_final);
    f0.map_indexed(|k, c| {
        -mode_rate(t_final, k) * c * projection_weight(theta0.value(), t_final, k)
    })
}

/// Fisher information for `theta` when the initial condition is known.
pub fn parametric_fisher(theta0: Diffusivity, f0: &SineCoefficients, t_final: f64) -> f64 {
    apply_kdot(f0, theta0, t_final).l2_norm_sq()
}

/// Efficient information `sum_k (pi^2 T k^2)^2 f_k^2 w_k`.
pub fn efficient_fisher(theta0: Diffusivity, f0: &SineCoefficients, t_final: f64) -> f64 {
    check_time(t_final);
    compensated_sum(f0.iter_indexed().map(|(k, c)| {
        let r = mode_rate(t_final, k);
        r * r * c * c * projection_weight(theta0.value(), t_final, k)
    }))
}

/// `||K_theta1 - K_theta2||_{L^2 -> S^eta}` at truncation `m`.
pub fn operator_diff_norm(
    theta1: Diffusivity,
    theta2: Diffusivity,
    t_final: f64,
    eta: f64,
    m: usize,
) -> f64 {
    check_time(t_final);
    assert!(eta >= 0.0, "eta must be >= 0, got {eta}");
    (1..=m)
        .map(|k| {
            let diff = decay_factor(theta1.value(), t_final, k)
                - decay_factor(theta2.value(), t_final, k);
            (k as f64).powf(eta) * diff.abs()
        })
        .fold(0.0, f64::max)
}

/// `||K_theta - K_theta0 - (theta - theta0) Kdot_theta0||_{L^2 -> S^eta}` at truncation `m`.
pub fn taylor_remainder_norm(
    theta: Diffusivity,
    theta0: Diffusivity,
    t_final: f64,
    eta: f64,
    m: usize,
) -> f64 {
    check_time(t_final);
    assert!(eta >= 0.0, "eta must be >= 0, got {eta}");
    let step = theta.value() - theta0.value();
    (1..=m)
        .map(|k| {
            let base = decay_factor(theta0.value(), t_final, k);
            let r = decay_factor(theta.value(), t_final, k) - base
                + step * mode_rate(t_final, k) * base;
            (k as f64).powf(eta) * r.abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn th(v: f64) -> Diffusivity {
        Diffusivity::new(v).unwrap()
    }

    #[test]
    fn coefficients_reject_empty_and_nan() {
        assert!(SineCoefficients::new(vec![]).is_err());
        assert!(SineCoefficients::new(vec![1.0, f64::NAN]).is_err());
        assert!(SineCoefficients::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn model_config_bounds() {
        assert!(ModelConfig::new(0.0, 0.1, 1.0, 1e5, 100).is_err());
        assert!(ModelConfig::new(0.1, 0.1, 1.0, 1e5, 100).is_err());
        assert!(ModelConfig::new(0.001, 0.1, 0.0, 1e5, 100).is_err());
        let cfg = ModelConfig::new(0.001, 0.1, 1.0, 1e5, 100).unwrap();
        assert!(cfg.diffusivity(0.01).is_ok());
        assert!(cfg.diffusivity(0.1).is_err());
        assert!(cfg.diffusivity(0.0005).is_err());
    }

    #[test]
    fn apply_k_examples() {
        let z = apply_k(&SineCoefficients::zeros(7), th(0.3), 2.0);
        assert!(z.is_zero());

        let out = apply_k(&SineCoefficients::basis(1, 3), th(0.01), 1.0);
        assert_relative_eq!(out.get(1), 0.906_018_055_788_923, max_relative = 1e-14);
        assert_eq!(out.get(2), 0.0);

        let f = SineCoefficients::new(vec![1.0, 1.0]).unwrap();
        let out = apply_k(&f, th(0.05), 1.0);
        assert_relative_eq!(out.get(1), 0.610_498_025_265_797_2, max_relative = 1e-14);
        assert_relative_eq!(out.get(2), 0.138_911_133_142_800_24, max_relative = 1e-14);
    }

    #[test]
    fn apply_kdot_examples() {
        assert!(apply_kdot(&SineCoefficients::zeros(4), th(0.01), 1.0).is_zero());
        let out = apply_kdot(&SineCoefficients::basis(1, 2), th(0.01), 1.0);
        assert_relative_eq!(out.get(1), -8.942_039_790_880_778, max_relative = 1e-14);
    }

    #[test]
    fn kdot_matches_central_difference() {
        let f = SineCoefficients::from_fn(30, |k| 1.0 / (k as f64).powi(2)).unwrap();
        let theta = 0.01;
        let h = 1e-6;
        let plus = apply_k(&f, th(theta + h), 1.0);
        let minus = apply_k(&f, th(theta - h), 1.0);
        let exact = apply_kdot(&f, th(theta), 1.0);
        for k in 1..=30 {
            let fd = (plus.get(k) - minus.get(k)) / (2.0 * h);
            let e = exact.get(k);
            if e.abs() > 1e-12 {
                assert_relative_eq!(fd, e, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn underflowed_modes_are_exact_zero() {
        // theta * pi^2 * k^2 > 745 for k = 100, theta = 0.1
        let out = apply_k(&SineCoefficients::basis(100, 100), th(0.1), 1.0);
        assert_eq!(out.get(100), 0.0);
        let out = apply_kdot(&SineCoefficients::basis(100, 100), th(0.1), 1.0);
        assert_eq!(out.get(100), 0.0);
    }

    #[test]
    fn heat_solution_examples() {
        let e1 = SineCoefficients::basis(1, 5);
        let f = SineCoefficients::from_fn(20, |k| (k as f64).recip()).unwrap();
        for g in [&e1, &f] {
            assert_eq!(heat_solution(g, th(0.01), 0.0, 0.7).unwrap(), 0.0);
            assert_eq!(heat_solution(g, th(0.01), 1.0, 0.7).unwrap(), 0.0);
        }
        assert_relative_eq!(
            heat_solution(&e1, th(0.01), 0.5, 0.0).unwrap(),
            std::f64::consts::SQRT_2,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            heat_solution(&e1, th(0.01), 0.5, 1.0).unwrap(),
            1.281_303_022_251_598_3,
            max_relative = 1e-14
        );
        assert!(heat_solution(&e1, th(0.01), 1.5, 1.0).is_err());
        assert!(heat_solution(&e1, th(0.01), -0.1, 1.0).is_err());
        assert!(heat_solution(&e1, th(0.01), 0.5, -1.0).is_err());
    }

    #[test]
    fn sobolev_norm_examples() {
        assert_eq!(sobolev_norm_sq(&SineCoefficients::zeros(3), 1.0), 0.0);
        assert_eq!(sobolev_norm_sq(&SineCoefficients::basis(2, 3), 1.0), 4.0);
        let f0 = SineCoefficients::from_fn(100, |k| (k as f64).powi(-2)).unwrap();
        assert_relative_eq!(sobolev_norm_sq(&f0, 1.5), 5.187_377_517_639_62, max_relative = 1e-13);
        assert_relative_eq!(sobolev_norm_sq(&f0, 0.0), f0.l2_norm_sq(), max_relative = 1e-15);
    }

    #[test]
    fn least_favourable_direction_examples() {
        assert!(least_favourable_direction(th(0.01), &SineCoefficients::zeros(5), 1.0).is_zero());
        let g = least_favourable_direction(th(0.01), &SineCoefficients::basis(1, 4), 1.0);
        assert_relative_eq!(g.get(1), -4.449_332_029_615_024, max_relative = 1e-13);
    }

    #[test]
    fn least_favourable_direction_solves_resolvent_equation() {
        let f0 = SineCoefficients::from_fn(40, |k| (k as f64).powf(-1.3) * (k as f64).cos()).unwrap();
        let theta = th(0.02);
        let g = least_favourable_direction(theta, &f0, 1.0);
        let rhs = apply_k(&apply_kdot(&f0, theta, 1.0), theta, 1.0);
        for k in 1..=40 {
            let a = decay_factor(0.02, 1.0, k);
            let lhs = (1.0 + a * a) * g.get(k);
            assert!((lhs - rhs.get(k)).abs() <= 1e-13 * rhs.get(k).abs().max(1e-300));
        }
    }

    #[test]
    fn fisher_examples() {
        let zero = SineCoefficients::zeros(3);
        assert_eq!(parametric_fisher(th(0.01), &zero, 1.0), 0.0);
        assert_eq!(efficient_fisher(th(0.01), &zero, 1.0), 0.0);

        let e1 = SineCoefficients::basis(1, 3);
        let e2 = SineCoefficients::basis(2, 3);
        assert_relative_eq!(parametric_fisher(th(0.01), &e1, 1.0), 79.960_075_621_695_15, max_relative = 1e-13);
        assert_relative_eq!(efficient_fisher(th(0.01), &e1, 1.0), 43.913_146_981_396_29, max_relative = 1e-13);

        let both = e1.lin_comb(1.0, &e2, 1.0).unwrap();
        assert_relative_eq!(
            parametric_fisher(th(0.01), &both, 1.0),
            parametric_fisher(th(0.01), &e1, 1.0) + parametric_fisher(th(0.01), &e2, 1.0),
            max_relative = 1e-14
        );
    }

    #[test]
    fn l_inner_product_examples() {
        let f0 = SineCoefficients::from_fn(10, |k| (k as f64).powi(-2)).unwrap();
        let zero = SineCoefficients::zeros(10);
        let g = SineCoefficients::from_fn(10, |k| (k as f64).sin()).unwrap();
        assert_eq!(l_inner_product(0.0, &zero, 2.0, &g, th(0.01), &f0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(
            l_norm_sq(1.0, &zero, th(0.01), &f0, 1.0).unwrap(),
            parametric_fisher(th(0.01), &f0, 1.0),
            max_relative = 1e-14
        );
        let short = SineCoefficients::zeros(9);
        assert!(matches!(
            l_inner_product(1.0, &short, 1.0, &g, th(0.01), &f0, 1.0),
            Err(Error::TruncationMismatch { .. })
        ));
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_diff_norm(th(0.02), th(0.02), 1.0, 1.0, 50), 0.0);
        assert_eq!(taylor_remainder_norm(th(0.02), th(0.02), 1.0, 2.0, 50), 0.0);
        // sup over k <= 200 is attained at k = 3
        assert_relative_eq!(
            operator_diff_norm(th(0.01), th(0.02), 1.0, 0.0, 200),
            0.242_144_564_868_174_95,
            max_relative = 1e-13
        );
    }

    #[test]
    fn taylor_remainder_is_quadratic() {
        let theta0 = 0.02;
        let vals: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|d| taylor_remainder_norm(th(theta0 + d), th(theta0), 1.0, 0.0, 200))
            .collect();
        assert!(vals[0] / vals[1] > 3.5, "ratio {}", vals[0] / vals[1]);
        assert!(vals[1] / vals[2] > 3.7, "ratio {}", vals[1] / vals[2]);
    }
}
