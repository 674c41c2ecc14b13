//! Model constants, constitutive laws and the ECM reaction term.
//!
//! The reaction term is
//!
//! ```text
//! Q(σ, m, E) = −γ m E + φ(E) − E μ(E) (σ − σ̄)
//! ```
//!
//! with default laws `φ(E) = μ₁(1 − E)` and `μ(E) = μ / (1 + E)`. Any type
//! implementing [`Constitutive`] can replace the defaults.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParams {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("no sign change of Q on (0, E_cap] at sigma={sigma}, m={m}: Q(0)={q_lo}, Q(E_cap)={q_hi}")]
    NoSignChange {
        sigma: f64,
        m: f64,
        q_lo: f64,
        q_hi: f64,
    },
}

/// Physical constants of the system. Serialized as a flat JSON object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Ratio of nutrient diffusion to growth time scale.
    pub c: f64,
    /// Nutrient consumption rate.
    pub lambda: f64,
    /// MDE diffusivity.
    #[serde(rename = "D_m")]
    pub d_m: f64,
    /// MDE production rate.
    pub alpha: f64,
    /// MDE decay rate.
    pub beta: f64,
    /// ECM degradation rate by MDE.
    pub gamma: f64,
    /// Apoptosis threshold, in (0, 1).
    pub sigma_bar: f64,
    /// Mobility scale in `μ(E) = mu / (1 + E)`.
    pub mu: f64,
    /// ECM reorganization scale in `φ(E) = mu1 (1 − E)`.
    pub mu1: f64,
    /// Upper bound N for the ECM density.
    #[serde(rename = "E_cap")]
    pub e_cap: f64,
}

impl Default for ModelParams {
    /// Low-mobility parameter set (μ = 0.5).
    fn default() -> Self {
        Self {
            c: 1e-3,
            lambda: 2.0,
            d_m: 1.0,
            alpha: 0.5,
            beta: 1.0,
            gamma: 10.0,
            sigma_bar: 0.7,
            mu: 0.5,
            mu1: 0.8,
            e_cap: 1.0,
        }
    }
}

/// Literature ranges for a subset of the parameters, `(name, lo, hi)`.
pub const TABLE_RANGES: [(&str, f64, f64); 8] = [
    ("c", 1e-5, 1e-3),
    ("lambda", 0.05, 2.0),
    ("D_m", 1e-3, 10.0),
    ("mu", 0.9, 1.45),
    ("mu1", 0.15, 2.5),
    ("gamma", 1.0, 20.0),
    ("alpha", 0.01, 5.0),
    ("beta", 0.1, 10.0),
];

impl ModelParams {
    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    /// Steady MDE level α/β.
    pub fn m_steady(&self) -> f64 {
        self.alpha / self.beta
    }

    pub fn fields(&self) -> [(&'static str, f64); 10] {
        [
            ("c", self.c),
            ("lambda", self.lambda),
            ("D_m", self.d_m),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("sigma_bar", self.sigma_bar),
            ("mu", self.mu),
            ("mu1", self.mu1),
            ("E_cap", self.e_cap),
        ]
    }

    /// Sets a field by its serialized name.
    pub fn set(&mut self, name: &str, value: f64) -> Option<()> {
        let slot = match name {
            "c" => &mut self.c,
            "lambda" => &mut self.lambda,
            "D_m" => &mut self.d_m,
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "gamma" => &mut self.gamma,
            "sigma_bar" => &mut self.sigma_bar,
            "mu" => &mut self.mu,
            "mu1" => &mut self.mu1,
            "E_cap" => &mut self.e_cap,
            _ => return None,
        };
        *slot = value;
        Some(())
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in self.fields() {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::InvalidParams {
                    name,
                    value,
                    reason: "must be finite and strictly positive",
                });
            }
        }
        if self.sigma_bar >= 1.0 {
            return Err(ModelError::InvalidParams {
                name: "sigma_bar",
                value: self.sigma_bar,
                reason: "must lie in (0, 1)",
            });
        }
        Ok(())
    }

    /// Parameters outside the literature ranges. These are warnings only.
    pub fn range_warnings(&self) -> Vec<String> {
        let values = self.fields();
        TABLE_RANGES
            .iter()
            .filter_map(|&(name, lo, hi)| {
                let v = values.iter().find(|(n, _)| *n == name)?.1;
                (v < lo || v > hi).then(|| format!("{name}={v} outside literature range [{lo}, {hi}]"))
            })
            .collect()
    }
}

/// Constitutive laws μ(E) and φ(E) with their derivatives.
///
/// Implementations should keep μ positive and nonincreasing, and φ
/// decreasing with φ(0) > 0.
pub trait Constitutive: Send + Sync {
    fn mu(&self, e: f64) -> f64;
    fn mu_prime(&self, e: f64) -> f64;
    fn phi(&self, e: f64) -> f64;
    fn phi_prime(&self, e: f64) -> f64;
}

/// `μ(E) = mu / (1 + E)`, `φ(E) = mu1 (1 − E)`.
///
/// φ turns negative for E > 1; the dynamics keep E below `h ≤ E_cap`, so
/// this only matters for user-chosen `E_cap > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardLaws {
    pub mu: f64,
    pub mu1: f64,
}

impl StandardLaws {
    pub fn from_params(p: &ModelParams) -> Self {
        Self { mu: p.mu, mu1: p.mu1 }
    }
}

impl Constitutive for StandardLaws {
    fn mu(&self, e: f64) -> f64 {
        self.mu / (1.0 + e)
    }
    fn mu_prime(&self, e: f64) -> f64 {
        -self.mu / ((1.0 + e) * (1.0 + e))
    }
    fn phi(&self, e: f64) -> f64 {
        self.mu1 * (1.0 - e)
    }
    fn phi_prime(&self, _e: f64) -> f64 {
        -self.mu1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QPartials {
    pub d_e: f64,
    pub d_sigma: f64,
}

/// Parameters bundled with a set of constitutive laws.
#[derive(Debug, Clone)]
pub struct Model<L: Constitutive = StandardLaws> {
    pub params: ModelParams,
    pub laws: L,
}

impl Model<StandardLaws> {
    pub fn new(params: ModelParams) -> Self {
        Self {
            laws: StandardLaws::from_params(&params),
            params,
        }
    }
}

impl Default for Model<StandardLaws> {
    fn default() -> Self {
        Self::new(ModelParams::default())
    }
}

pub const H_ROOT_TOL: f64 = 1e-12;

impl<L: Constitutive> Model<L> {
    pub fn with_laws(params: ModelParams, laws: L) -> Self {
        Self { params, laws }
    }

    pub fn q(&self, sigma: f64, m: f64, e: f64) -> f64 {
        let p = &self.params;
        -p.gamma * m * e + self.laws.phi(e) - e * self.laws.mu(e) * (sigma - p.sigma_bar)
    }

    pub fn q_partials(&self, sigma: f64, m: f64, e: f64) -> QPartials {
        let p = &self.params;
        let mu = self.laws.mu(e);
        QPartials {
            d_e: -p.gamma * m + self.laws.phi_prime(e)
                - (mu + e * self.laws.mu_prime(e)) * (sigma - p.sigma_bar),
            d_sigma: -mu * e,
        }
    }

    /// Proliferation-driven divergence `μ(E)(σ − σ̄)`.
    pub fn growth(&self, sigma: f64, e: f64) -> f64 {
        self.laws.mu(e) * (sigma - self.params.sigma_bar)
    }

    /// The root `h ∈ (0, E_cap]` of `E ↦ Q(σ, m, E)`, by bisection to `tol`.
    pub fn h_root(&self, sigma: f64, m: f64, tol: f64) -> Result<f64, ModelError> {
        let e_cap = self.params.e_cap;
        let q_lo = self.q(sigma, m, 0.0);
        let q_hi = self.q(sigma, m, e_cap);
        if !(q_lo > 0.0 && q_hi < 0.0) {
            return Err(ModelError::NoSignChange { sigma, m, q_lo, q_hi });
        }
        let (mut lo, mut hi) = (0.0_f64, e_cap);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.q(sigma, m, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `h` at the stationary MDE level and the stationary nutrient at `r`.
    pub fn h_stationary(&self, r: f64, radius: f64) -> Result<f64, ModelError> {
        let sigma = sigma_stationary(r, radius, self.params.lambda);
        self.h_root(sigma, self.params.m_steady(), H_ROOT_TOL)
    }

    pub fn check_structural(&self, sample: &SampleBox) -> StructuralReport {
        let p = &self.params;
        let m = p.m_steady();
        let mut violations = Vec::new();
        for i in 1..=sample.n_sigma {
            let sigma = i as f64 / sample.n_sigma as f64;
            for j in 1..=sample.n_e {
                let e = p.e_cap * j as f64 / sample.n_e as f64;
                let value = self.q_partials(sigma, m, e).d_e + self.laws.mu(e) * p.sigma_bar;
                if value >= 0.0 {
                    violations.push(Violation {
                        sigma,
                        e,
                        value,
                        kind: ViolationKind::Monotonicity,
                    });
                }
            }
            let at_cap = self.q(sigma, m, p.e_cap);
            if at_cap >= 0.0 {
                violations.push(Violation {
                    sigma,
                    e: p.e_cap,
                    value: at_cap,
                    kind: ViolationKind::CapNotBounding,
                });
            }
        }
        StructuralReport {
            samples: sample.n_sigma * sample.n_e,
            violations,
        }
    }

    /// Necessary condition for a stationary solution of radius `radius`.
    pub fn viability(&self, radius: f64) -> bool {
        sigma_stationary(0.0, radius, self.params.lambda) < self.params.sigma_bar
    }
}

/// Sampling grid over `(σ, E) ∈ (0, 1] × (0, E_cap]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleBox {
    pub n_sigma: usize,
    pub n_e: usize,
}

impl Default for SampleBox {
    fn default() -> Self {
        Self { n_sigma: 200, n_e: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    /// `∂Q/∂E + μ(E)σ̄ ≥ 0`.
    Monotonicity,
    /// `Q(σ, α/β, E_cap) ≥ 0`.
    CapNotBounding,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub sigma: f64,
    pub e: f64,
    pub value: f64,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralReport {
    pub samples: usize,
    pub violations: Vec<Violation>,
}

impl StructuralReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

const SINHC_SERIES_CUTOFF: f64 = 1e-4;

/// `sinh(x)/x`, with the series near zero.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < SINHC_SERIES_CUTOFF {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

/// Derivative of `sinh(x)/x`.
pub fn sinhc_prime(x: f64) -> f64 {
    if x.abs() < 1.0 {
        // Σ 2k x^(2k−1) / (2k+1)!
        let x2 = x * x;
        let mut term = x / 3.0;
        let mut sum = term;
        for k in 2..=10 {
            let k = k as f64;
            term *= x2 * k / ((k - 1.0) * (2.0 * k) * (2.0 * k + 1.0));
            sum += term;
        }
        sum
    } else {
        (x * x.cosh() - x.sinh()) / (x * x)
    }
}

/// Second derivative of `sinh(x)/x`.
pub fn sinhc_second(x: f64) -> f64 {
    if x.abs() < 1.0 {
        // Σ 2k (2k−1) x^(2k−2) / (2k+1)!
        let x2 = x * x;
        let mut term = 1.0 / 3.0;
        let mut sum = term;
        for k in 2..=10 {
            let k = k as f64;
            term *= x2 * k * (2.0 * k - 1.0) / ((k - 1.0) * (2.0 * k - 3.0) * (2.0 * k) * (2.0 * k + 1.0));
            sum += term;
        }
        sum
    } else {
        // (sinh x / x)'' = sinh x / x − 2 (sinh x / x)' / x
        sinhc(x) - 2.0 * sinhc_prime(x) / x
    }
}

/// Ratio `sinhc(a)/sinhc(b)` without overflow for large arguments.
fn sinhc_ratio(a: f64, b: f64) -> f64 {
    if b > 30.0 {
        if a < SINHC_SERIES_CUTOFF {
            return sinhc(a) * b / b.sinh();
        }
        // sinh(a)/sinh(b) = e^{a−b} (1 − e^{−2a}) / (1 − e^{−2b})
        let ratio = (a - b).exp() * (-(-2.0 * a).exp_m1()) / (-(-2.0 * b).exp_m1());
        ratio * b / a
    } else {
        sinhc(a) / sinhc(b)
    }
}

/// Stationary nutrient `σ(r) = R sinh(√λ r) / (r sinh(√λ R))`.
pub fn sigma_stationary(r: f64, radius: f64, lambda: f64) -> f64 {
    let k = lambda.sqrt();
    sinhc_ratio(k * r, k * radius)
}

/// `∂σ/∂r` of the stationary nutrient.
pub fn sigma_stationary_r(r: f64, radius: f64, lambda: f64) -> f64 {
    let k = lambda.sqrt();
    k * sinhc_prime(k * r) / sinhc(k * radius)
}

/// `∂²σ/∂r²` of the stationary nutrient.
pub fn sigma_stationary_rr(r: f64, radius: f64, lambda: f64) -> f64 {
    let k = lambda.sqrt();
    lambda * sinhc_second(k * r) / sinhc(k * radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(mu: f64) -> Model {
        Model::new(ModelParams::default().with_mu(mu))
    }

    /// Positive root of `−5.8E² − 5.15E + 0.8 = 0`, i.e. of
    /// `−5E + 0.8(1−E) − 0.15E/(1+E)` multiplied through by `(1+E)`.
    fn quadratic_oracle() -> f64 {
        let (a, b, c) = (5.8_f64, 5.15_f64, -0.8_f64);
        (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a)
    }

    #[test]
    fn q_at_zero_ecm_is_phi_zero() {
        let m = model(0.5);
        assert_eq!(m.q(0.3, 0.5, 0.0), 0.8);
        assert_eq!(m.q(1.0, 2.0, 0.0), m.laws.phi(0.0));
    }

    #[test]
    fn q_at_threshold_drops_proliferation() {
        let m = model(0.5);
        for e in [0.1, 0.4, 0.9] {
            let expected = -10.0 * 0.5 * e + 0.8 * (1.0 - e);
            assert!((m.q(0.7, 0.5, e) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn q_root_matches_quadratic() {
        let m = model(0.5);
        let h = m.h_root(1.0, 0.5, 1e-12).unwrap();
        let oracle = quadratic_oracle();
        assert!((h - oracle).abs() < 1e-11, "{h} vs {oracle}");
        assert!((h - 0.135).abs() < 1e-3);
        assert!(m.q(1.0, 0.5, h).abs() < 1e-10);
    }

    #[test]
    fn h_root_at_threshold_is_closed_form() {
        let m = model(0.5);
        let h = m.h_root(0.7, 0.5, 1e-12).unwrap();
        assert!((h - 0.8 / 5.8).abs() < 1e-11);
    }

    #[test]
    fn h_root_decreases_in_sigma() {
        let m = model(0.5);
        let mut prev = f64::INFINITY;
        for i in 1..=20 {
            let h = m.h_root(i as f64 / 20.0, 0.5, 1e-12).unwrap();
            assert!(h < prev);
            prev = h;
        }
    }

    #[test]
    fn h_root_reports_missing_sign_change() {
        let mut p = ModelParams::default();
        p.e_cap = 0.05;
        let err = Model::new(p).h_root(1.0, 0.5, 1e-12).unwrap_err();
        assert!(matches!(err, ModelError::NoSignChange { .. }));
    }

    #[test]
    fn partials_at_edges() {
        let m = model(0.5);
        assert_eq!(m.q_partials(0.4, 0.5, 0.0).d_sigma, 0.0);
        let d = m.q_partials(0.7, 0.5, 0.3);
        assert!((d.d_e - (-5.0 - 0.8)).abs() < 1e-15);
    }

    #[test]
    fn partials_match_central_differences() {
        let m = model(0.5);
        let (s, mm, e, h) = (0.9, 0.5, 0.3, 1e-5);
        let d = m.q_partials(s, mm, e);
        let fd_e = (m.q(s, mm, e + h) - m.q(s, mm, e - h)) / (2.0 * h);
        let fd_s = (m.q(s + h, mm, e) - m.q(s - h, mm, e)) / (2.0 * h);
        assert!((d.d_e - fd_e).abs() <= 1e-6);
        assert!((d.d_sigma - fd_s).abs() <= 1e-6);
    }

    #[test]
    fn sigma_boundary_and_center() {
        assert!((sigma_stationary(1.9635, 1.9635, 2.0) - 1.0).abs() < 1e-15);
        // √2·1.9635 / sinh(√2·1.9635)
        let x = 2.0_f64.sqrt() * 1.9635;
        let oracle = x / x.sinh();
        let center = sigma_stationary(0.0, 1.9635, 2.0);
        assert!((center - oracle).abs() < 1e-14);
        assert!((center - 0.347).abs() < 1e-3);
        assert!((sigma_stationary(0.0, 1e-9, 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sinhc_series_match_closed_forms() {
        for &x in &[0.3_f64, 0.7, 0.999, 1.0, 1.5] {
            let d1 = (x * x.cosh() - x.sinh()) / (x * x);
            let d2 = x.sinh() / x - 2.0 * d1 / x;
            assert!((sinhc_prime(x) - d1).abs() < 1e-14, "x={x}");
            assert!((sinhc_second(x) - d2).abs() < 1e-14, "x={x}");
        }
        assert!((sinhc_second(0.0) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn sigma_large_radius_is_finite() {
        let s = sigma_stationary(599.0, 600.0, 2.0);
        assert!(s.is_finite() && s > 0.0 && s < 1.0);
        assert!(sigma_stationary(0.0, 600.0, 2.0) >= 0.0);
        assert!((sigma_stationary(600.0, 600.0, 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_derivatives_match_differences() {
        let (radius, lam, h) = (1.9635, 2.0, 1e-5);
        for &r in &[0.0005, 0.01, 0.5, 1.2, 1.9] {
            let fd = (sigma_stationary(r + h, radius, lam) - sigma_stationary(r - h, radius, lam)) / (2.0 * h);
            assert!((sigma_stationary_r(r, radius, lam) - fd).abs() < 1e-8, "r={r}");
            let fd2 = (sigma_stationary_r(r + h, radius, lam) - sigma_stationary_r(r - h, radius, lam))
                / (2.0 * h);
            assert!((sigma_stationary_rr(r, radius, lam) - fd2).abs() < 1e-7, "r={r}");
        }
    }

    #[test]
    fn structural_conditions_hold_for_default() {
        let report = model(0.5).check_structural(&SampleBox::default());
        assert!(report.holds(), "{:?}", report.violations.first());
        assert_eq!(report.samples, 40_000);
    }

    #[test]
    fn structural_conditions_flag_large_mobility() {
        let report = model(10.0).check_structural(&SampleBox::default());
        assert!(!report.holds());
        assert!(report
            .violations
            .iter()
            .all(|v| v.kind == ViolationKind::Monotonicity));
    }

    #[test]
    fn structural_conditions_hold_for_fast_degradation() {
        let mut p = ModelParams::default().with_mu(10.0);
        p.gamma = 1e6;
        assert!(Model::new(p).check_structural(&SampleBox::default()).holds());
    }

    #[test]
    fn viability_threshold() {
        let m = model(0.5);
        assert!(m.viability(1.9635));
        assert!(!m.viability(1e-6));
        let mut p = ModelParams::default();
        p.sigma_bar = 1.0 - 1e-9;
        assert!(Model::new(p).viability(3.0));
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::default().validate().is_ok());
        let mut p = ModelParams::default();
        p.sigma_bar = 1.0;
        assert!(p.validate().is_err());
        p = ModelParams::default();
        p.beta = 0.0;
        assert!(p.validate().is_err());
        p = ModelParams::default();
        p.lambda = f64::NAN;
        assert!(p.validate().is_err());
    }

    #[test]
    fn params_json_uses_flat_field_names() {
        let json = serde_json::to_value(ModelParams::default()).unwrap();
        let keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        for k in ["c", "lambda", "D_m", "alpha", "beta", "gamma", "sigma_bar", "mu", "mu1", "E_cap"] {
            assert!(keys.iter().any(|x| x == k), "missing {k}");
        }
        let mut obj = json.as_object().unwrap().clone();
        obj.insert("extra".into(), 1.0.into());
        let err = serde_json::from_value::<ModelParams>(obj.into());
        assert!(err.is_err());
    }

    #[test]
    fn range_warnings_flag_default_parameters() {
        // μ = 0.5 sits below the literature mobility range
        let w = ModelParams::default().range_warnings();
        assert!(w.iter().any(|s| s.starts_with("mu=")));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn partials_match_fd(s in 0.05f64..1.0, m in 0.0f64..2.0, e in 0.01f64..0.99, mu in 0.1f64..10.0) {
                let model = Model::new(ModelParams::default().with_mu(mu));
                let h = 1e-5;
                let d = model.q_partials(s, m, e);
                let fd_e = (model.q(s, m, e + h) - model.q(s, m, e - h)) / (2.0 * h);
                let fd_s = (model.q(s + h, m, e) - model.q(s - h, m, e)) / (2.0 * h);
                prop_assert!((d.d_e - fd_e).abs() <= 1e-6 * (1.0 + d.d_e.abs()));
                prop_assert!((d.d_sigma - fd_s).abs() <= 1e-6 * (1.0 + d.d_sigma.abs()));
            }

            #[test]
            fn h_root_is_bracketed(s in 0.01f64..=1.0) {
                let model = Model::new(ModelParams::default());
                let tol = 1e-12;
                let m = model.params.m_steady();
                let h = model.h_root(s, m, tol).unwrap();
                let delta = 10.0 * tol;
                prop_assert!(model.q(s, m, h - delta) > 0.0);
                prop_assert!(model.q(s, m, h + delta) < 0.0);
                let n1 = model.h_root(1.0, m, tol).unwrap();
                prop_assert!(n1 - 1e-12 <= h && h <= model.params.e_cap);
            }

            #[test]
            fn sigma_is_increasing(radius in 0.05f64..8.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                prop_assume!(hi - lo > 1e-6);
                let s_lo = sigma_stationary(lo * radius, radius, 2.0);
                let s_hi = sigma_stationary(hi * radius, radius, 2.0);
                prop_assert!(s_lo < s_hi);
                prop_assert!(s_lo > 0.0 && s_hi <= 1.0 + 1e-15);
            }

            #[test]
            fn mobility_positive_nonincreasing(e1 in 0.0f64..1.0, e2 in 0.0f64..1.0) {
                let laws = StandardLaws { mu: 0.5, mu1: 0.8 };
                let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
                prop_assert!(laws.mu(lo) > 0.0 && laws.mu(hi) > 0.0);
                prop_assert!(laws.mu(hi) <= laws.mu(lo));
                prop_assert!(laws.phi(hi) <= laws.phi(lo));
            }
        }
    }
}
