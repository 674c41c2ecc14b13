use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{stationary_on_grid, RadialProfile, TimeDepError};
use crate::stationary::StationarySolution;

/// Largest second-order one-sided slope estimate accepted as zero,
/// relative to `1 + max|f|`.
const SLOPE_TOL: f64 = 1e-2;

fn slope_at_zero(f: &[f64], h: f64) -> f64 {
    (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
}

fn slope_at_one(f: &[f64], h: f64) -> f64 {
    let n = f.len() - 1;
    (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub r0: f64,
    pub sigma0: RadialProfile,
    pub m0: RadialProfile,
    pub e0: RadialProfile,
}

/// Multiplicative perturbation `E₀ ← E₀ (1 + p(r))` with `|p| ≤ amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Perturbation {
    /// `p ≡ amplitude`.
    Uniform { amplitude: f64 },
    /// `p(r) = amplitude Σ a_k cos(kπr) / Σ|a_k|` with `a_k ∈ [−1, 1]`
    /// drawn from a seeded generator. Each mode has zero slope at both ends.
    CosineBumps { amplitude: f64, seed: u64, modes: u32 },
}

impl Perturbation {
    pub fn amplitude(&self) -> f64 {
        match *self {
            Perturbation::Uniform { amplitude } | Perturbation::CosineBumps { amplitude, .. } => amplitude,
        }
    }

    pub fn factor(&self, n: usize) -> RadialProfile {
        match *self {
            Perturbation::Uniform { amplitude } => RadialProfile::constant(n, 1.0 + amplitude),
            Perturbation::CosineBumps { amplitude, seed, modes } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let coeffs: Vec<f64> = (0..modes.max(1)).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                let norm = coeffs.iter().map(|a: &f64| a.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
                RadialProfile::from_fn(n, |x| {
                    let s: f64 = coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, a)| a * ((k + 1) as f64 * std::f64::consts::PI * x).cos())
                        .sum();
                    1.0 + amplitude * s / norm
                })
            }
        }
    }
}

impl InitialData {
    pub fn new(r0: f64, sigma0: RadialProfile, m0: RadialProfile, e0: RadialProfile) -> Result<Self, TimeDepError> {
        let out = Self { r0, sigma0, m0, e0 };
        out.check()?;
        Ok(out)
    }

    /// Stationary profiles resampled to `n` intervals with `R₀ = R*`.
    pub fn from_stationary(sol: &StationarySolution, n: usize) -> Self {
        let (sigma0, m0, e0) = stationary_on_grid(sol, n);
        Self {
            r0: sol.r_star,
            sigma0,
            m0,
            e0,
        }
    }

    pub fn perturbed(sol: &StationarySolution, n: usize, perturbation: &Perturbation) -> Self {
        let mut out = Self::from_stationary(sol, n);
        let f = perturbation.factor(n);
        for (e, p) in out.e0.values.iter_mut().zip(&f.values) {
            *e *= p;
        }
        out
    }

    /// Discrete compatibility conditions.
    pub fn check(&self) -> Result<(), TimeDepError> {
        let bad = |s: String| Err(TimeDepError::InvalidInitialData(s));
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return bad(format!("R0 = {} must be positive", self.r0));
        }
        let n = self.sigma0.n();
        if n < 2 || self.m0.n() != n || self.e0.n() != n {
            return bad("profiles must share a grid with at least two intervals".into());
        }
        if (self.sigma0.values[n] - 1.0).abs() > 1e-12 {
            return bad(format!("sigma0(1) = {} != 1", self.sigma0.values[n]));
        }
        let h = 1.0 / n as f64;
        for (name, p) in [("sigma0", &self.sigma0), ("m0", &self.m0), ("E0", &self.e0)] {
            if p.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return bad(format!("{name} must be finite and nonnegative"));
            }
            if p.values.iter().all(|v| *v == 0.0) {
                return bad(format!("{name} is identically zero"));
            }
            let scale = 1.0 + p.max();
            if slope_at_zero(&p.values, h).abs() > SLOPE_TOL * scale {
                return bad(format!("{name} has nonzero slope at r = 0"));
            }
        }
        if slope_at_one(&self.m0.values, h).abs() > SLOPE_TOL * (1.0 + self.m0.max()) {
            return bad("m0 has nonzero slope at r = 1".into());
        }
        Ok(())
    }
}
