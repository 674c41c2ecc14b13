//! Radially symmetric stationary solutions.
//!
//! For a trial radius `R` the nutrient is `σ(r) = R sinh(√λ r)/(r sinh(√λ R))`,
//! the enzyme level is `α/β`, and `(E, I)` with `I = r² u` solve
//!
//! ```text
//! I' = μ(E)(σ − σ̄) r²,    E' = Q(σ, α/β, E) r² / I,
//! E(R) = h(1, α/β),       I(R) = 0,
//! ```
//!
//! integrated inward from `r = R`. With `t = R − r` this is a singular IVP
//! of the form handled by [`crate::singular_ivp`]. The shoot either reaches
//! `r = 0` or stops at a radius `τ(R) > 0` where `I` returns to zero. The
//! stationary radius `R*` is where `τ = 0` and `I(0) = 0`, located by
//! bisection on the sign of that outcome.

use crate::model::{
    sigma_stationary, sigma_stationary_r, sigma_stationary_rr, Constitutive, Model, ModelError, ModelParams,
    H_ROOT_TOL,
};
use crate::singular_ivp::{initial_slope, march, Control, MarchOptions, SingularError, SingularProblem};
use serde::Serialize;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StationaryError {
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("boundary value E(R) unavailable: {0}")]
    SeedFailure(#[source] ModelError),
    #[error("inward integration failed: {0}")]
    StepFailure(#[source] SingularError),
    #[error("no sign-flip bracket for R* in [{lo}, {hi}] after expansion")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("radius {radius} is not stationary on this grid ({termination:?}, tau={tau}, I(0)={i_center:?})")]
    NotStationary {
        radius: f64,
        termination: Termination,
        tau: f64,
        i_center: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    ReachedZero,
    DenominatorVanished,
    BoundViolated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Uniform intervals on `[0, R]`.
    pub n: usize,
    pub march: MarchOptions,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            n: 1024,
            march: MarchOptions::default(),
        }
    }
}

impl GridOptions {
    pub fn with_n(n: usize) -> Self {
        Self { n, ..Self::default() }
    }
}

/// The inward shoot as a singular IVP in `t = R − r`: `x = E`, `y = −I`.
pub struct TumorBoundaryProblem<'a, L: Constitutive> {
    model: &'a Model<L>,
    radius: f64,
    m: f64,
    e_boundary: f64,
}

impl<'a, L: Constitutive> TumorBoundaryProblem<'a, L> {
    pub fn new(model: &'a Model<L>, radius: f64) -> Result<Self, StationaryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(StationaryError::InvalidRadius(radius));
        }
        let m = model.params.m_steady();
        let e_boundary = model.h_root(1.0, m, H_ROOT_TOL).map_err(StationaryError::SeedFailure)?;
        Ok(Self {
            model,
            radius,
            m,
            e_boundary,
        })
    }

    fn sigma(&self, r: f64) -> f64 {
        sigma_stationary(r, self.radius, self.model.params.lambda)
    }

    /// `E'(R)` in the original variable.
    pub fn boundary_slope(&self) -> Result<f64, StationaryError> {
        initial_slope(self).map(|s| -s).map_err(StationaryError::StepFailure)
    }
}

impl<L: Constitutive> SingularProblem for TumorBoundaryProblem<'_, L> {
    fn f(&self, x: f64, t: f64) -> f64 {
        let r = self.radius - t;
        self.model.q(self.sigma(r), self.m, x) * r * r
    }
    fn f_x(&self, x: f64, t: f64) -> f64 {
        let r = self.radius - t;
        self.model.q_partials(self.sigma(r), self.m, x).d_e * r * r
    }
    fn f_t(&self, x: f64, t: f64) -> f64 {
        let r = self.radius - t;
        let lam = self.model.params.lambda;
        let s = self.sigma(r);
        let q_s = self.model.q_partials(s, self.m, x).d_sigma;
        -(q_s * sigma_stationary_r(r, self.radius, lam) * r * r + 2.0 * self.model.q(s, self.m, x) * r)
    }
    fn g(&self, x: f64, t: f64) -> f64 {
        let r = self.radius - t;
        self.model.growth(self.sigma(r), x) * r * r
    }
    fn x0(&self) -> f64 {
        self.e_boundary
    }
    fn t_max(&self) -> f64 {
        self.radius
    }
}

/// One inward pass at fixed `R`. Arrays run from `r = R` inward.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootResult {
    pub radius: f64,
    pub r_grid: Vec<f64>,
    pub e: Vec<f64>,
    /// `I / r²`; at `r = 0` the limit 0 when `I(0) = 0`, else `−∞`.
    pub u: Vec<f64>,
    pub i: Vec<f64>,
    pub tau: f64,
    pub termination: Termination,
    /// Scale of the vanishing test: the shoot stops where `I ≥ −tol_i (r/R)³`.
    pub tol_i: f64,
}

impl ShootResult {
    /// `I(0)` when the shoot reached the center.
    pub fn i_center(&self) -> Option<f64> {
        (self.termination == Termination::ReachedZero).then(|| *self.i.last().expect("nonempty"))
    }

    /// True when the shoot overshot: `τ > 0`, a bound failure, or `I(0) ≥ 0`.
    pub fn overshoots(&self) -> bool {
        match self.i_center() {
            Some(i0) => i0 >= 0.0,
            None => true,
        }
    }

    /// Sign structure and the bound `E(R) ≤ E(r) ≤ h(σ(r), α/β)` on the grid.
    /// Returns one message per violated check.
    pub fn check_invariants<L: Constitutive>(&self, model: &Model<L>, slack: f64) -> Vec<String> {
        let mut bad = Vec::new();
        let n = self.r_grid.len();
        let e_r = self.e[0];
        let m = model.params.m_steady();
        let interior = |k: usize| k > 0 && k + 1 < n && self.r_grid[k] > 0.0;
        for k in 0..n {
            let r = self.r_grid[k];
            if interior(k) {
                if !(self.i[k] < 0.0) {
                    bad.push(format!("I({r}) = {} is not negative", self.i[k]));
                }
                if !(self.e[k] > self.e[k - 1]) {
                    bad.push(format!("E not decreasing in r at r={r}"));
                }
            }
            let cap = model
                .h_root(sigma_stationary(r, self.radius, model.params.lambda), m, H_ROOT_TOL)
                .unwrap_or(f64::INFINITY);
            if self.e[k] < e_r - slack || self.e[k] > cap + slack {
                bad.push(format!("E({r}) = {} outside [{e_r}, {cap}]", self.e[k]));
            }
        }
        bad
    }
}

/// Integrates `(E, I)` from `r = R` toward `r = 0` on `n` uniform intervals.
pub fn shoot<L: Constitutive>(model: &Model<L>, radius: f64, grid: &GridOptions) -> Result<ShootResult, StationaryError> {
    let problem = TumorBoundaryProblem::new(model, radius)?;
    let p = &model.params;
    let laws = &model.laws;
    let n = grid.n.max(2);
    let h = radius / n as f64;
    let e_r = problem.e_boundary;

    // Taylor seed one grid step inside the boundary.
    let de_dr = problem.boundary_slope()?;
    let mu_r = laws.mu(e_r);
    let du_dr = mu_r * (1.0 - p.sigma_bar);
    let s_r = sigma_stationary_r(radius, radius, p.lambda);
    let i_rr = laws.mu_prime(e_r) * de_dr * (1.0 - p.sigma_bar) * radius * radius
        + mu_r * s_r * radius * radius
        + 2.0 * du_dr * radius;
    let e1 = e_r - de_dr * h;
    let i1 = -du_dr * h * radius * radius + 0.5 * i_rr * h * h;

    let tol_i = 1e-12 * radius.powi(3) * laws.mu(p.e_cap);
    let e_cap = p.e_cap;
    let nodes: Vec<f64> = (2..=n)
        .map(|k| if k == n { radius } else { radius * k as f64 / n as f64 })
        .collect();
    let out = march(&problem, (h, e1, -i1), &nodes, &grid.march, |t, x, y| {
        let r = radius - t;
        let s = r / radius;
        if !(x > 0.0 && x < e_cap && y > 0.0) || (s < 0.9 && y <= tol_i * s * s * s) {
            Control::Stop
        } else {
            Control::Continue
        }
    })
    .map_err(StationaryError::StepFailure)?;

    let (termination, tau) = match out.stopped {
        None => (Termination::ReachedZero, 0.0),
        Some(s) => {
            let kind = if s.x > 0.0 && s.x < e_cap {
                Termination::DenominatorVanished
            } else {
                Termination::BoundViolated
            };
            (kind, (radius - s.t).max(0.0))
        }
    };

    let mut r_grid = vec![radius, radius - h];
    let mut e = vec![e_r, e1];
    let mut i = vec![0.0, i1];
    for ((&t, &x), &y) in out.t.iter().zip(&out.x).zip(&out.y) {
        r_grid.push(if t == radius { 0.0 } else { radius - t });
        e.push(x);
        i.push(-y);
    }
    let u = r_grid
        .iter()
        .zip(&i)
        .map(|(&r, &ii)| {
            if r > 0.0 {
                ii / (r * r)
            } else if ii.abs() <= tol_i {
                0.0
            } else {
                f64::NEG_INFINITY * ii.signum().abs()
            }
        })
        .collect();
    Ok(ShootResult {
        radius,
        r_grid,
        e,
        u,
        i,
        tau,
        termination,
        tol_i,
    })
}

/// Blow-down radius `τ(R)`.
pub fn tau_of<L: Constitutive>(model: &Model<L>, radius: f64, grid: &GridOptions) -> Result<f64, StationaryError> {
    Ok(shoot(model, radius, grid)?.tau)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketOptions {
    pub r_lo: f64,
    pub r_hi: f64,
    /// Absolute bisection tolerance on `R*`.
    pub tol_r: f64,
    pub max_expansions: usize,
    pub grid: GridOptions,
}

impl Default for BracketOptions {
    fn default() -> Self {
        Self {
            r_lo: 0.1,
            r_hi: 10.0,
            tol_r: 1e-13,
            max_expansions: 40,
            grid: GridOptions::default(),
        }
    }
}

impl BracketOptions {
    pub fn with_n(n: usize) -> Self {
        Self {
            grid: GridOptions::with_n(n),
            ..Self::default()
        }
    }
}

/// Locates `R*` by bisection on [`ShootResult::overshoots`].
///
/// Returns the largest bracket end that still reaches the center with
/// `I(0) < 0`, so a re-shoot at the result on the same grid succeeds.
pub fn find_r_star<L: Constitutive>(model: &Model<L>, opts: &BracketOptions) -> Result<f64, StationaryError> {
    let over = |r: f64| shoot(model, r, &opts.grid).map(|s| s.overshoots());
    let (mut lo, mut hi) = (opts.r_lo, opts.r_hi);
    let mut expansions = 0;
    while over(lo)? {
        lo *= 0.5;
        expansions += 1;
        if expansions > opts.max_expansions {
            return Err(StationaryError::BracketFailure { lo, hi });
        }
    }
    while !over(hi)? {
        hi *= 2.0;
        expansions += 1;
        if expansions > opts.max_expansions {
            return Err(StationaryError::BracketFailure { lo, hi });
        }
    }
    while hi - lo > opts.tol_r {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if over(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// Sup-norm residuals of the stationary equations on the output grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `|u E' − Q|`.
    pub ecm: f64,
    /// `|u' + 2u/r − μ(E)(σ − σ̄)|`.
    pub velocity: f64,
    /// `|σ'' + 2σ'/r − λσ|` from the closed form.
    pub nutrient: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.ecm.max(self.velocity).max(self.nutrient)
    }
}

/// Stationary profiles on the uniform grid `r_k = k R*/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolution {
    pub r_star: f64,
    pub params: ModelParams,
    pub r: Vec<f64>,
    pub sigma: Vec<f64>,
    pub m: f64,
    pub e: Vec<f64>,
    pub u: Vec<f64>,
    /// `I(0)` of the shoot at `R*`.
    pub i_center: f64,
    pub residuals: Residuals,
}

#[derive(Serialize)]
struct MetaHeader<'a> {
    #[serde(rename = "R_star")]
    r_star: f64,
    params: &'a ModelParams,
    residuals: &'a Residuals,
}

impl StationarySolution {
    pub fn grid_n(&self) -> usize {
        self.r.len() - 1
    }

    /// Writes columns `r, sigma, m, E, u`.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["r", "sigma", "m", "E", "u"])?;
        for k in 0..self.r.len() {
            out.write_record([
                self.r[k].to_string(),
                self.sigma[k].to_string(),
                self.m.to_string(),
                self.e[k].to_string(),
                self.u[k].to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// `{R_star, params, residuals}`.
    pub fn header_json(&self) -> serde_json::Value {
        serde_json::to_value(MetaHeader {
            r_star: self.r_star,
            params: &self.params,
            residuals: &self.residuals,
        })
        .expect("plain data serializes")
    }

    /// `E` at physical radius `r` by linear interpolation.
    pub fn e_at(&self, r: f64) -> f64 {
        crate::interp::linear_on_grid(&self.r, &self.e, r)
    }

    pub fn u_at(&self, r: f64) -> f64 {
        crate::interp::linear_on_grid(&self.r, &self.u, r)
    }
}

/// Re-shoots at `r_star` with `grid_n` intervals and collects the profiles.
///
/// `r_star` should come from [`find_r_star`] on the same grid; otherwise the
/// shoot may stop short of the center and [`StationaryError::NotStationary`]
/// is returned.
pub fn assemble_stationary<L: Constitutive>(
    model: &Model<L>,
    r_star: f64,
    grid_n: usize,
) -> Result<StationarySolution, StationaryError> {
    let shot = shoot(model, r_star, &GridOptions::with_n(grid_n))?;
    let i_center = match shot.i_center() {
        Some(i0) if i0.abs() <= 1e3 * shot.tol_i => i0,
        _ => {
            return Err(StationaryError::NotStationary {
                radius: r_star,
                termination: shot.termination,
                tau: shot.tau,
                i_center: shot.i_center(),
            })
        }
    };
    let p = &model.params;
    let n = shot.r_grid.len() - 1;
    let r: Vec<f64> = (0..=n).map(|k| r_star * k as f64 / n as f64).collect();
    let e: Vec<f64> = shot.e.iter().rev().copied().collect();
    // I − I(0) solves the same equation and vanishes at the center; this
    // drops the r⁻² mode that the bisection tolerance leaves in I/r².
    let u: Vec<f64> = r
        .iter()
        .zip(shot.i.iter().rev())
        .map(|(&x, &ii)| if x > 0.0 { (ii - i_center) / (x * x) } else { 0.0 })
        .collect();
    let sigma: Vec<f64> = r.iter().map(|&x| sigma_stationary(x, r_star, p.lambda)).collect();
    let mut sol = StationarySolution {
        r_star,
        params: *p,
        r,
        sigma,
        m: p.m_steady(),
        e,
        u,
        i_center,
        residuals: Residuals {
            ecm: 0.0,
            velocity: 0.0,
            nutrient: 0.0,
        },
    };
    sol.residuals = residual_report(&sol, model);
    Ok(sol)
}

/// Finds `R*` on an `n`-interval grid and assembles the solution there.
pub fn solve_stationary<L: Constitutive>(model: &Model<L>, n: usize) -> Result<StationarySolution, StationaryError> {
    let r_star = find_r_star(model, &BracketOptions::with_n(n))?;
    assemble_stationary(model, r_star, n)
}

/// Second-order derivative on a uniform grid: central inside, one-sided at the ends.
fn derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len() - 1;
    (0..=n)
        .map(|k| {
            if k == 0 {
                (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
            } else if k == n {
                (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h)
            } else {
                (f[k + 1] - f[k - 1]) / (2.0 * h)
            }
        })
        .collect()
}

pub fn residual_report<L: Constitutive>(sol: &StationarySolution, model: &Model<L>) -> Residuals {
    let p = &model.params;
    let h = sol.r[1] - sol.r[0];
    let de = derivative(&sol.e, h);
    let du = derivative(&sol.u, h);
    let mut res = Residuals {
        ecm: 0.0,
        velocity: 0.0,
        nutrient: 0.0,
    };
    for k in 0..sol.r.len() {
        let r = sol.r[k];
        let (s, e, u) = (sol.sigma[k], sol.e[k], sol.u[k]);
        res.ecm = res.ecm.max((u * de[k] - model.q(s, sol.m, e)).abs());
        let div = if r > 0.0 { du[k] + 2.0 * u / r } else { 3.0 * du[k] };
        res.velocity = res.velocity.max((div - model.growth(s, e)).abs());
        let s_rr = sigma_stationary_rr(r, sol.r_star, p.lambda);
        let lap = if r > 0.0 {
            s_rr + 2.0 * sigma_stationary_r(r, sol.r_star, p.lambda) / r
        } else {
            3.0 * s_rr
        };
        res.nutrient = res.nutrient.max((lap - p.lambda * s).abs());
    }
    res
}

/// Scaled comparison `ũ(s, R₂) − ũ(s, R₁)` with `ũ(s, R) = I(sR)/R³`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityProbe {
    pub s: Vec<f64>,
    pub difference: Vec<f64>,
    /// Lower end of the compared range, `max(τ(R₁)/R₁, τ(R₂)/R₂)`.
    pub s_min: f64,
    pub min_difference: f64,
}

pub fn monotonicity_probe<L: Constitutive>(
    model: &Model<L>,
    r1: f64,
    r2: f64,
    grid: &GridOptions,
) -> Result<MonotonicityProbe, StationaryError> {
    let a = shoot(model, r1, grid)?;
    let b = shoot(model, r2, grid)?;
    let n = grid.n.max(2);
    let s_min = (a.tau / r1).max(b.tau / r2);
    let reached = a.r_grid.len().min(b.r_grid.len());
    let mut s = Vec::new();
    let mut difference = Vec::new();
    // k = 0 is s = 1, where both vanish; the last reached node may sit at τ.
    for k in 1..reached {
        let sk = 1.0 - k as f64 / n as f64;
        if sk <= s_min {
            break;
        }
        s.push(sk);
        difference.push(b.i[k] / r2.powi(3) - a.i[k] / r1.powi(3));
    }
    let min_difference = difference.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MonotonicityProbe {
        s,
        difference,
        s_min,
        min_difference: if min_difference.is_finite() { min_difference } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singular_ivp::boundary_slope_limit;

    fn model(mu: f64) -> Model {
        Model::new(ModelParams::default().with_mu(mu))
    }

    #[test]
    fn small_radius_reaches_center() {
        let m = model(0.5);
        let s = shoot(&m, 0.5, &GridOptions::default()).unwrap();
        assert_eq!(s.termination, Termination::ReachedZero);
        assert_eq!(s.tau, 0.0);
        assert!(s.i_center().unwrap() < 0.0);
        assert_eq!(*s.r_grid.last().unwrap(), 0.0);
        assert_eq!(s.r_grid.len(), 1025);
        assert!(s.check_invariants(&m, 1e-8).is_empty(), "{:?}", s.check_invariants(&m, 1e-8));
    }

    #[test]
    fn large_radius_blows_down() {
        let m = model(0.5);
        let s = shoot(&m, 6.0, &GridOptions::default()).unwrap();
        assert_ne!(s.termination, Termination::ReachedZero);
        assert!(s.tau > 0.0 && s.tau < 6.0);
        assert!(s.check_invariants(&m, 1e-8).is_empty(), "{:?}", s.check_invariants(&m, 1e-8));
        for (&r, &u) in s.r_grid.iter().zip(&s.u).skip(1) {
            assert!(u < 0.0, "u({r}) = {u}");
        }
    }

    #[test]
    fn boundary_slope_matches_closed_form() {
        let m = model(0.5);
        let radius = 1.9635;
        let p = TumorBoundaryProblem::new(&m, radius).unwrap();
        let e_r = p.x0();
        let mu = m.laws.mu(e_r);
        let s_r = sigma_stationary_r(radius, radius, 2.0);
        let q_e = m.q_partials(1.0, 0.5, e_r).d_e;
        let closed = e_r * mu * s_r / (q_e - mu * 0.3);
        assert!((p.boundary_slope().unwrap() - closed).abs() < 1e-9 * closed.abs(), "{} vs {closed}", p.boundary_slope().unwrap());
        // u E' = Q near r = R: v' = u'(R), F_φ = Q_E, F_r = Q_σ σ_r
        let limit = boundary_slope_limit(-e_r * mu * s_r, q_e, mu * 0.3).unwrap();
        assert!((limit - closed).abs() < 1e-9 * closed.abs());
        // and from a difference quotient of the C¹ branch computed by the
        // generic singular solver (t = R − r, so the sign flips)
        let h = 1e-4;
        let tr = crate::singular_ivp::solve_fixed(&p, 2.0 * h, 2, &Default::default()).unwrap();
        let n = tr.values.len();
        let dq = -(-3.0 * e_r + 4.0 * tr.values[n - 2] - tr.values[n - 1]) / (2.0 * h);
        assert!((dq - closed).abs() < 1e-6, "{dq} vs {closed}");
    }

    #[test]
    fn tumor_problem_satisfies_singular_hypotheses() {
        let m = model(0.5);
        let p = TumorBoundaryProblem::new(&m, 2.0).unwrap();
        let theta = crate::singular_ivp::validate(&p).unwrap();
        assert!(theta < 0.0);
        let (x, t, h) = (0.14, 0.3, 1e-6);
        let fd_t = (p.f(x, t + h) - p.f(x, t - h)) / (2.0 * h);
        let fd_x = (p.f(x + h, t) - p.f(x - h, t)) / (2.0 * h);
        assert!((p.f_t(x, t) - fd_t).abs() < 1e-7);
        assert!((p.f_x(x, t) - fd_x).abs() < 1e-7);
    }

    #[test]
    fn r_star_default_and_stationary_profiles() {
        let m = model(0.5);
        let sol = solve_stationary(&m, 1024).unwrap();
        assert!((sol.r_star - 1.9635).abs() < 0.01 * 1.9635);
        assert!(sol.u[0] == 0.0 && sol.u[sol.grid_n()].abs() < 1e-6);
        assert!(sol.u[1..sol.grid_n()].iter().all(|&u| u < 0.0));
        assert!(sol.e.windows(2).all(|w| w[1] < w[0]));
        assert!((sol.e[sol.grid_n()] - 0.13485778).abs() < 1e-6);
        assert!(sol.sigma[0] < m.params.sigma_bar);
        let h = sol.r[1];
        assert!(((sol.e[1] - sol.e[0]) / h).abs() < 1e-3);
        // Q vanishes at both ends
        assert!(m.q(sol.sigma[0], sol.m, sol.e[0]).abs() < 1e-6);
        assert!(m.q(1.0, sol.m, sol.e[sol.grid_n()]).abs() < 1e-10);
        assert!(sol.residuals.nutrient < 1e-12, "{:?}", sol.residuals);
    }

    #[test]
    fn bisection_is_deterministic() {
        let m = model(3.0);
        let opts = BracketOptions::with_n(256);
        assert_eq!(find_r_star(&m, &opts).unwrap().to_bits(), find_r_star(&m, &opts).unwrap().to_bits());
    }

    #[test]
    fn mismatched_radius_is_not_stationary() {
        let m = model(0.5);
        assert!(matches!(
            assemble_stationary(&m, 1.0, 256),
            Err(StationaryError::NotStationary { .. })
        ));
    }

    #[test]
    fn probe_ordering() {
        let m = model(0.5);
        let g = GridOptions::default();
        let same = monotonicity_probe(&m, 1.5, 1.5, &g).unwrap();
        assert!(same.difference.iter().all(|&d| d == 0.0));
        let p = monotonicity_probe(&m, 1.5, 2.5, &g).unwrap();
        assert!(p.min_difference > 0.0, "{}", p.min_difference);
        let clipped = monotonicity_probe(&m, 0.5, 6.0, &g).unwrap();
        assert!(clipped.s_min > 0.0);
        assert!(clipped.s.iter().all(|&s| s > clipped.s_min));
        assert!(clipped.min_difference > 0.0);
    }

    #[test]
    fn csv_and_header() {
        let m = model(0.5);
        let sol = solve_stationary(&m, 128).unwrap();
        let mut buf = Vec::new();
        sol.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("r,sigma,m,E,u\n0,"));
        assert_eq!(text.lines().count(), 130);
        let head = sol.header_json();
        assert_eq!(head["R_star"].as_f64().unwrap(), sol.r_star);
        assert!(head["params"]["D_m"].is_number());
        assert!(head["residuals"]["ecm"].is_number());
    }

    #[test]
    fn invalid_radius() {
        assert!(matches!(
            shoot(&model(0.5), -1.0, &GridOptions::default()),
            Err(StationaryError::InvalidRadius(_))
        ));
    }
}
