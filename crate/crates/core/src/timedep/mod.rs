//! Time-dependent solver on the fixed unit domain `r ∈ [0, 1]`.
//!
//! The physical radius is `r R(t)`. Each step updates `R`, takes implicit
//! parabolic steps for σ and m, then transports E along characteristics;
//! see [`scheme`] for the discrete equations.

mod init;
pub mod scheme;

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interp::{Interpolation, UniformInterpolant};
use crate::model::{sigma_stationary, Constitutive, Model};
use crate::stationary::StationarySolution;

pub use init::{InitialData, Perturbation};
pub use scheme::{
    advance, characteristic_feet, parabolic_step_m, parabolic_step_sigma, transport_e, velocity_from_profiles,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimeDepError {
    #[error("implicit {field} step lost monotonicity; reduce dt")]
    StepTooLarge { field: &'static str },
    #[error("radius collapsed to {radius:e} at t = {t}")]
    RadiusCollapse { t: f64, radius: f64 },
    #[error("incompatible initial data: {0}")]
    InvalidInitialData(String),
    #[error("invalid time-stepping options: {0}")]
    InvalidOptions(String),
    #[error("invariant violated at t = {t}: {what}")]
    InvariantViolated { t: f64, what: String },
}

/// Values on the uniform grid `x_i = i/n`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(values.len() >= 2, "a profile needs at least two nodes");
        Self { values }
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        Self::new((0..=n).map(|i| f(i as f64 / n as f64)).collect())
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self::new(vec![value; n + 1])
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n() as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 / self.n() as f64
    }

    pub fn at(&self, x: f64, kind: Interpolation) -> f64 {
        UniformInterpolant::new(&self.values, kind).eval(x)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_distance(&self, other: &RadialProfile) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Which fixed-domain σ equation to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformForm {
    /// Stretching coefficient `R'/R` after dividing through by `c`.
    #[default]
    Derived,
    /// Stretching coefficient `R'/(cR)`.
    PaperVerbatim,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub radius: f64,
    pub sigma: RadialProfile,
    pub m: RadialProfile,
    pub e: RadialProfile,
    pub u: RadialProfile,
    pub v: RadialProfile,
}

/// Bounds checked after every step when enabled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantBounds {
    /// `max{‖σ₀‖∞, α/β, ‖m₀‖∞}`.
    pub m_max: f64,
    pub slack: f64,
}

impl SimState {
    pub fn from_initial<L: Constitutive>(init: &InitialData, model: &Model<L>) -> Self {
        let (u, v) = velocity_from_profiles(&init.sigma0, &init.e0, model);
        Self {
            t: 0.0,
            radius: init.r0,
            sigma: init.sigma0.clone(),
            m: init.m0.clone(),
            e: init.e0.clone(),
            u,
            v,
        }
    }

    pub fn n(&self) -> usize {
        self.sigma.n()
    }

    /// `u(1, t)`, which equals `R'/R`.
    pub fn u1(&self) -> f64 {
        *self.u.values.last().expect("nonempty")
    }

    /// Lists every violated invariant.
    pub fn invariant_violations(&self, bounds: &InvariantBounds) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.n();
        if self.sigma.values[n] != 1.0 {
            out.push(format!("sigma(1) = {} != 1", self.sigma.values[n]));
        }
        if !(self.sigma.min() > 0.0) {
            out.push(format!("min sigma = {} not positive", self.sigma.min()));
        }
        if self.m.max() > bounds.m_max + bounds.slack {
            out.push(format!("max m = {} exceeds {}", self.m.max(), bounds.m_max));
        }
        if self.v.values[0] != 0.0 || self.v.values[n] != 0.0 {
            out.push(format!("v(0) = {}, v(1) = {}", self.v.values[0], self.v.values[n]));
        }
        if !(self.e.min() >= 0.0) {
            out.push(format!("min E = {} negative", self.e.min()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            out.push(format!("radius = {}", self.radius));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Time between snapshots.
    pub cadence: f64,
    pub transform: TransformForm,
    pub interpolation: Interpolation,
    /// Abort with [`TimeDepError::InvariantViolated`] on the first violation.
    pub check_invariants: bool,
    /// Freeze `R` and drop the stretching terms.
    pub pin_radius: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 200.0,
            cadence: 0.5,
            transform: TransformForm::Derived,
            interpolation: Interpolation::MonotoneCubic,
            check_invariants: true,
            pin_radius: false,
        }
    }
}

impl SimOptions {
    pub fn validate(&self) -> Result<(), TimeDepError> {
        let bad = |what: &str| Err(TimeDepError::InvalidOptions(what.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("T must be nonnegative");
        }
        if !(self.cadence > 0.0 && self.cadence.is_finite()) {
            return bad("cadence must be positive");
        }
        Ok(())
    }

    /// Steps needed to reach `t_end` with `t_k = k dt`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

/// Sup and L² distances of a state to a stationary solution in scaled
/// coordinates, plus `|R − R*|`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Distances {
    pub sup_sigma: f64,
    pub sup_e: f64,
    pub sup_m: f64,
    pub l2_sigma: f64,
    pub l2_e: f64,
    pub l2_m: f64,
    pub radius: f64,
}

impl Distances {
    pub fn sup(&self) -> f64 {
        self.sup_sigma.max(self.sup_e).max(self.sup_m)
    }
}

fn sup_and_l2(diff: impl Iterator<Item = f64>, h: f64) -> (f64, f64) {
    let d: Vec<f64> = diff.collect();
    let sup = d.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let last = d.len() - 1;
    let sq: f64 = d
        .iter()
        .enumerate()
        .map(|(i, x)| if i == 0 || i == last { 0.5 * x * x } else { x * x })
        .sum();
    (sup, (sq * h).sqrt())
}

/// The stationary solution sampled at `x_i R*`; σ uses the closed form.
pub fn stationary_on_grid(sol: &StationarySolution, n: usize) -> (RadialProfile, RadialProfile, RadialProfile) {
    let rs = sol.r_star;
    let lambda = sol.params.lambda;
    (
        RadialProfile::from_fn(n, |x| sigma_stationary(x * rs, rs, lambda)),
        RadialProfile::constant(n, sol.m),
        RadialProfile::from_fn(n, |x| sol.e_at(x * rs)),
    )
}

/// Distances with the stationary profiles resampled onto the state grid.
pub fn distance_to_stationary(state: &SimState, sol: &StationarySolution) -> Distances {
    let (s, m, e) = stationary_on_grid(sol, state.n());
    let h = state.sigma.h();
    let diff = |a: &RadialProfile, b: &RadialProfile| {
        sup_and_l2(a.values.iter().zip(&b.values).map(|(x, y)| x - y), h)
    };
    let (sup_sigma, l2_sigma) = diff(&state.sigma, &s);
    let (sup_e, l2_e) = diff(&state.e, &e);
    let (sup_m, l2_m) = diff(&state.m, &m);
    Distances {
        sup_sigma,
        sup_e,
        sup_m,
        l2_sigma,
        l2_e,
        l2_m,
        radius: (state.radius - sol.r_star).abs(),
    }
}

/// Distances with the state interpolated onto the stationary grid.
pub fn distance_on_stationary_grid(state: &SimState, sol: &StationarySolution, kind: Interpolation) -> Distances {
    let n = sol.grid_n();
    let h = 1.0 / n as f64;
    let x = |k: usize| sol.r[k] / sol.r_star;
    let s_int = UniformInterpolant::new(&state.sigma.values, kind);
    let e_int = UniformInterpolant::new(&state.e.values, kind);
    let m_int = UniformInterpolant::new(&state.m.values, kind);
    let lambda = sol.params.lambda;
    let (sup_sigma, l2_sigma) = sup_and_l2(
        (0..=n).map(|k| s_int.eval(x(k)) - sigma_stationary(sol.r[k], sol.r_star, lambda)),
        h,
    );
    let (sup_e, l2_e) = sup_and_l2((0..=n).map(|k| e_int.eval(x(k)) - sol.e[k]), h);
    let (sup_m, l2_m) = sup_and_l2((0..=n).map(|k| m_int.eval(x(k)) - sol.m), h);
    Distances {
        sup_sigma,
        sup_e,
        sup_m,
        l2_sigma,
        l2_e,
        l2_m,
        radius: (state.radius - sol.r_star).abs(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub radius: f64,
    pub sigma: RadialProfile,
    pub m: RadialProfile,
    pub e: RadialProfile,
    pub u: RadialProfile,
}

impl Snapshot {
    fn of(s: &SimState) -> Self {
        Self {
            t: s.t,
            radius: s.radius,
            sigma: s.sigma.clone(),
            m: s.m.clone(),
            e: s.e.clone(),
            u: s.u.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarRecord {
    pub t: f64,
    pub radius: f64,
    pub u1: f64,
    pub distance: Option<Distances>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub snapshots: Vec<Snapshot>,
    pub scalars: Vec<ScalarRecord>,
}

impl TimeSeries {
    pub fn last_snapshot(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }

    pub fn min_radius(&self) -> f64 {
        self.scalars.iter().map(|s| s.radius).fold(f64::INFINITY, f64::min)
    }

    /// Long format: one row per (snapshot, node) with columns
    /// `t, r, sigma, m, E, u`.
    pub fn write_snapshots_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "r", "sigma", "m", "E", "u"])?;
        for snap in &self.snapshots {
            for i in 0..=snap.sigma.n() {
                out.write_record([
                    snap.t.to_string(),
                    snap.sigma.x(i).to_string(),
                    snap.sigma.values[i].to_string(),
                    snap.m.values[i].to_string(),
                    snap.e.values[i].to_string(),
                    snap.u.values[i].to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Columns `t, R, u1, dist_sigma, dist_E, dist_m`; distance cells are
    /// empty without a reference.
    pub fn write_series_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "R", "u1", "dist_sigma", "dist_E", "dist_m"])?;
        for s in &self.scalars {
            let (a, b, c) = match s.distance {
                Some(d) => (d.sup_sigma.to_string(), d.sup_e.to_string(), d.sup_m.to_string()),
                None => Default::default(),
            };
            out.write_record([s.t.to_string(), s.radius.to_string(), s.u1.to_string(), a, b, c])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Convergence test on the recorded sup-distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceVerdict {
    pub final_sup: f64,
    /// Sup-distance nonincreasing (up to `noise`) over the last half of the run.
    pub monotone_tail: bool,
    pub converged: bool,
}

/// `None` when the series carries no distances.
pub fn convergence_verdict(series: &TimeSeries, tol: f64, noise: f64) -> Option<ConvergenceVerdict> {
    let last = series.scalars.last()?;
    let final_sup = last.distance?.sup();
    let half = 0.5 * last.t;
    let tail: Vec<f64> = series
        .scalars
        .iter()
        .filter(|s| s.t >= half)
        .map(|s| s.distance.map_or(f64::NAN, |d| d.sup()))
        .collect();
    let monotone_tail = tail.windows(2).all(|w| w[1] <= w[0] + noise);
    Some(ConvergenceVerdict {
        final_sup,
        monotone_tail,
        converged: monotone_tail && final_sup <= tol,
    })
}

/// Runs `advance` from `init` to `opts.t_end`, recording scalars every
/// step and snapshots at `t = 0` and every `opts.cadence`, plus the final
/// state.
pub fn simulate<L: Constitutive>(
    model: &Model<L>,
    init: &InitialData,
    opts: &SimOptions,
    reference: Option<&StationarySolution>,
) -> Result<TimeSeries, TimeDepError> {
    opts.validate()?;
    init.check()?;
    let p = &model.params;
    let bounds = InvariantBounds {
        m_max: init.sigma0.max().max(p.m_steady()).max(init.m0.max()),
        slack: 1e-12,
    };
    let mut state = SimState::from_initial(init, model);
    let mut series = TimeSeries::default();
    let record = |s: &SimState, series: &mut TimeSeries| {
        series.scalars.push(ScalarRecord {
            t: s.t,
            radius: s.radius,
            u1: s.u1(),
            distance: reference.map(|r| distance_to_stationary(s, r)),
        });
    };
    record(&state, &mut series);
    series.snapshots.push(Snapshot::of(&state));

    let steps = opts.steps();
    let mut next_snapshot = 1usize;
    for k in 1..=steps {
        let dt = (k as f64 * opts.dt).min(opts.t_end) - state.t;
        let mut next = advance(&state, dt, model, opts.transform, opts.interpolation, opts.pin_radius)?;
        next.t = (k as f64 * opts.dt).min(opts.t_end);
        if opts.check_invariants {
            let bad = next.invariant_violations(&bounds);
            if !bad.is_empty() {
                return Err(TimeDepError::InvariantViolated {
                    t: next.t,
                    what: bad.join("; "),
                });
            }
        }
        state = next;
        record(&state, &mut series);
        let due = next_snapshot as f64 * opts.cadence;
        if state.t >= due - 1e-9 * opts.dt || k == steps {
            series.snapshots.push(Snapshot::of(&state));
            while next_snapshot as f64 * opts.cadence <= state.t + 1e-9 * opts.dt {
                next_snapshot += 1;
            }
        }
    }
    Ok(series)
}
