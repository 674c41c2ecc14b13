//! One time step on the fixed unit domain.
//!
//! With `r ∈ [0, 1]` the scaled radius and `u` the velocity divided by `R`,
//!
//! ```text
//! σ_t = (c R²)⁻¹ Δσ + u(1) r σ_r − (λ/c) σ,         σ(1) = 1,
//! m_t = D_m R⁻² Δm + u(1) r m_r + α − β m,         m_r(1) = 0,
//! E_t + v E_r = Q(σ, m, E),                         v = u − r u(1),
//! R_t = R u(1),
//! ```
//!
//! where `Δ = ∂_rr + (2/r) ∂_r` and `u(r) = r⁻² ∫₀ʳ μ(E)(σ − σ̄) ρ² dρ`.

use super::{RadialProfile, SimState, TimeDepError, TransformForm};
use crate::interp::{Interpolation, UniformInterpolant};
use crate::model::{Constitutive, Model};
use crate::tridiag::Tridiagonal;

/// `u(r) = r⁻² ∫₀ʳ g ρ² dρ` with `g = μ(E)(σ − σ̄)` taken piecewise linear
/// and integrated exactly against `ρ²`; `v = u − r u(1)`.
pub fn velocity_from_profiles<L: Constitutive>(
    sigma: &RadialProfile,
    e: &RadialProfile,
    model: &Model<L>,
) -> (RadialProfile, RadialProfile) {
    let n = sigma.n();
    let h = sigma.h();
    let g: Vec<f64> = sigma
        .values
        .iter()
        .zip(&e.values)
        .map(|(&s, &ee)| model.growth(s, ee))
        .collect();
    let mut u = vec![0.0; n + 1];
    let mut cumulative = 0.0;
    for i in 0..n {
        let a = i as f64 * h;
        let b = (i + 1) as f64 * h;
        let i0 = (b * b * b - a * a * a) / 3.0;
        let i1 = ((b.powi(4) - a.powi(4)) / 4.0 - a * i0) / h;
        cumulative += g[i] * (i0 - i1) + g[i + 1] * i1;
        u[i + 1] = cumulative / (b * b);
    }
    let u1 = u[n];
    let mut v: Vec<f64> = (0..=n).map(|i| u[i] - sigma.x(i) * u1).collect();
    v[0] = 0.0;
    v[n] = 0.0;
    (RadialProfile::new(u), RadialProfile::new(v))
}

/// Coefficients of `f_t = D Δf + a r f_r − k f + s`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Parabolic {
    pub diffusion: f64,
    pub stretch: f64,
    pub decay: f64,
    pub source: f64,
    pub dirichlet_one: Option<f64>,
}

/// Backward Euler in flux form. The stretching term is upwinded so the
/// system matrix stays an M-matrix; `r = 0` uses the ghost-point limit
/// `Δf(0) = 6 (f₁ − f₀)/h²`, and `r = 1` is either Dirichlet or the Neumann
/// ghost row `Δf(1) = 2 (f_{n−1} − f_n)/h²`.
pub(crate) fn implicit_step(f: &RadialProfile, dt: f64, c: &Parabolic, field: &'static str) -> Result<RadialProfile, TimeDepError> {
    let n = f.n();
    let h = f.h();
    let h2 = h * h;
    let mut a = Tridiagonal::zeros(n + 1);
    let mut rhs: Vec<f64> = f.values.iter().map(|&v| v + dt * c.source).collect();

    let k0 = 6.0 * c.diffusion / h2;
    a.diag[0] = 1.0 + dt * (k0 + c.decay);
    a.upper[0] = -dt * k0;
    for i in 1..n {
        let r = i as f64 * h;
        let rm = (r - 0.5 * h) * (r - 0.5 * h);
        let rp = (r + 0.5 * h) * (r + 0.5 * h);
        let adv = c.stretch * r / h;
        let lo = c.diffusion * rm / (r * r * h2) + (-adv).max(0.0);
        let up = c.diffusion * rp / (r * r * h2) + adv.max(0.0);
        a.lower[i] = -dt * lo;
        a.upper[i] = -dt * up;
        a.diag[i] = 1.0 + dt * (lo + up + c.decay);
    }
    match c.dirichlet_one {
        Some(value) => {
            a.diag[n] = 1.0;
            rhs[n] = value;
        }
        None => {
            let kn = 2.0 * c.diffusion / h2;
            a.lower[n] = -dt * kn;
            a.diag[n] = 1.0 + dt * (kn + c.decay);
        }
    }
    if !a.offdiag_nonpositive() {
        return Err(TimeDepError::StepTooLarge { field });
    }
    let mut out = a.solve(&rhs).ok_or(TimeDepError::StepTooLarge { field })?;
    if let Some(value) = c.dirichlet_one {
        out[n] = value;
    }
    Ok(RadialProfile::new(out))
}

/// One backward-Euler step of the nutrient equation at radius `radius`
/// with `R'/R = u1`.
pub fn parabolic_step_sigma<L: Constitutive>(
    sigma: &RadialProfile,
    radius: f64,
    u1: f64,
    dt: f64,
    model: &Model<L>,
    form: TransformForm,
) -> Result<RadialProfile, TimeDepError> {
    let p = &model.params;
    let stretch = match form {
        TransformForm::Derived => u1,
        TransformForm::PaperVerbatim => u1 / p.c,
    };
    implicit_step(
        sigma,
        dt,
        &Parabolic {
            diffusion: 1.0 / (p.c * radius * radius),
            stretch,
            decay: p.lambda / p.c,
            source: 0.0,
            dirichlet_one: Some(1.0),
        },
        "sigma",
    )
}

/// One step of the enzyme equation; `α` explicit, `βm` implicit.
pub fn parabolic_step_m<L: Constitutive>(
    m: &RadialProfile,
    radius: f64,
    u1: f64,
    dt: f64,
    model: &Model<L>,
) -> Result<RadialProfile, TimeDepError> {
    let p = &model.params;
    implicit_step(
        m,
        dt,
        &Parabolic {
            diffusion: p.d_m / (radius * radius),
            stretch: u1,
            decay: p.beta,
            source: p.alpha,
            dirichlet_one: None,
        },
        "m",
    )
}

/// `expm1(z)/z`.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 + 0.5 * z
    } else {
        z.exp_m1() / z
    }
}

/// Semi-Lagrangian step for `E_t + v E_r = Q`.
///
/// Feet come from a midpoint trace of `dξ/ds = v`, clamped to `[0, 1]`.
/// Along the segment `Q` is integrated by exponential Euler about the foot
/// value, with `σ, m` sampled at the segment midpoint; this is exact when
/// `Q` is linear in `E` with frozen coefficients.
pub fn transport_e<L: Constitutive>(
    e: &RadialProfile,
    v: &RadialProfile,
    sigma: &RadialProfile,
    m: &RadialProfile,
    dt: f64,
    model: &Model<L>,
    interpolation: Interpolation,
) -> RadialProfile {
    let n = e.n();
    let v_lin = UniformInterpolant::new(&v.values, Interpolation::Linear);
    let e_int = UniformInterpolant::new(&e.values, interpolation);
    let s_lin = UniformInterpolant::new(&sigma.values, Interpolation::Linear);
    let m_lin = UniformInterpolant::new(&m.values, Interpolation::Linear);
    let out = (0..=n)
        .map(|i| {
            let x = e.x(i);
            let mid = x - 0.5 * dt * v.values[i];
            let foot = (x - dt * v_lin.eval(mid)).clamp(0.0, 1.0);
            let e_foot = e_int.eval(foot);
            let centre = 0.5 * (foot + x);
            let (s, mm) = (s_lin.eval(centre), m_lin.eval(centre));
            let q = model.q(s, mm, e_foot);
            let j = model.q_partials(s, mm, e_foot).d_e;
            e_foot + dt * phi1(dt * j) * q
        })
        .collect();
    RadialProfile::new(out)
}

/// Feet of the backward characteristics before clamping.
pub fn characteristic_feet(v: &RadialProfile, dt: f64) -> Vec<f64> {
    let v_lin = UniformInterpolant::new(&v.values, Interpolation::Linear);
    (0..=v.n())
        .map(|i| {
            let x = v.x(i);
            x - dt * v_lin.eval(x - 0.5 * dt * v.values[i])
        })
        .collect()
}

/// Operator-split step: velocity, radius, parabolic σ and m, transport of E.
pub fn advance<L: Constitutive>(
    state: &SimState,
    dt: f64,
    model: &Model<L>,
    form: TransformForm,
    interpolation: Interpolation,
    pin_radius: bool,
) -> Result<SimState, TimeDepError> {
    let (_, v) = velocity_from_profiles(&state.sigma, &state.e, model);
    let u1 = if pin_radius { 0.0 } else { state.u1() };
    let v = if pin_radius { state.u.clone() } else { v };
    let radius = state.radius * (u1 * dt).exp();
    if !(radius >= 1e-6) {
        return Err(TimeDepError::RadiusCollapse {
            t: state.t + dt,
            radius,
        });
    }
    let sigma = parabolic_step_sigma(&state.sigma, radius, u1, dt, model, form)?;
    let m = parabolic_step_m(&state.m, radius, u1, dt, model)?;
    let e = transport_e(&state.e, &v, &sigma, &m, dt, model, interpolation);
    let (u, v) = velocity_from_profiles(&sigma, &e, model);
    Ok(SimState {
        t: state.t + dt,
        radius,
        sigma,
        m,
        e,
        u,
        v,
    })
}
