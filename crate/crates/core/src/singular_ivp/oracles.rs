//! Closed-form checks of the singular IVP solvers.

use super::{
    initial_slope_shifted, solve_fixed, solve_regularized, solve_with, FnProblem, SingularProblem, SolveOptions,
};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Endpoint tolerance passed to the solver.
    pub tol: f64,
    /// Shift applied to `θ` in the start slope (mutation hook).
    pub theta_shift: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            theta_shift: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Measured quantity compared against the threshold.
    pub metric: f64,
    pub threshold: String,
    pub detail: String,
}

impl OracleOutcome {
    fn new(name: &'static str, passed: bool, metric: f64, threshold: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            metric,
            threshold: threshold.into(),
            detail: detail.into(),
        }
    }

    fn failed(name: &'static str, detail: impl Into<String>) -> Self {
        Self::new(name, false, f64::NAN, "-", detail)
    }
}

fn sci_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn solve_opts(o: &OracleOptions) -> SolveOptions {
    SolveOptions {
        theta_shift: o.theta_shift,
        ..SolveOptions::default()
    }
}

/// `x' = (t − x)/(t + t²/2)`: affine `f`, nonconstant `g`, exact solution
/// `(2+t)/(2t) · 4 (ln((2+t)/2) + 2/(2+t) − 1)`.
fn relax_problem() -> FnProblem {
    FnProblem::new(|x, t| t - x, |_, _| -1.0, |_, _| 1.0, |_, t| 1.0 + t, 0.0, 2.0)
}

fn relax_exact(t: f64) -> f64 {
    (2.0 + t) / (2.0 * t) * 4.0 * (((2.0 + t) / 2.0).ln() + 2.0 / (2.0 + t) - 1.0)
}

/// A problem whose C¹ solution is `x*`: `f = x*'(t) Y(t) + k (x − x*(t))`
/// with `Y(t) = ∫₀ᵗ g(x*(s), s) ds`.
struct Manufactured {
    name: &'static str,
    exact: fn(f64) -> f64,
    exact_d: fn(f64) -> f64,
    exact_dd: fn(f64) -> f64,
    g: fn(f64, f64) -> f64,
    big_y: fn(f64) -> f64,
    k: f64,
}

impl SingularProblem for Manufactured {
    fn f(&self, x: f64, t: f64) -> f64 {
        (self.exact_d)(t) * (self.big_y)(t) + self.k * (x - (self.exact)(t))
    }
    fn f_x(&self, _x: f64, _t: f64) -> f64 {
        self.k
    }
    fn f_t(&self, _x: f64, t: f64) -> f64 {
        let xs = (self.exact)(t);
        (self.exact_dd)(t) * (self.big_y)(t) + (self.exact_d)(t) * (self.g)(xs, t) - self.k * (self.exact_d)(t)
    }
    fn g(&self, x: f64, t: f64) -> f64 {
        (self.g)(x, t)
    }
    fn x0(&self) -> f64 {
        (self.exact)(0.0)
    }
    fn t_max(&self) -> f64 {
        1.0
    }
}

fn manufactured_set() -> Vec<Manufactured> {
    vec![
        Manufactured {
            name: "sin",
            exact: |t| t.sin(),
            exact_d: |t| t.cos(),
            exact_dd: |t| -t.sin(),
            g: |_, _| 1.0,
            big_y: |t| t,
            k: 0.5,
        },
        Manufactured {
            name: "expm1",
            exact: |t| t.exp_m1(),
            exact_d: |t| t.exp(),
            exact_dd: |t| t.exp(),
            g: |_, t| 1.0 + t,
            big_y: |t| t + 0.5 * t * t,
            k: -1.0,
        },
        Manufactured {
            name: "quadratic",
            exact: |t| t + t * t,
            exact_d: |t| 1.0 + 2.0 * t,
            exact_dd: |_| 2.0,
            g: |_, t| t.exp(),
            big_y: |t| t.exp_m1(),
            k: 0.3,
        },
        Manufactured {
            name: "log",
            exact: |t| t.ln_1p(),
            exact_d: |t| 1.0 / (1.0 + t),
            exact_dd: |t| -1.0 / ((1.0 + t) * (1.0 + t)),
            g: |_, t| 2.0 + t.cos(),
            big_y: |t| 2.0 * t + t.sin(),
            k: -2.0,
        },
        Manufactured {
            name: "state_dependent_g",
            exact: |t| t,
            exact_d: |_| 1.0,
            exact_dd: |_| 0.0,
            g: |x, _| 1.0 + x * x,
            big_y: |t| t + t * t * t / 3.0,
            k: 0.9,
        },
    ]
}

fn linear_exact(o: &OracleOptions) -> OracleOutcome {
    const NAME: &str = "linear_exact";
    let p = FnProblem::linear(1.0, 0.5, 1.0);
    match solve_with(&p, 1.0, o.tol, &solve_opts(o)) {
        Ok(tr) => {
            let err = (tr.endpoint() - 2.0).abs().max((tr.slope0 - 2.0).abs());
            OracleOutcome::new(
                NAME,
                err <= o.tol,
                err,
                format!("<= {:e}", o.tol),
                "f = t + x/2, g = 1: x = 2t, slope 2",
            )
        }
        Err(e) => OracleOutcome::failed(NAME, e.to_string()),
    }
}

fn relaxation_exact(o: &OracleOptions) -> OracleOutcome {
    const NAME: &str = "relaxation_exact";
    let p = FnProblem::new(|x, t| t - x, |_, _| -1.0, |_, _| 1.0, |_, _| 1.0, 0.0, 1.0);
    match solve_with(&p, 1.0, o.tol, &solve_opts(o)) {
        Ok(tr) => {
            let err = (tr.endpoint() - 0.5).abs().max((tr.slope0 - 0.5).abs());
            OracleOutcome::new(NAME, err <= o.tol, err, format!("<= {:e}", o.tol), "f = t - x, g = 1: x = t/2")
        }
        Err(e) => OracleOutcome::failed(NAME, e.to_string()),
    }
}

/// Observed order of the endpoint error on `relax_problem` for steps 1/8 … 1/128.
pub(crate) fn measured_order(o: &OracleOptions) -> Result<(f64, Vec<f64>), String> {
    let p = relax_problem();
    let exact = relax_exact(1.0);
    let opts = SolveOptions {
        t0: Some(1e-9),
        ..solve_opts(o)
    };
    let mut errors = Vec::new();
    for intervals in [8usize, 16, 32, 64, 128] {
        let tr = solve_fixed(&p, 1.0, intervals, &opts).map_err(|e| e.to_string())?;
        errors.push((tr.endpoint() - exact).abs());
    }
    // least-squares slope of log2(error) against log2(intervals)
    let pts: Vec<(f64, f64)> = errors
        .iter()
        .enumerate()
        .map(|(i, e)| ((3 + i) as f64, e.log2()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok((-sxy / sxx, errors))
}

fn convergence_order(o: &OracleOptions) -> OracleOutcome {
    const NAME: &str = "convergence_order";
    match measured_order(o) {
        Ok((order, errors)) => OracleOutcome::new(
            NAME,
            (3.5..=4.5).contains(&order),
            order,
            "in [3.5, 4.5]",
            format!("f = t - x, g = 1 + t; endpoint errors {}", sci_list(&errors)),
        ),
        Err(e) => OracleOutcome::failed(NAME, e),
    }
}

fn trivial_branch(o: &OracleOptions) -> OracleOutcome {
    const NAME: &str = "trivial_branch";
    let p = FnProblem::new(|x, _| 0.5 * x, |_, _| 0.5, |_, _| 0.0, |_, _| 1.0, 0.0, 1.0);
    match solve_with(&p, 1.0, o.tol, &solve_opts(o)) {
        Ok(tr) => {
            let sup = tr.values.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
            OracleOutcome::new(
                NAME,
                sup <= 1e-10,
                sup,
                "<= 1e-10",
                "f = x/2, g = 1: C1 branch is x = 0 although c*t^(1/2) also solve",
            )
        }
        Err(e) => OracleOutcome::failed(NAME, e.to_string()),
    }
}

fn quadratic_branch(o: &OracleOptions) -> OracleOutcome {
    const NAME: &str = "quadratic_branch";
    let p = FnProblem::new(|x, _| x * x, |x, _| 2.0 * x, |_, _| 0.0, |_, _| 1.0, 0.0, 1.0);
    match solve_with(&p, 1.0, o.tol, &solve_opts(o)) {
        Ok(tr) => {
            let sup = tr.values.iter().fold(tr.slope0.abs(), |a, x| a.max(x.abs()));
            OracleOutcome::new(NAME, sup <= 1e-10, sup, "<= 1e-10", "f = x^2, g = 1: C1 branch is x = 0")
        }
        Err(e) => OracleOutcome::failed(NAME, e.to_string()),
    }
}

fn manufactured_slopes(o: &OracleOptions) -> OracleOutcome {
    const NAME: &str = "manufactured_slopes";
    let opts = solve_opts(o);
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for m in manufactured_set() {
        let slope = match initial_slope_shifted(&m, o.theta_shift) {
            Ok(s) => s,
            Err(e) => return OracleOutcome::failed(NAME, format!("{}: {e}", m.name)),
        };
        // second-order one-sided difference quotients of the exact solution
        // and of the computed trajectory on a grid of step h
        let exact_dq = (-3.0 * (m.exact)(0.0) + 4.0 * (m.exact)(h) - (m.exact)(2.0 * h)) / (2.0 * h);
        let tr = match solve_fixed(&m, 2.0 * h, 2, &opts) {
            Ok(tr) => tr,
            Err(e) => return OracleOutcome::failed(NAME, format!("{}: {e}", m.name)),
        };
        let n = tr.values.len();
        let (x1, x2) = (tr.values[n - 2], tr.values[n - 1]);
        let solver_dq = (-3.0 * m.x0() + 4.0 * x1 - x2) / (2.0 * h);
        let err = (slope - exact_dq).abs().max((slope - solver_dq).abs());
        notes.push(format!("{}={err:.1e}", m.name));
        worst = worst.max(err);
    }
    OracleOutcome::new(NAME, worst <= 1e-6, worst, "<= 1e-6", notes.join(" "))
}

fn eps_cauchy(o: &OracleOptions) -> OracleOutcome {
    const NAME: &str = "eps_cauchy";
    let p = FnProblem::linear(1.0, 0.5, 1.0);
    let reference = match solve_with(&p, 1.0, o.tol, &solve_opts(o)) {
        Ok(tr) => tr.endpoint(),
        Err(e) => return OracleOutcome::failed(NAME, e.to_string()),
    };
    let mut gaps = Vec::new();
    for eps in [1e-3, 1e-4, 1e-5] {
        match solve_regularized(&p, eps, 1e-3, 1.0) {
            Ok(tr) => gaps.push((tr.endpoint() - reference).abs()),
            Err(e) => return OracleOutcome::failed(NAME, format!("eps={eps}: {e}")),
        }
    }
    let ratio = (gaps[1] / gaps[0]).max(gaps[2] / gaps[1]);
    OracleOutcome::new(
        NAME,
        ratio < 1.0,
        ratio,
        "< 1",
        format!("|x_eps(1) - x(1)| = {} for eps = 1e-3, 1e-4, 1e-5", sci_list(&gaps)),
    )
}

fn continuation(o: &OracleOptions) -> OracleOutcome {
    const NAME: &str = "continuation_linear";
    let mut worst: f64 = 0.0;
    for i in 0..=19 {
        let theta = -1.0 + 0.1 * i as f64;
        let p = FnProblem::linear(1.0, theta, 1.0);
        match solve_with(&p, 1.0, o.tol, &solve_opts(o)) {
            Ok(tr) => worst = worst.max((tr.endpoint() - 1.0 / (1.0 - theta)).abs()),
            Err(e) => return OracleOutcome::failed(NAME, format!("theta={theta}: {e}")),
        }
    }
    OracleOutcome::new(
        NAME,
        worst <= 10.0 * o.tol,
        worst,
        format!("<= {:e}", 10.0 * o.tol),
        "f = t + theta*x, theta in [-1, 0.9]: x(1) = 1/(1 - theta)",
    )
}

/// Runs every oracle and returns one outcome each, in a fixed order.
pub fn run_oracle_suite(o: &OracleOptions) -> Vec<OracleOutcome> {
    vec![
        linear_exact(o),
        relaxation_exact(o),
        convergence_order(o),
        trivial_branch(o),
        quadratic_branch(o),
        manufactured_slopes(o),
        eps_cauchy(o),
        continuation(o),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manufactured_slopes_equal_exact_derivative() {
        for m in manufactured_set() {
            let s = super::super::initial_slope(&m).unwrap();
            assert!((s - (m.exact_d)(0.0)).abs() < 1e-14, "{}", m.name);
            assert!(super::super::validate(&m).unwrap() < 1.0);
        }
    }

    #[test]
    fn manufactured_f_is_consistent() {
        // f_t against a central difference of f
        for m in manufactured_set() {
            let (x, t, h) = (0.3, 0.4, 1e-6);
            let fd = (m.f(x, t + h) - m.f(x, t - h)) / (2.0 * h);
            assert!((m.f_t(x, t) - fd).abs() < 1e-7, "{}", m.name);
        }
    }

    #[test]
    fn relax_closed_form_satisfies_ode() {
        for t in [0.1, 0.5, 1.0, 1.7] {
            let h = 1e-6;
            let d = (relax_exact(t + h) - relax_exact(t - h)) / (2.0 * h);
            let rhs = (t - relax_exact(t)) / (t + 0.5 * t * t);
            assert!((d - rhs).abs() < 1e-8);
        }
    }

    #[test]
    fn suite_passes() {
        let out = run_oracle_suite(&OracleOptions::default());
        assert!(out.len() >= 5);
        for o in &out {
            assert!(o.passed, "{o:?}");
        }
    }

    #[test]
    fn shifted_theta_breaks_linear_oracle() {
        let o = OracleOptions {
            theta_shift: 1e-3,
            ..Default::default()
        };
        assert!(!linear_exact(&o).passed);
    }
}
