//! Solves `x' = f(x, t) / ∫₀ᵗ g` on its C¹ branch and runs the oracle suite.

use radial_tumor::singular_ivp::{initial_slope, run_oracle_suite, solve, FnProblem, OracleOptions};

fn main() {
    // f = sin t + x/2, g = 1: the C¹ branch starts with slope 2
    let p = FnProblem::new(|x, t| t.sin() + 0.5 * x, |_, _| 0.5, |_, t| t.cos(), |_, _| 1.0, 0.0, 1.0);
    println!("start slope {}", initial_slope(&p).unwrap());
    let traj = solve(&p, 1.0, 1e-10).unwrap();
    println!("x(1) = {:.12} on {} nodes", traj.endpoint(), traj.times.len());

    for o in run_oracle_suite(&OracleOptions::default()) {
        println!("{} {:<22} {:e}  {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.metric, o.detail);
    }
}
