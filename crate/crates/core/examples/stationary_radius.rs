//! Stationary radius and profiles for the three mobility cases.

use radial_tumor::stationary::solve_stationary;
use radial_tumor::{Model, ModelParams};

fn main() {
    for mu in [0.5, 3.0, 10.0] {
        let model = Model::new(ModelParams::default().with_mu(mu));
        let sol = solve_stationary(&model, 1024).expect("stationary solution");
        let (lo, hi) = sol.e.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &e| (a.min(e), b.max(e)));
        let u_min = sol.u.iter().copied().fold(0.0, f64::min);
        println!(
            "mu={mu}: R*={:.8}, E in [{lo:.4}, {hi:.4}], min u={u_min:.4e}, residuals {:?}",
            sol.r_star, sol.residuals
        );
    }
    let sol = solve_stationary(&Model::default(), 64).unwrap();
    println!("\nprofile at mu=0.5 on 64 intervals:");
    sol.write_csv(std::io::stdout()).unwrap();
}
