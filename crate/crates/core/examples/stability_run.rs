//! Perturbs the stationary ECM profile by 5% and follows the relaxation.
//! Pass `10` as the first argument for the high-mobility case.

use radial_tumor::stationary::solve_stationary;
use radial_tumor::timedep::{convergence_verdict, simulate, InitialData, Perturbation, SimOptions};
use radial_tumor::{Model, ModelParams};

fn main() {
    let mu: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.5);
    let model = Model::new(ModelParams::default().with_mu(mu));
    let reference = solve_stationary(&model, 2048).unwrap();
    let init = InitialData::perturbed(&reference, 256, &Perturbation::Uniform { amplitude: 0.05 });
    let opts = SimOptions {
        dt: 2e-3,
        t_end: 20.0,
        cadence: 2.0,
        ..Default::default()
    };
    let series = simulate(&model, &init, &opts, Some(&reference)).unwrap();
    for snap in &series.snapshots {
        let rec = series.scalars.iter().find(|s| s.t == snap.t).unwrap();
        let d = rec.distance.unwrap();
        println!(
            "t={:>5.1} R={:.8} sup|sigma|={:.2e} sup|E|={:.2e} sup|m|={:.2e} E in [{:.4}, {:.4}]",
            snap.t,
            snap.radius,
            d.sup_sigma,
            d.sup_e,
            d.sup_m,
            snap.e.min(),
            snap.e.max()
        );
    }
    let v = convergence_verdict(&series, 1e-2, 1e-12).unwrap();
    println!("converged: {} (final sup {:.3e})", v.converged, v.final_sup);
}
