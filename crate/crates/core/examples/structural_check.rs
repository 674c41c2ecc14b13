//! Root `h(σ, α/β)` of the reaction term and the structural conditions for
//! the three mobility cases.

use radial_tumor::model::{SampleBox, H_ROOT_TOL};
use radial_tumor::{Model, ModelParams};

fn main() {
    for mu in [0.5, 3.0, 10.0] {
        let model = Model::new(ModelParams::default().with_mu(mu));
        let m = model.params.m_steady();
        let h: Vec<String> = [0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|&s| format!("h({s})={:.6}", model.h_root(s, m, H_ROOT_TOL).unwrap()))
            .collect();
        let report = model.check_structural(&SampleBox::default());
        println!(
            "mu={mu}: {}; structural conditions {} ({} violations in {} samples)",
            h.join(" "),
            if report.holds() { "hold" } else { "fail" },
            report.violations.len(),
            report.samples
        );
        for w in model.params.range_warnings() {
            println!("  warning: {w}");
        }
    }
}
