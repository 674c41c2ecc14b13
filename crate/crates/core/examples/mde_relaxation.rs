//! A spatially constant MDE profile relaxes to α/β like the scalar ODE.

use radial_tumor::stationary::solve_stationary;
use radial_tumor::timedep::{simulate, InitialData, RadialProfile, SimOptions};
use radial_tumor::Model;

fn main() {
    let model = Model::default();
    let p = model.params;
    let reference = solve_stationary(&model, 1024).unwrap();
    let mut init = InitialData::from_stationary(&reference, 128);
    let m0 = 2.0 * p.m_steady();
    init.m0 = RadialProfile::constant(128, m0);
    let opts = SimOptions {
        t_end: 5.0,
        cadence: 0.5,
        ..Default::default()
    };
    let series = simulate(&model, &init, &opts, None).unwrap();
    for snap in &series.snapshots {
        let exact = p.m_steady() + (m0 - p.m_steady()) * (-p.beta * snap.t).exp();
        println!("t={:.1} max m={:.6} min m={:.6} ode={exact:.6}", snap.t, snap.m.max(), snap.m.min());
    }
}
