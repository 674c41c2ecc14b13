//! Inward shoots at fixed radius: below `R*` the shoot reaches the center
//! with `I(0) < 0`; above it the velocity vanishes at `τ(R) > 0`.

use radial_tumor::stationary::{shoot, GridOptions};
use radial_tumor::Model;

fn main() {
    let model = Model::default();
    let grid = GridOptions::with_n(1024);
    println!("{:>6} {:>12} {:>10} {:>14} termination", "R", "tau", "tau/R", "I(0)");
    for r in [0.5, 1.0, 1.5, 1.9, 1.9634766, 2.0, 3.0, 4.0, 5.0, 6.0] {
        let s = shoot(&model, r, &grid).unwrap();
        let i0 = s.i_center().map_or("-".to_string(), |i| format!("{i:.4e}"));
        println!("{r:>6} {:>12.6} {:>10.6} {i0:>14} {:?}", s.tau, s.tau / r, s.termination);
    }
}
