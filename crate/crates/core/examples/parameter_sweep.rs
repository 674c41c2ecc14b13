//! Runs the `sweep` command over the mobility axis without simulations and
//! prints the resulting table.

fn main() {
    let out = std::env::temp_dir().join("radial-tumor-sweep-example");
    let code = radial_tumor::cli::run_from_args([
        "radial-tumor",
        "sweep",
        "--param",
        "sweep.simulate=false",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    print!("{}", std::fs::read_to_string(out.join("sweep.csv")).unwrap());
}
