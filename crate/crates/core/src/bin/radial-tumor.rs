fn main() {
    std::process::exit(radial_tumor::cli::run_from_args(std::env::args_os()));
}
