fn main() {
    std::process::exit(prcurve::cli::run(std::env::args_os()));
}
