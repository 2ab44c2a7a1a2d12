fn main() {
    std::process::exit(poincare_lab::cli::run(std::env::args()));
}
