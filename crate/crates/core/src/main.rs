fn main() {
    std::process::exit(chartlex::cli::run(std::env::args()));
}
