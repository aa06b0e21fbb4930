fn main() {
    std::process::exit(spinfiber::cli::run(std::env::args().collect()));
}
