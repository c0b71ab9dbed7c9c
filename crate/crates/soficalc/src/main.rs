fn main() {
    std::process::exit(soficalc::cli::run(std::env::args().skip(1)));
}
