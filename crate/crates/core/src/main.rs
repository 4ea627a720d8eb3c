fn main() {
    std::process::exit(ternaryq::cli::run());
}
