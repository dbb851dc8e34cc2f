fn main() {
    std::process::exit(crossmeasure::cli::run());
}
