fn main() {
    std::process::exit(hyperlab::cli::run());
}
