fn main() {
    std::process::exit(stdp::cli::run());
}
