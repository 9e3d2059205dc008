fn main() {
    std::process::exit(bqp_admm::cli::run());
}
