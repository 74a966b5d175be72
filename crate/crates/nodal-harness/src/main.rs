fn main() {
    std::process::exit(nodal_harness::cli::run());
}
