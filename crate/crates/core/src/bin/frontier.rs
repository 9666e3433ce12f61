fn main() {
    std::process::exit(frontier_core::cli::main());
}
