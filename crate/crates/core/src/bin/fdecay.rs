fn main() {
    std::process::exit(fidelity_decay::cli::main());
}
