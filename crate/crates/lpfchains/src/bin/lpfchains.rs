fn main() {
    std::process::exit(lpfchains::cli::main());
}
