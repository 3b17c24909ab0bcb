fn main() {
    std::process::exit(plaplace::cli::main());
}
