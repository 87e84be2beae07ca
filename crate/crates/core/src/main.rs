fn main() {
    std::process::exit(arrowlab::cli::main());
}
