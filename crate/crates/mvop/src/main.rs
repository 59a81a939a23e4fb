fn main() {
    std::process::exit(mvop::cli::main());
}
