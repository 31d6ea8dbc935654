fn main() {
    std::process::exit(netosc::cli::main());
}
