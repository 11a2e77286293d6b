fn main() {
    std::process::exit(bethe_iba::cli::run());
}
