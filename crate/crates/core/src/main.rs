fn main() {
    std::process::exit(eichler_core::cli::main())
}
