fn main() {
    std::process::exit(orthovar::cli::main_with(std::env::args_os()));
}
