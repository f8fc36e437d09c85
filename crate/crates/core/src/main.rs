fn main() {
    std::process::exit(calabi::cli::main_from_args(std::env::args_os()));
}
