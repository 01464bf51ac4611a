fn main() {
    std::process::exit(gpfactor::cli::main_with_args(std::env::args_os()));
}
