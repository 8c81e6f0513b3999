fn main() {
    std::process::exit(cgx::cli::main_with_args(std::env::args_os()));
}
