fn main() {
    std::process::exit(heat_logic::cli::main_with_args(std::env::args_os()));
}
