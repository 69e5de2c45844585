fn main() {
    std::process::exit(littlewood_cli::main_with_args(std::env::args_os()));
}
