fn main() {
    std::process::exit(blindspot::cli::main_with_args(std::env::args_os()));
}
