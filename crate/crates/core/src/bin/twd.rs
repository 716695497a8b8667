fn main() {
    std::process::exit(twd::cli::main_with_args(std::env::args_os()));
}
