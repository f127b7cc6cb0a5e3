fn main() {
    std::process::exit(delayid::cli::main_with_args(std::env::args_os()));
}
