fn main() {
    std::process::exit(switchtest::cli::run_from_args(std::env::args_os()));
}
