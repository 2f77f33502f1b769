fn main() {
    std::process::exit(filterstab::cli::main_with_args(std::env::args_os()));
}
