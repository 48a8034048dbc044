fn main() {
    std::process::exit(spinscatter::cli::main_with_args(std::env::args_os()));
}
