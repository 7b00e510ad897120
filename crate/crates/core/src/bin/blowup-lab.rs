fn main() {
    std::process::exit(elliptic_blowup::cli::main_with_args(std::env::args_os()));
}
