fn main() {
    std::process::exit(nearly_toeplitz::cli::run(std::env::args_os()));
}
