fn main() {
    std::process::exit(uqchain::cli::run(std::env::args_os()));
}
