fn main() {
    std::process::exit(disfix::cli::run(std::env::args_os()));
}
