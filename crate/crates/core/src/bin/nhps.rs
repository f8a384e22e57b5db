fn main() {
    std::process::exit(nhps::cli::run(std::env::args_os()));
}
