fn main() {
    std::process::exit(mazurlab::cli::run(std::env::args_os()));
}
