fn main() {
    std::process::exit(pgfluct::cli::run(std::env::args_os()));
}
