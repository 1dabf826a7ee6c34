fn main() {
    std::process::exit(portopt::cli::run_cli(std::env::args().skip(1)));
}
