fn main() {
    std::process::exit(ssga_cli::run(std::env::args_os()));
}
