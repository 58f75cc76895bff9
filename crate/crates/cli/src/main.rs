fn main() {
    std::process::exit(vecopt_cli::run(std::env::args_os()));
}
