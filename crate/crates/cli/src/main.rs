fn main() {
    std::process::exit(isospec_cli::run(std::env::args_os()));
}
