fn main() {
    std::process::exit(doccat_cli::run(std::env::args_os()));
}
