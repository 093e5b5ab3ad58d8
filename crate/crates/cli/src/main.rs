fn main() {
    std::process::exit(turan_cli::run(std::env::args_os()));
}
