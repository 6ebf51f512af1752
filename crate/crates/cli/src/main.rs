fn main() {
    std::process::exit(filtermin_cli::run(std::env::args_os()));
}
