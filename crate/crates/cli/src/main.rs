fn main() {
    std::process::exit(enwidth_cli::run(std::env::args_os()));
}
