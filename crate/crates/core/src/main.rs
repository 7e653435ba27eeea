fn main() {
    std::process::exit(infsup::cli::run(std::env::args_os()));
}
