fn main() {
    std::process::exit(conjmatch::cli::run(std::env::args_os()));
}
