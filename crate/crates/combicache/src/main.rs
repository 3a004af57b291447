fn main() {
    std::process::exit(combicache::cli::run(std::env::args_os()));
}
