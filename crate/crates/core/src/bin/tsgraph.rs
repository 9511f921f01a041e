fn main() {
    std::process::exit(tsgraph::cli::run(std::env::args_os()));
}
