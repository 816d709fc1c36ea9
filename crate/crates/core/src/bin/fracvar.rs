fn main() {
    std::process::exit(fracvar::cli::run(std::env::args_os()));
}
