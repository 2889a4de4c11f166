fn main() {
    std::process::exit(locspec::cli::run(std::env::args_os()));
}
