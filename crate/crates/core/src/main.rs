fn main() {
    std::process::exit(bidisc::cli::run(std::env::args_os()));
}
