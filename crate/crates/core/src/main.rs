fn main() {
    std::process::exit(lorgeo::cli::run(std::env::args_os()));
}
