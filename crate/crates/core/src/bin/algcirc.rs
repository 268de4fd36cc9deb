fn main() {
    std::process::exit(algcirc::cli::run(std::env::args_os()));
}
