fn main() {
    std::process::exit(mirrorcount::cli::run(std::env::args_os()));
}
