fn main() {
    std::process::exit(pch::cli::run(std::env::args_os()));
}
