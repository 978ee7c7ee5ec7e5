fn main() {
    std::process::exit(cocomp::cli::run(std::env::args_os()));
}
