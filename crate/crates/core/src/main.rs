fn main() {
    std::process::exit(ggroup::cli::run(std::env::args_os()));
}
