fn main() {
    std::process::exit(kw4::cli::run(std::env::args_os()));
}
