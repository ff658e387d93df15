fn main() {
    std::process::exit(aniso_ns::cli::run(std::env::args_os()));
}
