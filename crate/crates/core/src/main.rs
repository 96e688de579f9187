fn main() {
    std::process::exit(dyckgf::cli::run(std::env::args_os()));
}
