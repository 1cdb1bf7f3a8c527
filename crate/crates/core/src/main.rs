fn main() {
    std::process::exit(vrsmooth::cli::run(std::env::args_os()));
}
