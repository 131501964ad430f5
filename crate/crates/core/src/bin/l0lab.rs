fn main() {
    std::process::exit(l0lab::cli::run_cli(std::env::args_os()));
}
