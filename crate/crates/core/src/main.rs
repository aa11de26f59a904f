fn main() {
    std::process::exit(mwis::cli::run_cli(std::env::args_os()));
}
