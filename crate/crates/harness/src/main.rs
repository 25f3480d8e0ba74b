fn main() {
    std::process::exit(rada_harness::cli::cli_main(std::env::args()));
}
