fn main() {
    std::process::exit(distill_core::cli::cli_main(std::env::args_os()));
}
