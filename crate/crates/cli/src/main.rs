fn main() {
    std::process::exit(titleval_cli::cli_main(std::env::args_os()));
}
