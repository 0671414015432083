fn main() {
    std::process::exit(hgsp::harness::cli_main(std::env::args_os()));
}
