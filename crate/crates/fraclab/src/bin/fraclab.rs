fn main() {
    std::process::exit(fraclab::cli::cli_main(std::env::args().skip(1)));
}
