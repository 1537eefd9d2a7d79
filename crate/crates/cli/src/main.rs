fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(fhl_cli::run(argv));
}
