fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(cvgn::cli::run(&argv));
}
