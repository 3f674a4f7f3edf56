fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(forge::cli::run_cli(&args));
}
