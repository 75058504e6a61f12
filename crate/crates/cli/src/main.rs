fn main() {
    std::process::exit(qcdual_cli::run(std::env::args_os()));
}
