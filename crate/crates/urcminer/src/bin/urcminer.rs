fn main() {
    std::process::exit(urcminer::cli::main_with_args(std::env::args_os()));
}
