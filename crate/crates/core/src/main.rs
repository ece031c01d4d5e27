fn main() {
    std::process::exit(stmc::cli::main_with(std::env::args_os()));
}
