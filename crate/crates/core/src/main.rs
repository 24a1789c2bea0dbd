fn main() {
    let code = propint_core::cli::run(std::env::args_os());
    std::process::exit(code);
}
