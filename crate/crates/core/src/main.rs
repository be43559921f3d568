fn main() {
    std::process::exit(mailsleuth::cli::main_with_args(std::env::args_os()));
}
