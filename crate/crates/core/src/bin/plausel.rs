fn main() {
    std::process::exit(plausel::cli::main_with_args(std::env::args_os()));
}
