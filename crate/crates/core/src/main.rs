fn main() {
    std::process::exit(netreserve::cli::main_with_args(std::env::args_os()));
}
