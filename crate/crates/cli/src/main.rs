fn main() {
    std::process::exit(curvepipe_cli::execute(std::env::args_os()));
}
