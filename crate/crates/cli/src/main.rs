fn main() {
    std::process::exit(aad_cli::dispatch(std::env::args_os()));
}
