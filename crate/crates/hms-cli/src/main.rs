fn main() {
    std::process::exit(hms_cli::dispatch(std::env::args_os()));
}
