fn main() {
    std::process::exit(focuswave::cli::run(std::env::args_os()));
}
