fn main() {
    std::process::exit(sciforge_cli::dispatch(std::env::args_os()));
}
