fn main() {
    std::process::exit(cone_auglag_cli::run(std::env::args_os()));
}
