fn main() {
    std::process::exit(edgemorph_cli::run(std::env::args_os()));
}
