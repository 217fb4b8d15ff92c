fn main() {
    std::process::exit(kaclab_cli::main_with(std::env::args_os()));
}
