fn main() {
    std::process::exit(foldnet::cli::main_with_args(std::env::args_os()));
}
