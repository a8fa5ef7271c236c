fn main() {
    std::process::exit(tame_density::cli::main_with_args(std::env::args_os()));
}
