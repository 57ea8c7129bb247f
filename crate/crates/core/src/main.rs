fn main() {
    std::process::exit(besicovitch_lab::cli::main_with_args(std::env::args_os()));
}
