fn main() {
    std::process::exit(lowdim_maxcut::cli::main_with_args(std::env::args_os()));
}
