fn main() {
    std::process::exit(bdperm::cli::main_with(std::env::args_os()));
}
